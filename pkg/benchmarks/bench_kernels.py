"""Time the compiled counting kernels against the pure Python ones.

    python3 benchmarks/bench_kernels.py --n 128,512,2048 --repeat 5
"""
import argparse
import timeit

from eqwalk import _fallback
from eqwalk.geometry import BACKEND
from eqwalk.rng import SeedSpec
from eqwalk.sampler import sample_walk

try:
    from eqwalk import _kernels
except ImportError:
    _kernels = None


def best_ms(fn, repeat):
    t = timeit.Timer(fn)
    loops, _ = t.autorange()
    return min(t.repeat(repeat, loops)) / loops * 1e3


def main():
    ap = argparse.ArgumentParser(formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--n", default="128,512,1024,2048", help="walk lengths")
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats (best is kept)")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    backends = [("python", _fallback)]
    if _kernels is not None:
        backends.insert(0, ("compiled", _kernels))
    print(f"active backend: {BACKEND}")
    print(f"{'n':>6} {'kernel':>8} " + " ".join(f"{name:>12}" for name, _ in backends) + "   speedup")
    for n in (int(t) for t in args.n.split(",")):
        v = sample_walk(n, SeedSpec(args.seed, n)).vertices.copy()
        for kernel in ("naive", "sweep"):
            times = []
            counts = set()
            for _, mod in backends:
                fn = getattr(mod, f"count_{kernel}")
                counts.add(fn(v, False)[0])
                times.append(best_ms(lambda: fn(v, False), args.repeat))
            if len(counts) != 1:
                raise SystemExit(f"backends disagree at n={n} ({kernel}): {sorted(counts)}")
            speed = f"{times[-1] / times[0]:8.1f}x" if len(times) == 2 else "       -"
            print(f"{n:>6} {kernel:>8} " + " ".join(f"{t:10.3f}ms" for t in times) + f" {speed}")


if __name__ == "__main__":
    main()
