import json
import math

import numpy as np
import pytest

from eqwalk._fallback import crosses
from eqwalk.analytic import TWO_OVER_PI2
from eqwalk.experiments import (
    CSV_FIELDS,
    EM_BLOCK,
    GapConfiguration,
    RunConfig,
    StatsAccumulator,
    SummaryStats,
    em_block_sizes,
    estimate_em_probability,
    fit_nlogn_coefficient,
    format_csv,
    persist_results,
    probe_covariance,
    read_results,
    run_mean_experiment,
    run_variance_experiment,
)
from eqwalk.rng import SeedSpec

# Pr[E_25] from integrating the 25-step radial distribution function over the
# (psi, phi) region below rho, on a 4000^2 midpoint grid.
EXACT_E25 = 0.0077456


# ------------------------------------------------------------ statistics

def test_summary_stats_exact_on_small_list():
    s = SummaryStats.from_counts(5, [1, 2, 3, 4, 10])
    assert s.mean == 4.0
    assert s.variance == 12.5
    assert s.std_error == math.sqrt(12.5 / 5)
    assert (s.min, s.max, s.samples) == (1, 10, 5)


def test_accumulator_is_exact_for_large_counts():
    big = 10 ** 12
    s = SummaryStats.from_counts(1, [big, big + 1, big + 2])
    assert s.variance == 1.0
    assert s.mean == float(big + 1)


def test_accumulator_merge_and_add_many():
    xs = list(range(50))
    a, b, c = StatsAccumulator(), StatsAccumulator(), StatsAccumulator()
    for x in xs[:20]:
        a.add(x)
    b.add_many(xs[20:])
    c.add_many(xs)
    a.merge(b)
    a.merge(StatsAccumulator())
    assert a.result(1) == c.result(1)


def test_summary_stats_invariants():
    with pytest.raises(ValueError):
        StatsAccumulator().result(1)
    with pytest.raises(ValueError):
        SummaryStats(1, 2, 5.0, 1.0, 1.0, 0, 3)
    with pytest.raises(ValueError):
        SummaryStats(1, 2, 1.0, -1.0, 1.0, 0, 3)


# ---------------------------------------------------------------- configs

@pytest.mark.parametrize("kwargs", [
    dict(kind="knot"),
    dict(n_grid=[64, 32]),
    dict(n_grid=[]),
    dict(samples_per_n=1),
    dict(counter="fast"),
    dict(polygon_sampler="gibbs"),
    dict(threads=0),
    dict(kind="polygon", n_grid=[2, 8]),
    dict(kind="polygon", n_grid=[4, 8]),
])
def test_run_config_validation(kwargs):
    base = dict(kind="walk", n_grid=[8, 16], samples_per_n=10, base_seed=1, threads=1)
    base.update(kwargs)
    with pytest.raises(ValueError):
        RunConfig(**base)


def test_mcmc_config_allows_four_gons():
    cfg = RunConfig("polygon", [4], 10, 1, polygon_sampler="mcmc", threads=1)
    assert run_mean_experiment(cfg)[0].max == 0


def test_trivial_means():
    walks = run_mean_experiment(RunConfig("walk", [1, 2], 50, 3, threads=2))
    assert [r.mean for r in walks] == [0.0, 0.0]
    tri = run_mean_experiment(RunConfig("polygon", [3], 50, 3, threads=2))[0]
    assert tri.mean == 0.0 and tri.max == 0


def test_thread_count_does_not_change_results():
    cfgs = [RunConfig("walk", [16, 64], 60, 9, threads=t) for t in (1, 4)]
    assert format_csv(run_mean_experiment(cfgs[0])) == format_csv(run_mean_experiment(cfgs[1]))
    cfgs = [RunConfig("polygon", [8], 40, 9, threads=t) for t in (1, 3)]
    assert run_mean_experiment(cfgs[0]) == run_mean_experiment(cfgs[1])


def test_counters_agree_inside_experiments():
    a = run_mean_experiment(RunConfig("walk", [100], 40, 2, counter="naive", threads=1))[0]
    b = run_mean_experiment(RunConfig("walk", [100], 40, 2, counter="sweep", threads=1))[0]
    assert (a.mean, a.variance) == (b.mean, b.variance)
    assert (a.counter, b.counter) == ("naive", "sweep")


def test_metadata_and_timing():
    rows = run_mean_experiment(RunConfig("walk", [10], 5, 77, threads=1))
    assert (rows[0].kind, rows[0].seed, rows[0].sampler, rows[0].wall_ms) == ("walk", 77, "", None)
    rows = run_mean_experiment(RunConfig("walk", [10], 5, 77, threads=1, timing=True))
    assert rows[0].wall_ms > 0


def test_variance_experiment():
    with pytest.raises(ValueError):
        run_variance_experiment(RunConfig("walk", [16], 100, 1, threads=1))
    rows = run_variance_experiment(RunConfig("walk", [2, 64, 128], 400, 5, threads=1))
    assert rows[0].variance == 0.0
    assert all(r.variance >= 0 for r in rows)
    assert rows[2].variance / rows[1].variance < 8


def test_polygon_and_walk_means_agree_at_512():
    n = 512
    w = run_mean_experiment(RunConfig("walk", [n], 200, 31, threads=1))[0]
    p = run_mean_experiment(RunConfig("polygon", [n], 200, 31, threads=1))[0]
    assert abs(w.mean - p.mean) / (n * math.log(n)) < 0.1


# -------------------------------------------------------------------- fit

def _row(n, mean, se=1.0):
    return SummaryStats(n, 100, mean, 0.0 if se == 0 else se * se * 100, se, math.floor(mean), math.ceil(mean))


@pytest.mark.parametrize("se", [1.0, 0.0])
def test_fit_recovers_exact_model(se):
    rows = [_row(n, TWO_OVER_PI2 * n * math.log(n) + 0.5 * n, se) for n in (64, 128, 256, 512, 1024)]
    c, b, c_se = fit_nlogn_coefficient(rows)
    assert c == pytest.approx(TWO_OVER_PI2, abs=1e-12)
    assert b == pytest.approx(0.5, abs=1e-10)
    assert c_se >= 0


def test_fit_linear_means():
    c, b, _ = fit_nlogn_coefficient([_row(n, 7.0 * n) for n in (10, 20, 40)])
    assert c == pytest.approx(0.0, abs=1e-12)
    assert b == pytest.approx(7.0, abs=1e-12)


def test_fit_weights_follow_standard_errors():
    rows = [_row(10, 10.0, 0.01), _row(20, 40.0, 0.01), _row(40, 40.0 * 4, 100.0)]
    c_heavy, _, _ = fit_nlogn_coefficient(rows)
    # mean/n is 1 and 2 at the two trusted points
    c_two = (2.0 - 1.0) / (math.log(20) - math.log(10))
    assert c_heavy == pytest.approx(c_two, rel=1e-6)


def test_fit_rejects_single_n():
    with pytest.raises(ValueError):
        fit_nlogn_coefficient([_row(10, 5.0), _row(10, 6.0)])


# ------------------------------------------------------------- E_m probes

def _brute_em(m, samples, seed):
    hits = 0
    for b, size in enumerate(em_block_sizes(samples)):
        g = seed.generator(b)
        for _ in range(size):
            u = g.random(m + 2)
            qx = qy = 0.0
            for k in range(m):
                qx += math.cos(2 * math.pi * u[k])
                qy += math.sin(2 * math.pi * u[k])
            th = math.atan2(qy, qx)
            s = th + math.pi * (2 * u[m] - 1)
            t = th + math.pi - math.pi * (2 * u[m + 1] - 1)
            hits += crosses(0.0, 0.0, math.cos(s), math.sin(s),
                            qx, qy, qx + math.cos(t), qy + math.sin(t))
    return hits


def test_em_matches_brute_force_resimulation():
    seed = SeedSpec(123)
    est = estimate_em_probability(10, 100_000, seed)
    assert est.mean == _brute_em(10, 100_000, seed) / 100_000
    assert 0.0 <= est.mean <= 1.0


def test_em_threads_and_blocks():
    assert em_block_sizes(EM_BLOCK + 3) == [EM_BLOCK, 3]
    a = estimate_em_probability(6, 150_000, SeedSpec(4), threads=1)
    b = estimate_em_probability(6, 150_000, SeedSpec(4), threads=3)
    assert a == b
    assert estimate_em_probability(6, 1000, 4).seed == 4


def test_em_validation():
    with pytest.raises(ValueError):
        estimate_em_probability(0, 1000, 1)
    with pytest.raises(ValueError):
        estimate_em_probability(5, 999, 1)


def test_em_agrees_with_exact_value_at_25():
    est = estimate_em_probability(25, 1_000_000, SeedSpec(2024))
    assert abs(est.mean - EXACT_E25) < 4 * est.std_error


def test_em_one_over_m_law():
    a = estimate_em_probability(25, 400_000, SeedSpec(8))
    b = estimate_em_probability(50, 400_000, SeedSpec(9))
    ratio = a.mean / b.mean
    se = ratio * math.hypot(a.std_error / a.mean, b.std_error / b.mean)
    assert abs(ratio - 2.0) < 4 * se


# ------------------------------------------------------ covariance probes

def test_gap_configuration_layout():
    g = GapConfiguration(2, 3, 4, 1, "nested")
    assert g.indices() == (1, 4, 8, 13)
    assert g.pairs() == ((4, 8), (1, 13))
    assert GapConfiguration(2, 3, 4, 1, "interleaved").pairs() == ((1, 8), (4, 13))
    assert GapConfiguration(2, 3, 4, 1, "disjoint").pairs() == ((1, 4), (8, 13))
    assert g.span == 14
    with pytest.raises(ValueError):
        GapConfiguration(0, 1, 1, 1, "nested")
    with pytest.raises(ValueError):
        GapConfiguration(1, 1, 1, 1, "crossed")


def test_gap_configuration_fit_checks():
    g = GapConfiguration(2, 3, 4, 1, "nested")
    g.check_fits(14, "walk")
    g.check_fits(20, "walk")
    g.check_fits(14, "polygon")
    with pytest.raises(ValueError):
        g.check_fits(13, "walk")
    with pytest.raises(ValueError):
        g.check_fits(15, "polygon")
    with pytest.raises(ValueError):
        probe_covariance(13, g, 100, 1)


def test_predictions_by_pattern():
    assert GapConfiguration(32, 8, 32, 1, "nested").predicted() == (TWO_OVER_PI2 / 8, TWO_OVER_PI2 / 64)
    assert GapConfiguration(3, 6, 4, 1, "interleaved").predicted() == (TWO_OVER_PI2 / 10, TWO_OVER_PI2 / 6)


def test_disjoint_walk_covariance_vanishes():
    g = GapConfiguration(4, 4, 4, 1, "disjoint")
    r = probe_covariance(g.span, g, 200_000, SeedSpec(6))
    assert abs(r.covariance) < 4 * r.std_errors["covariance"]
    for p in (r.p_first, r.p_second, r.p_joint, r.p_second_given_first):
        assert 0.0 <= p <= 1.0
    assert r.p_joint <= min(r.p_first, r.p_second_given_first + 3 * r.std_errors["p_second_given_first"])


def test_probe_counts_match_direct_counting():
    g = GapConfiguration(1, 2, 1, 1, "nested")
    r = probe_covariance(9, g, 5000, SeedSpec(1))
    assert r.first_hits == round(r.p_first * 5000)
    assert r.joint_hits <= r.first_hits
    assert r.covariance == pytest.approx(r.p_joint - r.p_first * r.p_second)


@pytest.mark.parametrize("sampler", ["conditional", "mcmc"])
def test_polygon_probe_runs_and_is_thread_independent(sampler):
    g = GapConfiguration(2, 2, 2, 2, "interleaved")
    a = probe_covariance(12, g, 600, SeedSpec(3), kind="polygon", sampler=sampler, threads=1)
    b = probe_covariance(12, g, 600, SeedSpec(3), kind="polygon", sampler=sampler, threads=4)
    assert a == b
    assert 0.0 < a.p_first < 1.0


def test_probe_argument_checks():
    g = GapConfiguration(1, 1, 1, 1, "nested")
    with pytest.raises(ValueError):
        probe_covariance(8, g, 100, 1, kind="tree")
    with pytest.raises(ValueError):
        probe_covariance(8, g, 100, 1, sampler="x")
    with pytest.raises(ValueError):
        probe_covariance(8, g, 1, 1)


# ------------------------------------------------------------ persistence

def test_empty_csv_is_header_only(tmp_path):
    p = tmp_path / "e.csv"
    persist_results([], p)
    assert p.read_text() == ",".join(CSV_FIELDS) + "\n"
    assert read_results(p) == []
    persist_results([], tmp_path / "e.json", "json")
    assert json.loads((tmp_path / "e.json").read_text()) == []


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(tmp_path, fmt):
    rows = run_mean_experiment(RunConfig("walk", [20, 40], 30, 12, threads=1, timing=True))
    rows.append(SummaryStats(7, 3, 1 / 3, 1 / 3, math.sqrt(1 / 9), 0, 1, kind="em"))
    p = tmp_path / f"r.{fmt}"
    persist_results(rows, p, fmt)
    assert read_results(p, fmt) == rows


def test_json_rows_carry_every_field(tmp_path):
    rows = run_mean_experiment(RunConfig("walk", [20], 30, 12, threads=1))
    p = tmp_path / "r.json"
    persist_results(rows, p, "json")
    obj = json.loads(p.read_text())
    assert list(obj[0]) == list(CSV_FIELDS)
    assert obj[0]["wall_ms"] is None


def test_floats_written_with_17_digits(tmp_path):
    row = SummaryStats(5, 3, 0.1, 0.2, 0.3, 0, 1)
    text = format_csv([row])
    assert "0.10000000000000001" in text


def test_persist_is_byte_identical(tmp_path):
    cfg = RunConfig("walk", [30], 25, 4, threads=2)
    persist_results(run_mean_experiment(cfg), tmp_path / "a.csv")
    persist_results(run_mean_experiment(cfg), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_persist_errors_name_the_path(tmp_path):
    bad = tmp_path / "missing" / "r.csv"
    with pytest.raises(OSError, match="missing"):
        persist_results([], bad)
    with pytest.raises(ValueError):
        persist_results([], tmp_path / "r.xml", "xml")


def test_read_rejects_foreign_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_results(p)


def test_persisted_values_parse_back_exactly(tmp_path):
    rows = [SummaryStats(9, 7, 22 / 7, 1 / 7, math.sqrt(1 / 49), 1, 9)]
    p = tmp_path / "r.csv"
    persist_results(rows, p)
    back = read_results(p)[0]
    assert back.mean == 22 / 7 and back.variance == 1 / 7
    assert np.float64(back.std_error) == np.float64(rows[0].std_error)
