import numpy as np
import pytest

from eqwalk.rng import SeedSpec, as_generator


def test_same_spec_same_stream():
    assert np.array_equal(SeedSpec(3, 4).generator().random(5), SeedSpec(3, 4).generator().random(5))


def test_replicates_and_blocks_are_distinct():
    a = SeedSpec(3, 4).generator().random(4)
    assert not np.array_equal(a, SeedSpec(3, 5).generator().random(4))
    assert not np.array_equal(a, SeedSpec(4, 4).generator().random(4))
    assert not np.array_equal(a, SeedSpec(3, 4).generator(1).random(4))


def test_block_zero_is_the_plain_stream():
    assert np.array_equal(SeedSpec(9).generator(0).random(3), SeedSpec(9).generator().random(3))


def test_negative_and_huge_seeds_wrap_into_64_bits():
    assert np.array_equal(SeedSpec(-1).generator().random(2), SeedSpec(2 ** 64 - 1).generator().random(2))


def test_validation():
    with pytest.raises(ValueError):
        SeedSpec(1, -1)
    with pytest.raises(ValueError):
        SeedSpec(1, 2 ** 64)
    with pytest.raises(ValueError):
        SeedSpec(1).generator(-1)


def test_child_and_as_generator():
    assert SeedSpec(5, 1).child(7) == SeedSpec(5, 7)
    g = np.random.default_rng(0)
    assert as_generator(g) is g
    assert np.array_equal(as_generator(12).random(2), SeedSpec(12).generator().random(2))
    with pytest.raises(TypeError):
        as_generator("seed")
