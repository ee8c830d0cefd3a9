import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crralloc.mallows import MallowsConfig, insertion_probabilities, mallows_profile, mallows_sample


def test_phi_zero_is_reference():
    ref = (3, 1, 0, 2)
    for seed in range(5):
        rng = MallowsConfig(0.0, ref, seed).rng()
        assert mallows_sample(0.0, ref, rng) == list(ref)


def test_phi_one_is_uniform():
    rng = np.random.default_rng(11)
    counts = Counter(tuple(mallows_sample(1.0, (0, 1, 2), rng)) for _ in range(60_000))
    assert set(counts) == set(itertools.permutations(range(3)))
    for c in counts.values():
        assert abs(c / 60_000 - 1 / 6) < 0.01
    # chi-square with 5 degrees of freedom; 20.5 is the 0.999 quantile
    chi2 = sum((c - 10_000) ** 2 / 10_000 for c in counts.values())
    assert chi2 < 20.5


def test_half_dispersion_two_items():
    rng = np.random.default_rng(12)
    hits = sum(mallows_sample(0.5, (0, 1), rng) == [0, 1] for _ in range(50_000))
    assert abs(hits / 50_000 - 1 / 1.5) < 0.01


def test_insertion_probabilities():
    p = insertion_probabilities(0.5, 3)
    assert p == pytest.approx([0.25 / 1.75, 0.5 / 1.75, 1 / 1.75])


def test_config_validation():
    with pytest.raises(ValueError):
        MallowsConfig(1.5, (0, 1))
    with pytest.raises(ValueError):
        MallowsConfig(0.5, (0, 0))


def test_profile_reproducible():
    cfg = MallowsConfig(0.7, tuple(range(6)), 99)
    assert mallows_profile(cfg, 4) == mallows_profile(cfg, 4)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.integers(1, 12), st.integers(0, 2**32))
def test_sample_is_permutation(phi, m, seed):
    out = mallows_sample(phi, tuple(range(m)), np.random.default_rng(seed))
    assert sorted(out) == list(range(m))
