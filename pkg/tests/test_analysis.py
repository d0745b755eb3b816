import numpy as np
import pytest

from fxacc.analysis import (
    AnalysisError, branch_balance, first_difference, offset_uniformity, point_biserial,
    storm_summary,
)


def test_exactly_uniform_counts():
    samples = [(b << 28) | i for b in range(16) for i in range(125)]
    u = offset_uniformity(samples)
    assert u.statistic == 0
    assert u.pvalue == pytest.approx(1.0)
    assert list(u.counts) == [125] * 16


def test_constant_offsets_fail():
    assert offset_uniformity([0xDEADBEEF] * 2000).pvalue < 1e-9


def test_random_offsets_pass():
    rng = np.random.default_rng(1)
    assert offset_uniformity(rng.integers(0, 1 << 32, 2000), bins=256).pvalue > 0.001


def test_too_few_samples():
    with pytest.raises(AnalysisError):
        offset_uniformity([1] * 499)
    with pytest.raises(AnalysisError):
        offset_uniformity([1] * 600, bins=10)


def test_point_biserial():
    assert point_biserial([1, 0, 1, 0], [1, 0, 1, 0]) == pytest.approx(1.0)
    assert point_biserial([1, 0, 1, 0], [0, 1, 0, 1]) == pytest.approx(-1.0)
    assert point_biserial([1, 1, 1], [0, 1, 0]) == 0.0


def test_branch_balance():
    b = branch_balance([True, False, True, True], [True, False, False, True])
    assert b.taken_fraction == 0.75 and b.n == 4
    assert np.isnan(branch_balance([True]).correlation)
    with pytest.raises(AnalysisError):
        branch_balance([])


def test_first_difference():
    assert first_difference((1, 2), (1, 2)) is None
    assert first_difference((1, 2), (1, 3)) == 1
    assert first_difference((1,), (1, 2)) == 1


def test_storm_summary():
    s = storm_summary([("a", 0, 4, "unrolled"), ("a", 0, 100, "loop"), ("b", 1, 2, "unrolled")])
    assert s == {"a": {"storms": 2, "words": 104, "loops": 1},
                 "b": {"storms": 1, "words": 2, "loops": 0}}
