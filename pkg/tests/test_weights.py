import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lppsim.lattice import LatticePoint
from lppsim.statutil import ks_distance_to_exp
from lppsim.weights import (
    WeightField,
    derive_seed,
    exp_inverse_cdf,
    mix64,
    replica_seeds,
)


def test_exp_inverse_cdf_values():
    assert exp_inverse_cdf(0.0) == 0.0
    assert exp_inverse_cdf(0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert exp_inverse_cdf(1 - math.exp(-2)) == pytest.approx(2.0, rel=1e-12)


def test_exp_inverse_cdf_domain():
    for bad in (-0.1, 1.0, 1.5, float("nan")):
        with pytest.raises(ValueError):
            exp_inverse_cdf(bad)


@given(st.floats(min_value=0, max_value=0.9999999, allow_nan=False),
       st.floats(min_value=0, max_value=0.9999999, allow_nan=False))
def test_exp_inverse_cdf_monotone(u1, u2):
    lo, hi = sorted((u1, u2))
    assert exp_inverse_cdf(lo) <= exp_inverse_cdf(hi)


def test_weight_determinism():
    f = WeightField(987654321)
    p = LatticePoint(12, -7)
    assert f.weight_at(p) == f.weight_at(p)
    g = WeightField(987654321)
    assert g.weight_at(p) == f.weight_at(p)


def test_weights_strictly_positive_bulk():
    f = WeightField(5)
    xs = np.arange(-2000, 2000)
    w = f.weights_at_sites(xs, xs[::-1])
    assert (w > 0).all()
    assert np.isfinite(w).all()


def test_bulk_matches_scalar_bitwise():
    f = WeightField(31337)
    xs = np.arange(-137, 137, 3)
    ys = np.arange(137, -137, -3)
    bulk = f.weights_at_sites(xs, ys)
    singles = np.array(
        [f.weight_at(LatticePoint(int(x), int(y))) for x, y in zip(xs, ys)]
    )
    assert np.array_equal(bulk, singles)


def test_diagonal_weights_consistency():
    f = WeightField(2024)
    w = f.diagonal_weights(10, -6, 6)
    assert len(w) == 7
    pts = [LatticePoint((10 + s) // 2, (10 - s) // 2) for s in range(-6, 7, 2)]
    assert np.array_equal(w, np.array([f.weight_at(p) for p in pts]))
    # parity snap: odd bounds on an even level shrink inward
    assert np.array_equal(f.diagonal_weights(10, -5, 5), f.diagonal_weights(10, -4, 4))
    assert f.diagonal_weights(10, 3, 2).size == 0
    assert np.array_equal(
        f.diagonal_weights(7, -3, 3)[0:1], f.diagonal_weights(7, -3, -3)
    )


def test_coordinate_overflow_rejected():
    f = WeightField(1)
    with pytest.raises(ValueError):
        f.weights_at_sites(np.array([2**31]), np.array([0]))


def test_known_mix64_vector():
    # splitmix-style finalizer sanity anchors (self-consistency across runs)
    assert mix64(0) == 0
    assert mix64(1) == mix64(1)
    assert mix64(0xDEADBEEF) != 0xDEADBEEF


def test_seed_streams_disjoint():
    a = replica_seeds(1, 0, 1000)
    b = replica_seeds(2, 0, 1000)
    assert len(np.intersect1d(a, b)) == 0
    assert derive_seed(7, 0) != derive_seed(7, 1)
    assert derive_seed(7, 0, 1) != derive_seed(7, 1, 0)
    ks = np.array([derive_seed(7, k) for k in range(100)], dtype=np.uint64)
    assert np.array_equal(replica_seeds(7, 0, 100), ks)


@pytest.mark.slow
def test_weight_statistics_million_sites():
    f = WeightField(20260809)
    xs = np.tile(np.arange(1000, dtype=np.int64), 1000)
    ys = np.repeat(np.arange(1000, dtype=np.int64), 1000)
    w = f.weights_at_sites(xs, ys)
    assert 0.995 <= w.mean() <= 1.005
    assert 0.99 <= w.var() <= 1.01
    assert ks_distance_to_exp(w) < 0.002


def test_seed_sensitivity_decorrelation():
    n = 100_000
    xs = np.arange(n, dtype=np.int64)
    ys = np.zeros(n, dtype=np.int64)
    w1 = WeightField(1).weights_at_sites(xs, ys)
    w2 = WeightField(2).weights_at_sites(xs, ys)
    corr = np.corrcoef(w1, w2)[0, 1]
    assert abs(corr) < 0.01
