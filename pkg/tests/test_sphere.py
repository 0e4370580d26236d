"""Sphere charts, Killing fields, metric fields."""

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import sampled_killing_norm
from finslab.errors import (ChartBoundary, DimensionMismatch,
                            LambdaOutOfRange, NotSkew, WindTooStrong)
from finslab.sphere import (Chart, KillingField, block_killing,
                            finsler_value_ambient, killing_norm,
                            random_sphere_points, randers_sphere,
                            round_metric, standard_rotation)


def test_chart_map_lands_on_sphere():
    rng = np.random.default_rng(0)
    chart = Chart(rng.standard_normal(5))
    for _ in range(30):
        x = rng.standard_normal(4) * 2.0
        assert abs(np.linalg.norm(chart.map(x)) - 1.0) < 1e-12
    assert np.linalg.norm(chart.map(np.zeros(4)) - chart.center) < 1e-15


def test_chart_coords_round_trip():
    rng = np.random.default_rng(1)
    chart = Chart(rng.standard_normal(4))
    for _ in range(20):
        x = rng.standard_normal(3)
        assert np.linalg.norm(chart.coords(chart.map(x)) - x) < 1e-12 * (
            1.0 + np.linalg.norm(x))


def test_chart_boundary():
    chart = Chart([1.0, 0.0, 0.0], radius=10.0)
    with pytest.raises(ChartBoundary):
        chart.map(np.array([11.0, 0.0]))
    with pytest.raises(ChartBoundary):
        chart.coords(np.array([-1.0, 0.0, 0.0]))


def test_round_metric_center_is_identity():
    chart = Chart([0.0, 1.0, 0.0])
    met = round_metric(chart)
    assert np.abs(met.norm_at(np.zeros(2)).matrix - np.eye(2)).max() < 1e-14


def test_round_metric_matches_gnomonic_formula():
    # symbolic pullback of the ambient metric, hard-coded
    rng = np.random.default_rng(2)
    chart = Chart(rng.standard_normal(4))
    met = round_metric(chart)
    for _ in range(20):
        x = rng.standard_normal(3)
        r2 = x @ x
        oracle = ((1.0 + r2) * np.eye(3) - np.outer(x, x)) / (1.0 + r2) ** 2
        assert np.abs(met.norm_at(x).matrix - oracle).max() < 1e-12


def test_killing_norm_examples():
    assert killing_norm(KillingField(np.zeros((3, 3)))) == 0.0
    W = block_killing(1, [0.7], [1])
    assert abs(killing_norm(W) - 0.7) < 1e-14


def test_killing_norm_vs_sampling_oracle():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((6, 6))
    W = KillingField(M - M.T)
    oracle = sampled_killing_norm(W.matrix, 100_000, rng)
    assert abs(killing_norm(W) - oracle) < 1e-3


def test_killing_field_requires_skew():
    with pytest.raises(NotSkew):
        KillingField(np.eye(3))


def test_killing_field_tangency():
    rng = np.random.default_rng(4)
    M = rng.standard_normal((5, 5))
    W = KillingField(M - M.T)
    for p in random_sphere_points(4, 100, rng):
        assert abs(p @ (W.matrix @ p)) < 1e-13


def test_killing_norm_conjugation_invariant():
    rng = np.random.default_rng(5)
    M = rng.standard_normal((6, 6))
    W = KillingField(M - M.T)
    base = killing_norm(W)
    for _ in range(5):
        T, _ = np.linalg.qr(rng.standard_normal((6, 6)))
        assert abs(killing_norm(KillingField(T @ W.matrix @ T.T)) - base) < 1e-10


def test_block_killing_structure():
    W = standard_rotation(4, 0.5)
    expect = np.zeros((4, 4))
    expect[:2, 2:] = 0.5 * np.eye(2)
    expect[2:, :2] = -0.5 * np.eye(2)
    assert np.abs(W.matrix - expect).max() < 1e-15
    assert abs(killing_norm(W) - 0.5) < 1e-14
    zero = block_killing(4, [], [])
    assert np.abs(zero.matrix).max() == 0.0


def test_block_killing_validation():
    with pytest.raises(LambdaOutOfRange):
        block_killing(0, [1.2], [1])
    with pytest.raises(LambdaOutOfRange):
        block_killing(0, [0.5, 0.3], [1, 1])
    with pytest.raises(DimensionMismatch):
        block_killing(0, [0.5], [1, 1])


def test_block_killing_flow_preserves_height():
    # rotation around the first axis: latitude circles stay put
    W = block_killing(1, [0.3], [1])
    rng = np.random.default_rng(6)
    for t in (0.2, 1.1):
        flow = expm(t * W.matrix)
        for p in random_sphere_points(2, 20, rng):
            assert abs((flow @ p)[0] - p[0]) < 1e-12


def test_randers_sphere_zero_wind_is_round():
    chart = Chart([1.0, 0.0, 0.0, 0.0])
    met = randers_sphere(chart, KillingField(np.zeros((4, 4))))
    metr = round_metric(chart)
    rng = np.random.default_rng(7)
    for _ in range(10):
        x = rng.standard_normal(3)
        y = rng.standard_normal(3)
        assert abs(met.value(x, y) - metr.value(x, y)) < 1e-12


def test_rotation_wind_has_constant_length():
    # |W(x)|_h = lam everywhere for W = lam J, so the navigated norm of
    # the wind is the constant lam / (1 + lam)
    lam = 0.4
    W = standard_rotation(4, lam)
    chart = Chart([1.0, 0.0, 0.0, 0.0])
    met = randers_sphere(chart, W)
    rng = np.random.default_rng(8)
    for p in random_sphere_points(3, 20, rng):
        assert abs(np.linalg.norm(W(p)) - lam) < 1e-13
        val = finsler_value_ambient(met, p, W(p))
        assert abs(val - lam / (1.0 + lam)) < 1e-12


def test_randers_sphere_wind_too_strong():
    chart = Chart([1.0, 0.0, 0.0, 0.0])
    J = standard_rotation(4, 0.5).matrix / 0.5      # unit-speed rotation
    with pytest.raises(WindTooStrong):
        randers_sphere(chart, KillingField(J))
    with pytest.raises(WindTooStrong):
        randers_sphere(chart, KillingField(1.4 * J))


def test_randers_isometry_under_conjugation():
    rng = np.random.default_rng(9)
    W = standard_rotation(4, 0.4)
    chart = Chart([1.0, 0.0, 0.0, 0.0])
    met = randers_sphere(chart, W)
    T, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    met_conj = randers_sphere(chart, KillingField(T @ W.matrix @ T.T))
    for _ in range(10):
        p = random_sphere_points(3, 1, rng)[0]
        u = rng.standard_normal(4)
        u_t = u - (u @ p) * p
        v1 = finsler_value_ambient(met, p, u_t)
        v2 = finsler_value_ambient(met_conj, T @ p, T @ u_t)
        assert abs(v1 - v2) < 1e-10


def test_killing_serialization():
    W = standard_rotation(4, 0.3)
    import json
    data = json.loads(W.to_json())
    W2 = KillingField(np.array(data["matrix"]))
    assert np.abs(W.matrix - W2.matrix).max() == 0.0
