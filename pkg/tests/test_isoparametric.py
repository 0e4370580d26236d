"""Nonlinear gradient/Laplacian, level sets, transnormality, spectra."""

import warnings

import numpy as np
import pytest

from conftest import laplace_beltrami_oracle
from finslab.clifford import build_clifford, spin_lift
from finslab.curvature import Flag, flag_curvature
from finslab.errors import CriticalPoint, EmptyLevel
from finslab.isoparametric import (check_isoparametric, check_tangency,
                                   check_transnormal, height_function,
                                   nonlinear_gradient,
                                   nonlinear_gradient_extended,
                                   nonlinear_laplacian, otfkm_function,
                                   principal_curvature_spectrum,
                                   sample_level_set, split_quadratic_function,
                                   unit_gradient_field)
from finslab.sphere import (Chart, KillingField, block_killing, killing_norm,
                            localization_field, randers_sphere, round_metric,
                            standard_rotation)

LEVELS = [-0.8, -0.3, 0.0, 0.3, 0.8]


def s5_setup(wind="spin", scale=0.5):
    sys_ = build_clifford(1, 3)
    f = otfkm_function(sys_)
    chart = Chart(np.eye(6)[0])
    if wind is None:
        return sys_, f, round_metric(chart), None
    X = spin_lift(sys_).elements[0]
    W = KillingField(scale * X / killing_norm(KillingField(X)))
    return sys_, f, randers_sphere(chart, W), W


def test_riemannian_gradient_is_raised_gradient():
    met = round_metric(Chart([0.0, 0.0, 1.0]))
    f = height_function(3, axis=0)
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.standard_normal(2) * 0.5
        df = f.chart_gradient(met.chart, x)
        grad = nonlinear_gradient(met, f, x)
        raised = np.linalg.solve(met.norm_at(x).matrix, df)
        assert np.linalg.norm(grad - raised) < 1e-9


def test_gradient_defining_relation():
    _, f, met, _ = s5_setup()
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.standard_normal(5) * 0.3
        grad = nonlinear_gradient(met, f, x)
        g = 0.5 * met.norm_at(x).sq_jet(grad).hess
        df = f.chart_gradient(met.chart, x)
        assert np.abs(g @ grad - df).max() < 1e-8 * (1 + np.linalg.norm(df))
        assert float(df @ grad) > 0.0       # increasing direction


def test_gradient_norm_is_dual_norm_value():
    # F(grad f)^2 = df(grad f) by the defining relation and Euler identity
    _, f, met, _ = s5_setup()
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = rng.standard_normal(5) * 0.3
        grad = nonlinear_gradient(met, f, x)
        df = f.chart_gradient(met.chart, x)
        Fg = met.norm_at(x)(grad)
        assert abs(Fg * Fg - float(df @ grad)) < 1e-8 * max(1.0, Fg * Fg)


def test_critical_point_raises_and_extended_is_zero():
    met = round_metric(Chart([1.0, 0.0, 0.0]))
    f = height_function(3, axis=0)   # critical at the chart center
    with pytest.raises(CriticalPoint):
        nonlinear_gradient(met, f, np.zeros(2))
    assert np.array_equal(nonlinear_gradient_extended(met, f, np.zeros(2)),
                          np.zeros(2))


def test_unit_normal_is_h_normal_plus_wind():
    # F-unit normal of a wind-invariant level: n1 = n + W
    _, f, met, W = s5_setup()
    samples = sample_level_set(f, 0.3, 5, seed=3)
    for s in samples:
        fld = met.with_center(s.point)
        x0 = np.zeros(5)
        grad = nonlinear_gradient(fld, f, x0)
        n1 = grad / fld.norm_at(x0)(grad)
        A = fld.chart.pullback_round(x0)
        df = f.chart_gradient(fld.chart, x0)
        nh = np.linalg.solve(A, df)
        nh /= np.sqrt(nh @ A @ nh)
        wch = np.linalg.solve(A, fld.chart.jacobian(x0).T
                              @ (W.matrix @ s.point))
        assert np.linalg.norm(n1 - (nh + wch)) < 1e-6
        # both unit normals have norm one
        assert abs(fld.norm_at(x0)(nh + wch) - 1.0) < 1e-8
        assert abs(fld.norm_at(x0)(-nh + wch) - 1.0) < 1e-8
        # wind is the average of the two unit normals
        n2 = -nh + wch
        assert np.linalg.norm(0.5 * (n1 + n2) - wch) < 1e-6


def test_gradient_asymmetry_witness():
    # non-reversible metric: grad(-f) != -grad(f) somewhere
    _, f, met, _ = s5_setup()
    neg = -f
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        x = rng.standard_normal(5) * 0.3
        try:
            a = nonlinear_gradient(met, f, x)
            b = nonlinear_gradient(met, neg, x)
        except CriticalPoint:
            continue
        worst = max(worst, float(np.linalg.norm(a + b)))
    assert worst > 1e-3


def test_height_laplacian_on_s2():
    met = round_metric(Chart([0.0, 0.0, 1.0]))
    f = height_function(3, axis=2)
    for c in (0.3, -0.6):
        s = sample_level_set(f, c, 2, seed=5)[0]
        fld = met.with_center(s.point)
        lap = nonlinear_laplacian(fld, f, np.zeros(2))
        assert abs(lap + 2.0 * c) < 1e-8


def test_laplacian_matches_coordinate_oracle():
    # independent coordinate-formula Laplacian on a Riemannian metric
    met = round_metric(Chart(np.array([0.3, -0.5, 0.8, 0.1])))
    f = height_function(4, axis=1)
    rng = np.random.default_rng(6)
    for _ in range(5):
        x = rng.standard_normal(3) * 0.4
        lap = nonlinear_laplacian(met, f, x)
        oracle = laplace_beltrami_oracle(met, f, x)
        assert abs(lap - oracle) < 1e-4


def test_sample_level_set_height_equator():
    f = height_function(3, axis=2)
    samples = sample_level_set(f, 0.0, 20, seed=7)
    assert len(samples) == 20
    for s in samples:
        assert abs(s.point[2]) < 1e-10
        assert abs(np.linalg.norm(s.point) - 1.0) < 1e-12
        assert abs(s.point @ s.h_gradient) < 1e-10


def test_sample_level_set_otfkm():
    sys_ = build_clifford(1, 3)
    f = otfkm_function(sys_)
    samples = sample_level_set(f, 0.0, 100, seed=8)
    assert len(samples) == 100
    assert max(abs(s.f_value) for s in samples) < 1e-10


def test_sample_level_set_out_of_range():
    sys_ = build_clifford(1, 3)
    f = otfkm_function(sys_)
    with pytest.raises(EmptyLevel):
        sample_level_set(f, 2.0, 5, seed=9)


def test_transnormal_round_height_profile():
    met = round_metric(Chart([0.0, 0.0, 1.0]))
    f = height_function(3, axis=2)
    rep = check_transnormal(met, f, [-0.5, 0.0, 0.5], per_level=20,
                            tol=1e-8, seed=0)
    assert rep.passed
    for entry in rep.per_level:
        expect = np.sqrt(1.0 - entry["level"] ** 2)
        assert abs(entry["mean"] - expect) < 1e-10


def test_transnormal_randers_otfkm():
    _, f, met, _ = s5_setup()
    rep = check_transnormal(met, f, LEVELS, per_level=15, tol=1e-6, seed=0)
    assert rep.passed
    # F(grad f) equals the h-length of the h-gradient pointwise
    round_rep = check_transnormal(round_metric(Chart(np.eye(6)[0])), f,
                                  LEVELS, per_level=15, tol=1e-6, seed=0)
    for a, b in zip(rep.per_level, round_rep.per_level):
        assert abs(a["mean"] - b["mean"]) < 1e-6


def test_transnormal_fails_for_non_tangent_wind():
    sys_ = build_clifford(1, 3)
    f = otfkm_function(sys_)
    rng = np.random.default_rng(10)
    M = rng.standard_normal((6, 6))
    M = M - M.T
    W = KillingField(0.5 * M / killing_norm(KillingField(M)))
    met = randers_sphere(Chart(np.eye(6)[0]), W)
    rep = check_transnormal(met, f, [0.0, 0.3], per_level=10, tol=1e-6,
                            seed=0)
    assert not rep.passed
    assert rep.max_deviation > 1e-3


def test_isoparametric_round_height():
    met = round_metric(Chart([0.0, 0.0, 1.0]))
    f = height_function(3, axis=2)
    rep = check_isoparametric(met, f, [-0.5, 0.0, 0.5], per_level=10,
                              tol=1e-4, seed=0)
    assert rep.passed
    for entry in rep.per_level:
        if entry["function"] == "f":
            assert abs(entry["mean"] + 2.0 * entry["level"]) < 1e-6


def test_isoparametric_randers_otfkm_both_signs():
    _, f, met, _ = s5_setup()
    rep = check_isoparametric(met, f, [-0.3, 0.0, 0.3], per_level=10,
                              tol=1e-3, seed=0)
    assert rep.passed
    assert {e["function"] for e in rep.per_level} == {"f", "-f"}


def test_isoparametric_riemannian_cross_check():
    _, f, met_round, _ = s5_setup(wind=None)
    rep = check_isoparametric(met_round, f, [-0.3, 0.3], per_level=10,
                              tol=1e-4, seed=0)
    assert rep.passed


def test_tangency_checks():
    sys_, f, _, W = s5_setup()
    rep = check_tangency(f, W, samples=100, seed=0)
    assert rep.passed and rep.max_deviation < 1e-10
    zero = check_tangency(f, KillingField(np.zeros((6, 6))), samples=10)
    assert zero.max_deviation == 0.0
    rng = np.random.default_rng(11)
    M = rng.standard_normal((6, 6))
    bad = check_tangency(f, KillingField(M - M.T), samples=100, seed=0)
    assert not bad.passed


def test_spectrum_round_equator():
    met = round_metric(Chart([0.0, 0.0, 1.0]))
    f = height_function(3, axis=2)
    spec = principal_curvature_spectrum(met, f, 0.0, points=5, seed=0)
    assert spec.g == 1
    assert spec.multiplicities == (1,)
    assert abs(spec.cluster_means[0]) < 1e-5
    assert spec.consistent


def test_spectrum_round_otfkm_g4():
    _, f, met, _ = s5_setup(wind=None)
    spec = principal_curvature_spectrum(met, f, 0.3, points=8, seed=0)
    assert spec.g == 4
    assert spec.multiplicities == (1, 1, 1, 1)
    assert spec.consistent


def test_spectrum_randers_homogeneous_counts():
    # rotation-invariant height levels: one principal curvature
    met1 = randers_sphere(Chart(np.eye(5)[0]), block_killing(1, [0.5], [2]))
    spec1 = principal_curvature_spectrum(met1, height_function(5, axis=0),
                                         0.4, points=5, seed=0)
    assert spec1.g == 1 and spec1.consistent
    # product-of-spheres levels: two principal curvatures
    met2 = randers_sphere(Chart(np.eye(4)[0]),
                          block_killing(0, [0.3, 0.6], [1, 1]))
    spec2 = principal_curvature_spectrum(
        met2, split_quadratic_function(4, 2), 0.4, points=5, seed=0)
    assert spec2.g == 2 and spec2.consistent
    # OT-FKM with a spin wind: four principal curvatures
    _, f, met3, _ = s5_setup()
    spec3 = principal_curvature_spectrum(met3, f, 0.3, points=5, seed=0)
    assert spec3.g == 4 and spec3.consistent
    assert all(s.g in (1, 2, 4) for s in (spec1, spec2, spec3))


def test_localization_metrics_have_round_curvature():
    # freezing the Randers tensor along either unit normal of a
    # wind-invariant family gives a constant-curvature-1 metric
    _, f, met, _ = s5_setup()
    s = sample_level_set(f, 0.2, 1, seed=12)[0]
    fld = met.with_center(s.point)
    rng = np.random.default_rng(13)
    for sign in (+1.0, -1.0):
        fn = f if sign > 0 else -f
        field = unit_gradient_field(fld, fn, rel_tol=1e-13)
        loc = localization_field(fld, field)
        for _ in range(3):
            x = rng.standard_normal(5) * 0.05
            K = flag_curvature(loc, Flag(x, rng.standard_normal(5),
                                         rng.standard_normal(5)))
            assert abs(K - 1.0) < 1e-4
