"""Nonlinear gradient and Laplacian, level sets, transnormality, spectra.

For a scalar function f on a Finsler sphere the nonlinear gradient at a
regular point is the Legendre dual of df:

    < grad f, v >^F_{grad f} = df(v)   for all v,

and the nonlinear Laplacian is the Laplace-Beltrami operator of the
localization metric q(x) = g^F(x, grad f(x)).  Since q grad f = df by the
defining relation, the divergence form collapses to

    (Lap f)(x) = (det q)^{-1/2} d_i ( sqrt(det q) (grad f)^i ),

with grad f recomputed at every stencil point (the localization is a
field, not a frozen inner product).

A function is transnormal when F(grad f) is constant on each level and
isoparametric when Lap f is too; the checks below sample level sets and
report the per-level spread of those quantities.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import expm

from .clifford import CliffordSystem, otfkm_gradient, otfkm_value
from .errors import (ClusterAmbiguity, CriticalPoint, EmptyLevel,
                     StencilEscape)
from .minkowski import legendre_solve
from .report import VerificationReport
from .sphere import Chart, KillingField, MetricField, random_sphere_points

_OFFS = np.array([-2.0, -1.0, 1.0, 2.0])
_WGTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

_CRITICAL_EPS = 1e-10


class SphereFunction:
    """A smooth scalar function on S^n given by an ambient rule."""

    def __init__(self, ambient_dim: int, kind: str,
                 value: Callable[[np.ndarray], float],
                 gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None):
        self.ambient_dim = ambient_dim
        self.kind = kind
        self._value = value
        self._gradient = gradient

    def __call__(self, p) -> float:
        return float(self._value(np.asarray(p, dtype=float)))

    def gradient(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self._gradient is not None:
            return self._gradient(p)
        h = 1e-6
        g = np.zeros(self.ambient_dim)
        for i in range(self.ambient_dim):
            e = np.zeros(self.ambient_dim)
            e[i] = h
            g[i] = (self._value(p + e) - self._value(p - e)) / (2.0 * h)
        return g

    def tangent_gradient(self, p) -> np.ndarray:
        """Ambient gradient projected onto T_p S^n."""
        p = np.asarray(p, dtype=float)
        g = self.gradient(p)
        return g - (g @ p) * p

    def chart_value(self, chart: Chart, x) -> float:
        return self(chart.map(x))

    def chart_gradient(self, chart: Chart, x) -> np.ndarray:
        """d(f o map) at x: the chart covector of df."""
        return chart.jacobian(x).T @ self.gradient(chart.map(x))

    def __neg__(self) -> "SphereFunction":
        grad = None
        if self._gradient is not None:
            grad = lambda p: -self._gradient(p)
        return SphereFunction(self.ambient_dim, self.kind,
                              lambda p: -self._value(p), grad)


def height_function(ambient_dim: int, axis=0) -> SphereFunction:
    """f(p) = p . a for a unit axis (index or vector); levels are latitude
    spheres."""
    if np.isscalar(axis):
        a = np.zeros(ambient_dim)
        a[int(axis)] = 1.0
    else:
        a = np.asarray(axis, dtype=float)
        a = a / np.linalg.norm(a)
    return SphereFunction(ambient_dim, "height",
                          lambda p: float(p @ a), lambda p: a.copy())


def otfkm_function(sys_: CliffordSystem) -> SphereFunction:
    """The quartic polynomial of a symmetric Clifford system."""
    return SphereFunction(sys_.dim, "otfkm",
                          lambda p: otfkm_value(sys_, p),
                          lambda p: otfkm_gradient(sys_, p))


def split_quadratic_function(ambient_dim: int, p_split: int) -> SphereFunction:
    """f(x) = |x_first|^2 - |x_rest|^2; levels are products of spheres."""
    mask = np.ones(ambient_dim)
    mask[p_split:] = -1.0

    def val(p):
        return float(mask @ (p * p))

    return SphereFunction(ambient_dim, "split-quadratic", val,
                          lambda p: 2.0 * mask * p)


def custom_sphere_function(ambient_dim: int, value,
                           gradient=None) -> SphereFunction:
    return SphereFunction(ambient_dim, "custom", value, gradient)


@dataclass
class LevelSetSample:
    """One projected point of a level set with its gradient data."""

    point: np.ndarray
    f_value: float
    h_gradient: np.ndarray
    F_gradient: Optional[np.ndarray] = None
    weight: float = 1.0


def sample_level_set(f: SphereFunction, c: float, count: int, seed: int,
                     metric: Optional[MetricField] = None,
                     newton_cap: int = 60) -> list[LevelSetSample]:
    """Draw ``count`` points with |f - c| < 1e-10 by Newton projection.

    Random sphere points flow along the tangential gradient of f (with
    step halving when the residual worsens) until the level is hit.
    Deterministic given the seed; raises EmptyLevel when no seed point
    converges (e.g. c outside the range of f).
    """
    rng = np.random.default_rng(seed)
    n = f.ambient_dim - 1
    out = []
    attempts = 0
    while len(out) < count and attempts < 40 * count + 200:
        attempts += 1
        p = random_sphere_points(n, 1, rng)[0]
        ok = False
        for _ in range(newton_cap):
            r = f(p) - c
            if abs(r) < 1e-12:
                ok = True
                break
            t = f.tangent_gradient(p)
            tt = float(t @ t)
            if tt < 1e-12:
                break
            step = -r / tt * t
            scale = 1.0
            for _ in range(30):
                q = p + scale * step
                q = q / np.linalg.norm(q)
                if abs(f(q) - c) < abs(r):
                    p = q
                    break
                scale *= 0.5
            else:
                break
        if not ok or abs(f(p) - c) >= 1e-10:
            continue
        grad_t = f.tangent_gradient(p)
        if np.linalg.norm(grad_t) <= 1e-6:
            continue   # c must be a regular value at the found point
        sample = LevelSetSample(point=p, f_value=f(p), h_gradient=grad_t)
        if metric is not None:
            fld = metric.with_center(p)
            sample.F_gradient = nonlinear_gradient(fld, f, np.zeros(n))
        out.append(sample)
    if not out:
        raise EmptyLevel(f"no sample of level {c} converged")
    if len(out) < count:
        raise EmptyLevel(
            f"only {len(out)}/{count} samples of level {c} converged")
    return out


def nonlinear_gradient(metric: MetricField, f: SphereFunction, x,
                       rel_tol: float = 1e-9) -> np.ndarray:
    """The Legendre dual of df at a regular chart point.

    Satisfies <grad f, v>^F_{grad f} = df(v) on a basis and points in the
    increasing direction of f.  Raises CriticalPoint when |df| < 1e-10.
    """
    x = np.asarray(x, dtype=float)
    df = f.chart_gradient(metric.chart, x)
    if np.linalg.norm(df) < _CRITICAL_EPS:
        raise CriticalPoint("df vanishes; nonlinear gradient undefined")
    return legendre_solve(metric.norm_at(x), df, rel_tol=rel_tol)


def nonlinear_gradient_extended(metric: MetricField, f: SphereFunction,
                                x) -> np.ndarray:
    """Continuous extension of the nonlinear gradient: 0 on the critical set."""
    try:
        return nonlinear_gradient(metric, f, x)
    except CriticalPoint:
        return np.zeros(metric.dim)


def gradient_norm(metric: MetricField, f: SphereFunction, x) -> float:
    """F(grad f)(x), the transnormal quantity."""
    x = np.asarray(x, dtype=float)
    return metric.norm_at(x)(nonlinear_gradient(metric, f, x))


def unit_gradient_field(metric: MetricField, f: SphereFunction,
                        rel_tol: float = 1e-9) -> Callable[[np.ndarray], np.ndarray]:
    """The F-unit normal field of the levels of f, grad f / F(grad f)."""

    def field(x: np.ndarray) -> np.ndarray:
        g = nonlinear_gradient(metric, f, x, rel_tol=rel_tol)
        return g / metric.norm_at(x)(g)

    return field


def nonlinear_laplacian(metric: MetricField, f: SphereFunction, x,
                        step: float = 1e-3) -> float:
    """Laplace-Beltrami of f in the localization metric g^F_{grad f}."""
    x = np.asarray(x, dtype=float)
    n = metric.dim
    df = f.chart_gradient(metric.chart, x)
    if np.linalg.norm(df) < _CRITICAL_EPS:
        raise CriticalPoint("df vanishes; nonlinear Laplacian undefined")

    def flux(xp: np.ndarray) -> np.ndarray:
        dfp = f.chart_gradient(metric.chart, xp)
        if np.linalg.norm(dfp) < _CRITICAL_EPS:
            raise StencilEscape("stencil point hit the critical set")
        norm = metric.norm_at(xp)
        grad = legendre_solve(norm, dfp)
        q = 0.5 * norm.sq_jet(grad).hess
        return np.sqrt(np.linalg.det(q)) * grad

    norm0 = metric.norm_at(x)
    grad0 = legendre_solve(norm0, df)
    q0 = 0.5 * norm0.sq_jet(grad0).hess
    div = 0.0
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = step
        for off, wgt in zip(_OFFS, _WGTS):
            div += wgt * flux(x + off * ei)[i]
    return div / (step * np.sqrt(np.linalg.det(q0)))


def _per_level_scan(metric: MetricField, f: SphereFunction, levels,
                    per_level: int, seed: int, quantity) -> tuple[list, float]:
    stats = []
    worst = 0.0
    for idx, c in enumerate(levels):
        samples = sample_level_set(f, float(c), per_level, seed + 37 * idx)
        vals = []
        for s in samples:
            fld = metric.with_center(s.point)
            vals.append(quantity(fld, np.zeros(metric.dim)))
        vals = np.asarray(vals)
        spread = float(vals.max() - vals.min())
        stats.append({"level": float(c), "mean": float(vals.mean()),
                      "spread": spread})
        worst = max(worst, spread)
    return stats, worst


def check_transnormal(metric: MetricField, f: SphereFunction, levels,
                      per_level: int = 50, tol: float = 1e-6,
                      seed: int = 0) -> VerificationReport:
    """Spread of F(grad f) across each sampled level.

    Passes iff every spread is below tol; the per-level means are the
    fitted profile a(c) of F(grad f) = a(f).
    """
    start = time.perf_counter()
    stats, worst = _per_level_scan(
        metric, f, levels, per_level, seed,
        lambda fld, x: gradient_norm(fld, f, x))
    return VerificationReport(
        check="transnormal",
        config={"metric": metric.kind, "function": f.kind,
                "levels": [float(c) for c in levels],
                "per_level": per_level, "tol": tol, "seed": seed},
        n_samples=per_level * len(list(levels)),
        max_deviation=worst,
        per_level=stats,
        passed=bool(worst < tol),
        wall_time_ms=int(1000 * (time.perf_counter() - start)),
    )


def check_isoparametric(metric: MetricField, f: SphereFunction, levels,
                        per_level: int = 50, tol: float = 1e-3, seed: int = 0,
                        include_reverse: bool = True) -> VerificationReport:
    """Spread of the nonlinear Laplacian across each level, for f and -f.

    The reverse check matters because gradient and Laplacian are not odd
    in f for a non-reversible metric.
    """
    start = time.perf_counter()
    stats, worst = _per_level_scan(
        metric, f, levels, per_level, seed,
        lambda fld, x: nonlinear_laplacian(fld, f, x))
    for entry in stats:
        entry["function"] = "f"
    if include_reverse:
        neg = -f
        stats_r, worst_r = _per_level_scan(
            metric, neg, [-c for c in levels], per_level, seed + 1,
            lambda fld, x: nonlinear_laplacian(fld, neg, x))
        for entry in stats_r:
            entry["function"] = "-f"
        stats += stats_r
        worst = max(worst, worst_r)
    return VerificationReport(
        check="isoparametric",
        config={"metric": metric.kind, "function": f.kind,
                "levels": [float(c) for c in levels],
                "per_level": per_level, "tol": tol, "seed": seed,
                "reverse": include_reverse},
        n_samples=per_level * len(list(levels)) * (2 if include_reverse else 1),
        max_deviation=worst,
        per_level=stats,
        passed=bool(worst < tol),
        wall_time_ms=int(1000 * (time.perf_counter() - start)),
    )


def check_tangency(f: SphereFunction, W: KillingField, samples: int = 500,
                   tol: float = 1e-8, seed: int = 0) -> VerificationReport:
    """max |df(W x)| over sampled sphere points.

    Small residuals mean the flow of W preserves f; a short expm flow is
    cross-checked on a few points.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    pts = random_sphere_points(f.ambient_dim - 1, samples, rng)
    resid = np.array([abs(float(f.gradient(p) @ (W.matrix @ p)))
                      for p in pts])
    flow = expm(0.1 * W.matrix)
    flow_dev = max(abs(f(flow @ p) - f(p)) for p in pts[:20])
    worst = float(resid.max())
    return VerificationReport(
        check="tangency",
        config={"function": f.kind, "samples": samples, "tol": tol,
                "seed": seed},
        n_samples=samples,
        max_deviation=worst,
        per_level=[{"level": "df(W)", "mean": float(resid.mean()),
                    "spread": worst},
                   {"level": "flow(0.1)", "mean": flow_dev,
                    "spread": flow_dev}],
        passed=bool(worst < tol),
        wall_time_ms=int(1000 * (time.perf_counter() - start)),
    )


@dataclass
class SpectrumResult:
    """Clustered shape-operator spectrum of one level hypersurface."""

    level: float
    g: int
    multiplicities: tuple
    cluster_means: list
    consistent: bool
    per_point: list = field(default_factory=list)


def _cluster(evals: np.ndarray, gap: float) -> list[tuple[float, int]]:
    thresh = gap * max(1.0, float(np.abs(evals).max()))
    clusters = []
    run = [evals[0]]
    for lam in evals[1:]:
        if lam - run[-1] > thresh:
            clusters.append(run)
            run = [lam]
        else:
            run.append(lam)
    clusters.append(run)
    return [(float(np.mean(r)), len(r)) for r in clusters]


def principal_curvature_spectrum(metric: MetricField, f: SphereFunction,
                                 c: float, points: int = 20, seed: int = 0,
                                 gap: float = 1e-2,
                                 step: float = 1e-3) -> SpectrumResult:
    """Shape-operator eigenvalues of the level {f = c}, clustered.

    The shape operator is taken with respect to the localization metric
    q = g^F_{grad f}: S(u) = -(nabla^q_u n1) on the q-orthogonal
    complement of the F-unit normal n1 = grad f / F(grad f), with the
    covariant derivative assembled from finite differences of q.
    Eigenvalues are clustered by a relative gap; a clustering that changes
    under halving/doubling the gap raises ClusterAmbiguity.  The result is
    consistent when every sampled point reports the same multiplicities.
    """
    n = metric.dim
    samples = sample_level_set(f, c, points, seed)
    per_point = []
    signatures = set()
    for s in samples:
        fld = metric.with_center(s.point)
        x0 = np.zeros(n)

        def n1(xp):
            g = nonlinear_gradient(fld, f, xp)
            return g / fld.norm_at(xp)(g)

        def qmat(xp):
            norm = fld.norm_at(xp)
            grad = legendre_solve(norm, f.chart_gradient(fld.chart, xp))
            return 0.5 * norm.sq_jet(grad).hess

        q0 = qmat(x0)
        nu = n1(x0)

        # dq[k] and the Jacobian of the unit normal, fourth-order stencils
        dq = np.zeros((n, n, n))
        Jnu = np.zeros((n, n))
        for k in range(n):
            ek = np.zeros(n)
            ek[k] = step
            for off, wgt in zip(_OFFS, _WGTS):
                dq[k] += (wgt / step) * qmat(x0 + off * ek)
                Jnu[:, k] += (wgt / step) * n1(x0 + off * ek)

        qinv = np.linalg.inv(q0)
        # Gamma^k_{ij} = 1/2 q^{kl} (d_i q_{jl} + d_j q_{il} - d_l q_{ij});
        # dq[k, a, b] = d_k q_{ab}
        E = dq + dq.transpose(1, 0, 2) - dq.transpose(1, 2, 0)
        gamma = 0.5 * np.einsum("kl,ijl->kij", qinv, E)

        # q-orthonormal basis of the tangent space of the level set
        basis = []
        for i in range(n):
            u = np.zeros(n)
            u[i] = 1.0
            u = u - (float(u @ q0 @ nu)) * nu   # q(nu, nu) = 1
            for b in basis:
                u = u - float(u @ q0 @ b) * b
            norm_u = np.sqrt(max(float(u @ q0 @ u), 0.0))
            if norm_u > 1e-8:
                basis.append(u / norm_u)
        basis = basis[:n - 1]
        if len(basis) != n - 1:
            raise ClusterAmbiguity(
                "could not span the tangent space of the level set")

        mat = np.zeros((n - 1, n - 1))
        for a, ua in enumerate(basis):
            cov = Jnu @ ua + np.einsum("kij,i,j->k", gamma, nu, ua)
            cov = cov - float(cov @ q0 @ nu) * nu
            Su = -cov
            for b, ub in enumerate(basis):
                mat[a, b] = float(Su @ q0 @ ub)
        mat = 0.5 * (mat + mat.T)
        evals = np.linalg.eigvalsh(mat)

        clusters = _cluster(evals, gap)
        lo = _cluster(evals, 0.5 * gap)
        hi = _cluster(evals, 2.0 * gap)
        if len(lo) != len(clusters) or len(hi) != len(clusters):
            raise ClusterAmbiguity(
                f"clustering unstable at level {c}: "
                f"{len(lo)}/{len(clusters)}/{len(hi)} clusters")
        per_point.append(clusters)
        signatures.add(tuple(mult for _, mult in clusters))

    consistent = len(signatures) == 1
    first = per_point[0]
    g = len(first)
    mults = tuple(mult for _, mult in first)
    means = [float(np.mean([pt[i][0] for pt in per_point]))
             for i in range(g)] if consistent else [m for m, _ in first]
    return SpectrumResult(level=float(c), g=g, multiplicities=mults,
                          cluster_means=means, consistent=consistent,
                          per_point=per_point)
