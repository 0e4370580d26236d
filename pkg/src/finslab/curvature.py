"""Geodesic spray, Riemann curvature, flag curvature, geodesic integration.

The spray is

    G^i(x, y) = 1/4 g^{il}(x,y) ( d^2(F^2)/dx^k dy^l y^k - d(F^2)/dx^l ),

and the Riemann curvature in chart coordinates

    R^i_k(y) = 2 dG^i/dx^k - y^j d^2 G^i/dx^j dy^k
               + 2 G^j d^2 G^i/dy^j dy^k - dG^i/dy^j dG^j/dy^k.

For quadratic and Randers pointwise norms the x-dependence of F^2 lives
entirely in the coefficient fields (A(x), or alpha(x), beta(x)), so the
spray is evaluated in closed form from those fields and their
fourth-order finite-difference x-derivatives; y-derivatives are exact.
Derivatives of G itself use fourth-order stencils at a larger step: G
carries ~1e-12 of stencil noise, and the outer steps keep the amplified
noise near 1e-7, well inside the 1e-4 acceptance band for flag curvature.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (ChartBoundary, DegenerateFlag, DifferentiationFailure,
                     ZeroBaseVector)
from .sphere import MetricField

# 4-point, fourth-order central first-derivative stencil
_OFFS = np.array([-2.0, -1.0, 1.0, 2.0])
_WGTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0

_X_STEP = 1e-4      # stencil for the coefficient-field derivatives
_OUT_STEP = 5e-3    # stencils applied to the spray itself


def _check_stencil(metric: MetricField, x: np.ndarray, reach: float):
    r = np.linalg.norm(x)
    if r >= metric.chart.radius:
        raise ChartBoundary(f"|x| = {r:.3f} outside chart domain")
    if r + 2.0 * reach >= metric.chart.radius:
        raise DifferentiationFailure("stencil would leave the chart domain")


class _LocalModel:
    """Closed-form spray data at one chart point.

    quad:    A and DA[k] = dA/dx^k
    randers: alpha, beta and their x-derivatives
    custom:  no closed form; sprays fall back to direct stencils of F^2
             (reduced accuracy, since the fiber derivatives are FD too)
    """

    __slots__ = ("quad", "A", "DA", "alpha", "beta", "Dalpha", "Dbeta",
                 "generic")

    def __init__(self, metric: MetricField, x: np.ndarray):
        n = metric.dim
        norm = metric.norm_at(x)
        self.quad = norm.is_quadratic
        self.generic = None
        if norm.kind == "custom":
            self.generic = (metric, x.copy())
            return
        if self.quad:
            self.A = norm.matrix
            self.DA = np.zeros((n, n, n))
            for k in range(n):
                ek = np.zeros(n)
                ek[k] = _X_STEP
                for off, wgt in zip(_OFFS, _WGTS):
                    self.DA[k] += (wgt / _X_STEP) * \
                        metric.norm_at(x + off * ek).matrix
        else:
            self.alpha = norm.alpha
            self.beta = norm.beta
            self.Dalpha = np.zeros((n, n, n))
            self.Dbeta = np.zeros((n, n))
            for k in range(n):
                ek = np.zeros(n)
                ek[k] = _X_STEP
                for off, wgt in zip(_OFFS, _WGTS):
                    nb = metric.norm_at(x + off * ek)
                    self.Dalpha[k] += (wgt / _X_STEP) * nb.alpha
                    self.Dbeta[k] += (wgt / _X_STEP) * nb.beta

    def spray(self, y: np.ndarray) -> np.ndarray:
        if self.generic is not None:
            return _generic_spray(*self.generic, y)
        if self.quad:
            DAy = self.DA @ y                       # (k, l)
            s = DAy @ y                             # y^T dA/dx^k y
            rhs = 2.0 * (y @ DAy) - s
            return 0.25 * np.linalg.solve(self.A, rhs)
        ay = self.alpha @ y
        a2 = float(y @ ay)
        if a2 <= 0.0:
            raise ZeroBaseVector("spray undefined at y = 0")
        a = np.sqrt(a2)
        b = float(self.beta @ y)
        F = a + b
        p = ay / a
        m = p + self.beta
        Day = self.Dalpha @ y                       # (k, l)
        s = Day @ y                                 # (k,)
        dF = s / (2.0 * a) + self.Dbeta @ y         # dF/dx^k
        mixed = 2.0 * (np.outer(dF, m)
                       + F * (Day / a - np.outer(s, p) / (2.0 * a2)
                              + self.Dbeta))
        rhs = y @ mixed - 2.0 * F * dF
        g = (F / a) * (self.alpha - np.outer(p, p)) + np.outer(m, m)
        return 0.25 * np.linalg.solve(g, rhs)


def _generic_spray(metric: MetricField, x: np.ndarray,
                   y: np.ndarray) -> np.ndarray:
    # direct stencils of F^2 for pointwise norms without stored
    # coefficient fields
    n = metric.dim
    norm = metric.norm_at(x)
    g = 0.5 * norm.sq_jet(y).hess
    yn = np.linalg.norm(y)
    u = y / yn
    dgrad = np.zeros(n)
    for off, wgt in zip(_OFFS, _WGTS):
        _, gr = metric.norm_at(x + off * _X_STEP * u).sq_value_grad(y)
        dgrad += wgt * gr
    dgrad *= yn / _X_STEP
    dphi = np.zeros(n)
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = _X_STEP
        acc = 0.0
        for off, wgt in zip(_OFFS, _WGTS):
            acc += wgt * metric.norm_at(x + off * ek)(y) ** 2
        dphi[k] = acc / _X_STEP
    return 0.25 * np.linalg.solve(g, dgrad - dphi)


def _model_at(metric: MetricField, x: np.ndarray) -> _LocalModel:
    cache = metric.__dict__.setdefault("_model_cache", {})
    key = x.tobytes()
    model = cache.get(key)
    if model is None:
        if len(cache) > 4000:
            cache.clear()
        model = _LocalModel(metric, x)
        cache[key] = model
    return model


def geodesic_spray(metric: MetricField, x, y) -> np.ndarray:
    """Spray coefficients (G^1, ..., G^n); 2-homogeneous in y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ZeroBaseVector("spray undefined at y = 0")
    _check_stencil(metric, x, _X_STEP * 2.0)
    return _model_at(metric, x).spray(y)


def riemann_curvature(metric: MetricField, x, y) -> np.ndarray:
    """The matrix R^i_k(y); satisfies R(y) y = 0 up to stencil noise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise ZeroBaseVector("Riemann curvature undefined at y = 0")
    _check_stencil(metric, x, 2.0 * _OUT_STEP + 2.0 * _X_STEP)
    n = metric.dim
    h = _OUT_STEP

    base = _model_at(metric, x)
    G0 = base.spray(y)

    # 2 dG/dx^k
    dGdx = np.zeros((n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = h
        acc = np.zeros(n)
        for off, wgt in zip(_OFFS, _WGTS):
            acc += wgt * _model_at(metric, x + off * ek).spray(y)
        dGdx[:, k] = acc / h

    # directional x-derivative of G along w = y, then d/dy^k of it
    yn = np.linalg.norm(y)
    u = y / yn
    dir_models = [_model_at(metric, x + off * h * u) for off in _OFFS]

    def dir_x(yv):
        acc = np.zeros(n)
        for mod, wgt in zip(dir_models, _WGTS):
            acc += wgt * mod.spray(yv)
        return acc * (yn / h)

    mixed = np.zeros((n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = h
        acc = np.zeros(n)
        for off, wgt in zip(_OFFS, _WGTS):
            acc += wgt * dir_x(y + off * ek)
        mixed[:, k] = acc / h

    # directional y-derivative of G along w = G0, then d/dy^k of it
    g0n = np.linalg.norm(G0)
    second = np.zeros((n, n))
    if g0n > 1e-14:
        v = G0 / g0n

        def dir_y(yv):
            acc = np.zeros(n)
            for off, wgt in zip(_OFFS, _WGTS):
                acc += wgt * base.spray(yv + off * h * v)
            return acc * (g0n / h)

        for k in range(n):
            ek = np.zeros(n)
            ek[k] = h
            acc = np.zeros(n)
            for off, wgt in zip(_OFFS, _WGTS):
                acc += wgt * dir_y(y + off * ek)
            second[:, k] = acc / h

    # full y-Jacobian of G
    dGdy = np.zeros((n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = h
        acc = np.zeros(n)
        for off, wgt in zip(_OFFS, _WGTS):
            acc += wgt * base.spray(y + off * ek)
        dGdy[:, k] = acc / h

    return 2.0 * dGdx - mixed + 2.0 * second - dGdy @ dGdy


@dataclass
class Flag:
    """A flag (x, y, P = span{y, v}) for the flag-curvature quotient."""

    x: np.ndarray
    y: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if not np.any(self.y):
            raise ZeroBaseVector("flagpole must be nonzero")


def flag_curvature(metric: MetricField, flag: Flag) -> float:
    """K(x, y, span{y, v}) = <R_y v, v>_y / (|y|_y^2 |v|_y^2 - <y,v>_y^2).

    The flag is orthonormalized first (y scaled to F(y) = 1, v projected
    g_y-orthogonal to y and normalized), which makes the denominator 1.
    Invariant under v -> v + c y and v -> c v.
    """
    x, y, v = flag.x, flag.y, flag.v
    norm = metric.norm_at(x)
    Fy = norm(y)
    if Fy <= 0.0:
        raise ZeroBaseVector("flagpole has zero length")
    y = y / Fy
    g = 0.5 * norm.sq_jet(y).hess
    gyy = float(y @ g @ y)
    v = v - (float(v @ g @ y) / gyy) * y
    vv = float(v @ g @ v)
    if vv <= 1e-12 * gyy * float(flag.v @ flag.v + 1.0):
        raise DegenerateFlag("flag plane is numerically degenerate")
    v = v / np.sqrt(vv)
    R = riemann_curvature(metric, x, y)
    return float((R @ v) @ g @ v)


@dataclass
class GeodesicPath:
    """Discrete geodesic: times, chart/ambient samples and F along the way.

    chart_points are coordinates in the chart that was current at each
    step; re-centering events are recorded so consumers can tell frames
    apart.  Ambient samples are global and frame-free.
    """

    times: np.ndarray
    chart_points: np.ndarray
    chart_velocities: np.ndarray
    ambient_points: np.ndarray
    ambient_velocities: np.ndarray
    F_values: np.ndarray
    recenters: list

    def to_csv(self, path: str):
        n = self.chart_points.shape[1]
        header = (["t"] + [f"x{i+1}" for i in range(n)]
                  + [f"y{i+1}" for i in range(n)] + ["F"])
        data = np.column_stack([self.times, self.chart_points,
                                self.chart_velocities, self.F_values])
        np.savetxt(path, data, delimiter=",", header=",".join(header),
                   comments="")


def integrate_geodesic(metric: MetricField, x0, y0, T: float,
                       steps: Optional[int] = None) -> GeodesicPath:
    """RK4 integration of x'' + 2 G(x, x') = 0 from (x0, y0), F-unit speed.

    The chart is re-centered at the current point whenever |x| > 1, so the
    trajectory may cross the whole sphere; ChartBoundary is raised only if
    re-centering is impossible for this metric kind.
    """
    x = np.asarray(x0, dtype=float).copy()
    y = np.asarray(y0, dtype=float).copy()
    F0 = metric.value(x, y)
    if F0 <= 0.0:
        raise ZeroBaseVector("initial velocity must be nonzero")
    y /= F0
    if steps is None:
        steps = max(int(np.ceil(1000 * abs(T) / np.pi)), 16)
    dt = T / steps

    def rhs(xc, yc):
        return yc, -2.0 * geodesic_spray(metric, xc, yc)

    times = np.empty(steps + 1)
    cpts = np.empty((steps + 1, len(x)))
    cvel = np.empty((steps + 1, len(x)))
    apts = np.empty((steps + 1, len(x) + 1))
    avel = np.empty((steps + 1, len(x) + 1))
    fval = np.empty(steps + 1)
    recenters = []

    def record(i, t):
        times[i] = t
        cpts[i] = x
        cvel[i] = y
        J = metric.chart.jacobian(x)
        apts[i] = metric.chart.map(x)
        avel[i] = J @ y
        fval[i] = metric.value(x, y)

    record(0, 0.0)
    for i in range(steps):
        k1x, k1y = rhs(x, y)
        k2x, k2y = rhs(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y)
        k3x, k3y = rhs(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y)
        k4x, k4y = rhs(x + dt * k3x, y + dt * k3y)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        y = y + dt / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y)
        if np.linalg.norm(x) > 1.0:
            p = metric.chart.map(x)
            v_amb = metric.chart.jacobian(x) @ y
            metric = metric.with_center(p)
            x = np.zeros_like(x)
            y = metric.chart.basis.T @ v_amb
            recenters.append(i + 1)
        record(i + 1, (i + 1) * dt)

    return GeodesicPath(times, cpts, cvel, apts, avel, fval, recenters)


def integrate_flow(field: Callable[[np.ndarray], np.ndarray], x0,
                   T: float, steps: int = 200) -> np.ndarray:
    """RK4 flow of a chart vector field; returns the sampled chart points."""
    x = np.asarray(x0, dtype=float).copy()
    dt = T / steps
    out = np.empty((steps + 1, len(x)))
    out[0] = x
    for i in range(steps):
        k1 = field(x)
        k2 = field(x + 0.5 * dt * k1)
        k3 = field(x + 0.5 * dt * k2)
        k4 = field(x + dt * k3)
        x = x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[i + 1] = x
    return out


def geodesic_field_residual(metric: MetricField,
                            field: Callable[[np.ndarray], np.ndarray],
                            x, step: float = 1e-3) -> float:
    """Residual |J_V(x) V(x) + 2 G(x, V(x))| of the geodesic ODE for the
    integral curves of the chart vector field V."""
    x = np.asarray(x, dtype=float)
    V = field(x)
    n = len(x)
    JV = np.zeros((n, n))
    for k in range(n):
        ek = np.zeros(n)
        ek[k] = step
        acc = np.zeros(n)
        for off, wgt in zip(_OFFS, _WGTS):
            acc += wgt * field(x + off * ek)
        JV[:, k] = acc / step
    return float(np.linalg.norm(JV @ V + 2.0 * geodesic_spray(metric, x, V)))
