"""Zermelo navigation on a vector space.

Given a Minkowski norm F and a wind v with F(v) < 1, the shifted
indicatrix {y + F(y) v : F(y) = 1} is the unit sphere of a new norm
F'; the defining property is F'(y + F(y) v) = F(y).  When F is a
quadratic (Riemannian) norm the result is a Randers norm in closed form,

    F'(u) = ( sqrt(lam * F(u)^2 + <v,u>^2) - <v,u> ) / lam,
    lam   = 1 - F(v)^2,

with <.,.> the inner product of F.  For a general norm the value is
recovered by solving F(u - s v) = s for the positive scalar s.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import NoConvergence, WindTooStrong
from .minkowski import NormEvaluator
from .report import VerificationReport


@dataclass
class NavigationDatum:
    """A base norm plus a wind vector with F(wind) < 1."""

    norm: NormEvaluator
    wind: np.ndarray

    def __post_init__(self):
        self.wind = np.asarray(self.wind, dtype=float)
        if np.any(self.wind) and self.norm(self.wind) >= 1.0:
            raise WindTooStrong(
                f"F(wind) = {self.norm(self.wind):.6f} >= 1")


def randers_from_navigation(A: np.ndarray, w: np.ndarray):
    """Randers data (alpha, beta) of the metric navigated from (sqrt(y^T A y), w)."""
    A = np.asarray(A, dtype=float)
    w = np.asarray(w, dtype=float)
    lam = 1.0 - float(w @ A @ w)
    if lam <= 0.0:
        raise WindTooStrong("quadratic wind has norm >= 1")
    Aw = A @ w
    alpha = (lam * A + np.outer(Aw, Aw)) / (lam * lam)
    beta = -Aw / lam
    return alpha, beta


def navigation_from_randers(alpha: np.ndarray, beta: np.ndarray):
    """Invert the Randers dictionary: recover (A, w) from (alpha, beta)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    core = alpha - np.outer(beta, beta)
    cf = cho_factor(core)
    w = -cho_solve(cf, beta)
    lam = 1.0 / (1.0 + float(beta @ cho_solve(cf, beta)))
    return lam * core, w


def navigate(datum: NavigationDatum, y_tilde, method: str = "auto") -> float:
    """Value of the navigated norm at y_tilde.

    method: "auto" picks the closed Randers formula when the base norm is
    quadratic and the scalar solve otherwise; "closed" / "solve" force a
    branch (the two agree to roundoff on quadratic norms).
    """
    y_tilde = np.asarray(y_tilde, dtype=float)
    if not np.any(y_tilde):
        return 0.0
    if method == "auto":
        method = "closed" if datum.norm.is_quadratic else "solve"
    if method == "closed":
        return _navigate_closed(datum, y_tilde)
    return _navigate_solve(datum, y_tilde)


def _navigate_closed(datum: NavigationDatum, y_tilde: np.ndarray) -> float:
    A = datum.norm.matrix
    w = datum.wind
    lam = 1.0 - float(w @ A @ w)
    wy = float(w @ A @ y_tilde)
    f2 = float(y_tilde @ A @ y_tilde)
    return (np.sqrt(lam * f2 + wy * wy) - wy) / lam


def _navigate_solve(datum: NavigationDatum, y_tilde: np.ndarray,
                    tol: float = 1e-13, max_iter: int = 200) -> float:
    F, v = datum.norm, datum.wind

    def phi(s):
        return F(y_tilde - s * v) - s

    lo, flo = 0.0, F(y_tilde)
    if flo == 0.0:
        return 0.0
    # phi is strictly decreasing whenever F(-v) < 1 (the case for every
    # datum this package produces); grow the bracket geometrically so the
    # solve stays safe even when F(-v) > F(v).
    hi = flo / max(1.0 - F(v), 1e-3)
    fhi = phi(hi)
    grow = 0
    while fhi > 0.0:
        hi *= 2.0
        fhi = phi(hi)
        grow += 1
        if grow > 60:
            raise NoConvergence("navigation solve found no bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = phi(mid)
        if fm > 0.0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        if hi - lo < tol * max(1.0, hi):
            break
    # secant polish inside the bracket
    s0, s1, f0, f1 = lo, hi, flo, fhi
    for _ in range(8):
        if f1 == f0:
            break
        s2 = s1 - f1 * (s1 - s0) / (f1 - f0)
        if not (lo <= s2 <= hi):
            break
        s0, f0, s1, f1 = s1, f1, s2, phi(s2)
    return 0.5 * (s0 + s1) if abs(f1) > abs(f0) else s1


def navigated_norm(datum: NavigationDatum) -> NormEvaluator:
    """The navigated norm as a NormEvaluator.

    Quadratic base norms give an exact Randers evaluator; anything else
    gives a custom evaluator backed by the scalar solve.
    """
    if not np.any(datum.wind):
        return datum.norm
    if datum.norm.is_quadratic:
        alpha, beta = randers_from_navigation(datum.norm.matrix, datum.wind)
        return NormEvaluator.randers(alpha, beta)
    return NormEvaluator.custom(datum.norm.dim,
                                lambda y: navigate(datum, y, method="solve"))


def invert_navigation(randers: NormEvaluator, v) -> NormEvaluator:
    """Undo navigation: the datum (F', -v) recovers the original norm F.

    For a Randers evaluator whose implied wind matches v the quadratic
    original is reconstructed exactly; otherwise the generic scalar-solve
    norm for the datum (randers, -v) is returned.
    """
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        return randers
    if randers.kind == "randers":
        A, w = navigation_from_randers(randers.alpha, randers.beta)
        if np.linalg.norm(w - v) <= 1e-8 * (1.0 + np.linalg.norm(v)):
            return NormEvaluator.quadratic(A)
    inverse_datum = NavigationDatum(randers, -v)
    return NormEvaluator.custom(
        randers.dim, lambda y: navigate(inverse_datum, y, method="solve"))


def check_navigation_lemma(datum: NavigationDatum, y=None, u=None,
                           samples: int = 1000, tol: float = 1e-8,
                           seed: int = 0) -> VerificationReport:
    """Check the navigation inner-product identity on sampled pairs.

    Base vectors are scaled to F(y) = 1 (the identity lives on the
    indicatrix; for general y the wind terms pick up a factor 1/F(y)) and
    u is made g_y^F-orthogonal to y by one Gram-Schmidt step.  Then

        <u,u>_y^F * (1 - <y', v>_{y'}^{F'}) = <u,u>_{y'}^{F'},

    with y' = y + F(y) v, together with its rearranged corollary
    <u,u>_{y'}^{F'} = <u,u>_y^F / (1 + <y, v>_y^F) and the exact special
    case <u,u>_{y'}^{F'} = <u,u>_y^F when <v, y>_y^F = 0.
    """
    start = time.perf_counter()
    F = datum.norm
    v = datum.wind
    n = F.dim
    Ft = navigated_norm(datum)
    rng = np.random.default_rng(seed)

    def both_sides(yv, uv):
        yv = yv / F(yv)
        gy = 0.5 * F.sq_jet(yv).hess
        uv = uv - (uv @ gy @ yv) / (yv @ gy @ yv) * yv   # enforce <u,y>_y = 0
        yt = yv + F(yv) * v
        gt = 0.5 * Ft.sq_jet(yt).hess
        uu_y = float(uv @ gy @ uv)
        uu_t = float(uv @ gt @ uv)
        ytv = float(yt @ gt @ v)
        yv_v = float(yv @ gy @ v)
        r_main = abs(uu_y * (1.0 - ytv) - uu_t)
        r_cor = abs(uu_t * (1.0 + yv_v) - uu_y)
        return r_main, r_cor

    devs_main, devs_cor, devs_orth = [], [], []
    fixed = [(np.asarray(y, float), np.asarray(u, float))] if y is not None and u is not None else []
    for yv, uv in fixed:
        rm, rc = both_sides(yv, uv)
        devs_main.append(rm)
        devs_cor.append(rc)
    for _ in range(samples):
        yv = rng.standard_normal(n)
        yv /= F(yv)
        uv = rng.standard_normal(n)
        rm, rc = both_sides(yv, uv)
        devs_main.append(rm)
        devs_cor.append(rc)
    # special case: base vectors with <v, y>_y^F = 0 give exact equality
    if np.any(v) and F.is_quadratic:
        A = F.matrix
        for _ in range(max(samples // 10, 1)):
            yv = rng.standard_normal(n)
            yv = yv - (yv @ A @ v) / (v @ A @ v) * v
            if np.linalg.norm(yv) < 1e-8:
                continue
            yv /= F(yv)
            uv = rng.standard_normal(n)
            gy = 0.5 * F.sq_jet(yv).hess
            uv = uv - (uv @ gy @ yv) / (yv @ gy @ yv) * yv
            yt = yv + F(yv) * v
            gt = 0.5 * Ft.sq_jet(yt).hess
            devs_orth.append(abs(float(uv @ gt @ uv) - float(uv @ gy @ uv)))

    levels = [
        {"level": "identity", "mean": float(np.mean(devs_main)),
         "spread": float(np.max(devs_main))},
        {"level": "corollary", "mean": float(np.mean(devs_cor)),
         "spread": float(np.max(devs_cor))},
    ]
    if devs_orth:
        levels.append({"level": "orthogonal-wind", "mean": float(np.mean(devs_orth)),
                       "spread": float(np.max(devs_orth))})
    max_dev = max(float(np.max(devs_main)), float(np.max(devs_cor)),
                  float(np.max(devs_orth)) if devs_orth else 0.0)
    return VerificationReport(
        check="navigation-lemma",
        config={"dim": n, "wind": v.tolist(), "samples": samples,
                "tol": tol, "seed": seed},
        n_samples=len(devs_main) + len(devs_cor) + len(devs_orth),
        max_deviation=max_dev,
        per_level=levels,
        passed=bool(max_dev < tol),
        wall_time_ms=int(1000 * (time.perf_counter() - start)),
    )
