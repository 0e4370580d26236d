"""Symmetric Clifford systems, their quartic polynomials and symmetries.

A symmetric Clifford system {P_0, ..., P_m} on R^{2l} consists of symmetric
matrices with P_i P_j + P_j P_i = 2 delta_ij I.  The built-in construction
produces integer matrices, so anticommutation holds exactly.  On the unit
sphere the degree-4 polynomial

    f(x) = |x|^4 - 2 sum_i <P_i x, x>^2

takes values in [-1, 1]; its regular levels are the OT-FKM hypersurfaces
with multiplicities (m1, m2) = (m, l - m - 1).

Two families of sphere symmetries preserve f:

* the spin lift: the span of the products P_i P_j / 2 (i < j), a copy of
  so(m+1) acting on R^{2l};
* the centralizer c(Sigma): all skew matrices commuting with every P_i.

The centralizer is computed by dense linear algebra on the skew-matrix
space, intersecting the fixed spaces of the conjugations X -> P_i X P_i
one generator at a time.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (NotOnFocalSet, RankDeficiency, UnsupportedSplit)

# 2x2 generators: reflection-free building blocks of the representations
_R = np.array([[0.0, 1.0], [-1.0, 0.0]])   # rotation, R^2 = -I, skew
_D = np.array([[1.0, 0.0], [0.0, -1.0]])   # diagonal involution, symmetric
_S = np.array([[0.0, 1.0], [1.0, 0.0]])    # swap involution, symmetric


def clifford_delta(m: int) -> int:
    """Dimension delta_m of the irreducible module (so 2l = 2 k delta_m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    q, r = divmod(m, 8)
    if r == 1:
        return 2 ** (4 * q)
    if r == 2:
        return 2 ** (4 * q + 1)
    if r == 3 or r == 4:
        return 2 ** (4 * q + 2)
    if r in (5, 6, 7):
        return 2 ** (4 * q + 3)
    # r == 0, m = 8q with q >= 1
    return 2 ** (4 * q - 1)


def _skew_family(q: int) -> list[np.ndarray]:
    """q pairwise-anticommuting skew complex structures on R^{delta_{q+1}}.

    Built recursively from tensor products of R, D, S; dimension doubles at
    q in {1, 2, 4, 8} and multiplies by 16 every 8 generators.
    """
    if q == 0:
        return []
    if q == 1:
        return [_R]
    if q <= 3:
        fam = [np.kron(_R, _D), np.kron(_R, _S), np.kron(np.eye(2), _R)]
        return fam[:q]
    if q <= 7:
        base = _skew_family(3)
        eye4 = np.eye(4)
        commuting = [np.kron(_D, _R), np.kron(_S, _R), np.kron(_R, np.eye(2))]
        fam = [np.kron(_D, E) for E in base] + [np.kron(_R, eye4)]
        fam += [np.kron(_S, B) for B in commuting]
        return fam[:q]
    if q == 8:
        base = _skew_family(7)
        return [np.kron(_D, E) for E in base] + [np.kron(_R, np.eye(8))]
    # periodicity: tensor the 8-generator family with a smaller one
    eight = _skew_family(8)
    d8 = eight[0].shape[0]
    rest = _skew_family(q - 8)
    d = rest[0].shape[0] if rest else 1
    omega = np.eye(d8)
    for E in eight:
        omega = omega @ E
    fam = [np.kron(E, np.eye(d)) for E in eight]
    fam += [np.kron(omega, E) for E in rest]
    return fam


def _irreducible_system(m: int) -> list[np.ndarray]:
    """The irreducible symmetric Clifford system {P'_0, ..., P'_m}."""
    delta = clifford_delta(m)
    fam = _skew_family(m - 1)
    eye = np.eye(delta)
    P0 = np.block([[eye, 0.0 * eye], [0.0 * eye, -eye]])
    P1 = np.block([[0.0 * eye, eye], [eye, 0.0 * eye]])
    system = [P0, P1]
    for E in fam:
        system.append(np.block([[0.0 * E, E], [-E, 0.0 * E]]))
    return system


@dataclass
class CliffordSystem:
    """A symmetric Clifford system with its multiplicity bookkeeping."""

    m: int
    l: int
    matrices: list
    k: int
    k1: int | None = None
    k2: int | None = None
    delta_m: int = 0

    @property
    def dim(self) -> int:
        return 2 * self.l

    @property
    def multiplicities(self) -> tuple[int, int]:
        return self.m, self.l - self.m - 1

    def to_json(self) -> str:
        payload = {"m": self.m, "l": self.l, "k": self.k,
                   "matrices": [P.astype(int).tolist() for P in self.matrices]}
        if self.k1 is not None:
            payload["k1"] = self.k1
            payload["k2"] = self.k2
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text) -> "CliffordSystem":
        data = json.loads(text) if isinstance(text, str) else text
        mats = [np.asarray(P, dtype=float) for P in data["matrices"]]
        m = data["m"]
        return cls(m=m, l=data["l"], matrices=mats, k=data["k"],
                   k1=data.get("k1"), k2=data.get("k2"),
                   delta_m=clifford_delta(m))


def build_clifford(m: int, k) -> CliffordSystem:
    """Build the system of k copies of the irreducible module.

    For m = 0 mod 4 there are two inequivalent irreducibles (they differ
    by the sign of P_m) and k may be a pair (k1, k2); a plain integer k is
    read as (k, 0).  Emits a warning when m2 = l - m - 1 < 1, i.e. when
    the quartic polynomial is not isoparametric.
    """
    if isinstance(k, (tuple, list)):
        if m % 4 != 0:
            raise UnsupportedSplit(
                "(k1, k2) splits exist only when m = 0 mod 4")
        k1, k2 = int(k[0]), int(k[1])
        if k1 < k2:
            k1, k2 = k2, k1            # congruence normalization k1 >= k2
        ktot = k1 + k2
    else:
        ktot = int(k)
        k1 = k2 = None
        if m % 4 == 0:
            k1, k2 = ktot, 0
    if ktot < 1:
        raise ValueError("k must be >= 1")

    prime = _irreducible_system(m)
    delta = clifford_delta(m)
    eye_k = np.eye(ktot)
    if m % 4 == 0 and k2 is not None:
        sign = np.diag([1.0] * k1 + [-1.0] * k2)
        matrices = [np.kron(P, eye_k) for P in prime[:-1]]
        matrices.append(np.kron(prime[-1], sign))
    else:
        matrices = [np.kron(P, eye_k) for P in prime]

    l = ktot * delta
    sys_ = CliffordSystem(m=m, l=l, matrices=matrices, k=ktot,
                          k1=k1, k2=k2, delta_m=delta)
    err = anticommutation_error(sys_)
    if err != 0:
        raise AssertionError(f"construction broke anticommutation ({err})")
    if l - m - 1 < 1:
        warnings.warn(f"m2 = {l - m - 1} < 1: quartic is not isoparametric "
                      f"for (m={m}, k={ktot})", stacklevel=2)
    return sys_


def anticommutation_error(sys_: CliffordSystem) -> float:
    """max |P_i P_j + P_j P_i - 2 delta_ij I|; 0 exactly for built systems."""
    eye2 = 2.0 * np.eye(sys_.dim)
    worst = 0.0
    for i, Pi in enumerate(sys_.matrices):
        for j, Pj in enumerate(sys_.matrices[i:], start=i):
            acm = Pi @ Pj + Pj @ Pi
            target = eye2 if i == j else 0.0
            worst = max(worst, float(np.abs(acm - target).max()))
    return worst


def otfkm_value(sys_: CliffordSystem, x) -> float:
    """f(x) = |x|^4 - 2 sum <P_i x, x>^2 on the unit sphere (x renormalized)."""
    x = np.asarray(x, dtype=float)
    x = x / np.linalg.norm(x)
    total = 0.0
    for P in sys_.matrices:
        total += float(x @ P @ x) ** 2
    return 1.0 - 2.0 * total


def otfkm_gradient(sys_: CliffordSystem, x) -> np.ndarray:
    """Ambient gradient 4 |x|^2 x - 8 sum <P_i x, x> P_i x."""
    x = np.asarray(x, dtype=float)
    grad = 4.0 * float(x @ x) * x
    for P in sys_.matrices:
        Px = P @ x
        grad -= 8.0 * float(x @ Px) * Px
    return grad


@dataclass
class SkewBasis:
    """Frobenius-orthonormal basis of a space of skew matrices."""

    elements: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.elements)

    def span_matrix(self) -> np.ndarray:
        """(dim^2, k) matrix of vectorized basis elements."""
        return np.column_stack([E.ravel() for E in self.elements])


def _pair_basis_matrices(Q: np.ndarray, idx: np.ndarray) -> list[np.ndarray]:
    # skew matrices Q (E_ab - E_ba) Q^T / sqrt(2) for a < b within idx
    out = []
    for ai in range(len(idx)):
        for bi in range(ai + 1, len(idx)):
            u = Q[:, idx[ai]]
            v = Q[:, idx[bi]]
            out.append((np.outer(u, v) - np.outer(v, u)) / np.sqrt(2.0))
    return out


def centralizer(sys_: CliffordSystem, tol: float = 1e-8,
                ambiguity_band: float = 1e-4) -> SkewBasis:
    """Basis of c(Sigma): skew X with [X, P] = 0 for every P in Sigma.

    Since P_i^2 = I, commuting with P_i is the same as being fixed by the
    Frobenius-orthogonal involution X -> P_i X P_i.  Starting from the
    closed-form fixed space of P_0 (block-skew matrices in its
    eigenbasis), the fixed space of each remaining conjugation is cut out
    by an eigen-decomposition of its compression to the current subspace;
    for an orthogonal map, compression eigenvalue 1 is equivalent to being
    genuinely fixed.  Eigenvalues inside (1 - ambiguity_band, 1 - tol)
    would make the rank ambiguous and raise RankDeficiency.
    """
    P0 = sys_.matrices[0]
    evals, Q = np.linalg.eigh(P0)
    pos = np.where(evals > 0.0)[0]
    neg = np.where(evals < 0.0)[0]
    basis = _pair_basis_matrices(Q, pos) + _pair_basis_matrices(Q, neg)
    if not basis:
        return SkewBasis([])
    stack = np.stack(basis)                       # (N, 2l, 2l)

    for P in sys_.matrices[1:]:
        conj = np.einsum("ab,nbc,cd->nad", P, stack, P, optimize=True)
        gram = np.tensordot(stack, conj, axes=([1, 2], [1, 2]))
        gram = 0.5 * (gram + gram.T)
        mu, V = np.linalg.eigh(gram)
        if np.any((mu > 1.0 - ambiguity_band) & (mu < 1.0 - tol)):
            raise RankDeficiency(
                "fixed-space eigenvalues fall inside the ambiguity band")
        keep = mu >= 1.0 - tol
        if not np.any(keep):
            return SkewBasis([])
        stack = np.einsum("nk,nab->kab", V[:, keep], stack, optimize=True)

    return SkewBasis([0.5 * (E - E.T) for E in stack])


def predicted_centralizer_dim(m: int, k: int, k1=None, k2=None) -> int:
    """Centralizer dimension predicted by the representation type:

    so(k) for m = 1, 7 (mod 8); u(k) for m = 2, 6; sp(k) for m = 3, 5;
    sp(k1) + sp(k2) for m = 4 (mod 8); so(k1) + so(k2) for m = 0 (mod 8).
    """
    r = m % 8
    if r in (1, 7):
        return k * (k - 1) // 2
    if r in (2, 6):
        return k * k
    if r in (3, 5):
        return k * (2 * k + 1)
    if k1 is None:
        k1, k2 = k, 0
    if r == 4:
        return k1 * (2 * k1 + 1) + k2 * (2 * k2 + 1)
    return k1 * (k1 - 1) // 2 + k2 * (k2 - 1) // 2


def spin_lift(sys_: CliffordSystem) -> SkewBasis:
    """The m(m+1)/2 products P_i P_j / 2 (i < j): a copy of so(m+1).

    Each element is skew and its one-parameter flow rotates Sigma, so it
    preserves the quartic polynomial of the system.
    """
    out = []
    for i, Pi in enumerate(sys_.matrices):
        for Pj in sys_.matrices[i + 1:]:
            out.append(0.5 * (Pi @ Pj))
    return SkewBasis(out)


def find_clifford_point(sys_: CliffordSystem, y, tol: float = 1e-8) -> np.ndarray:
    """The unique P in Sigma with P y = y, for y on the focal set f = -1.

    P = sum a_i P_i with a_i = <P_i y, y>; the coefficients satisfy
    sum a_i^2 = 1 exactly on the focal set.
    """
    y = np.asarray(y, dtype=float)
    y = y / np.linalg.norm(y)
    if abs(otfkm_value(sys_, y) + 1.0) >= tol:
        raise NotOnFocalSet("otfkm value differs from -1 at the given point")
    coeff = np.array([float(y @ P @ y) for P in sys_.matrices])
    P = sum(a * Pi for a, Pi in zip(coeff, sys_.matrices))
    if np.linalg.norm(P @ y - y) >= tol:
        raise NotOnFocalSet("recovered element does not fix the point")
    return P


def full_symmetry_dimension(sys_: CliffordSystem) -> int:
    """dim of the symmetry algebra preserving the quartic polynomial:
    m(m+1)/2 (spin lift) plus the centralizer dimension."""
    return sys_.m * (sys_.m + 1) // 2 + centralizer(sys_).dim


def symmetry_basis(sys_: CliffordSystem) -> SkewBasis:
    """Spin lift and centralizer stacked into one basis."""
    return SkewBasis(spin_lift(sys_).elements + centralizer(sys_).elements)


def lie_closure_residual(basis: SkewBasis, trials: int = 10,
                         seed: int = 0) -> float:
    """max relative residual of projecting [X, Y] back onto the span,
    for random X, Y in the span of ``basis``."""
    rng = np.random.default_rng(seed)
    S = basis.span_matrix()
    Q, _ = np.linalg.qr(S)
    worst = 0.0
    shape = basis.elements[0].shape
    for _ in range(trials):
        X = (S @ rng.standard_normal(basis.dim)).reshape(shape)
        Y = (S @ rng.standard_normal(basis.dim)).reshape(shape)
        C = (X @ Y - Y @ X).ravel()
        resid = C - Q @ (Q.T @ C)
        # scale by |X||Y|, not |C|: commuting pairs give C at noise level
        denom = np.linalg.norm(X) * np.linalg.norm(Y)
        if denom > 0:
            worst = max(worst, float(np.linalg.norm(resid) / denom))
    return worst


def audit(sys_: CliffordSystem, closure_trials: int = 6,
          seed: int = 0) -> dict:
    """Full structural audit of one system; returns a dict of findings."""
    acm = anticommutation_error(sys_)
    evals = np.linalg.eigvalsh(sys_.matrices[0])
    mult_plus = int(np.sum(evals > 0.5))
    mult_minus = int(np.sum(evals < -0.5))
    cent = centralizer(sys_)
    spin = spin_lift(sys_)
    predicted = predicted_centralizer_dim(sys_.m, sys_.k, sys_.k1, sys_.k2)
    basis = SkewBasis(spin.elements + cent.elements)
    closure = lie_closure_residual(basis, trials=closure_trials, seed=seed)
    return {
        "m": sys_.m,
        "k": sys_.k,
        "k1": sys_.k1,
        "k2": sys_.k2,
        "l": sys_.l,
        "delta_m": sys_.delta_m,
        "anticommutation_error": acm,
        "eigen_multiplicities": [mult_plus, mult_minus],
        "centralizer_dim": cent.dim,
        "centralizer_dim_predicted": predicted,
        "spin_dim": spin.dim,
        "spin_dim_predicted": sys_.m * (sys_.m + 1) // 2,
        "lie_closure_residual": closure,
        "full_symmetry_dim": spin.dim + cent.dim,
        "ok": bool(acm == 0.0
                   and mult_plus == sys_.l and mult_minus == sys_.l
                   and cent.dim == predicted
                   and closure < 1e-10),
    }
