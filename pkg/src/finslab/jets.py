"""Second-order forward-mode jets.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar
expression with respect to a vector variable y.  Propagating jets through
the closed-form evaluation of a norm gives derivatives that are exact to
roundoff, which the curvature stack needs: finite differences in y would
throw away four orders of magnitude.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Jet2:
    """Truncated Taylor data (value, gradient, Hessian) of a scalar in y."""

    val: float
    grad: np.ndarray
    hess: np.ndarray

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.val + other.val, self.grad + other.grad,
                        self.hess + other.hess)
        return Jet2(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.val - other.val, self.grad - other.grad,
                        self.hess - other.hess)
        return Jet2(self.val - other, self.grad, self.hess)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            cross = np.outer(self.grad, other.grad)
            return Jet2(self.val * other.val,
                        self.val * other.grad + other.val * self.grad,
                        self.val * other.hess + other.val * self.hess
                        + cross + cross.T)
        return Jet2(self.val * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def __neg__(self):
        return Jet2(-self.val, -self.grad, -self.hess)


def linear_jet(b: np.ndarray, y: np.ndarray) -> Jet2:
    """Jet of the linear form y -> b . y."""
    n = len(y)
    return Jet2(float(b @ y), np.asarray(b, dtype=float).copy(),
                np.zeros((n, n)))


def quadratic_jet(A: np.ndarray, y: np.ndarray) -> Jet2:
    """Jet of the quadratic form y -> y^T A y (A symmetric)."""
    Ay = A @ y
    return Jet2(float(y @ Ay), 2.0 * Ay, 2.0 * np.asarray(A, dtype=float))


def sqrt_jet(j: Jet2) -> Jet2:
    """Jet of sqrt(j); requires j.val > 0."""
    s = np.sqrt(j.val)
    g = j.grad / (2.0 * s)
    return Jet2(s, g, j.hess / (2.0 * s) - np.outer(g, g) / s)
