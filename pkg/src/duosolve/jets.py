"""Truncated derivative jets for the separable factor basis.

A ``Jet1`` carries the value and the first three derivatives of a univariate
factor at a point.  Everything the solver differentiates is a product of such
factors, one per coordinate, so mixed partials of any order up to three reduce
to products of per-dimension jet coefficients (no chain through coordinates is
ever needed).

Coefficients are stored raw (not divided by factorials).  Entries may be
floats or numpy arrays of a common shape; all formulas are elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

MAX_ORDER = 3

# Binomial rows for the Leibniz rule up to MAX_ORDER.
_BINOM = ((1,), (1, 1), (1, 2, 1), (1, 3, 3, 1))


@dataclass(frozen=True)
class Jet1:
    """Value and derivatives to order 3 of a univariate factor."""

    c0: np.ndarray | float
    c1: np.ndarray | float
    c2: np.ndarray | float
    c3: np.ndarray | float

    def __getitem__(self, m: int) -> np.ndarray | float:
        return (self.c0, self.c1, self.c2, self.c3)[m]

    def as_array(self) -> np.ndarray:
        return np.stack([np.asarray(self.c0), np.asarray(self.c1),
                         np.asarray(self.c2), np.asarray(self.c3)])


def sigmoid(z):
    """Numerically stable logistic function, exact for |z| up to ~700."""
    out = expit(np.asarray(z, dtype=float))
    return out if out.ndim else float(out)


def jet_sin(omega, phi, x) -> Jet1:
    """Jet of sin(omega*x + phi) with respect to x."""
    arg = omega * x + phi
    s, c = np.sin(arg), np.cos(arg)
    return Jet1(s, omega * c, -(omega**2) * s, -(omega**3) * c)


def jet_sigmoid(w, b, x) -> Jet1:
    """Jet of sigmoid(w*x + b) with respect to x.

    Derivatives are polynomials in s = sigmoid(w*x + b):

        s'   = w s(1-s)
        s''  = w^2 s(1-s)(1-2s)
        s''' = w^3 s(1-s)(1-6s+6s^2)

    These forms are branch-free and stay finite for |w*x + b| up to several
    hundred (s(1-s) underflows to exactly 0 long before anything overflows).
    """
    s = sigmoid(w * x + b)
    p = s * (1.0 - s)
    return Jet1(
        s,
        w * p,
        (w**2) * p * (1.0 - 2.0 * s),
        (w**3) * p * (1.0 - 6.0 * s + 6.0 * s * s),
    )


def jet_mul(a: Jet1, b: Jet1) -> Jet1:
    """Leibniz product of two jets, truncated at order 3."""
    return Jet1(
        a.c0 * b.c0,
        a.c1 * b.c0 + a.c0 * b.c1,
        a.c2 * b.c0 + 2.0 * a.c1 * b.c1 + a.c0 * b.c2,
        a.c3 * b.c0 + 3.0 * a.c2 * b.c1 + 3.0 * a.c1 * b.c2 + a.c0 * b.c3,
    )


def check_multi_index(alpha: Sequence[int]) -> tuple[int, ...]:
    """Validate a mixed-partial multi-index; total order is capped at 3."""
    alpha = tuple(int(m) for m in alpha)
    if any(m < 0 for m in alpha):
        raise ValueError(f"negative derivative order in multi-index {alpha}")
    if sum(alpha) > MAX_ORDER:
        raise ValueError(
            f"multi-index {alpha} has total order {sum(alpha)} > {MAX_ORDER}"
        )
    return alpha


def separable_partial(factors: Sequence[Jet1], alpha: Sequence[int]):
    """Mixed partial of a separable product prod_j g_j(x_j).

    ``factors[j]`` is the jet of the j-th univariate factor; the result is
    prod_j g_j^(alpha_j), the exact mixed partial of the product.
    """
    alpha = check_multi_index(alpha)
    if len(alpha) != len(factors):
        raise ValueError(
            f"multi-index length {len(alpha)} != number of factors {len(factors)}"
        )
    out = 1.0
    for jet, m in zip(factors, alpha):
        out = out * jet[m]
    return out
