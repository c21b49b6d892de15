"""Brute-force Gaussian moments of chaos elements.

I_n(f) is expanded into an explicit polynomial in z_1..z_d, powers are taken
by plain polynomial multiplication, and expectations use E[Z^m] = (m-1)!!
coordinate-wise.  Nothing here touches contractions, so it serves as ground
truth for the closed-form moment formulas in :mod:`gammachaos.chaos`.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .chaos import ChaosElement

__all__ = [
    "OracleInfeasible",
    "Polynomial",
    "hermite_coefficients",
    "to_polynomial",
    "gradient_sq_polynomial",
    "gaussian_expectation",
    "expectation_of_product",
    "oracle_moment",
    "oracle_mixed",
    "TERM_BUDGET",
]

TERM_BUDGET = 10_000_000


class OracleInfeasible(RuntimeError):
    """The requested expansion would exceed the intermediate term budget."""


class Polynomial:
    """Sparse polynomial: rows of ``exps`` are exponent vectors, ``coefs`` their weights."""

    __slots__ = ("dim", "exps", "coefs")

    def __init__(self, dim: int, exps=None, coefs=None):
        self.dim = dim
        if exps is None:
            exps = np.zeros((0, dim), dtype=np.int64)
            coefs = np.zeros(0)
        exps = np.asarray(exps, dtype=np.int64).reshape(-1, dim)
        coefs = np.asarray(coefs, dtype=float).reshape(-1)
        keep = coefs != 0.0
        self.exps, self.coefs = exps[keep], coefs[keep]

    @classmethod
    def constant(cls, dim: int, c: float) -> Polynomial:
        return cls(dim, np.zeros((1, dim), dtype=np.int64), [c])

    @classmethod
    def from_terms(cls, dim: int, terms: dict) -> Polynomial:
        if not terms:
            return cls(dim)
        keys = list(terms)
        return cls(dim, np.array(keys, dtype=np.int64), [terms[k] for k in keys])

    def terms(self) -> dict[tuple[int, ...], float]:
        return {tuple(int(e) for e in row): float(c) for row, c in zip(self.exps, self.coefs)}

    def __len__(self) -> int:
        return len(self.coefs)

    @property
    def degree(self) -> int:
        return int(self.exps.sum(axis=1).max()) if len(self) else 0

    def _combine(self, exps: np.ndarray, coefs: np.ndarray) -> Polynomial:
        if len(coefs) == 0:
            return Polynomial(self.dim)
        uniq, inv = np.unique(exps, axis=0, return_inverse=True)
        summed = np.bincount(inv.reshape(-1), weights=coefs, minlength=len(uniq))
        return Polynomial(self.dim, uniq, summed)

    def __add__(self, other: Polynomial | float) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.dim, other)
        return self._combine(
            np.vstack([self.exps, other.exps]), np.concatenate([self.coefs, other.coefs])
        )

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(self.dim, self.exps, -self.coefs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: Polynomial | float) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial(self.dim, self.exps, self.coefs * other)
        _check_budget(len(self) * len(other))
        exps = (self.exps[:, None, :] + other.exps[None, :, :]).reshape(-1, self.dim)
        coefs = np.outer(self.coefs, other.coefs).reshape(-1)
        return self._combine(exps, coefs)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Polynomial:
        out = Polynomial.constant(self.dim, 1.0)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, j: int) -> Polynomial:
        e = self.exps[:, j]
        exps = self.exps.copy()
        exps[:, j] -= 1
        return Polynomial(self.dim, exps[e > 0], (self.coefs * e)[e > 0])

    def __call__(self, z) -> np.ndarray | float:
        z = np.asarray(z, dtype=float)
        zz = np.atleast_2d(z)
        vals = np.prod(zz[:, None, :] ** self.exps[None, :, :], axis=2) @ self.coefs
        return float(vals[0]) if z.ndim == 1 else vals

    def __repr__(self) -> str:
        return f"Polynomial(dim={self.dim}, terms={len(self)})"


def _check_budget(count: int) -> None:
    if count > TERM_BUDGET:
        raise OracleInfeasible(f"{count} intermediate terms exceed budget {TERM_BUDGET}")


def hermite_coefficients(m: int) -> list[int]:
    """Integer coefficients c_0..c_m of He_m(x) = sum c_k x^k."""
    prev, cur = [1], [0, 1]
    if m == 0:
        return prev
    for k in range(1, m):
        nxt = [0] + cur  # x * He_k
        for i, c in enumerate(prev):
            nxt[i] -= k * c
        prev, cur = cur, nxt
    return cur


def _univariate(dim: int, j: int, coefs: list[int]) -> Polynomial:
    exps = np.zeros((len(coefs), dim), dtype=np.int64)
    exps[:, j] = np.arange(len(coefs))
    return Polynomial(dim, exps, coefs)


def to_polynomial(F) -> Polynomial:
    """Expand I_n(f) in monomials of the Gaussian coordinates."""
    f = F.kernel if isinstance(F, ChaosElement) else F
    n, d = f.order, f.dim
    exps, coefs = [], []
    for alpha, v in f.entries.items():
        occ = Counter(alpha)
        weight = math.factorial(n)
        for c in occ.values():
            weight //= math.factorial(c)
        term = Polynomial.constant(d, weight * v)
        for j, c in occ.items():
            term = term * _univariate(d, j, hermite_coefficients(c))
        exps.append(term.exps)
        coefs.append(term.coefs)
    if not exps:
        return Polynomial(d)
    return Polynomial(d)._combine(np.vstack(exps), np.concatenate(coefs))


def gradient_sq_polynomial(P: Polynomial) -> Polynomial:
    """sum_j (dP/dz_j)^2."""
    out = Polynomial(P.dim)
    for j in range(P.dim):
        dj = P.derivative(j)
        out = out + dj * dj
    return out


def _moment_table(maxdeg: int) -> np.ndarray:
    tab = np.zeros(maxdeg + 1)
    tab[0] = 1.0
    for m in range(2, maxdeg + 1, 2):
        tab[m] = tab[m - 2] * (m - 1)
    return tab


def gaussian_expectation(P: Polynomial) -> float:
    """E[P(Z)] for Z standard Gaussian in R^dim."""
    if not len(P):
        return 0.0
    tab = _moment_table(int(P.exps.max()))
    return float(np.prod(tab[P.exps], axis=1) @ P.coefs)


def expectation_of_product(P: Polynomial, Q: Polynomial) -> float:
    """E[P(Z) Q(Z)] without materializing the product polynomial."""
    if not len(P) or not len(Q):
        return 0.0
    _check_budget(len(P) * len(Q))
    tab = _moment_table(int(P.exps.max() + Q.exps.max()))
    total = 0.0
    step = max(1, 2_000_000 // max(1, len(Q) * P.dim))
    for lo in range(0, len(P), step):
        e = P.exps[lo:lo + step, None, :] + Q.exps[None, :, :]
        m = np.prod(tab[e], axis=2)
        total += float(P.coefs[lo:lo + step] @ m @ Q.coefs)
    return total


def _split_power(P: Polynomial, k: int) -> tuple[Polynomial, Polynomial]:
    a = k // 2
    return P ** a, P ** (k - a)


def oracle_moment(F, k: int) -> float:
    """E[I_n(f)^k] by polynomial expansion."""
    if k < 1:
        raise ValueError("k must be >= 1")
    P = to_polynomial(F)
    left, right = _split_power(P, k)
    return expectation_of_product(left, right)


def oracle_mixed(F, s: int) -> float:
    """E[F^s ||DF||^2] by polynomial expansion."""
    if s < 0:
        raise ValueError("s must be >= 0")
    P = to_polynomial(F)
    return expectation_of_product(P ** s, gradient_sq_polynomial(P))
