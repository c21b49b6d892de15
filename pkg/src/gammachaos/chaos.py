"""Single-chaos random variables I_n(f) over finite-dimensional H.

With H = R^d and Z = (X(e_1), ..., X(e_d)) standard Gaussian,

    I_n(f)(z) = sum over canonical α of mult(α) f_α prod_j H_{c_j(α)}(z_j),

where c_j(α) counts the occurrences of j in α and H_m are the probabilists'
Hermite polynomials.  Everything else in this module (gradient, product
expansions, closed-form moments) is expressed through the tensor algebra.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .tensor import (
    SymTensor,
    contract,
    inner,
    norm_sq_bi,
    norm_sq_sym,
    scale,
    sym_contract,
)

__all__ = [
    "ChaosElement",
    "hermite",
    "hermite_table",
    "evaluate",
    "grad",
    "grad_sq",
    "kernel_slice",
    "moment2",
    "moment3",
    "moment4",
    "e_F_gradsq",
    "e_gradsq",
    "e_gradsq_sq",
    "square_expansion",
    "gradsq_expansion",
    "evaluate_expansion",
    "c_const",
    "v_statistic",
    "sym_contraction_sqnorms",
    "plain_contraction_sqnorms",
]

MAX_ORDER = 12


@dataclass(frozen=True)
class ChaosElement:
    """The random variable I_n(kernel); n is the kernel order."""

    kernel: SymTensor

    @property
    def order(self) -> int:
        return self.kernel.order

    @property
    def dim(self) -> int:
        return self.kernel.dim

    def __call__(self, z) -> np.ndarray | float:
        return evaluate(self, z)


def _as_element(F) -> ChaosElement:
    return F if isinstance(F, ChaosElement) else ChaosElement(F)


def _binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def hermite(m: int, x):
    """Probabilists' Hermite polynomial He_m(x); vectorized over x."""
    if m < 0:
        raise ValueError("Hermite degree must be >= 0")
    h_prev, h = np.ones_like(x, dtype=float), np.asarray(x, dtype=float)
    if m == 0:
        return h_prev if np.ndim(x) else float(h_prev)
    for k in range(1, m):
        h_prev, h = h, x * h - k * h_prev
    return h if np.ndim(x) else float(h)


def hermite_table(z: np.ndarray, mmax: int) -> np.ndarray:
    """Array T with T[..., j, m] = He_m(z[..., j]) for m = 0..mmax."""
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape + (mmax + 1,))
    out[..., 0] = 1.0
    if mmax >= 1:
        out[..., 1] = z
    for k in range(1, mmax):
        out[..., k + 1] = z * out[..., k] - k * out[..., k - 1]
    return out


def _compiled(kernel: SymTensor):
    # (vars, counts, weights), cached on the immutable kernel.
    # Padded slots use count 0 so He_0 = 1.
    plan = kernel.__dict__.get("_hermite_plan")
    if plan is not None:
        return plan
    n = kernel.order
    E = len(kernel.entries)
    width = max(n, 1)
    vars_ = np.zeros((E, width), dtype=np.intp)
    counts = np.zeros((E, width), dtype=np.intp)
    weights = np.empty(E)
    for e, (alpha, v) in enumerate(kernel.entries.items()):
        occ = Counter(alpha)
        for c, (j, cnt) in enumerate(sorted(occ.items())):
            vars_[e, c] = j
            counts[e, c] = cnt
        weights[e] = math.factorial(n) / math.prod(math.factorial(c) for c in occ.values()) * v
    # drop padding columns that are never used
    used = max(int((counts > 0).sum(axis=1).max()) if E else 0, 1)
    plan = vars_[:, :used], counts[:, :used], weights
    kernel.__dict__["_hermite_plan"] = plan
    return plan


_CHUNK_CELLS = 4_000_000


def evaluate(F, z) -> np.ndarray | float:
    """I_n(f) at a point z of shape (d,) or at a batch of shape (N, d)."""
    F = _as_element(F)
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    zz = np.atleast_2d(z)
    if zz.shape[-1] != F.dim:
        raise ValueError(f"point has dim {zz.shape[-1]}, kernel has dim {F.dim}")
    vars_, counts, weights = _compiled(F.kernel)
    N = zz.shape[0]
    out = np.zeros(N)
    if len(weights):
        step = max(1, _CHUNK_CELLS // len(weights))
        for lo in range(0, N, step):
            tab = hermite_table(zz[lo:lo + step], F.order)
            prod = tab[:, vars_[:, 0], counts[:, 0]]
            for c in range(1, vars_.shape[1]):
                prod *= tab[:, vars_[:, c], counts[:, c]]
            out[lo:lo + step] = prod @ weights
    return float(out[0]) if single else out


def kernel_slice(f: SymTensor, j: int) -> SymTensor:
    """The order-(n-1) kernel f(·, e_j).

    Its canonical coefficient at β is f at sort(β + (j,)); no occupancy factor
    is needed here because n·mult(β) = mult(α)·c_j(α) already accounts for it
    when the slice is fed to I_{n-1}.
    """
    if f.order < 1:
        raise ValueError("cannot slice an order-0 kernel")
    out = {}
    for alpha, v in f.entries.items():
        if j in alpha:
            k = alpha.index(j)
            out[alpha[:k] + alpha[k + 1:]] = v
    return SymTensor(f.order - 1, f.dim, out)


def grad(F, z) -> np.ndarray:
    """Malliavin derivative as the vector (n I_{n-1}(f(·, e_j))(z))_j."""
    F = _as_element(F)
    z = np.asarray(z, dtype=float)
    n = F.order
    cols = [n * evaluate(ChaosElement(kernel_slice(F.kernel, j)), z) for j in range(F.dim)]
    return np.stack(cols, axis=-1) if z.ndim > 1 else np.array(cols)


def grad_sq(F, z) -> np.ndarray | float:
    """||DF||_H^2 at z."""
    g = grad(F, z)
    return (g * g).sum(axis=-1) if g.ndim > 1 else float(g @ g)


def _check_order(n: int) -> None:
    if n > MAX_ORDER:
        raise ValueError(f"order {n} exceeds supported maximum {MAX_ORDER}")


def sym_contraction_sqnorms(f: SymTensor) -> dict[int, float]:
    """p -> ||f ⊗̃_p f||^2 for p = 1..n (p = n gives <f, f>^2)."""
    return {p: norm_sq_sym(sym_contract(f, f, p)) for p in range(1, f.order + 1)}


def moment2(F) -> float:
    f = _as_element(F).kernel
    return math.factorial(f.order) * norm_sq_sym(f)


def moment3(F) -> float:
    f = _as_element(F).kernel
    n = f.order
    _check_order(n)
    if n % 2:
        return 0.0
    h = n // 2
    return (
        math.factorial(n) * math.factorial(h) * _binom(n, h) ** 2
        * inner(f, sym_contract(f, f, h))
    )


def _fourth_moment_weight(n: int, p: int) -> float:
    # (3/n)·n²(p-1)!C(n-1,p-1)²·p!C(n,p)²·(2n-2p)!, kept exact until the end
    num = 3 * n * math.factorial(p - 1) * _binom(n - 1, p - 1) ** 2 \
        * math.factorial(p) * _binom(n, p) ** 2 * math.factorial(2 * n - 2 * p)
    return float(num)


def moment4(F, sqnorms: dict[int, float] | None = None) -> float:
    f = _as_element(F).kernel
    n = f.order
    _check_order(n)
    sqnorms = sqnorms if sqnorms is not None else sym_contraction_sqnorms(f)
    total = 3.0 * moment2(f) ** 2
    total += math.fsum(_fourth_moment_weight(n, p) * sqnorms[p] for p in range(1, n))
    return total


def e_gradsq(F) -> float:
    """E ||DF||^2 = n n! ||f||^2."""
    f = _as_element(F).kernel
    return f.order * moment2(f)


def e_F_gradsq(F) -> float:
    """E[F ||DF||^2]; zero for odd order."""
    f = _as_element(F).kernel
    n = f.order
    _check_order(n)
    if n % 2:
        return 0.0
    h = n // 2
    return (
        n * n * math.factorial(h - 1) * _binom(n - 1, h - 1) ** 2 * math.factorial(n)
        * inner(sym_contract(f, f, h), f)
    )


def e_gradsq_sq(F, sqnorms: dict[int, float] | None = None) -> float:
    """E ||DF||^4, summing p = 1..n (the p = n term is (n n! ||f||^2)^2)."""
    f = _as_element(F).kernel
    n = f.order
    _check_order(n)
    if n == 0:
        return 0.0
    sqnorms = sqnorms if sqnorms is not None else sym_contraction_sqnorms(f)
    terms = (
        math.factorial(p - 1) ** 2 * _binom(n - 1, p - 1) ** 4
        * math.factorial(2 * n - 2 * p) * sqnorms[p]
        for p in range(1, n + 1)
    )
    return n ** 4 * math.fsum(terms)


def square_expansion(F) -> tuple[float, list[ChaosElement]]:
    """I_n(f)^2 = n!||f||^2 + sum_{p<n} p! C(n,p)^2 I_{2(n-p)}(f ⊗̃_p f)."""
    f = _as_element(F).kernel
    n = f.order
    terms = [
        ChaosElement(scale(math.factorial(p) * _binom(n, p) ** 2, sym_contract(f, f, p)))
        for p in range(n)
    ]
    return moment2(f), terms


def gradsq_expansion(F) -> tuple[float, list[ChaosElement]]:
    """||DI_n(f)||^2 = n n!||f||^2 + n^2 sum_{1<=p<n} (p-1)! C(n-1,p-1)^2 I_{2(n-p)}(f ⊗̃_p f)."""
    f = _as_element(F).kernel
    n = f.order
    if n < 1:
        raise ValueError("gradient expansion needs order >= 1")
    terms = [
        ChaosElement(
            scale(n * n * math.factorial(p - 1) * _binom(n - 1, p - 1) ** 2, sym_contract(f, f, p))
        )
        for p in range(1, n)
    ]
    return n * moment2(f), terms


def evaluate_expansion(expansion: tuple[float, list[ChaosElement]], z):
    const, terms = expansion
    z = np.asarray(z, dtype=float)
    out = const + sum((evaluate(t, z) for t in terms), np.zeros(z.shape[:-1]))
    return float(out) if z.ndim == 1 else out


def c_const(n: int) -> float:
    """Fixed-point constant c_n; both closed forms are computed and compared exactly."""
    if n < 2 or n % 2:
        raise ValueError(f"c_n is defined for even n >= 2, got {n}")
    h = n // 2
    first = Fraction(1, math.factorial(h) * _binom(n - 1, h - 1) ** 2)
    second = Fraction(4, math.factorial(h) * _binom(n, h) ** 2)
    assert first == second, (first, second)
    return float(first)


def v_statistic(F, nu: float, sqnorms: dict[int, float] | None = None) -> float:
    """E(||DF||^2 - 2nF - 2nν)^2 assembled from the closed-form pieces."""
    f = _as_element(F).kernel
    n = f.order
    if nu <= 0:
        raise ValueError("nu must be positive")
    sqnorms = sqnorms if sqnorms is not None else sym_contraction_sqnorms(f)
    return (
        e_gradsq_sq(f, sqnorms)
        - 4 * n * e_F_gradsq(f)
        + 4 * n * n * moment2(f)
        + 4 * n * n * nu * nu
        - 4 * n * nu * e_gradsq(f)
    )


def plain_contraction_sqnorms(f: SymTensor) -> dict[int, float]:
    """p -> ||f ⊗_p f||^2 for p = 1..n-1."""
    return {p: norm_sq_bi(contract(f, f, p)) for p in range(1, f.order)}
