"""Kernel sequences k -> f_k.

``prop41_family`` builds ν disjoint diagonal blocks g^i = (m! k)^(-1/2)
sum_{j in B_i} e_j^{⊗m}, so that m!<g^i, g^j> = δ_ij and every
||g^i ⊗_p g^i||^2 = 1/(m!^2 k) hold exactly, and returns
f_k = sum_i g^i ⊗̃ g^i of order 2m.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable

import numpy as np

from .tensor import SymTensor, sym_tensor_product

__all__ = [
    "KernelFamily",
    "prop41_blocks",
    "prop41_family",
    "clt_family",
    "fixed_point",
    "rank_one_counterexample",
    "random_kernel",
    "parse_family",
    "FAMILIES",
]


@dataclass(frozen=True)
class KernelFamily:
    name: str
    params: dict = field(default_factory=dict)
    generator: Callable[[int], SymTensor] | None = None

    def __call__(self, k: int) -> SymTensor:
        return self.generator(k)

    def spec(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{key}={val}" for key, val in self.params.items())


def _diag_power(dim: int, js, order: int, coef: float) -> SymTensor:
    return SymTensor(order, dim, {(j,) * order: coef for j in js})


def prop41_blocks(m: int, nu: int, k: int) -> list[SymTensor]:
    """The ν order-m kernels g^i on disjoint blocks of size k (dim νk)."""
    if m < 2 or nu < 1 or k < 1:
        raise ValueError(f"need m >= 2, nu >= 1, k >= 1; got m={m}, nu={nu}, k={k}")
    d = nu * k
    coef = 1.0 / math.sqrt(math.factorial(m) * k)
    return [_diag_power(d, range(i * k, (i + 1) * k), m, coef) for i in range(nu)]


def prop41_family(m: int, nu: int, k: int) -> SymTensor:
    blocks = prop41_blocks(m, nu, k)
    out: dict = {}
    for g in blocks:
        for idx, v in sym_tensor_product(g, g).entries.items():
            out[idx] = out.get(idx, 0.0) + v
    return SymTensor(2 * m, nu * k, out)


def clt_family(n: int, k: int) -> SymTensor:
    """(n! k)^(-1/2) sum_{j<k} e_j^{⊗n}, unit variance for every k."""
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1, k >= 1; got n={n}, k={k}")
    return _diag_power(k, range(k), n, 1.0 / math.sqrt(math.factorial(n) * k))


def fixed_point(nu: int, dim: int | None = None) -> SymTensor:
    """sum_{i<ν} e_i ⊗ e_i; I_2 of it is exactly sum (Z_i^2 - 1)."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    return _diag_power(dim or nu, range(nu), 2, 1.0)


def rank_one_counterexample(dim: int = 2) -> SymTensor:
    """e_1 ⊗ e_1, constant in k."""
    return _diag_power(dim, [0], 2, 1.0)


def random_kernel(rng: np.random.Generator, n: int, d: int, nnz: int) -> SymTensor:
    """Random sparse kernel with up to ``nnz`` normal coefficients at distinct orbits."""
    idx = list(combinations_with_replacement(range(d), n))
    pick = rng.choice(len(idx), size=min(nnz, len(idx)), replace=False)
    return SymTensor(n, d, {idx[i]: rng.normal() for i in sorted(pick)})


FAMILIES = {
    "prop41": (lambda m=2, nu=1: lambda k: prop41_family(int(m), int(nu), k)),
    "clt": (lambda n=2: lambda k: clt_family(int(n), k)),
    "fixed": (lambda nu=1: lambda k: fixed_point(int(nu))),
    "rank1": (lambda dim=2: lambda k: rank_one_counterexample(int(dim))),
}


def parse_family(text: str) -> KernelFamily:
    """Parse ``name:key=val,key=val`` such as ``prop41:m=2,nu=2``."""
    name, _, rest = text.partition(":")
    name = name.strip()
    if name not in FAMILIES:
        raise ValueError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad family parameter {item!r}")
        params[key.strip()] = int(val) if val.strip().lstrip("-").isdigit() else float(val)
    try:
        gen = FAMILIES[name](**params)
    except TypeError as e:
        raise ValueError(f"bad parameters for {name}: {e}") from e
    return KernelFamily(name, params, gen)
