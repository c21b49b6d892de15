"""Sparse symmetric tensors over H = R^d.

A ``SymTensor`` of order n stores one coefficient per permutation orbit of
index tuples, keyed by the sorted (canonical) representative.  Indices are
0-based internally; the JSON kernel format uses 1-based indices.

A ``BiTensor`` is symmetric within a left group of ``a`` slots and a right
group of ``b`` slots, which is exactly the symmetry of a contraction of two
symmetric tensors.
"""
from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

MultiIndex = tuple[int, ...]

__all__ = [
    "MultiIndex",
    "SymTensor",
    "BiTensor",
    "KernelFormatError",
    "mult",
    "inner",
    "inner_bi",
    "contract",
    "symmetrize",
    "sym_tensor_product",
    "sym_contract",
    "norm_sym",
    "norm_bi",
    "norm_sq_sym",
    "norm_sq_bi",
    "axpy",
    "scale",
    "basis_vector",
    "vector",
    "load_kernel",
    "dump_kernel",
]


class KernelFormatError(ValueError):
    """Raised for malformed kernel JSON."""


def mult(alpha: Iterable[int]) -> int:
    """Number of distinct orderings of the multi-index ``alpha``."""
    alpha = tuple(alpha)
    out = math.factorial(len(alpha))
    for c in Counter(alpha).values():
        out //= math.factorial(c)
    return out


@dataclass(frozen=True)
class SymTensor:
    order: int
    dim: int
    entries: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 0 or self.dim < 1:
            raise ValueError(f"bad shape: order={self.order}, dim={self.dim}")
        clean = {}
        for idx, val in self.entries.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.order:
                raise ValueError(f"index {idx} has length != order {self.order}")
            if any(a > b for a, b in zip(idx, idx[1:])):
                raise ValueError(f"index {idx} is not sorted")
            if idx and (idx[0] < 0 or idx[-1] >= self.dim):
                raise ValueError(f"index {idx} out of range for dim {self.dim}")
            if val != 0.0:
                clean[idx] = float(val)
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dict(cls, order: int, dim: int, entries: Mapping[Iterable[int], float]) -> SymTensor:
        """Build from possibly unsorted indices; values at the same orbit are summed."""
        acc: dict[MultiIndex, float] = defaultdict(float)
        for idx, val in entries.items():
            acc[tuple(sorted(idx))] += val
        return cls(order, dim, acc)

    @classmethod
    def zeros(cls, order: int, dim: int) -> SymTensor:
        return cls(order, dim, {})

    @classmethod
    def from_dense(cls, arr: np.ndarray, atol: float = 0.0) -> SymTensor:
        arr = np.asarray(arr, dtype=float)
        dim = arr.shape[0] if arr.ndim else 1
        entries = {}
        for idx in _canonical_indices(arr.ndim, dim):
            v = arr[idx] if idx else float(arr)
            if abs(v) > atol:
                entries[idx] = v
        return cls(arr.ndim, dim, entries)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx: Iterable[int]) -> float:
        return self.entries.get(tuple(sorted(idx)), 0.0)

    def to_dense(self) -> np.ndarray:
        """Dense array of shape (dim,)*order; only sensible for small tensors."""
        out = np.zeros((self.dim,) * self.order)
        for idx, val in self.entries.items():
            for perm in set(permutations(idx)):
                out[perm] = val
        return out

    def __add__(self, other: SymTensor) -> SymTensor:
        return axpy(1.0, other, self)

    def __sub__(self, other: SymTensor) -> SymTensor:
        return axpy(-1.0, other, self)

    def __mul__(self, a: float) -> SymTensor:
        return scale(a, self)

    __rmul__ = __mul__

    def __neg__(self) -> SymTensor:
        return scale(-1.0, self)


@dataclass(frozen=True)
class BiTensor:
    left_order: int
    right_order: int
    dim: int
    entries: Mapping[tuple[MultiIndex, MultiIndex], float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (lft, rgt), val in self.entries.items():
            if len(lft) != self.left_order or len(rgt) != self.right_order:
                raise ValueError(f"index ({lft}, {rgt}) does not match orders")
            if val != 0.0:
                clean[(tuple(lft), tuple(rgt))] = float(val)
        object.__setattr__(self, "entries", clean)

    @property
    def order(self) -> int:
        return self.left_order + self.right_order

    def scalar(self) -> float:
        """Value of a fully contracted (0, 0) tensor."""
        if self.order:
            raise ValueError("not a scalar: orders %d, %d" % (self.left_order, self.right_order))
        return self.entries.get(((), ()), 0.0)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim,) * self.order)
        for (lft, rgt), val in self.entries.items():
            for pl in set(permutations(lft)):
                for pr in set(permutations(rgt)):
                    out[pl + pr] = val
        return out


def _canonical_indices(order: int, dim: int):
    return combinations_with_replacement(range(dim), order)


def _check_same(f: SymTensor, g: SymTensor, need_order: bool = True) -> None:
    if f.dim != g.dim:
        raise ValueError(f"dim mismatch: {f.dim} != {g.dim}")
    if need_order and f.order != g.order:
        raise ValueError(f"order mismatch: {f.order} != {g.order}")


def inner(f: SymTensor, g: SymTensor) -> float:
    """Inner product in H^{⊗n}, counting every orbit member."""
    _check_same(f, g)
    if len(g.entries) < len(f.entries):
        f, g = g, f
    ge = g.entries
    return math.fsum(mult(a) * v * ge[a] for a, v in f.entries.items() if a in ge)


def inner_bi(s: BiTensor, t: BiTensor) -> float:
    if (s.left_order, s.right_order, s.dim) != (t.left_order, t.right_order, t.dim):
        raise ValueError("BiTensor shape mismatch")
    te = t.entries
    return math.fsum(
        mult(lft) * mult(rgt) * v * te[(lft, rgt)]
        for (lft, rgt), v in s.entries.items()
        if (lft, rgt) in te
    )


def norm_sq_sym(f: SymTensor) -> float:
    return math.fsum(mult(a) * v * v for a, v in f.entries.items())


def norm_sq_bi(t: BiTensor) -> float:
    return math.fsum(mult(lft) * mult(rgt) * v * v for (lft, rgt), v in t.entries.items())


def norm_sym(f: SymTensor) -> float:
    return math.sqrt(norm_sq_sym(f))


def norm_bi(t: BiTensor) -> float:
    return math.sqrt(norm_sq_bi(t))


def axpy(a: float, f: SymTensor, g: SymTensor) -> SymTensor:
    """a*f + g."""
    _check_same(f, g)
    out = dict(g.entries)
    for idx, v in f.entries.items():
        out[idx] = out.get(idx, 0.0) + a * v
    return SymTensor(g.order, g.dim, out)


def scale(a: float, f: SymTensor) -> SymTensor:
    return SymTensor(f.order, f.dim, {idx: a * v for idx, v in f.entries.items()})


def _submultisets(alpha: MultiIndex, p: int):
    """Distinct (rest, chosen) splits of a sorted tuple with |chosen| = p."""
    seen = set()
    for pos in combinations(range(len(alpha)), p):
        chosen = tuple(alpha[i] for i in pos)
        if chosen in seen:
            continue
        seen.add(chosen)
        pset = set(pos)
        rest = tuple(alpha[i] for i in range(len(alpha)) if i not in pset)
        yield rest, chosen


def _by_contracted_part(f: SymTensor, p: int) -> dict[MultiIndex, list[tuple[MultiIndex, float]]]:
    table: dict[MultiIndex, list[tuple[MultiIndex, float]]] = defaultdict(list)
    for alpha, v in f.entries.items():
        for rest, chosen in _submultisets(alpha, p):
            table[chosen].append((rest, v))
    return table


def contract(f: SymTensor, g: SymTensor, p: int) -> BiTensor:
    """The p-th contraction f ⊗_p g, summing over p shared slots.

    (f ⊗_p g)(a, b) = sum over s in [d]^p of f(a, s) g(b, s).  The sum over
    ordered tuples s is a sum over canonical s weighted by mult(s).
    """
    _check_same(f, g, need_order=False)
    if not 0 <= p <= min(f.order, g.order):
        raise ValueError(f"contraction index p={p} out of range for orders {f.order}, {g.order}")
    tf = _by_contracted_part(f, p)
    tg = tf if g is f else _by_contracted_part(g, p)
    out: dict[tuple[MultiIndex, MultiIndex], float] = defaultdict(float)
    for s, frows in tf.items():
        grows = tg.get(s)
        if not grows:
            continue
        w = mult(s)
        for a, fv in frows:
            wf = w * fv
            for b, gv in grows:
                out[(a, b)] += wf * gv
    return BiTensor(f.order - p, g.order - p, f.dim, out)


def symmetrize(t: BiTensor) -> SymTensor:
    """Average of t over all slot permutations.

    Among the mult(γ) distinct arrangements of a canonical index γ, exactly
    mult(L)·mult(R) put the multiset L in the left group and R in the right,
    so each stored (L, R) contributes t(L, R)·mult(L)·mult(R)/mult(γ) to γ.
    """
    out: dict[MultiIndex, float] = defaultdict(float)
    for (lft, rgt), v in t.entries.items():
        gamma = tuple(sorted(lft + rgt))
        out[gamma] += v * mult(lft) * mult(rgt) / mult(gamma)
    return SymTensor(t.order, t.dim, out)


def sym_contract(f: SymTensor, g: SymTensor, p: int) -> SymTensor:
    """Symmetrized contraction f ⊗̃_p g."""
    return symmetrize(contract(f, g, p))


def sym_tensor_product(f: SymTensor, g: SymTensor) -> SymTensor:
    return symmetrize(contract(f, g, 0))


def basis_vector(dim: int, j: int) -> SymTensor:
    return SymTensor(1, dim, {(j,): 1.0})


def vector(values: Iterable[float]) -> SymTensor:
    values = list(values)
    return SymTensor(1, len(values), {(j,): v for j, v in enumerate(values)})


def dump_kernel(f: SymTensor, path: str | Path | None = None) -> str:
    """Serialize to the kernel JSON format (1-based indices)."""
    doc = {
        "order": f.order,
        "dim": f.dim,
        "entries": [
            {"idx": [i + 1 for i in idx], "val": v} for idx, v in sorted(f.entries.items())
        ],
    }
    text = json.dumps(doc, indent=1)
    if path is not None:
        Path(path).write_text(text)
    return text


def load_kernel(source: str | Path | Mapping) -> SymTensor:
    """Parse the kernel JSON format.  Accepts a path, a JSON string or a dict."""
    if isinstance(source, Mapping):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            text = Path(source).read_text()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise KernelFormatError(f"invalid JSON: {e}") from e
    try:
        order, dim, raw = int(doc["order"]), int(doc["dim"]), doc["entries"]
    except (KeyError, TypeError, ValueError) as e:
        raise KernelFormatError(f"missing or bad field: {e}") from e
    entries: dict[MultiIndex, float] = {}
    for item in raw:
        try:
            idx, val = [int(i) for i in item["idx"]], float(item["val"])
        except (KeyError, TypeError, ValueError) as e:
            raise KernelFormatError(f"bad entry {item!r}") from e
        if idx != sorted(idx):
            raise KernelFormatError(f"idx {idx} is not sorted")
        if len(idx) != order or any(i < 1 or i > dim for i in idx):
            raise KernelFormatError(f"idx {idx} inconsistent with order={order}, dim={dim}")
        key = tuple(i - 1 for i in idx)
        if key in entries:
            raise KernelFormatError(f"duplicate idx {idx}")
        entries[key] = val
    try:
        return SymTensor(order, dim, entries)
    except ValueError as e:
        raise KernelFormatError(str(e)) from e
