"""Per-kernel numeric diagnostics for the Gamma and Gaussian limit conditions.

Each condition in the limit theorems is stated along a sequence; here it
becomes a number computed for a single kernel, and convergence is checked by
sweeping k over a family (see :mod:`gammachaos.cli` and the acceptance tests).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import target
from .chaos import (
    _fourth_moment_weight,
    c_const,
    moment2,
    moment3,
    moment4,
    plain_contraction_sqnorms,
    sym_contraction_sqnorms,
    v_statistic,
)
from .montecarlo import MCConfig, ks_statistic, ks_threshold, sample_chaos
from .tensor import (
    SymTensor,
    axpy,
    contract,
    inner_bi,
    norm_bi,
    norm_sq_bi,
    norm_sq_sym,
    norm_sym,
    sym_contract,
    vector,
)

__all__ = [
    "ConditionReport",
    "check_thm12",
    "check_clt",
    "check_prop31",
    "check_cor44",
    "cor44_decomposition",
    "check_joint",
    "joint_bound",
    "ks_convergence",
    "MIN_KS_SAMPLES",
]

MIN_KS_SAMPLES = 1000


@dataclass
class ConditionReport:
    """Diagnostics for one kernel.

    Gamma-limit fields are ``None`` when the order is odd (``applicable`` is
    then False).  List fields are indexed by p = 1..n-1, skipping n/2 for the
    off-diagonal lists.
    """

    n: int
    dim: int
    nu: float | None
    m2: float
    m3: float
    m4: float
    applicable: bool = True
    note: str = ""
    moment_gap_i: tuple[float, float] | None = None
    gap_ii: float | None = None
    sym_fixed_point: float | None = None
    offdiag_p: list[int] = field(default_factory=list)
    sym_offdiag: list[float] | None = None
    plain_offdiag: list[float] | None = None
    v_stat: float | None = None
    clt_gap: float = 0.0
    clt_contractions: list[float] = field(default_factory=list)

    @property
    def gap_i(self) -> float | None:
        return None if self.moment_gap_i is None else max(self.moment_gap_i)

    @property
    def max_plain_offdiag(self) -> float | None:
        if self.plain_offdiag is None:
            return None
        return max(self.plain_offdiag, default=0.0)

    @property
    def max_sym_offdiag(self) -> float | None:
        if self.sym_offdiag is None:
            return None
        return max(self.sym_offdiag, default=0.0)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["moment_gap_i"] is not None:
            d["moment_gap_i"] = list(d["moment_gap_i"])
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> ConditionReport:
        d = dict(d)
        if d.get("moment_gap_i") is not None:
            d["moment_gap_i"] = tuple(d["moment_gap_i"])
        return cls(**d)

    def scalars(self) -> dict[str, float | None]:
        """Flat scalar view used for CSV rows."""
        gi = self.moment_gap_i or (None, None)
        return {
            "n": self.n,
            "dim": self.dim,
            "nu": self.nu,
            "m2": self.m2,
            "m3": self.m3,
            "m4": self.m4,
            "gap_i_m3": gi[0],
            "gap_i_m4": gi[1],
            "gap_ii": self.gap_ii,
            "sym_fixed_point": self.sym_fixed_point,
            "max_sym_offdiag": self.max_sym_offdiag,
            "max_plain_offdiag": self.max_plain_offdiag,
            "v_stat": self.v_stat,
            "clt_gap": self.clt_gap,
            "max_clt_contraction": max(self.clt_contractions, default=0.0),
        }


def _clt_fields(f: SymTensor, plain_sq: dict[int, float], m2: float, m4: float):
    return m4 - 3.0 * m2 * m2, [math.sqrt(plain_sq[p]) for p in range(1, f.order)]


def check_thm12(f: SymTensor, nu: float) -> ConditionReport:
    """All closed-form Gamma-limit diagnostics for one kernel; no sampling."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    n = f.order
    sym = sym_contraction_sqnorms(f)
    plain = plain_contraction_sqnorms(f)
    m2, m3, m4 = moment2(f), moment3(f), moment4(f, sym)
    clt_gap, clt_c = _clt_fields(f, plain, m2, m4)
    report = ConditionReport(
        n=n, dim=f.dim, nu=nu, m2=m2, m3=m3, m4=m4,
        clt_gap=clt_gap, clt_contractions=clt_c,
    )
    if n % 2 or n == 0:
        report.applicable = False
        report.note = "inapplicable: odd order"
        return report
    h = n // 2
    _, m2_t, m3_t, m4_t = target.law_moments(nu)
    report.moment_gap_i = (abs(m3 - m3_t), abs(m4 - m4_t))
    report.gap_ii = m4 - 12.0 * m3 - (12.0 * nu * nu - 48.0 * nu)
    report.sym_fixed_point = norm_sym(axpy(-c_const(n), f, sym_contract(f, f, h)))
    report.offdiag_p = [p for p in range(1, n) if p != h]
    report.sym_offdiag = [math.sqrt(sym[p]) for p in report.offdiag_p]
    report.plain_offdiag = [math.sqrt(plain[p]) for p in report.offdiag_p]
    report.v_stat = v_statistic(f, nu, sym)
    return report


def check_clt(f: SymTensor) -> ConditionReport:
    """Gaussian-limit diagnostics: m4 - 3 m2^2 and ||f ⊗_p f||, p = 1..n-1."""
    sym = sym_contraction_sqnorms(f)
    plain = plain_contraction_sqnorms(f)
    m2, m4 = moment2(f), moment4(f, sym)
    clt_gap, clt_c = _clt_fields(f, plain, m2, m4)
    return ConditionReport(
        n=f.order, dim=f.dim, nu=None, m2=m2, m3=moment3(f), m4=m4,
        applicable=False, note="central limit fields only",
        clt_gap=clt_gap, clt_contractions=clt_c,
    )


def check_prop31(f: SymTensor) -> tuple[list[float], list[float]]:
    """(||f ⊗̃_p f||, ||f ⊗_p f||) over p = 1..n-1, p != n/2."""
    n = f.order
    if n < 4 or n % 2:
        raise ValueError(f"needs even order >= 4, got {n}")
    ps = [p for p in range(1, n) if p != n // 2]
    return (
        [norm_sym(sym_contract(f, f, p)) for p in ps],
        [norm_bi(contract(f, f, p)) for p in ps],
    )


def cor44_decomposition(f: SymTensor) -> tuple[float, float]:
    """Nonnegative pieces of m4 - 12 m3 - (3 m2^2 - 24 m2).

    Returns (off-diagonal sum, fixed-point term) where the fixed-point term
    is (3/2)(n!)^5/((n/2)!)^6 ||f ⊗̃_{n/2} f - c_n f||^2.
    """
    n = f.order
    if n < 2 or n % 2:
        raise ValueError(f"needs even order, got {n}")
    h = n // 2
    off = math.fsum(
        _fourth_moment_weight(n, p) * norm_sq_sym(sym_contract(f, f, p))
        for p in range(1, n) if p != h
    )
    coef = 1.5 * math.factorial(n) ** 5 / math.factorial(h) ** 6
    fp = coef * norm_sq_sym(axpy(-c_const(n), f, sym_contract(f, f, h)))
    return off, fp


def check_cor44(f: SymTensor) -> float:
    """m4 - 12 m3 - (12ν² - 48ν) with ν = m2/2; strictly positive for nonzero f, n >= 4."""
    n = f.order
    if n < 4 or n % 2:
        raise ValueError(f"needs even order >= 4, got {n}")
    if not f.entries:
        raise ValueError("zero kernel")
    nu = moment2(f) / 2
    return moment4(f) - 12.0 * moment3(f) - (12.0 * nu * nu - 48.0 * nu)


def _as_vector(h, dim: int) -> SymTensor:
    if isinstance(h, SymTensor):
        if h.order != 1:
            raise ValueError("h must have order 1")
        v = h
    else:
        v = vector(np.asarray(h, dtype=float))
    if v.dim != dim:
        raise ValueError(f"dim mismatch: {v.dim} != {dim}")
    return v


def check_joint(f: SymTensor, hs: Sequence) -> list[float]:
    """Asymptotic-independence diagnostics against fixed directions h_j.

    For n = 2 this is <f ⊗_1 f, h ⊗ h>; for larger n it is ||f ⊗_1 h||^2,
    which coincides with <f ⊗_{n-1} f, h ⊗ h> (and with the n = 2 quantity).
    """
    out = []
    for h in hs:
        v = _as_vector(h, f.dim)
        if f.order == 2:
            hh = contract(v, v, 0)
            out.append(inner_bi(contract(f, f, 1), hh))
        else:
            out.append(norm_sq_bi(contract(f, v, 1)))
    return out


def joint_bound(f: SymTensor, h) -> float:
    """||f ⊗_{n-1} f|| ||h||^2, an upper bound for ||f ⊗_1 h||^2."""
    v = _as_vector(h, f.dim)
    return norm_bi(contract(f, f, f.order - 1)) * norm_sq_sym(v)


def ks_convergence(
    f: SymTensor, nu: float, mc: MCConfig, alpha: float = 0.01
) -> tuple[float, float]:
    """One-sample KS distance of sampled I_n(f) to F(ν), with the asymptotic threshold."""
    if mc.samples < MIN_KS_SAMPLES:
        raise ValueError(f"need at least {MIN_KS_SAMPLES} samples, got {mc.samples}")
    x = sample_chaos(f, mc)
    return ks_statistic(x, lambda t: target.cdf(nu, t)), ks_threshold(mc.samples, alpha)
