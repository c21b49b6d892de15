"""Finite-dimensional Wiener chaos and Gamma-type limit diagnostics."""
from .chaos import ChaosElement, evaluate, grad, grad_sq, moment2, moment3, moment4, v_statistic
from .conditions import ConditionReport, check_clt, check_joint, check_thm12
from .families import clt_family, fixed_point, parse_family, prop41_family, rank_one_counterexample
from .montecarlo import MCConfig, sample_chaos, summarize
from .target import GammaLimitLaw
from .tensor import BiTensor, SymTensor, contract, dump_kernel, load_kernel, sym_contract, symmetrize

__all__ = [
    "BiTensor",
    "ChaosElement",
    "ConditionReport",
    "GammaLimitLaw",
    "MCConfig",
    "SymTensor",
    "check_clt",
    "check_joint",
    "check_thm12",
    "clt_family",
    "contract",
    "dump_kernel",
    "evaluate",
    "fixed_point",
    "grad",
    "grad_sq",
    "load_kernel",
    "moment2",
    "moment3",
    "moment4",
    "parse_family",
    "prop41_family",
    "rank_one_counterexample",
    "sample_chaos",
    "summarize",
    "sym_contract",
    "symmetrize",
    "v_statistic",
]

__version__ = "0.1.0"
