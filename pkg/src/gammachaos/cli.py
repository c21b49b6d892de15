"""Command-line driver.

    gammachaos moments --kernel k.json [--samples N --seed S --workers W]
    gammachaos check --kernel k.json --nu 2
    gammachaos study --family prop41:m=2,nu=1 --k 1,2,4,8 --samples 10000 --out s.csv
    gammachaos sample --family clt:n=2 --k 50 --samples 1000 --format json
    gammachaos export-family --family prop41:m=2,nu=2 --k 8 --out k.json

Exit codes: 0 success, 2 input error, 3 oracle budget exceeded (only with
``--oracle require``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle, target
from .chaos import moment2, moment3, moment4
from .conditions import ConditionReport, check_clt, check_thm12
from .families import KernelFamily, parse_family
from .montecarlo import MCConfig, ecf_distance, ks_statistic, ks_threshold, sample_chaos, summarize
from .tensor import KernelFormatError, SymTensor, dump_kernel, load_kernel

EXIT_OK, EXIT_INPUT, EXIT_ORACLE = 0, 2, 3

ECF_GRID = np.linspace(-2.0, 2.0, 9)

STUDY_COLUMNS = [
    "k", "n", "dim", "nu", "m2", "m3", "m4", "gap_i_m3", "gap_i_m4", "gap_ii",
    "sym_fixed_point", "max_sym_offdiag", "max_plain_offdiag", "v_stat",
    "clt_gap", "max_clt_contraction", "ks", "ks_threshold", "ecf_distance",
]


class InputError(Exception):
    pass


@dataclass
class StudySpec:
    family: KernelFamily
    ks: list[int]
    nu: float
    mc: MCConfig | None = None
    alpha: float = 0.05
    out: Path | None = None
    fmt: str = "csv"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.ks:
            raise ValueError("k list is empty")
        if any(b <= a for a, b in zip(self.ks, self.ks[1:])):
            raise ValueError(f"k list must be strictly increasing: {self.ks}")
        if self.ks[0] < 1:
            raise ValueError("k values must be >= 1")
        if not (self.nu > 0 and math.isfinite(self.nu)):
            raise ValueError(f"nu must be positive, got {self.nu}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")


def fmt_float(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % x


def write_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_float(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _parse_ks(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (int(s) for s in part.split(".."))
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    return out


def _mc(args) -> MCConfig | None:
    if args.samples == 0:
        return None
    return MCConfig(seed=args.seed, samples=args.samples, workers=args.workers)


def _kernel(args) -> SymTensor:
    if args.kernel and args.family:
        raise InputError("give either --kernel or --family, not both")
    if args.kernel:
        return load_kernel(Path(args.kernel))
    if args.family:
        ks = _parse_ks(args.k or "")
        if len(ks) != 1:
            raise InputError("--family needs a single --k value here")
        return parse_family(args.family)(ks[0])
    raise InputError("one of --kernel or --family is required")


def moments_report(f: SymTensor, mc: MCConfig | None, require_oracle: bool = False) -> dict:
    report = {
        "n": f.order,
        "dim": f.dim,
        "m2": moment2(f),
        "m3": moment3(f),
        "m4": moment4(f),
    }
    try:
        report["oracle"] = {f"m{k}": oracle.oracle_moment(f, k) for k in (2, 3, 4)}
    except oracle.OracleInfeasible:
        if require_oracle:
            raise
        report["oracle"] = None
    report["mc"] = None if mc is None else summarize(sample_chaos(f, mc)).to_dict()
    return report


def check_report(f: SymTensor, nu: float | None) -> ConditionReport:
    return check_clt(f) if nu is None else check_thm12(f, nu)


def study_rows(spec: StudySpec) -> list[dict]:
    rows = []
    for k in spec.ks:
        f = spec.family(k)
        rep = check_thm12(f, spec.nu)
        row = {"k": k, **rep.scalars()}
        if spec.mc is not None:
            x = sample_chaos(f, spec.mc)
            row["ks"] = ks_statistic(x, lambda t: target.cdf(spec.nu, t))
            row["ks_threshold"] = ks_threshold(spec.mc.samples, spec.alpha)
            row["ecf_distance"] = ecf_distance(x, lambda lam: target.cf(spec.nu, lam), ECF_GRID)
        rows.append(row)
    return rows


def cmd_moments(args) -> int:
    f = _kernel(args)
    rep = moments_report(f, _mc(args), require_oracle=args.oracle == "require")
    _emit(json.dumps(rep, indent=1), args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    f = _kernel(args)
    if args.nu is not None and not args.nu > 0:
        raise InputError("--nu must be positive")
    _emit(check_report(f, args.nu).to_json(indent=1), args.out)
    return EXIT_OK


def cmd_study(args) -> int:
    if not args.family:
        raise InputError("study needs --family")
    fam = parse_family(args.family)
    nu = args.nu if args.nu is not None else fam.params.get("nu")
    if nu is None:
        raise InputError("study needs --nu (the family has no nu parameter)")
    spec = StudySpec(
        family=fam, ks=_parse_ks(args.k or ""), nu=float(nu), mc=_mc(args),
        alpha=args.alpha, out=args.out, fmt=args.format,
    )
    rows = study_rows(spec)
    if spec.fmt == "json":
        text = json.dumps(rows, indent=1)
    else:
        text = write_csv(rows, STUDY_COLUMNS)
    _emit(text, spec.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    f = _kernel(args)
    mc = _mc(args)
    if mc is None:
        raise InputError("--samples must be positive")
    x = sample_chaos(f, mc)
    if args.format == "json":
        text = json.dumps([float(v) for v in x])
    else:
        text = write_csv([{"i": i, "x": v} for i, v in enumerate(x)], ["i", "x"])
    _emit(text, args.out)
    return EXIT_OK


def cmd_export_family(args) -> int:
    if not args.family:
        raise InputError("export-family needs --family")
    f = _kernel(args)
    _emit(dump_kernel(f), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gammachaos", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples: int):
        sp.add_argument("--kernel", help="kernel JSON file")
        sp.add_argument("--family", help="NAME:key=val,... e.g. prop41:m=2,nu=1")
        sp.add_argument("--k", help="k value or list (1,2,4 or 1..8)")
        sp.add_argument("--nu", type=float)
        sp.add_argument("--samples", type=int, default=samples)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    commands = {
        "moments": (cmd_moments, 10_000),
        "check": (cmd_check, 0),
        "study": (cmd_study, 10_000),
        "sample": (cmd_sample, 10_000),
        "export-family": (cmd_export_family, 0),
    }
    for name, (fn, samples) in commands.items():
        sp = sub.add_parser(name)
        common(sp, samples)
        sp.set_defaults(func=fn)
        if name == "moments":
            sp.add_argument("--oracle", choices=("auto", "require"), default="auto")
        if name == "study":
            sp.add_argument("--alpha", type=float, choices=(0.05, 0.01), default=0.05)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except oracle.OracleInfeasible as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ORACLE
    except (InputError, KernelFormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
