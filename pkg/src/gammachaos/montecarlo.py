"""Reproducible Monte Carlo over Gaussian coordinates.

Sample ``i`` of a run with seed ``s`` is a pure function of ``(s, i)``: its
uniforms are the Philox4x64 output blocks at counter ``i * ceil(d / 4)``, so
any chunking of the index range, and any number of worker threads, produces
the same per-sample values.  Normals come from the inverse normal CDF so
exactly one uniform is consumed per coordinate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from numpy.random import Philox
from scipy.special import ndtri

from .chaos import ChaosElement, evaluate, grad_sq

__all__ = [
    "MCConfig",
    "SampleSummary",
    "gaussian_stream",
    "gaussian_block",
    "map_samples",
    "sample_chaos",
    "estimate_moments",
    "summarize",
    "ks_statistic",
    "ks_2samp_statistic",
    "ks_threshold",
    "ks_2samp_threshold",
    "ecf_distance",
    "distance_correlation",
    "KS_CRITICAL",
]

CHUNK = 8192
# asymptotic Kolmogorov distribution quantiles
KS_CRITICAL = {0.05: 1.358, 0.01: 1.628}


@dataclass(frozen=True)
class MCConfig:
    seed: int = 0
    samples: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    mean_se: float
    var: float
    var_se: float
    m3_hat: float
    m3_se: float
    m4_hat: float
    m4_se: float

    def to_dict(self) -> dict:
        return asdict(self)


def _blocks_per_sample(dim: int) -> int:
    return -(-dim // 4)


def gaussian_block(seed: int, start: int, stop: int, dim: int) -> np.ndarray:
    """Standard normal array of shape (stop - start, dim) for sample indices [start, stop)."""
    count = stop - start
    if count <= 0:
        return np.zeros((0, dim))
    bps = _blocks_per_sample(dim)
    gen = Philox(key=seed, counter=start * bps)
    raw = gen.random_raw(count * bps * 4).reshape(count, bps * 4)[:, :dim]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53
    return ndtri(u)


def gaussian_stream(config: MCConfig, index: int, dim: int) -> np.ndarray:
    """The d Gaussian coordinates of sample ``index``."""
    if not 0 <= index < config.samples:
        raise IndexError(f"index {index} outside [0, {config.samples})")
    return gaussian_block(config.seed, index, index + 1, dim)[0]


def map_samples(fn: Callable[[np.ndarray], np.ndarray], config: MCConfig, dim: int) -> np.ndarray:
    """Apply ``fn`` to Gaussian blocks and return the per-sample results in index order.

    Chunk boundaries depend only on ``config.samples``, never on the worker
    count, so the output is bit-identical for any ``workers``.
    """
    bounds = [(lo, min(lo + CHUNK, config.samples)) for lo in range(0, config.samples, CHUNK)]

    def run(b):
        return np.asarray(fn(gaussian_block(config.seed, b[0], b[1], dim)))

    if config.workers == 1 or len(bounds) == 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            parts = list(pool.map(run, bounds))
    return np.concatenate(parts)


def sample_chaos(F, config: MCConfig) -> np.ndarray:
    """Draws of I_n(f)."""
    F = F if isinstance(F, ChaosElement) else ChaosElement(F)
    return map_samples(lambda z: evaluate(F, z), config, F.dim)


def sample_chaos_with_gradsq(F, config: MCConfig) -> tuple[np.ndarray, np.ndarray]:
    F = F if isinstance(F, ChaosElement) else ChaosElement(F)
    both = map_samples(
        lambda z: np.stack([evaluate(F, z), grad_sq(F, z)], axis=1), config, F.dim
    )
    return both[:, 0], both[:, 1]


def summarize(x: np.ndarray) -> SampleSummary:
    """Plug-in moments with standard errors.

    ``m3_hat`` and ``m4_hat`` are raw moments E[X^3], E[X^4]; ``var`` is
    centered.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 2:
        raise ValueError("need at least two samples")
    mean = x.mean()
    c = x - mean
    sq = c * c
    var = sq.mean()
    x3, x4 = x ** 3, x ** 4
    rt = math.sqrt(n)
    return SampleSummary(
        n=n,
        mean=float(mean),
        mean_se=float(x.std() / rt),
        var=float(var),
        var_se=float(sq.std() / rt),
        m3_hat=float(x3.mean()),
        m3_se=float(x3.std() / rt),
        m4_hat=float(x4.mean()),
        m4_se=float(x4.std() / rt),
    )


def estimate_moments(F, config: MCConfig) -> SampleSummary:
    return summarize(sample_chaos(F, config))


def ks_statistic(samples, cdf: Callable) -> float:
    """sup_x |ECDF(x) - cdf(x)| for a continuous cdf."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max((i / n - F).max(), (F - (i - 1) / n).max()))


def ks_2samp_statistic(a, b) -> float:
    a, b = np.sort(np.asarray(a, dtype=float)), np.sort(np.asarray(b, dtype=float))
    if not len(a) or not len(b):
        raise ValueError("empty sample")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / len(a)
    fb = np.searchsorted(b, pts, side="right") / len(b)
    return float(np.abs(fa - fb).max())


def ks_threshold(n: int, alpha: float = 0.01) -> float:
    return KS_CRITICAL[alpha] / math.sqrt(n)


def ks_2samp_threshold(n: int, m: int, alpha: float = 0.01) -> float:
    return KS_CRITICAL[alpha] * math.sqrt((n + m) / (n * m))


def ecf_distance(samples, cf: Callable, lam_grid) -> float:
    """max over the grid of |mean(exp(iλX)) - cf(λ)|."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    lam = np.asarray(lam_grid, dtype=float)
    if not np.all(np.isfinite(lam)):
        raise ValueError("grid must be finite")
    ecf = np.array([np.exp(1j * t * x).mean() for t in lam])
    return float(np.abs(ecf - np.asarray(cf(lam))).max())


def _row_means_abs_diff(x: np.ndarray) -> np.ndarray:
    # mean_j |x_i - x_j| in O(n log n) via sorted prefix sums
    n = len(x)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    csum = np.concatenate([[0.0], np.cumsum(xs)])
    k = np.arange(n)
    sums = xs * k - csum[:-1] + (csum[-1] - csum[1:]) - xs * (n - 1 - k)
    out = np.empty(n)
    out[order] = sums / n
    return out


def _dcov_sq(x: np.ndarray, y: np.ndarray, rows: int = 1000) -> float:
    n = len(x)
    ax, ay = _row_means_abs_diff(x), _row_means_abs_diff(y)
    gx, gy = ax.mean(), ay.mean()
    if y is x:
        # sum_ij |x_i - x_j|^2 in closed form
        cross = 2.0 * n * float(x @ x) - 2.0 * float(x.sum()) ** 2
        return (cross - 2 * n * float(ax @ ay) + n * n * gx * gy) / (n * n)
    cross = 0.0
    for lo in range(0, n, rows):
        a = np.abs(x[lo:lo + rows, None] - x[None, :])
        b = np.abs(y[lo:lo + rows, None] - y[None, :])
        cross += float((a * b).sum())
    # sum_ij A_ij B_ij for the double-centered matrices
    return (cross - 2 * n * float(ax @ ay) + n * n * gx * gy) / (n * n)


def distance_correlation(x, y) -> float:
    """Sample distance correlation of two 1-d samples (zero iff independent, in the limit)."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("need two samples of equal length >= 2")
    vxy = _dcov_sq(x, y)
    vxx, vyy = _dcov_sq(x, x), _dcov_sq(y, y)
    if vxx <= 0 or vyy <= 0:
        return 0.0
    return math.sqrt(max(vxy, 0.0) / math.sqrt(vxx * vyy))
