import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gammachaos import target
from gammachaos.families import random_kernel
from gammachaos.tensor import SymTensor

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def kernels(draw, orders=(1, 2, 3, 4), max_dim=4, max_nnz=8, nonzero=False):
    n = draw(st.sampled_from(orders))
    d = draw(st.integers(1, max_dim))
    idx = st.lists(st.integers(0, d - 1), min_size=n, max_size=n).map(lambda v: tuple(sorted(v)))
    val = st.floats(-2.0, 2.0, allow_nan=False).filter(lambda x: abs(x) > 1e-3)
    entries = draw(st.dictionaries(idx, val, min_size=1 if nonzero else 0, max_size=max_nnz))
    return SymTensor(n, d, entries)


def corpus(seed, count, orders, max_dim=4, max_nnz=12):
    """Seeded random sparse kernels, never zero."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.choice(orders))
        d = int(rng.integers(1, max_dim + 1))
        f = random_kernel(rng, n, d, int(rng.integers(1, max_nnz + 1)))
        if f.entries:
            out.append(f)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def fd_moments(nu, h=0.01):
    # fourth-order central differences of the cf at 0; m_k = phi^(k)(0) / i^k
    p = target.cf(nu, h * np.arange(-3, 4))
    d2 = (-p[5] + 16 * p[4] - 30 * p[3] + 16 * p[2] - p[1]) / (12 * h ** 2)
    d3 = (-p[6] + 8 * p[5] - 13 * p[4] + 13 * p[2] - 8 * p[1] + p[0]) / (8 * h ** 3)
    d4 = (-p[6] + 12 * p[5] - 39 * p[4] + 56 * p[3] - 39 * p[2] + 12 * p[1] - p[0]) / (6 * h ** 4)
    return [(d / 1j ** k).real for k, d in ((2, d2), (3, d3), (4, d4))]


ACCEPTANCE_LINES: list[str] = []


def acceptance_line(num, ok: bool, detail: str) -> bool:
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
