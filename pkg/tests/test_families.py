import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gammachaos.chaos import moment2
from gammachaos.families import (
    clt_family,
    fixed_point,
    parse_family,
    prop41_blocks,
    prop41_family,
    random_kernel,
    rank_one_counterexample,
)
from gammachaos.tensor import contract, inner, norm_sq_bi


@given(st.integers(2, 3), st.integers(1, 3), st.integers(1, 6))
def test_prop41_block_normalization(m, nu, k):
    g = prop41_blocks(m, nu, k)
    for i in range(nu):
        for j in range(nu):
            want = 1.0 if i == j else 0.0
            assert math.isclose(math.factorial(m) * inner(g[i], g[j]), want, abs_tol=1e-12)
        for p in range(1, m):
            assert math.isclose(norm_sq_bi(contract(g[i], g[i], p)),
                                1 / (math.factorial(m) ** 2 * k), rel_tol=1e-12)


@given(st.integers(1, 3), st.sampled_from([1, 2, 3, 5, 8, 16]))
def test_prop41_variance(nu, k):
    f = prop41_family(2, nu, k)
    assert (f.order, f.dim) == (4, nu * k)
    assert math.isclose(moment2(f), nu * (2 + 4 / k), rel_tol=1e-12)


def test_other_families():
    assert math.isclose(moment2(clt_family(3, 10)), 1.0)
    assert moment2(fixed_point(3)) == 6.0
    assert fixed_point(2, dim=5).dim == 5
    assert moment2(rank_one_counterexample()) == 2.0
    with pytest.raises(ValueError):
        prop41_family(1, 1, 1)
    with pytest.raises(ValueError):
        clt_family(2, 0)


def test_random_kernel_reproducible():
    a = random_kernel(np.random.default_rng(1), 3, 4, 12)
    b = random_kernel(np.random.default_rng(1), 3, 4, 12)
    assert a == b and a.nnz == 12


def test_parse_family():
    fam = parse_family("prop41:m=2,nu=2")
    assert fam.spec() == "prop41:m=2,nu=2"
    assert fam(3).dim == 6
    assert parse_family("fixed")(10) == fixed_point(1)
    for bad in ("nope", "prop41:m", "clt:q=3"):
        with pytest.raises(ValueError):
            parse_family(bad)
