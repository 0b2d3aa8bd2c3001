import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reversals.counterexamples import gen_need_r2
from reversals.errors import DomainError, ZeroVariance
from reversals.linalg import residualize
from reversals.stats import (
    PartialContext,
    coef_determination,
    corr,
    partial_corr,
    partial_R,
    r_star,
    v_vector,
)


def test_corr_examples(rng):
    a = rng.standard_normal(6)
    assert corr(a, a) == pytest.approx(1.0)
    assert corr(a, -a) == pytest.approx(-1.0)
    assert corr([1, 2, 3], [1, 2, 4]) == pytest.approx(9 / (2 * np.sqrt(21)))
    with pytest.raises(ZeroVariance):
        corr([1, 1, 1], [1, 2, 3])


def test_coef_determination_examples(rng):
    z = rng.standard_normal(9)
    M = rng.standard_normal((9, 2))
    assert coef_determination(np.column_stack([M, z]), z) == pytest.approx(1.0)
    m = rng.standard_normal(9)
    assert coef_determination(m, z) == pytest.approx(corr(m, z) ** 2)
    o = residualize(rng.standard_normal(9), z[:, None])
    assert coef_determination(o, z) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ZeroVariance):
        coef_determination(m, np.ones(9))


def test_partial_corr_examples(rng):
    x, y, c = rng.standard_normal((3, 10))
    assert partial_corr(x, y, None) == pytest.approx(corr(x, y))
    assert partial_corr(x, x + 2 * c, c[:, None]) == pytest.approx(1.0)

    rxy, rxc, ryc = corr(x, y), corr(x, c), corr(y, c)
    oracle = (rxy - rxc * ryc) / np.sqrt((1 - rxc**2) * (1 - ryc**2))
    assert partial_corr(x, y, c[:, None]) == pytest.approx(oracle, abs=1e-12)

    with pytest.raises(ZeroVariance):
        partial_corr(3 * c + 1, y, c[:, None])


def test_partial_R_examples(rng):
    u, z, c = rng.standard_normal((3, 8))
    assert partial_R(u, z) == pytest.approx(abs(corr(u, z)))
    with pytest.raises(ZeroVariance):
        partial_R(2 * c, z, c[:, None])


def test_partial_R_need_r2_product():
    prods = []
    for eps in (1e-2, 1e-3, 1e-4):
        d = gen_need_r2(eps).data
        U = d.select(["u1", "u2"]).to_array()
        prods.append(partial_R(U, d["x"].values) * partial_R(U, d["y"].values))
    # the printed data give 0.7554 for every epsilon (see the decisions ledger)
    assert all(abs(p - 0.75) < 0.01 for p in prods)


def test_v_vector(rng):
    x = residualize(rng.standard_normal(7))
    ctx = PartialContext(x, x, np.zeros((7, 0)))
    np.testing.assert_allclose(v_vector(ctx).values, 2 * x / np.linalg.norm(x))
    ctx = PartialContext(x, -x, np.zeros((7, 0)))
    np.testing.assert_allclose(v_vector(ctx).values, 0.0, atol=1e-15)

    ctx = PartialContext.build(*rng.standard_normal((2, 11)), controls=rng.standard_normal((11, 2)))
    v = v_vector(ctx).values
    assert v @ v == pytest.approx(2 * (1 + ctx.r))


def test_r_star_examples():
    assert r_star(0.0) == 0.0
    assert r_star(1.0) == 1.0
    assert r_star(0.91) == pytest.approx(0.9529, abs=1e-4)
    with pytest.raises(DomainError):
        r_star(-1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_r_star_monotone_and_above_r(a, b):
    lo, hi = sorted((a, b))
    assert r_star(lo) <= r_star(hi) + 1e-15
    assert r_star(lo) >= lo - 1e-15
    assert r_star(lo) <= 1.0 + 1e-15
