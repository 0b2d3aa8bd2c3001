import numpy as np
import pytest

from conftest import lstsq_slope, random_problem
from reversals.counterexamples import gen_need_r2
from reversals.errors import DegenerateBaseline, InputError, RankDeficient, ZeroVariance
from reversals.linalg import residualize
from reversals.reversal import (
    RegressionProblem,
    Verdict,
    corollary1_scalar,
    corollary2_check,
    diagnose,
    prop1_ratio,
)
from reversals.subsets import enumerate_subsets


def _orthogonal_candidates(rng, n=10, k=2):
    y, x = rng.standard_normal((2, n))
    U = rng.standard_normal((n, k))
    U = np.column_stack([residualize(U[:, j], np.column_stack([x, y])) for j in range(k)])
    return y, x, U


def test_problem_validation(rng):
    y, x = rng.standard_normal((2, 6))
    with pytest.raises(InputError):
        RegressionProblem.from_arrays(y, x, None, None)
    with pytest.raises(ZeroVariance):
        RegressionProblem.from_arrays(y, x, None, np.ones(6))
    with pytest.raises(RankDeficient):
        RegressionProblem.from_arrays(y, x, None, np.column_stack([x + y, x - y]))
    # relaxed mode only needs [e x W U] to have full rank
    RegressionProblem.from_arrays(x + y, x, None, y, strict=False)


def test_ratio_zero_for_orthogonal_candidates(rng):
    y, x, U = _orthogonal_candidates(rng)
    prob = RegressionProblem.from_arrays(y, x, None, U, strict=False)
    assert prop1_ratio(prob) == pytest.approx(0.0, abs=1e-12)
    d = diagnose(prob)
    assert d.verdict is Verdict.STABLE_COR1
    assert corollary2_check(prob)


def test_ratio_degenerate_baseline(rng):
    x = residualize(rng.standard_normal(8))
    y = residualize(rng.standard_normal(8), x[:, None])
    prob = RegressionProblem.from_arrays(y, x, None, rng.standard_normal(8))
    with pytest.raises(DegenerateBaseline):
        prop1_ratio(prob)


def test_need_r2_instance_reverses():
    prob = gen_need_r2(1e-3).problem()
    d = diagnose(prob)
    assert prop1_ratio(prob) > 1
    assert d.verdict is Verdict.REVERSAL_CERTAIN
    assert d.baseline_sign == 1 and d.adjusted_sign == -1
    assert d.beta_adjusted == pytest.approx(-1.0, abs=1e-8)
    assert not corollary2_check(prob)
    assert enumerate_subsets(prob).any_reversal


def test_corollary1_scalar_examples():
    assert corollary1_scalar(0.82, 0.81, 0.91)
    assert not corollary1_scalar(1.0, 1.0, 0.5)
    assert corollary1_scalar(0.0, 0.7, -0.2)


def test_ratio_identity_and_direct_fits(rng):
    for _ in range(100):
        prob = random_problem(rng)
        d = diagnose(prob)
        ratio = d.R_ux_given_w * d.R_uy_given_w * d.fitted_corr / d.r_xy_given_w
        assert d.prop1_ratio == pytest.approx(ratio, rel=1e-9, abs=1e-12)
        W = prob.W.to_array(prob.n)
        full = lstsq_slope(prob.y.values, prob.x.values, *W.T, *prob.U.to_array().T)
        assert d.beta_adjusted == pytest.approx(full, rel=1e-8, abs=1e-10)


def test_verdicts_never_contradict_enumeration(rng):
    for _ in range(150):
        prob = random_problem(rng, k_max=5)
        d = diagnose(prob)
        rep = enumerate_subsets(prob)
        if d.verdict in (Verdict.STABLE_COR1, Verdict.STABLE_COR2):
            assert not rep.any_reversal
        if d.verdict is Verdict.REVERSAL_CERTAIN:
            assert rep.subset_signs[tuple(prob.U.labels)] == -rep.baseline_sign


def test_indeterminate_without_flip_exists():
    # rejection sampling: both corollaries fail, yet no subset flips
    rng = np.random.default_rng(7)
    for _ in range(5000):
        n = 8
        x = rng.standard_normal(n)
        y = x + 0.5 * rng.standard_normal(n)
        U = np.column_stack([x + y, y - x]) * rng.uniform(0.2, 1) + 0.6 * rng.standard_normal((n, 2))
        prob = RegressionProblem.from_arrays(y, x, None, U)
        d = diagnose(prob)
        if not d.corollary1 and not d.corollary2 and d.prop1_ratio < 1 - 1e-6:
            if not enumerate_subsets(prob).any_reversal:
                assert d.verdict is Verdict.INDETERMINATE
                return
    pytest.fail("no instance found")


def test_negative_correlation_uses_aligned_threshold():
    # r = -0.5 and u = x - y: the literal threshold would exceed 1 and wrongly certify stability
    rng = np.random.default_rng(3)
    a, b = rng.standard_normal((2, 9))
    x = residualize(a)
    x /= np.linalg.norm(x)
    z = residualize(b, x[:, None])
    z /= np.linalg.norm(z)
    y = -0.5 * x + np.sqrt(0.75) * z
    d = diagnose(RegressionProblem.from_arrays(y, x, None, x - y + 1e-3 * rng.standard_normal(9)))
    assert d.r_xy_given_w == pytest.approx(-0.5, abs=1e-3)
    assert d.verdict is Verdict.REVERSAL_CERTAIN
    assert not d.corollary2


def test_diagnostics_are_plain_python(rng):
    d = diagnose(random_problem(rng))
    for key, val in d.as_dict().items():
        assert type(val) in (float, int, bool, str), key
