import numpy as np
import pytest

from conftest import lstsq_slope
from reversals.counterexamples import Family, gen_need_partial, gen_need_r2, gen_no_full_fitted_corr, generate
from reversals.errors import DomainError
from reversals.stats import corr
from reversals.subsets import enumerate_subsets

# exact value of r(x, y) for the four-row tables, from symbolic evaluation
R_XY = (323 - 72 * np.sqrt(2)) / 433


def _cols(inst, *names):
    return [inst.data[c].values for c in names]


def test_need_r2_values():
    y, x, u1, u2 = _cols(gen_need_r2(1e-3), "y", "x", "u1", "u2")
    assert lstsq_slope(y, x, u1, u2) == pytest.approx(-1.0, abs=1e-8)
    assert abs(corr(u1, x)) < 1e-3
    assert corr(x, y) == pytest.approx(R_XY, abs=1e-12)


def test_need_r2_correlation_shrinks_with_epsilon():
    vals = [abs(corr(*_cols(gen_need_r2(e), "u1", "x"))) for e in (1e-2, 5e-3, 2.5e-3)]
    assert vals[0] > vals[1] > vals[2]


def test_need_partial_values():
    for delta in (1e-2, 1e-3, 1e-4):
        y, x, w, u = _cols(gen_need_partial(delta), "y", "x", "w", "u")
        assert abs(corr(u, x)) < 1e-12 and abs(corr(u, y)) < 1e-12
        # the printed table gives an exact fit with slope -1 for every delta
        assert lstsq_slope(y, x, w, u) == pytest.approx(-1.0, abs=1e-8)
        assert lstsq_slope(y, x, w) == pytest.approx(R_XY, abs=1e-3)


def test_no_full_fitted_corr_values():
    inst = gen_no_full_fitted_corr(1e-3, 1e-3)
    y, x, u1, u2 = _cols(inst, "y", "x", "u1", "u2")
    assert lstsq_slope(y, x, u1) == pytest.approx(-1.0, abs=0.02)
    assert lstsq_slope(y, x, u2) == pytest.approx(-1.0, abs=0.02)
    assert lstsq_slope(y, x, u1, u2) == pytest.approx(1.0, abs=0.02)
    rep = enumerate_subsets(inst.problem())
    assert rep.flipping_subsets == [("u1",), ("u2",)]


def test_generate_and_domain():
    assert generate("need-r2").family is Family.NEED_R2
    assert generate("no_full_fitted_corr", 0.1, 0.2).delta == 0.2
    for bad in (0.0, 1.0, -1e-3):
        with pytest.raises(DomainError):
            gen_need_r2(bad)
        with pytest.raises(DomainError):
            gen_need_partial(bad)
    with pytest.raises(ValueError):
        Family.parse("nope")


def test_csv_round_trip():
    inst = gen_no_full_fitted_corr(1e-3, 2e-3)
    lines = inst.to_csv().splitlines()
    assert lines[0] == "y,x,u1,u2"
    arr = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    np.testing.assert_array_equal(arr, inst.data.to_array())
