"""
Four-row data sets that defeat weaker versions of the reversal criterion.

``need_r2``
    Each candidate alone is almost uncorrelated with ``x`` and ``y``, yet the
    pair flips the slope to exactly ``-1``.  Pairwise correlations cannot
    certify stability; coefficients of determination are needed.
``need_partial``
    ``u`` is exactly uncorrelated with ``x`` and ``y`` but flips the slope
    once ``w`` is in the model.  Marginal quantities cannot replace partial
    ones.
``no_full_fitted_corr``
    Adding both candidates keeps the sign while each one alone flips it, so
    a criterion that uses the correlation of the fitted values cannot be
    applied to every subset at once.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import DomainError
from .linalg import DataColumn, DataMatrix
from .reversal import RegressionProblem

__all__ = [
    "Family",
    "CounterexampleInstance",
    "gen_need_r2",
    "gen_need_partial",
    "gen_no_full_fitted_corr",
    "generate",
]

_S2 = sqrt(2.0)
_Y = np.array([(_S2 + 3) / 2, (_S2 - 3) / 2, -0.5, -0.5])
_X = np.array([(-_S2 + 3) / 2, (-_S2 - 3) / 2, 0.5, 0.5])


class Family(str, enum.Enum):
    NEED_R2 = "NeedR2"
    NEED_PARTIAL = "NeedPartial"
    NO_FULL_FITTED_CORR = "NoFullFittedCorr"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, name: str) -> "Family":
        key = name.replace("-", "").replace("_", "").lower()
        for fam in cls:
            if fam.value.lower() == key:
                return fam
        raise ValueError(f"unknown counterexample family {name!r}")


@dataclass
class CounterexampleInstance:
    family: Family
    epsilon: float
    delta: float
    data: DataMatrix
    expected: dict = field(default_factory=dict)

    def problem(self) -> RegressionProblem:
        """The instance as a regression problem (without the independence check)."""
        d = self.data
        if self.family is Family.NEED_PARTIAL:
            return RegressionProblem(d["y"], d["x"], d.select(["w"]), d.select(["u"]), strict=False)
        return RegressionProblem(d["y"], d["x"], DataMatrix([]), d.select(["u1", "u2"]), strict=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(self.data.labels) + "\n")
        arr = self.data.to_array()
        for row in arr:
            buf.write(",".join(repr(float(v)) for v in row) + "\n")
        return buf.getvalue()


def _check_unit(name, value):
    value = float(value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value}")
    return value


def _matrix(**cols) -> DataMatrix:
    return DataMatrix([DataColumn(k, np.asarray(v, dtype=float)) for k, v in cols.items()])


def gen_need_r2(epsilon: float) -> CounterexampleInstance:
    eps = _check_unit("epsilon", epsilon)
    u1 = np.array([eps / _S2, -eps / _S2, 1.0, -1.0])
    u2 = np.array([eps / _S2, -eps / _S2, -1.0, 1.0])
    expected = {
        "beta_x": 0.5,
        "r_u1_x": 0.0,
        "r_u1_y": 0.0,
        "r_u2_x": 0.0,
        "r_u2_y": 0.0,
        "R_ux_R_uy": 0.75,
        "beta_x_given_u": -1.0,
    }
    return CounterexampleInstance(Family.NEED_R2, eps, float("nan"), _matrix(y=_Y, x=_X, u1=u1, u2=u2), expected)


def gen_need_partial(delta: float) -> CounterexampleInstance:
    d = _check_unit("delta", delta)
    w = np.array([d / _S2, -d / _S2, 1.0, -1.0])
    u = np.array([0.0, 0.0, -1.0, 1.0])
    expected = {
        "beta_x_given_w": 0.5,
        "r_u_x": 0.0,
        "r_u_y": 0.0,
        "r_w_x": 0.0,
        "r_w_y": 0.0,
        "beta_x_given_w_u": -0.4,
    }
    return CounterexampleInstance(Family.NEED_PARTIAL, float("nan"), d, _matrix(y=_Y, x=_X, w=w, u=u), expected)


def gen_no_full_fitted_corr(epsilon: float, delta: float) -> CounterexampleInstance:
    eps = _check_unit("epsilon", epsilon)
    d = _check_unit("delta", delta)
    u1 = np.array([(eps + 3 * _S2) / 2, (eps - 3 * _S2) / 2, (-eps + d * _S2) / 2, (-eps - d * _S2) / 2])
    u2 = np.array([(-eps + 3 * _S2) / 2, (-eps - 3 * _S2) / 2, (eps + d * _S2) / 2, (eps - d * _S2) / 2])
    expected = {
        "beta_x": 0.5,
        "beta_x_given_u1_u2": 1.0,
        "beta_x_given_u1": -1.0,
        "beta_x_given_u2": -1.0,
    }
    return CounterexampleInstance(Family.NO_FULL_FITTED_CORR, eps, d, _matrix(y=_Y, x=_X, u1=u1, u2=u2), expected)


def generate(family, epsilon: float = 1e-3, delta: float = 1e-3) -> CounterexampleInstance:
    fam = family if isinstance(family, Family) else Family.parse(family)
    if fam is Family.NEED_R2:
        return gen_need_r2(epsilon)
    if fam is Family.NEED_PARTIAL:
        return gen_need_partial(delta)
    return gen_no_full_fitted_corr(epsilon, delta)
