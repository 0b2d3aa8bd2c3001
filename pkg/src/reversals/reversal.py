"""
Sign-reversal diagnostics for the coefficient of ``x`` when covariates
``U`` are added to a regression of ``y`` on ``[e x W]``.

Three checks are provided:

* the exact criterion (:func:`prop1_ratio`): the sign flips if and only if
  the ratio exceeds 1;
* :func:`corollary1_scalar`: ``R_ux * R_uy < |r|`` guarantees that no subset
  of ``U`` flips the sign;
* :func:`corollary2_check`: ``R^2(u, v) < r*`` gives the same guarantee from
  a single coefficient of determination.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateBaseline, InputError, ZeroVariance
from .linalg import (
    DEFAULT_TOL,
    DataColumn,
    DataMatrix,
    Tolerances,
    _qr_full_rank,
    adjusted_coefficient,
    orthonormalize,
)
from .stats import PartialContext, r_star

__all__ = [
    "Verdict",
    "RegressionProblem",
    "ReversalDiagnostics",
    "coefficient_sign",
    "prop1_ratio",
    "corollary1_scalar",
    "corollary2_check",
    "diagnose",
]


class Verdict(str, enum.Enum):
    REVERSAL_CERTAIN = "ReversalCertain"
    STABLE_COR1 = "StableAllSubsets_Cor1"
    STABLE_COR2 = "StableAllSubsets_Cor2"
    INDETERMINATE = "Indeterminate"

    def __str__(self):
        return self.value


def _as_column(v, label):
    if isinstance(v, DataColumn):
        return v
    return DataColumn(label, np.asarray(v, dtype=float))


def _as_matrix(m, prefix):
    if m is None:
        return DataMatrix([])
    if isinstance(m, DataMatrix):
        return m
    if isinstance(m, DataColumn):
        return DataMatrix([m])
    if isinstance(m, (list, tuple)):
        if not m:
            return DataMatrix([])
        if isinstance(m[0], DataColumn):
            return DataMatrix(list(m))
    arr = np.asarray(m, dtype=float)
    if arr.size == 0:
        return DataMatrix([])
    return DataMatrix.from_array(arr, prefix=prefix)


@dataclass
class RegressionProblem:
    """
    Response ``y``, explanatory ``x``, baseline covariates ``W`` (possibly
    none) and candidate covariates ``U`` (at least one).

    On construction every column must be non-constant and the columns of
    ``[e y x W U]`` must be linearly independent.  ``strict=False`` only
    demands what the fits themselves need, namely that ``[e x W U]`` has
    full column rank; it exists for hand-built examples whose ``y`` lies in
    that span.
    """

    y: DataColumn
    x: DataColumn
    W: DataMatrix = field(default_factory=DataMatrix)
    U: DataMatrix = field(default_factory=DataMatrix)
    strict: bool = True
    tol: Tolerances = DEFAULT_TOL

    def __post_init__(self):
        self.y = _as_column(self.y, "y")
        self.x = _as_column(self.x, "x")
        self.W = _as_matrix(self.W, "w")
        self.U = _as_matrix(self.U, "u")
        if self.U.k < 1:
            raise InputError("at least one candidate covariate is required")
        n = len(self.y)
        labels = [self.y.label, self.x.label, *self.W.labels, *self.U.labels]
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate labels in problem: {labels}")
        cols = [self.y, self.x, *self.W, *self.U]
        for c in cols:
            if len(c) != n:
                raise InputError(f"column {c.label!r} has length {len(c)}, expected {n}")
            if np.ptp(c.values) == 0.0:
                raise ZeroVariance(c.label)
        design = [self.x, *self.W, *self.U] if not self.strict else cols
        A = np.column_stack([np.ones(n)] + [c.values for c in design])
        _qr_full_rank(A, self.tol.rank, ["(intercept)"] + [c.label for c in design])

    @classmethod
    def from_arrays(cls, y, x, W=None, U=None, strict=True, tol=DEFAULT_TOL):
        return cls(_as_column(y, "y"), _as_column(x, "x"), _as_matrix(W, "w"), _as_matrix(U, "u"), strict, tol)

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.W.k

    @property
    def k(self) -> int:
        return self.U.k

    @cached_property
    def context(self) -> PartialContext:
        W = self.W if self.W.k else None
        return PartialContext.build(self.x, self.y, self.U.to_array(), W, self.tol)

    def with_candidates(self, labels) -> "RegressionProblem":
        return RegressionProblem(self.y, self.x, self.W, self.U.select(labels), self.strict, self.tol)


def coefficient_sign(beta: float, x_norm: float, y_norm: float, tol: Tolerances = DEFAULT_TOL) -> int:
    """Sign of a slope, or 0 when it is too small relative to ``|y| / |x|``."""
    if abs(beta) < tol.sign * (y_norm / x_norm):
        return 0
    return 1 if beta > 0 else -1


@dataclass
class ReversalDiagnostics:
    r_xy_given_w: float
    R_ux_given_w: float
    R_uy_given_w: float
    fitted_corr: float
    prop1_ratio: float
    r_star: float
    R2_u_v: float
    beta_unadjusted: float
    beta_adjusted: float
    baseline_sign: int
    adjusted_sign: int
    corollary1: bool
    corollary2: bool
    verdict: Verdict

    def as_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d


class _Projections:
    """Projections of the residual x and y onto the span of the residual u."""

    def __init__(self, ctx: PartialContext, tol: Tolerances):
        self.ctx = ctx
        x, y = ctx.x_res, ctx.y_res
        self.nx = float(np.linalg.norm(x))
        self.ny = float(np.linalg.norm(y))
        self.r = ctx.r
        if abs(self.r) < tol.baseline:
            raise DegenerateBaseline(f"partial correlation {self.r:.3g} is zero; baseline sign undefined")
        Q = orthonormalize(ctx.u_res, tol)
        self.Q = Q
        self.x_hat = Q @ (Q.T @ x)
        self.y_hat = Q @ (Q.T @ y)
        nxh = np.linalg.norm(self.x_hat)
        nyh = np.linalg.norm(self.y_hat)
        self.R_ux = float(min(nxh / self.nx, 1.0))
        self.R_uy = float(min(nyh / self.ny, 1.0))
        if nxh <= tol.rank * self.nx or nyh <= tol.rank * self.ny:
            self.fitted_corr = 0.0
        else:
            self.fitted_corr = float(np.clip((self.x_hat @ self.y_hat) / (nxh * nyh), -1.0, 1.0))
        # same quotient as R_ux * R_uy * fitted_corr / r, without the round trip through norms
        self.ratio = float((self.x_hat @ self.y_hat) / (x @ y))

    def aligned_v(self) -> np.ndarray:
        # x is flipped when r < 0 so that the reference slope is positive
        s = 1.0 if self.r > 0 else -1.0
        return s * self.ctx.x_res / self.nx + self.ctx.y_res / self.ny

    def r2_u_v(self) -> float:
        v = self.aligned_v()
        vv = v @ v
        if vv == 0.0:
            return 0.0
        vh = self.Q @ (self.Q.T @ v)
        return float(np.clip((vh @ vh) / vv, 0.0, 1.0))


def prop1_ratio(problem: RegressionProblem) -> float:
    """
    ``R(u|w, x|w) * R(u|w, y|w) * r(x_hat, y_hat) / r(x|w, y|w)``.

    The coefficient of ``x`` changes sign when ``U`` is added exactly when
    this exceeds 1.

    Raises
    ------
    DegenerateBaseline
        If the partial correlation of x and y given W is zero.
    """
    return _Projections(problem.context, problem.tol).ratio


def corollary1_scalar(R_ux: float, R_uy: float, r_xy: float) -> bool:
    """True when ``R_ux * R_uy < |r_xy|``: no subset of the covariates can flip the sign.

    False is inconclusive.
    """
    return bool(R_ux * R_uy < abs(r_xy))


def corollary2_check(problem: RegressionProblem) -> bool:
    """True when ``R^2(u|w, v) < r*``: no subset of ``U`` can flip the sign.

    ``v`` and ``r*`` are taken after orienting ``x`` so that its partial
    correlation with ``y`` is positive.
    """
    proj = _Projections(problem.context, problem.tol)
    return bool(proj.r2_u_v() < r_star(abs(proj.r)))


def diagnose(problem: RegressionProblem, tol: Tolerances | None = None) -> ReversalDiagnostics:
    """
    Compute every diagnostic for ``problem`` and assign a verdict.

    Verdict precedence: a ratio above 1 gives ``ReversalCertain``; a ratio
    within ``tol.boundary`` of 1 is ``Indeterminate``; otherwise the first
    corollary that holds gives its stable verdict, and failing both the
    result is ``Indeterminate``.
    """
    tol = tol or problem.tol
    ctx = problem.context
    proj = _Projections(ctx, tol)
    ratio = proj.ratio
    rs = r_star(abs(proj.r))
    r2uv = proj.r2_u_v()
    cor1 = corollary1_scalar(proj.R_ux, proj.R_uy, proj.r)
    cor2 = bool(r2uv < rs)

    beta0 = float((ctx.x_res @ ctx.y_res) / (ctx.x_res @ ctx.x_res))
    beta1 = adjusted_coefficient(ctx.y_res, ctx.x_res, ctx.u_res, tol)

    if ratio > 1.0 + tol.boundary:
        verdict = Verdict.REVERSAL_CERTAIN
    elif ratio >= 1.0 - tol.boundary:
        verdict = Verdict.INDETERMINATE
    elif cor1:
        verdict = Verdict.STABLE_COR1
    elif cor2:
        verdict = Verdict.STABLE_COR2
    else:
        verdict = Verdict.INDETERMINATE

    return ReversalDiagnostics(
        r_xy_given_w=proj.r,
        R_ux_given_w=proj.R_ux,
        R_uy_given_w=proj.R_uy,
        fitted_corr=proj.fitted_corr,
        prop1_ratio=ratio,
        r_star=rs,
        R2_u_v=r2uv,
        beta_unadjusted=beta0,
        beta_adjusted=beta1,
        baseline_sign=coefficient_sign(beta0, proj.nx, proj.ny, tol),
        adjusted_sign=coefficient_sign(beta1, proj.nx, proj.ny, tol),
        corollary1=cor1,
        corollary2=cor2,
        verdict=verdict,
    )
