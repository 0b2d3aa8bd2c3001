"""Correlations, coefficients of determination and their partial versions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ZeroVariance
from .linalg import DEFAULT_TOL, DataColumn, DataMatrix, Tolerances, _mat, _vec, residualize

__all__ = [
    "PartialContext",
    "corr",
    "coef_determination",
    "partial_corr",
    "partial_R",
    "v_vector",
    "r_star",
    "residual_or_raise",
]


def _label(v, default):
    return v.label if isinstance(v, DataColumn) else default


def _nonconstant_centered(v, label=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    a = _vec(v)
    c = a - a.mean()
    scale = np.linalg.norm(a)
    if np.linalg.norm(c) <= tol.rank * scale or scale == 0.0:
        raise ZeroVariance(_label(v, label))
    return c


def residual_or_raise(target, controls=None, label=None, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Residualize ``target`` and raise :class:`ZeroVariance` if nothing is left.

    "Nothing left" is judged against the centered target, so a column lying
    in the span of the controls is caught even though its residual is only
    round-off.
    """
    centered = _nonconstant_centered(target, label, tol)
    res = _vec(residualize(target, controls, tol))
    if np.linalg.norm(res) <= tol.rank * np.linalg.norm(centered):
        name = _label(target, label)
        raise ZeroVariance(name, f"column {name!r} vanishes after adjusting for the controls")
    return res


def corr(a, b, tol: Tolerances = DEFAULT_TOL) -> float:
    """Pearson correlation.  Raises :class:`ZeroVariance` for a constant input."""
    ac = _nonconstant_centered(a, "a", tol)
    bc = _nonconstant_centered(b, "b", tol)
    r = (ac @ bc) / (np.linalg.norm(ac) * np.linalg.norm(bc))
    return float(np.clip(r, -1.0, 1.0))


def coef_determination(regressors, response, tol: Tolerances = DEFAULT_TOL) -> float:
    """
    R^2 of ``response`` regressed on the ones column plus ``regressors``.

    Only the column span matters, so any change of basis of the regressors
    (rescaling an indicator, recombining columns) leaves it unchanged.
    """
    zc = _nonconstant_centered(response, "response", tol)
    res = _vec(residualize(response, regressors, tol))
    r2 = 1.0 - (res @ res) / (zc @ zc)
    return float(np.clip(r2, 0.0, 1.0))


def partial_corr(x, y, controls=None, tol: Tolerances = DEFAULT_TOL) -> float:
    """Correlation between ``x`` and ``y`` after both are residualized on ``controls``."""
    xr = residual_or_raise(x, controls, "x", tol)
    yr = residual_or_raise(y, controls, "y", tol)
    r = (xr @ yr) / (np.linalg.norm(xr) * np.linalg.norm(yr))
    return float(np.clip(r, -1.0, 1.0))


def partial_R(u, z, controls=None, tol: Tolerances = DEFAULT_TOL) -> float:
    """
    Positive square root of R^2 of ``z`` on ``u`` after both are adjusted
    for ``controls``.
    """
    zr = residual_or_raise(z, controls, "z", tol)
    U = _mat(u, zr.shape[0])
    labels = u.labels if isinstance(u, DataMatrix) else [f"u{j + 1}" for j in range(U.shape[1])]
    if U.shape[1] == 0:
        return 0.0
    ur = np.column_stack([residual_or_raise(U[:, j], controls, labels[j], tol) for j in range(U.shape[1])])
    return float(np.sqrt(coef_determination(ur, zr, tol)))


@dataclass
class PartialContext:
    """Residualized ``x``, ``y`` and ``u`` bundled with the controls that produced them."""

    x_res: np.ndarray
    y_res: np.ndarray
    u_res: np.ndarray
    controls_label: str = ""

    def __post_init__(self):
        self.x_res = _vec(self.x_res)
        self.y_res = _vec(self.y_res)
        self.u_res = _mat(self.u_res, self.x_res.shape[0])
        if self.y_res.shape != self.x_res.shape:
            raise ValueError("x_res and y_res differ in length")
        for name, arr in (("x_res", self.x_res), ("y_res", self.y_res)):
            if abs(arr.mean()) > 1e-8 * max(1.0, np.linalg.norm(arr)):
                raise ValueError(f"{name} is not centered")
        if self.u_res.size and np.any(np.abs(self.u_res.mean(axis=0)) > 1e-8 * np.maximum(1.0, np.linalg.norm(self.u_res, axis=0))):
            raise ValueError("u_res columns are not centered")

    @classmethod
    def build(cls, x, y, u=None, controls=None, tol: Tolerances = DEFAULT_TOL):
        xr = residual_or_raise(x, controls, "x", tol)
        yr = residual_or_raise(y, controls, "y", tol)
        U = _mat(u, xr.shape[0])
        ur = np.column_stack([_vec(residualize(U[:, j], controls, tol)) for j in range(U.shape[1])]) if U.shape[1] else U
        label = ",".join(controls.labels) if isinstance(controls, DataMatrix) else ""
        return cls(xr, yr, ur, label)

    @property
    def r(self) -> float:
        """Partial correlation of x and y given the controls."""
        r = (self.x_res @ self.y_res) / (np.linalg.norm(self.x_res) * np.linalg.norm(self.y_res))
        return float(np.clip(r, -1.0, 1.0))


def v_vector(ctx: PartialContext, tol: Tolerances = DEFAULT_TOL):
    """Sum of the unit-normalized residual x and residual y.

    ``|v|^2 = 2 (1 + r)`` where ``r`` is the partial correlation; antipodal
    residuals give the zero vector.
    """
    nx = np.linalg.norm(ctx.x_res)
    ny = np.linalg.norm(ctx.y_res)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVariance(None, "v is undefined when a residual vanishes")
    v = ctx.x_res / nx + ctx.y_res / ny
    return DataColumn("v", v)


def r_star(r: float) -> float:
    """Threshold ``|2r / (r + 1)|``; undefined at ``r = -1``."""
    r = float(r)
    if not -1.0 < r <= 1.0:
        raise DomainError(f"r_star is defined for -1 < r <= 1, got {r}")
    return abs(2.0 * r / (r + 1.0))
