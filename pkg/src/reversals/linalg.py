"""
Dense least squares on small labelled column collections.

Everything here works on plain numpy arrays internally.  The public
functions accept either the labelled containers (:class:`DataColumn`,
:class:`DataMatrix`) or array-likes, and hand back the same kind they
were given where that makes sense.

Least squares is solved through a Householder QR factorisation of the
design matrix.  Normal equations are never formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, InputError, RankDeficient

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "DataColumn",
    "DataMatrix",
    "FitResult",
    "center",
    "ols_fit",
    "residualize",
    "adjusted_coefficient",
    "orthonormalize",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    Parameters
    ----------
    rank : float
        A column is dependent on earlier ones when the norm of its
        projection residual is at most ``rank`` times its own norm.
    sign : float
        A slope is sign-indeterminate when its magnitude is below
        ``sign * |y_res| / |x_res|``.
    boundary : float
        Half-width of the band around a ratio of exactly 1 (or a quadric
        value of exactly 0) that is classified as a tie.
    baseline : float
        Partial correlations smaller than this in magnitude are treated
        as zero.
    """

    rank: float = 1e-10
    sign: float = 1e-10
    boundary: float = 1e-9
    baseline: float = 1e-10

    @classmethod
    def from_overrides(cls, overrides=None):
        if not overrides:
            return cls()
        unknown = set(overrides) - {"rank", "sign", "boundary", "baseline"}
        if unknown:
            raise InputError(f"unknown tolerance names: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in overrides.items()})


DEFAULT_TOL = Tolerances()


@dataclass
class DataColumn:
    """A labelled real vector of length at least 2."""

    label: str
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise DimensionMismatch(f"column {self.label!r} must be one-dimensional")
        if values.shape[0] < 2:
            raise InputError(f"column {self.label!r} needs at least 2 entries")
        if not np.all(np.isfinite(values)):
            raise InputError(f"column {self.label!r} contains non-finite values")
        self.values = values

    def __len__(self):
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, DataColumn):
            return NotImplemented
        return self.label == other.label and np.array_equal(self.values, other.values)


@dataclass
class DataMatrix:
    """An ordered collection of equal-length, uniquely labelled columns."""

    columns: list = field(default_factory=list)

    def __post_init__(self):
        self.columns = list(self.columns)
        labels = [c.label for c in self.columns]
        if len(set(labels)) != len(labels):
            raise InputError(f"duplicate column labels: {labels}")
        lengths = {len(c) for c in self.columns}
        if len(lengths) > 1:
            raise DimensionMismatch(f"columns have unequal lengths {sorted(lengths)}")

    @classmethod
    def from_array(cls, array, labels: Sequence[str] | None = None, prefix: str = "c"):
        array = np.asarray(array, dtype=float)
        if array.ndim == 1:
            array = array[:, None]
        if labels is None:
            labels = [f"{prefix}{j + 1}" for j in range(array.shape[1])]
        if len(labels) != array.shape[1]:
            raise DimensionMismatch("one label per column required")
        return cls([DataColumn(lab, array[:, j].copy()) for j, lab in enumerate(labels)])

    @property
    def labels(self) -> list:
        return [c.label for c in self.columns]

    @property
    def n(self) -> int | None:
        return len(self.columns[0]) if self.columns else None

    @property
    def k(self) -> int:
        return len(self.columns)

    def __len__(self):
        return len(self.columns)

    def __iter__(self):
        return iter(self.columns)

    def __getitem__(self, label):
        if isinstance(label, int):
            return self.columns[label]
        for c in self.columns:
            if c.label == label:
                return c
        raise KeyError(label)

    def __contains__(self, label):
        return label in self.labels

    def select(self, labels: Iterable[str]) -> "DataMatrix":
        return DataMatrix([self[lab] for lab in labels])

    def to_array(self, n: int | None = None) -> np.ndarray:
        if not self.columns:
            return np.zeros((0 if n is None else n, 0))
        return np.column_stack([c.values for c in self.columns])


@dataclass
class FitResult:
    coefficients: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    include_intercept: bool = True
    rank_diagonal: np.ndarray | None = None

    @property
    def intercept(self) -> float:
        if not self.include_intercept:
            return 0.0
        return float(self.coefficients[0])

    @property
    def slopes(self) -> np.ndarray:
        return self.coefficients[1:] if self.include_intercept else self.coefficients


# -- conversion helpers -------------------------------------------------------


def _vec(v) -> np.ndarray:
    if isinstance(v, DataColumn):
        return v.values
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch("expected a one-dimensional column")
    return arr


def _mat(m, n: int | None = None) -> np.ndarray:
    """Return ``m`` as an ``(n, k)`` float array; ``None`` means no columns."""
    if m is None:
        return np.zeros((n or 0, 0))
    if isinstance(m, DataMatrix):
        arr = m.to_array(n)
    elif isinstance(m, DataColumn):
        arr = m.values[:, None]
    elif isinstance(m, (list, tuple)) and m and isinstance(m[0], DataColumn):
        arr = np.column_stack([c.values for c in m])
    else:
        arr = np.asarray(m, dtype=float)
        if arr.size == 0:
            rows = arr.shape[0] if n is None and arr.ndim == 2 else (n or 0)
            return np.zeros((rows, 0))
        if arr.ndim == 1:
            arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch("expected a two-dimensional column collection")
    if n is not None and arr.shape[0] != n:
        raise DimensionMismatch(f"expected {n} rows, got {arr.shape[0]}")
    return arr


def _like(template, values: np.ndarray, suffix: str = ""):
    if isinstance(template, DataColumn):
        return DataColumn(template.label + suffix, values)
    return values


def _qr_full_rank(A: np.ndarray, tol: float, labels=None) -> tuple[np.ndarray, np.ndarray]:
    """Reduced QR of ``A`` with the column-wise dependence check."""
    if A.shape[1] > A.shape[0]:
        raise RankDeficient(f"{A.shape[1]} design columns exceed {A.shape[0]} observations")
    Q, R = np.linalg.qr(A, mode="reduced")
    col_norms = np.linalg.norm(A, axis=0)
    diag = np.abs(np.diag(R))
    bad = np.flatnonzero(diag <= tol * col_norms)
    if bad.size:
        names = [labels[j] for j in bad] if labels is not None else bad.tolist()
        raise RankDeficient(f"design column(s) {names} numerically dependent on earlier columns")
    return Q, R


# -- operations ---------------------------------------------------------------


def center(v):
    """Subtract the mean.  Returns the same container type as the input."""
    arr = _vec(v)
    if arr.shape[0] < 2:
        raise InputError("need at least 2 entries to center")
    return _like(v, arr - arr.mean())


def ols_fit(response, regressors=None, include_intercept: bool = True, tol: Tolerances = DEFAULT_TOL) -> FitResult:
    """
    Ordinary least squares fit of ``response`` on ``[e regressors]``.

    Parameters
    ----------
    response : DataColumn or array_like, shape (n,)
    regressors : DataMatrix or array_like, shape (n, q), optional
    include_intercept : bool
        Prepend the all-ones column to the design.
    tol : Tolerances
        ``tol.rank`` sets the dependence threshold.

    Returns
    -------
    FitResult
        Coefficients are ordered intercept first (when present), then one
        per regressor column.

    Raises
    ------
    RankDeficient
        If any design column is numerically in the span of the preceding ones.
    DimensionMismatch
        If the regressors do not have ``n`` rows.
    """
    y = _vec(response)
    n = y.shape[0]
    X = _mat(regressors, n)
    A = np.column_stack([np.ones(n), X]) if include_intercept else X
    if A.shape[1] == 0:
        return FitResult(np.zeros(0), np.zeros(n), y.copy(), include_intercept)
    Q, R = _qr_full_rank(A, tol.rank)
    qty = Q.T @ y
    coef = np.linalg.solve(R, qty)
    fitted = Q @ qty
    return FitResult(coef, fitted, y - fitted, include_intercept, np.diag(R).copy())


def residualize(target, controls=None, tol: Tolerances = DEFAULT_TOL):
    """
    Residual of ``target`` after regression on the ones column plus ``controls``.

    With no controls this is just :func:`center`.
    """
    y = _vec(target)
    n = y.shape[0]
    C = _mat(controls, n)
    if C.shape[1] == 0:
        return center(target)
    Q, _ = _qr_full_rank(np.column_stack([np.ones(n), C]), tol.rank)
    res = y - Q @ (Q.T @ y)
    return _like(target, res)


def orthonormalize(columns, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis for the columns, built one column at a time.

    Each new column is projected against the basis so far twice
    (classical Gram-Schmidt with one re-orthogonalisation pass).
    """
    U = _mat(columns)
    basis = []
    for j in range(U.shape[1]):
        col = U[:, j].copy()
        norm0 = np.linalg.norm(col)
        for _ in range(2):
            for q in basis:
                col -= (q @ col) * q
        norm = np.linalg.norm(col)
        if norm <= tol.rank * norm0 or norm0 == 0.0:
            raise RankDeficient(f"column {j} is numerically dependent on the preceding columns")
        basis.append(col / norm)
    if not basis:
        return np.zeros((U.shape[0], 0))
    return np.column_stack(basis)


def adjusted_coefficient(y_res, x_res, u_res=None, tol: Tolerances = DEFAULT_TOL) -> float:
    """
    Slope of ``x_res`` when ``y_res`` is regressed on ``[x_res u_res]``.

    Computed in closed form after orthonormalising ``u_res`` into
    ``q_1..q_k``::

        (<x,y> - sum_i <x,q_i><q_i,y>) / (<x,x> - sum_i <x,q_i>^2)

    i.e. ``(<x,y> - <x_hat,y_hat>) / (<x,x> - <x_hat,x_hat>)`` with hats
    denoting projection onto the span of ``u_res``.  Both numerator and
    denominator are evaluated as inner products with ``x - x_hat`` which is
    algebraically identical and avoids cancellation.

    Inputs are re-centered, so the result matches an intercept-included fit.

    Raises
    ------
    RankDeficient
        If ``u_res`` is dependent or ``x_res`` lies in its span.
    """
    y = _vec(y_res)
    x = _vec(x_res)
    n = x.shape[0]
    if y.shape[0] != n:
        raise DimensionMismatch("y_res and x_res differ in length")
    y = y - y.mean()
    x = x - x.mean()
    U = _mat(u_res, n)
    U = U - U.mean(axis=0)
    Q = orthonormalize(U, tol)
    x_hat = Q @ (Q.T @ x)
    x_perp = x - x_hat
    denom = x_perp @ x_perp
    if np.sqrt(denom) <= tol.rank * np.linalg.norm(x):
        raise RankDeficient("x_res lies in the span of u_res")
    return float((x_perp @ y) / denom)
