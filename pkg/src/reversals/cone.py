"""
The reversal cone for a single added covariate.

Fix centered residuals ``x`` and ``y`` with correlation ``r > 0`` (``x`` is
negated first when ``r < 0``).  In an orthonormal frame whose first two
axes are ``(y - x)/|y - x|`` and the direction of ``v = x/|x| + y/|y|``,
a direction ``u = (u_1, ..., u_m)`` induces a sign flip exactly when::

    (1 + r) u_2^2 - (1 - r) u_1^2 - 2 r |u|^2 > 0

The zero set is a double cone around ``v``.  Its cross-section at
``u_2 = 1`` is the ellipsoid ``a1 u_1^2 + a_rest (u_3^2 + ... + u_m^2) = 1``
with ``a1 = (1 + r)/(1 - r)`` and ``a_rest = 2r/(1 - r)``.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBaseline, DomainError, InputError, ZeroVariance
from .linalg import DEFAULT_TOL, Tolerances, _mat, _vec, _qr_full_rank

__all__ = [
    "Membership",
    "ConeSpec",
    "CanonicalFrame",
    "cone_coefficients",
    "canonical_frame",
    "in_reversal_cone",
    "quadric_value",
    "sample_boundary",
    "extreme_boundary_directions",
    "boundary_csv",
]


class Membership(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"

    def __str__(self):
        return self.value


def cone_coefficients(r: float) -> tuple[float, float]:
    """Return ``(a1, a_rest)`` of the unit cross-section for correlation ``r``."""
    r = float(r)
    if not 0.0 < r < 1.0:
        raise DomainError(f"cone is defined for 0 < r < 1, got {r}")
    return (1.0 + r) / (1.0 - r), 2.0 * r / (1.0 - r)


@dataclass
class ConeSpec:
    """Cone for residual correlation ``r`` in an ``m``-dimensional residual space."""

    r: float
    m: int
    axis: np.ndarray = field(default=None)

    def __post_init__(self):
        self.r = float(self.r)
        cone_coefficients(self.r)
        if int(self.m) != self.m or self.m < 3:
            raise DomainError(f"cone dimension m must be an integer >= 3, got {self.m}")
        self.m = int(self.m)
        if self.axis is None:
            self.axis = np.eye(self.m)[1]
        else:
            axis = np.asarray(self.axis, dtype=float)
            if axis.shape != (self.m,):
                raise InputError("axis must have m entries")
            self.axis = axis / np.linalg.norm(axis)

    @property
    def coefficients(self) -> tuple[float, float]:
        return cone_coefficients(self.r)


@dataclass
class CanonicalFrame:
    """
    Orthonormal basis (columns of ``basis``) of the residual space.

    Column 0 is along ``y - x`` and column 1 along ``v`` (unit-scaled, with
    ``x`` already sign-aligned).  The remaining columns complete the basis
    of the space orthogonal to the ones column and the controls.
    """

    basis: np.ndarray
    r: float
    flipped: bool

    @property
    def m(self) -> int:
        return self.basis.shape[1]

    def coordinates(self, vec) -> np.ndarray:
        return self.basis.T @ _vec(vec)

    def to_data(self, coords) -> np.ndarray:
        return self.basis @ np.asarray(coords, dtype=float)


def _unit_aligned(x_res, y_res, tol: Tolerances):
    x = _vec(x_res)
    y = _vec(y_res)
    x = x - x.mean()
    y = y - y.mean()
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVariance(None, "residual vector vanishes")
    xs, ys = x / nx, y / ny
    r = float(xs @ ys)
    if abs(r) < tol.baseline:
        raise DegenerateBaseline("x_res and y_res are orthogonal; the cone is undefined")
    flipped = r < 0
    if flipped:
        xs, r = -xs, -r
    return xs, ys, min(r, 1.0), flipped


def canonical_frame(x_res, y_res, controls=None, tol: Tolerances = DEFAULT_TOL) -> CanonicalFrame:
    """
    Build the orthonormal frame in which unit-scaled ``x`` and ``y`` read::

        x = (-sqrt((1-r)/2), sqrt((1+r)/2), 0, ..., 0)
        y = ( sqrt((1-r)/2), sqrt((1+r)/2), 0, ..., 0)

    The frame spans the complement of ``[e controls]``, so ``m = n - p - 1``.
    """
    xs, ys, r, flipped = _unit_aligned(x_res, y_res, tol)
    if r >= 1.0 - tol.rank:
        raise DomainError("x_res and y_res are parallel; the cone is undefined")
    n = xs.shape[0]
    C = _mat(controls, n)
    b1 = (ys - xs) / np.linalg.norm(ys - xs)
    b2 = (xs + ys) / np.linalg.norm(xs + ys)
    A = np.column_stack([np.ones(n), C, b1, b2])
    _qr_full_rank(A, tol.rank)
    Q, _ = np.linalg.qr(A, mode="complete")
    rest = Q[:, A.shape[1]:]
    return CanonicalFrame(np.column_stack([b1, b2, rest]), r, flipped)


def quadric_value(u_res, x_res, y_res, tol: Tolerances = DEFAULT_TOL) -> float:
    """
    ``((1 + r) u_2^2 - (1 - r) u_1^2) / |u|^2 - 2 r`` in the canonical frame.

    Positive inside the reversal cone, zero on its boundary, negative
    outside.  Invariant to rescaling ``u`` by any non-zero constant.
    """
    xs, ys, r, _ = _unit_aligned(x_res, y_res, tol)
    u = _vec(u_res)
    u = u - u.mean()
    uu = u @ u
    if uu == 0.0:
        raise ZeroVariance(None, "u_res is the zero vector")
    d = ys - xs
    s = xs + ys
    u1 = (u @ d) / np.linalg.norm(d) if np.linalg.norm(d) > 0 else 0.0
    u2 = (u @ s) / np.linalg.norm(s)
    return float(((1.0 + r) * u2 * u2 - (1.0 - r) * u1 * u1) / uu - 2.0 * r)


def in_reversal_cone(u_res, x_res, y_res, tol: Tolerances = DEFAULT_TOL) -> Membership:
    """
    Classify a single covariate direction against the reversal cone.

    ``Inside`` means adjusting for ``u_res`` flips the sign of the slope of
    ``y_res`` on ``x_res``; ``Boundary`` means the adjusted slope is zero to
    within ``tol.boundary``.
    """
    q = quadric_value(u_res, x_res, y_res, tol)
    if q > tol.boundary:
        return Membership.INSIDE
    if q < -tol.boundary:
        return Membership.OUTSIDE
    return Membership.BOUNDARY


def sample_boundary(spec: ConeSpec, count: int, seed: int = 0) -> list:
    """
    Unit vectors on the cone boundary, in canonical coordinates.

    Each sample is a uniformly random point of the ``u_2 = 1`` ellipsoidal
    cross-section (random direction in the ``(u_1, u_3, ..., u_m)``
    coordinates, then scaled onto the ellipsoid), normalised to unit
    length.  All samples lie on the ``u_2 > 0`` nappe.
    """
    if count < 1:
        raise InputError("count must be at least 1")
    a1, a_rest = spec.coefficients
    rng = np.random.default_rng(seed)
    scales = np.concatenate([[1.0 / np.sqrt(a1)], np.full(spec.m - 2, 1.0 / np.sqrt(a_rest))])
    out = []
    for _ in range(count):
        g = rng.standard_normal(spec.m - 1)
        g /= np.linalg.norm(g)
        w = g * scales
        u = np.concatenate([[w[0], 1.0], w[1:]])
        out.append(u / np.linalg.norm(u))
    return out


def extreme_boundary_directions(spec: ConeSpec) -> list:
    """
    The two boundary directions ``(0, 1, +-1/sqrt(a_rest), 0, ..., 0)``
    (normalised), where ``R^2(u, v)`` attains its minimum ``r*`` over the
    boundary.
    """
    _, a_rest = spec.coefficients
    out = []
    for sgn in (1.0, -1.0):
        u = np.zeros(spec.m)
        u[1] = 1.0
        u[2] = sgn / np.sqrt(a_rest)
        out.append(u / np.linalg.norm(u))
    return out


def boundary_csv(samples) -> str:
    """Comma-separated rows ``u1,...,um`` with a header, for external plotting."""
    samples = [np.asarray(s, dtype=float) for s in samples]
    m = samples[0].shape[0]
    buf = io.StringIO()
    buf.write(",".join(f"u{j + 1}" for j in range(m)) + "\n")
    for s in samples:
        buf.write(",".join(repr(float(c)) for c in s) + "\n")
    return buf.getvalue()
