"""
Exhaustive subset enumeration and Simpson's paradox for categorical data.

:func:`enumerate_subsets` refits the model for every subset of the
candidate covariates, which is the ground truth the diagnostic shortcuts in
:mod:`reversals.reversal` are checked against.

For a binary population indicator ``x``, an outcome ``y`` and a partition
of the rows into categories, :func:`simpson_check` tests the paradox
(higher overall incidence, lower incidence in every category),
:func:`reversal_check` tests the weaker sign reversal of the least-squares
slope, and the two ``necessary_condition_*`` functions give cheap
conditions without which the paradox cannot occur.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateBaseline, EmptyCell, EmptyFile, InputError, ParseError, SubsetCeilingExceeded
from .linalg import DEFAULT_TOL, Tolerances, ols_fit
from .reversal import RegressionProblem, coefficient_sign
from .stats import coef_determination, corr, r_star

__all__ = [
    "DEFAULT_SUBSET_CEILING",
    "SubsetReport",
    "enumerate_subsets",
    "CategoricalStudy",
    "simpson_check",
    "reversal_check",
    "necessary_condition_strong",
    "necessary_condition_weak",
    "strong_condition_scalar",
    "load_study_csv",
    "study_from_counts",
    "random_study",
]

DEFAULT_SUBSET_CEILING = 20


@dataclass
class SubsetReport:
    """Sign of the x coefficient for every subset of the candidates.

    Keys of ``subset_signs`` are tuples of candidate labels in their
    original order; ``()`` is the model without candidates.
    """

    subset_signs: dict
    flipping_subsets: list
    baseline_sign: int

    @property
    def any_reversal(self) -> bool:
        return bool(self.flipping_subsets)

    @property
    def count(self) -> int:
        return len(self.subset_signs)


def _subset_sign(problem: RegressionProblem, mask: int, x_norm: float, y_norm: float, tol: Tolerances) -> int:
    chosen = [c.values for j, c in enumerate(problem.U) if mask >> j & 1]
    X = np.column_stack([problem.x.values, *[c.values for c in problem.W], *chosen])
    beta = ols_fit(problem.y, X, tol=tol).coefficients[1]
    return coefficient_sign(beta, x_norm, y_norm, tol)


def enumerate_subsets(
    problem: RegressionProblem,
    ceiling: int = DEFAULT_SUBSET_CEILING,
    max_workers: int | None = None,
    tol: Tolerances | None = None,
) -> SubsetReport:
    """
    Fit ``y`` on ``[e x W s]`` for each of the ``2^k`` subsets ``s`` of ``U``.

    Subsets are visited in binary-counter order (bit ``j`` selects the
    ``j``-th candidate).  With ``max_workers`` the fits run on a thread
    pool; the report is identical either way.

    Raises
    ------
    SubsetCeilingExceeded
        If ``k`` is larger than ``ceiling``.
    DegenerateBaseline
        If the coefficient without candidates is numerically zero.
    """
    tol = tol or problem.tol
    k = problem.k
    if k > ceiling:
        raise SubsetCeilingExceeded(f"{k} candidates exceed the subset ceiling of {ceiling}")
    ctx = problem.context
    x_norm = float(np.linalg.norm(ctx.x_res))
    y_norm = float(np.linalg.norm(ctx.y_res))
    masks = range(2**k)

    def work(mask):
        return _subset_sign(problem, mask, x_norm, y_norm, tol)

    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            signs = list(pool.map(work, masks))
    else:
        signs = [work(mask) for mask in masks]

    labels = problem.U.labels
    keys = [tuple(labels[j] for j in range(k) if mask >> j & 1) for mask in masks]
    baseline = signs[0]
    if baseline == 0:
        raise DegenerateBaseline("baseline coefficient of x is numerically zero")
    flips = [(len(key), mask, key) for mask, key, s in zip(masks, keys, signs) if s != 0 and s != baseline]
    flips.sort()
    return SubsetReport(dict(zip(keys, signs)), [key for _, _, key in flips], baseline)


# -- categorical studies ------------------------------------------------------


@dataclass
class CategoricalStudy:
    """
    Two populations compared on an outcome across a set of categories.

    Parameters
    ----------
    x : array_like of {0, 1}
        Population indicator per row.
    y : array_like
        Outcome per row (0/1 incidence, or any real value).
    category : array_like of int
        Category code per row, ``0 .. q-1``.  The last category is the
        reference and gets no indicator column.
    category_labels : list of str, optional
    indicator_values : float or sequence of float
        Non-zero value marking membership in each indicator column.
    """

    x: np.ndarray
    y: np.ndarray
    category: np.ndarray
    category_labels: list = field(default=None)
    indicator_values: object = 1.0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.category = np.asarray(self.category, dtype=int)
        n = self.x.shape[0]
        if self.y.shape != (n,) or self.category.shape != (n,):
            raise InputError("x, y and category must have the same length")
        if not np.all(np.isin(self.x, (0.0, 1.0))):
            raise InputError("population indicator must be 0/1")
        if not np.all(np.isfinite(self.y)):
            raise InputError("outcome contains non-finite values")
        if n and self.category.min() < 0:
            raise InputError("category codes must be non-negative")
        q = int(self.category.max()) + 1 if n else 0
        if self.category_labels is None:
            self.category_labels = [f"cat{j}" for j in range(q)]
        self.category_labels = list(self.category_labels)
        if len(self.category_labels) < q:
            raise InputError("fewer category labels than category codes")
        vals = np.broadcast_to(np.asarray(self.indicator_values, dtype=float), (max(self.k, 0),))
        if np.any(vals == 0.0):
            raise InputError("indicator values must be non-zero")

    @property
    def n_categories(self) -> int:
        return len(self.category_labels)

    @property
    def k(self) -> int:
        """Number of indicator columns (categories minus the reference)."""
        return self.n_categories - 1

    @property
    def indicators(self) -> np.ndarray:
        vals = np.broadcast_to(np.asarray(self.indicator_values, dtype=float), (self.k,))
        U = np.zeros((self.x.shape[0], self.k))
        for j in range(self.k):
            U[self.category == j, j] = vals[j]
        return U

    @property
    def cell_means(self) -> np.ndarray:
        """``(q, 2)`` array of mean outcome per (category, population); NaN when empty."""
        out = np.full((self.n_categories, 2), np.nan)
        for j in range(self.n_categories):
            for i in (0, 1):
                sel = (self.category == j) & (self.x == i)
                if sel.any():
                    out[j, i] = self.y[sel].mean()
        return out

    @property
    def cell_counts(self) -> np.ndarray:
        out = np.zeros((self.n_categories, 2), dtype=int)
        for j in range(self.n_categories):
            for i in (0, 1):
                out[j, i] = int(np.sum((self.category == j) & (self.x == i)))
        return out

    def overall_means(self) -> tuple[float, float]:
        if not (self.x == 0).any() or not (self.x == 1).any():
            raise EmptyCell("both populations must be present")
        return float(self.y[self.x == 0].mean()), float(self.y[self.x == 1].mean())

    def recoded(self, indicator_values) -> "CategoricalStudy":
        return CategoricalStudy(self.x, self.y, self.category, self.category_labels, indicator_values)


def simpson_check(study: CategoricalStudy) -> bool:
    """
    True when the population with strictly higher overall mean outcome has
    a strictly lower mean in every category.

    For a binary population indicator the within-category comparison of
    means is the same as the sign of the within-category slope, so real
    valued outcomes are handled by the same rule.

    Raises
    ------
    EmptyCell
        If some (category, population) cell has no rows.
    """
    means = study.cell_means
    if np.isnan(means).any():
        j, i = np.argwhere(np.isnan(means))[0]
        raise EmptyCell(f"category {study.category_labels[j]!r} has no rows for population {i}")
    m0, m1 = study.overall_means()
    if m0 == m1:
        return False
    hi, lo = (1, 0) if m1 > m0 else (0, 1)
    return bool(np.all(means[:, hi] < means[:, lo]))


def _slopes(study: CategoricalStudy, tol: Tolerances):
    y, x = study.y, study.x
    b0 = ols_fit(y, x, tol=tol).coefficients[1]
    U = study.indicators
    b1 = ols_fit(y, np.column_stack([x, U]), tol=tol).coefficients[1] if U.shape[1] else b0
    scale = np.linalg.norm(y - y.mean()) / np.linalg.norm(x - x.mean())
    return b0, b1, scale


def reversal_check(study: CategoricalStudy, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when adjusting for the category indicators flips the sign of the population slope."""
    b0, b1, scale = _slopes(study, tol)
    s0 = coefficient_sign(b0, 1.0, scale, tol)
    s1 = coefficient_sign(b1, 1.0, scale, tol)
    if s0 == 0 or s1 == 0:
        raise DegenerateBaseline("a population slope is numerically zero; its sign is undefined")
    return s0 != s1


def strong_condition_scalar(R_ux: float, R_uy: float, r_xy: float) -> bool:
    return bool(R_ux * R_uy > abs(r_xy))


def _R(study, z, tol):
    U = study.indicators
    if U.shape[1] == 0:
        return 0.0
    return float(np.sqrt(coef_determination(U, z, tol)))


def necessary_condition_strong(study: CategoricalStudy, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``R(u, x) R(u, y) > |r(x, y)|``.  False rules the paradox out."""
    return strong_condition_scalar(_R(study, study.x, tol), _R(study, study.y, tol), corr(study.x, study.y, tol))


def necessary_condition_weak(study: CategoricalStudy, tol: Tolerances = DEFAULT_TOL) -> bool:
    """``R^2(u, v) > r*`` with ``x`` oriented to correlate positively with ``y``.

    False rules the paradox out.
    """
    r = corr(study.x, study.y, tol)
    if abs(r) < tol.baseline:
        raise DegenerateBaseline("population and outcome are uncorrelated")
    xc = study.x - study.x.mean()
    yc = study.y - study.y.mean()
    v = np.sign(r) * xc / np.linalg.norm(xc) + yc / np.linalg.norm(yc)
    U = study.indicators
    if U.shape[1] == 0 or not np.any(v):
        return False
    return bool(coef_determination(U, v, tol) > r_star(abs(r)))


# -- construction helpers -----------------------------------------------------


def load_study_csv(path) -> CategoricalStudy:
    """
    Read a long-format file with columns ``population``, ``category`` and
    ``outcome`` (one row per individual).

    Populations must take exactly two values; ``0``/``1`` are used as
    given, anything else is mapped to 0/1 in sorted order.  Categories keep
    their order of first appearance, so the last one seen is the reference.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyFile(f"{path} is empty") from None
        required = ("population", "category", "outcome")
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"missing required column(s) {missing}", row=1)
        idx = {c: header.index(c) for c in required}
        pops, cats, ys = [], [], []
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=rowno)
            pop = row[idx["population"]].strip()
            cat = row[idx["category"]].strip()
            if not pop:
                raise ParseError("missing value", row=rowno, column="population")
            if not cat:
                raise ParseError("missing value", row=rowno, column="category")
            try:
                ys.append(float(row[idx["outcome"]]))
            except ValueError:
                raise ParseError("non-numeric value", row=rowno, column="outcome") from None
            pops.append(pop)
            cats.append(cat)
    if not ys:
        raise EmptyFile(f"{path} has no data rows")
    levels = sorted(set(pops))
    if len(levels) != 2:
        raise InputError(f"population must take exactly two values, found {levels}")
    if set(levels) == {"0", "1"}:
        x = np.array([float(p) for p in pops])
    else:
        x = np.array([float(levels.index(p)) for p in pops])
    order = list(dict.fromkeys(cats))
    codes = np.array([order.index(c) for c in cats])
    return CategoricalStudy(x, np.array(ys), codes, order)


def study_from_counts(table) -> CategoricalStudy:
    """
    Expand aggregate incidence counts into one row per individual.

    ``table`` maps category label to ``((pos0, total0), (pos1, total1))``
    for populations 0 and 1.
    """
    xs, ys, cs = [], [], []
    labels = list(table)
    for code, label in enumerate(labels):
        for pop, (pos, total) in enumerate(table[label]):
            if not 0 <= pos <= total:
                raise InputError(f"invalid counts {pos}/{total} in category {label!r}")
            xs += [pop] * total
            ys += [1.0] * pos + [0.0] * (total - pos)
            cs += [code] * total
    return CategoricalStudy(np.array(xs, float), np.array(ys), np.array(cs), labels)


def random_study(rng: np.random.Generator, max_categories: int = 4, max_cell: int = 60) -> CategoricalStudy:
    """
    Random binary-outcome study with confounded category membership.

    Category base rates and population mixes are drawn independently per
    category, and the population effect within categories is small, which
    makes Simpson-type instances common enough for generate-and-filter.
    """
    q = int(rng.integers(2, max_categories + 1))
    base = rng.uniform(0.05, 0.95, size=q)
    effect = rng.uniform(-0.2, 0.2)
    table = {}
    for j in range(q):
        cells = []
        for pop in (0, 1):
            total = int(rng.integers(3, max_cell + 1))
            rate = np.clip(base[j] + (effect if pop else 0.0) + rng.normal(0, 0.03), 0.0, 1.0)
            cells.append((int(round(rate * total)), total))
        table[f"cat{j}"] = tuple(cells)
    return study_from_counts(table)

