import numpy as np
import pytest

from conftest import random_problem
from reversals.errors import EmptyCell, SubsetCeilingExceeded
from reversals.linalg import adjusted_coefficient, residualize
from reversals.reversal import RegressionProblem
from reversals.subsets import (
    CategoricalStudy,
    enumerate_subsets,
    load_study_csv,
    necessary_condition_strong,
    necessary_condition_weak,
    random_study,
    reversal_check,
    simpson_check,
    strong_condition_scalar,
    study_from_counts,
)

KIDNEY = {"small": ((234, 270), (81, 87)), "large": ((55, 80), (192, 263))}


def test_enumerate_orthogonal_single(rng):
    y, x = rng.standard_normal((2, 8))
    u = residualize(rng.standard_normal(8), np.column_stack([x, y]))
    rep = enumerate_subsets(RegressionProblem.from_arrays(y, x, None, u, strict=False))
    assert rep.count == 2
    assert rep.subset_signs[()] == rep.subset_signs[("u1",)]
    assert not rep.any_reversal


def test_enumerate_matches_closed_form(rng):
    for _ in range(30):
        prob = random_problem(rng, k_min=4, k_max=4)
        rep = enumerate_subsets(prob)
        W = prob.W.to_array(prob.n)
        labels = prob.U.labels
        base = np.sign(adjusted_coefficient(residualize(prob.y.values, W), residualize(prob.x.values, W)))
        oracle = False
        for mask in range(16):
            chosen = prob.U.select([labels[j] for j in range(4) if mask >> j & 1]).to_array(prob.n)
            beta = adjusted_coefficient(residualize(prob.y.values, W), residualize(prob.x.values, W), _residualize_cols(chosen, W))
            oracle |= np.sign(beta) != base
        assert rep.any_reversal == oracle


def _residualize_cols(U, W):
    if U.shape[1] == 0:
        return None
    return np.column_stack([residualize(U[:, j], W) for j in range(U.shape[1])])


def test_enumerate_threads_and_ceiling(rng):
    prob = random_problem(rng, k_min=4, k_max=4)
    assert enumerate_subsets(prob, max_workers=4) == enumerate_subsets(prob)
    with pytest.raises(SubsetCeilingExceeded):
        enumerate_subsets(prob, ceiling=3)


def test_simpson_textbook_table():
    study = study_from_counts(KIDNEY)
    means = study.cell_means
    assert means[0, 1] > means[0, 0] and means[1, 1] > means[1, 0]
    m0, m1 = study.overall_means()
    assert m1 == pytest.approx(273 / 350) and m0 == pytest.approx(289 / 350)
    assert simpson_check(study)
    assert reversal_check(study)
    assert necessary_condition_strong(study)
    assert necessary_condition_weak(study)


def test_single_category_is_never_simpson():
    study = study_from_counts({"only": ((3, 10), (6, 10))})
    assert not simpson_check(study)
    assert not necessary_condition_strong(study)
    assert not necessary_condition_weak(study)


def test_uninformative_categories():
    # identical cells in both categories: indicators uncorrelated with x and y
    study = study_from_counts({"a": ((3, 10), (6, 10)), "b": ((3, 10), (6, 10))})
    assert not simpson_check(study)
    assert not reversal_check(study)
    assert not necessary_condition_strong(study)
    assert not necessary_condition_weak(study)


def test_mixed_within_signs_without_flip():
    # category a favours population 1, b favours population 0, overall still favours 1
    study = study_from_counts({"a": ((2, 10), (8, 10)), "b": ((6, 10), (5, 10))})
    assert not simpson_check(study)
    assert not reversal_check(study)


def test_empty_cell():
    x = np.array([0.0, 1.0, 0.0, 0.0])
    study = CategoricalStudy(x, np.array([1.0, 0.0, 1.0, 0.0]), np.array([0, 0, 1, 1]), ["a", "b"])
    with pytest.raises(EmptyCell):
        simpson_check(study)


def test_strong_scalar():
    assert not strong_condition_scalar(0.82, 0.81, 0.91)


def test_indicator_basis_invariance():
    rng = np.random.default_rng(5)
    for _ in range(40):
        study = random_study(rng)
        other = study.recoded(rng.uniform(0.5, 3.0, size=study.k))
        assert reversal_check(other) == reversal_check(study)
        assert necessary_condition_strong(other) == necessary_condition_strong(study)
        assert necessary_condition_weak(other) == necessary_condition_weak(study)


def test_load_study_csv(tmp_path):
    p = tmp_path / "s.csv"
    rows = ["population,category,outcome"]
    for cat, cells in KIDNEY.items():
        for pop, (pos, tot) in enumerate(cells):
            rows += [f"{pop},{cat},1"] * pos + [f"{pop},{cat},0"] * (tot - pos)
    p.write_text("\n".join(rows) + "\n")
    study = load_study_csv(p)
    assert study.category_labels == ["small", "large"]
    assert simpson_check(study)
