"""CSV ingestion, the end-to-end analysis, and report rendering."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFile, InputError, ParseError, ZeroVariance
from .linalg import DataColumn, DataMatrix, Tolerances, _qr_full_rank
from .reversal import RegressionProblem, ReversalDiagnostics, Verdict, diagnose
from .stats import partial_corr
from .subsets import DEFAULT_SUBSET_CEILING, SubsetReport, enumerate_subsets

__all__ = [
    "AnalysisConfig",
    "Report",
    "load_csv",
    "standardize",
    "run_analysis",
    "emit_report",
    "report_to_dict",
]


def load_csv(path) -> DataMatrix:
    """
    Read a comma-separated numeric table with a header row.

    Row numbers in errors count the header as row 1.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyFile(f"{path} is empty") from None
        if not any(header):
            raise EmptyFile(f"{path} has an empty header")
        seen = set()
        for h in header:
            if not h:
                raise ParseError("empty column label", row=1)
            if h in seen:
                raise ParseError("duplicate column label", row=1, column=h)
            seen.add(h)
        rows = []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", row=rowno)
            values = []
            for label, cell in zip(header, row):
                cell = cell.strip()
                if not cell:
                    raise ParseError("missing value", row=rowno, column=label)
                try:
                    val = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric value {cell!r}", row=rowno, column=label) from None
                if not math.isfinite(val):
                    raise ParseError(f"non-finite value {cell!r}", row=rowno, column=label)
                values.append(val)
            rows.append(values)
    if not rows:
        raise EmptyFile(f"{path} has no data rows")
    arr = np.array(rows, dtype=float)
    return DataMatrix([DataColumn(h, arr[:, j]) for j, h in enumerate(header)])


def standardize(m: DataMatrix) -> DataMatrix:
    """Center every column and scale it to unit sample standard deviation."""
    out = []
    for c in m:
        sd = c.values.std(ddof=1)
        if sd == 0.0 or sd <= 1e-12 * np.abs(c.values).max():
            raise ZeroVariance(c.label)
        out.append(DataColumn(c.label, (c.values - c.values.mean()) / sd))
    return DataMatrix(out)


@dataclass
class AnalysisConfig:
    input_path: str
    response: str
    explanatory: str
    controls: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    standardize: bool = False
    subset_ceiling: int = DEFAULT_SUBSET_CEILING
    tolerance_overrides: dict | None = None
    seed: int = 0
    enumerate: bool = True
    partial_includes_explanatory: bool = False
    max_workers: int | None = None

    def validate(self, header) -> None:
        labels = [self.response, self.explanatory, *self.controls, *self.candidates]
        if len(set(labels)) != len(labels):
            raise InputError(f"response, explanatory, controls and candidates must be distinct: {labels}")
        missing = [lab for lab in labels if lab not in header]
        if missing:
            raise InputError(f"column(s) {missing} not found in {self.input_path}; available: {list(header)}")
        if not self.candidates:
            raise InputError("at least one candidate covariate is required")
        if self.subset_ceiling < 0:
            raise InputError("subset ceiling must be non-negative")

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances.from_overrides(self.tolerance_overrides)


@dataclass
class Report:
    config: AnalysisConfig
    n: int
    diagnostics: ReversalDiagnostics
    subset_report: SubsetReport | None
    subsets_skipped_reason: str | None
    per_candidate_partials: list
    coefficients: list
    narrative_verdict: str


def _coefficient_table(y: np.ndarray, X: np.ndarray, labels) -> list:
    """Slopes and plain t statistics of the full model (context only)."""
    n = y.shape[0]
    A = np.column_stack([np.ones(n), X])
    Q, R = _qr_full_rank(A, 1e-10, ["(intercept)", *labels])
    qty = Q.T @ y
    beta = np.linalg.solve(R, qty)
    resid = y - Q @ qty
    dof = n - A.shape[1]
    rows = []
    if dof > 0:
        Rinv = np.linalg.inv(R)
        se = np.sqrt((resid @ resid) / dof * np.sum(Rinv**2, axis=1))
    for j, lab in enumerate(labels, start=1):
        t = float(beta[j] / se[j]) if dof > 0 and se[j] > 0 else None
        rows.append({"label": lab, "estimate": float(beta[j]), "t": t})
    return rows


def _narrative(d: ReversalDiagnostics, x: str, sub: SubsetReport | None, skipped: str | None) -> str:
    if d.verdict is Verdict.REVERSAL_CERTAIN:
        text = (
            f"ReversalCertain: adjusting for all candidates reverses the sign of the {x} coefficient "
            f"(ratio {d.prop1_ratio:.4f} > 1)."
        )
    elif d.verdict is Verdict.STABLE_COR1:
        text = (
            f"StableAllSubsets_Cor1: no subset of the candidates can reverse the sign of the {x} coefficient, "
            f"since R_ux*R_uy = {d.R_ux_given_w * d.R_uy_given_w:.4f} < |r| = {abs(d.r_xy_given_w):.4f}."
        )
    elif d.verdict is Verdict.STABLE_COR2:
        text = (
            f"StableAllSubsets_Cor2: no subset of the candidates can reverse the sign of the {x} coefficient, "
            f"since R2(u, v) = {d.R2_u_v:.4f} < r* = {d.r_star:.4f}."
        )
    else:
        text = (
            f"Indeterminate: the full adjustment does not reverse the sign of the {x} coefficient "
            f"(ratio {d.prop1_ratio:.4f}) and neither sufficient condition for stability holds."
        )
    if sub is not None:
        if sub.any_reversal:
            text += f" Exhaustive check: {len(sub.flipping_subsets)} of {sub.count} subsets reverse the sign."
        else:
            text += f" Exhaustive check: none of the {sub.count} subsets reverses the sign."
    elif skipped:
        text += f" Exhaustive check skipped: {skipped}."
    return text


def run_analysis(config: AnalysisConfig, data: DataMatrix | None = None) -> Report:
    """
    Load the data, build the regression problem and run every check.

    The sequence is: diagnostics for the full candidate set (exact ratio and
    both sufficient conditions), the optional exhaustive subset check, and
    the table of each candidate's partial correlation with the response
    given the other candidates.
    """
    if data is None:
        data = load_csv(config.input_path)
    config.validate(data.labels)
    tol = config.tolerances
    used = [config.response, config.explanatory, *config.controls, *config.candidates]
    data = data.select(used)
    if config.standardize:
        data = standardize(data)
    problem = RegressionProblem(
        data[config.response],
        data[config.explanatory],
        data.select(config.controls),
        data.select(config.candidates),
        strict=False,
        tol=tol,
    )
    diag = diagnose(problem, tol)

    sub, skipped = None, None
    if not config.enumerate:
        skipped = "not requested"
    elif problem.k > config.subset_ceiling:
        skipped = f"{problem.k} candidates exceed the subset ceiling of {config.subset_ceiling}"
    else:
        sub = enumerate_subsets(problem, config.subset_ceiling, config.max_workers, tol)

    partials = []
    for lab in config.candidates:
        others = [c for c in config.candidates if c != lab]
        if config.partial_includes_explanatory:
            others.append(config.explanatory)
        controls = data.select(others) if others else None
        partials.append((lab, partial_corr(data[lab], data[config.response], controls, tol)))

    reg_labels = [config.explanatory, *config.controls, *config.candidates]
    coefs = _coefficient_table(data[config.response].values, data.select(reg_labels).to_array(), reg_labels)
    return Report(
        config=config,
        n=problem.n,
        diagnostics=diag,
        subset_report=sub,
        subsets_skipped_reason=skipped,
        per_candidate_partials=partials,
        coefficients=coefs,
        narrative_verdict=_narrative(diag, config.explanatory, sub, skipped),
    )


def report_to_dict(report: Report) -> dict:
    d = report.diagnostics
    sub = report.subset_report
    return {
        "baseline_sign": d.baseline_sign,
        "adjusted_sign": d.adjusted_sign,
        "prop1_ratio": d.prop1_ratio,
        "r_partial": d.r_xy_given_w,
        "R_ux": d.R_ux_given_w,
        "R_uy": d.R_uy_given_w,
        "fitted_corr": d.fitted_corr,
        "r_star": d.r_star,
        "R2_u_v": d.R2_u_v,
        "verdict": d.verdict.value,
        "subsets": None
        if sub is None
        else {
            "count": sub.count,
            "flipped": len(sub.flipping_subsets),
            "flipped_list": [list(s) for s in sub.flipping_subsets],
        },
        "partial_table": [{"label": lab, "partial_r": r} for lab, r in report.per_candidate_partials],
        "beta_unadjusted": d.beta_unadjusted,
        "beta_adjusted": d.beta_adjusted,
        "corollary1": d.corollary1,
        "corollary2": d.corollary2,
        "subsets_skipped_reason": report.subsets_skipped_reason,
        "coefficients": report.coefficients,
        "narrative": report.narrative_verdict,
        "response": report.config.response,
        "explanatory": report.config.explanatory,
        "controls": list(report.config.controls),
        "candidates": list(report.config.candidates),
        "standardized": report.config.standardize,
        "n": report.n,
    }


def _fmt(v) -> str:
    return "n/a" if v is None else f"{v:.4f}"


def _text(report: Report) -> str:
    d = report.diagnostics
    cfg = report.config
    given = ", ".join(cfg.controls) if cfg.controls else "(none)"
    lines = [
        f"response: {cfg.response}   explanatory: {cfg.explanatory}   n = {report.n}",
        f"controls: {given}",
        f"candidates: {', '.join(cfg.candidates)}",
        "",
        f"partial correlation r(x, y | controls)   {_fmt(d.r_xy_given_w)}",
        f"R(u, x | controls)                       {_fmt(d.R_ux_given_w)}",
        f"R(u, y | controls)                       {_fmt(d.R_uy_given_w)}",
        f"correlation of fitted values             {_fmt(d.fitted_corr)}",
        f"reversal ratio                           {_fmt(d.prop1_ratio)}",
        f"r*                                       {_fmt(d.r_star)}",
        f"R2(u, v)                                 {_fmt(d.R2_u_v)}",
        f"slope without candidates                 {_fmt(d.beta_unadjusted)}",
        f"slope with all candidates                {_fmt(d.beta_adjusted)}",
        "",
    ]
    if d.verdict is Verdict.REVERSAL_CERTAIN:
        lines.append(
            f"sign flip: slope of {cfg.explanatory} goes from {_fmt(d.beta_unadjusted)} "
            f"to {_fmt(d.beta_adjusted)} when all candidates are added"
        )
    lines.append(f"verdict: {d.verdict.value}")
    lines.append(report.narrative_verdict)
    sub = report.subset_report
    if sub is not None:
        lines.append("")
        lines.append(f"subsets checked: {sub.count}, reversing: {len(sub.flipping_subsets)}")
        for s in sub.flipping_subsets:
            lines.append("  reverses: {" + ", ".join(s) + "}")
    lines.append("")
    lines.append("partial correlation with response given the other candidates:")
    for lab, r in report.per_candidate_partials:
        lines.append(f"  {lab:<20} {_fmt(r)}")
    lines.append("")
    lines.append("full model (context only; t statistics play no part in the verdict):")
    for row in report.coefficients:
        lines.append(f"  {row['label']:<20} slope {_fmt(row['estimate'])}   t {_fmt(row['t'])}")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, format: str = "json") -> bytes:
    """Render ``report`` as a JSON object or human-readable text, UTF-8 encoded."""
    if format == "json":
        return (json.dumps(report_to_dict(report), indent=2) + "\n").encode("utf-8")
    if format == "text":
        return _text(report).encode("utf-8")
    raise InputError(f"unknown report format {format!r}")
