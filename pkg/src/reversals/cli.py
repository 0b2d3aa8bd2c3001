"""
Command line entry point.

Exit codes: 0 when the analysis ran (whatever the verdict), 2 for input
errors, 3 when the data are degenerate for the requested quantity.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import cone, counterexamples, subsets
from .errors import DegenerateDataError, DomainError, InputError
from .report import AnalysisConfig, emit_report, run_analysis
from .synthetic import bundled_path

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


def _labels(text):
    return [s.strip() for s in text.split(",") if s.strip()] if text else []


def _tolerance(text):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected NAME=VALUE")
    return name.strip(), float(value)


def _add_analysis_args(p):
    p.add_argument("--input", help="CSV file with a header row (default: bundled synthetic data)")
    p.add_argument("--response", required=True)
    p.add_argument("--explanatory", required=True)
    p.add_argument("--controls", type=_labels, default=[], help="comma-separated labels")
    p.add_argument("--candidates", type=_labels, required=True, help="comma-separated labels")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subset-ceiling", type=int, default=subsets.DEFAULT_SUBSET_CEILING)
    p.add_argument("--tolerance", type=_tolerance, action="append", default=[], metavar="NAME=VALUE")
    p.add_argument(
        "--partial-include-explanatory",
        action="store_true",
        help="also condition the per-candidate partial correlations on the explanatory variable",
    )
    p.add_argument("--workers", type=int, default=None, help="threads for subset enumeration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reversals", description="Sign-reversal analysis for least-squares coefficients.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diagnose", help="exact reversal ratio and both stability conditions")
    _add_analysis_args(p)
    p = sub.add_parser("enumerate", help="diagnose plus an exhaustive check of every candidate subset")
    _add_analysis_args(p)

    p = sub.add_parser("simpson", help="Simpson's paradox checks on a long-format study file")
    p.add_argument("--input", required=True, help="CSV with columns population, category, outcome")
    p.add_argument("--format", choices=("json", "text"), default="text")

    p = sub.add_parser("cone", help="reversal cone utilities")
    cone_sub = p.add_subparsers(dest="cone_command", required=True)
    s = cone_sub.add_parser("sample", help="boundary directions as CSV rows")
    s.add_argument("--r", type=float, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("counterexample", help="emit one of the counterexample data sets")
    p.add_argument("family", choices=("need-r2", "need-partial", "no-full-fitted-corr"))
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--format", choices=("json", "text"), default="text")
    return parser


def _analysis(args, enumerate_subsets):
    config = AnalysisConfig(
        input_path=args.input or str(bundled_path()),
        response=args.response,
        explanatory=args.explanatory,
        controls=args.controls,
        candidates=args.candidates,
        standardize=args.standardize,
        subset_ceiling=args.subset_ceiling,
        tolerance_overrides=dict(args.tolerance) or None,
        seed=args.seed,
        enumerate=enumerate_subsets,
        partial_includes_explanatory=args.partial_include_explanatory,
        max_workers=args.workers,
    )
    return emit_report(run_analysis(config), args.format).decode("utf-8")


def _simpson(args):
    study = subsets.load_study_csv(args.input)
    means = study.cell_means
    result = {
        "simpson": subsets.simpson_check(study),
        "reversal": subsets.reversal_check(study),
        "strong_condition": subsets.necessary_condition_strong(study),
        "weak_condition": subsets.necessary_condition_weak(study),
        "categories": [
            {"label": lab, "mean_pop0": float(means[j, 0]), "mean_pop1": float(means[j, 1])}
            for j, lab in enumerate(study.category_labels)
        ],
    }
    if args.format == "json":
        return json.dumps(result, indent=2) + "\n"
    lines = [f"{lab:<16} pop0 {c['mean_pop0']:.4f}   pop1 {c['mean_pop1']:.4f}" for lab, c in zip(study.category_labels, result["categories"])]
    lines += [
        f"simpson's paradox:        {result['simpson']}",
        f"least-squares reversal:   {result['reversal']}",
        f"strong necessary cond.:   {result['strong_condition']}",
        f"weak necessary cond.:     {result['weak_condition']}",
    ]
    return "\n".join(lines) + "\n"


def _counterexample(args):
    inst = counterexamples.generate(args.family, args.epsilon, args.delta)
    if args.format == "json":
        payload = {
            "family": inst.family.value,
            "epsilon": None if inst.family is counterexamples.Family.NEED_PARTIAL else inst.epsilon,
            "delta": None if inst.family is counterexamples.Family.NEED_R2 else inst.delta,
            "columns": {c.label: c.values.tolist() for c in inst.data},
            "expected": inst.expected,
        }
        return json.dumps(payload, indent=2) + "\n"
    return inst.to_csv()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("diagnose", "enumerate"):
            out = _analysis(args, args.command == "enumerate")
        elif args.command == "simpson":
            out = _simpson(args)
        elif args.command == "cone":
            spec = cone.ConeSpec(args.r, args.m)
            out = cone.boundary_csv(cone.sample_boundary(spec, args.count, args.seed))
        else:
            out = _counterexample(args)
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        # out-of-range command line parameters are input errors, not data problems
        if isinstance(exc, DomainError) and args.command in ("cone", "counterexample"):
            return EXIT_INPUT
        return EXIT_DEGENERATE
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
