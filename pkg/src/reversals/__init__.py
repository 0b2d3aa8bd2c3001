"""Sign-reversal analysis for least-squares regression coefficients."""

from .cone import ConeSpec, Membership, canonical_frame, cone_coefficients, in_reversal_cone, sample_boundary
from .counterexamples import gen_need_partial, gen_need_r2, gen_no_full_fitted_corr
from .errors import (
    DegenerateBaseline,
    DimensionMismatch,
    DomainError,
    EmptyCell,
    EmptyFile,
    ParseError,
    RankDeficient,
    ReversalError,
    SubsetCeilingExceeded,
    ZeroVariance,
)
from .linalg import DataColumn, DataMatrix, FitResult, Tolerances, adjusted_coefficient, center, ols_fit, residualize
from .reversal import (
    RegressionProblem,
    ReversalDiagnostics,
    Verdict,
    corollary1_scalar,
    corollary2_check,
    diagnose,
    prop1_ratio,
)
from .report import AnalysisConfig, Report, emit_report, load_csv, run_analysis, standardize
from .stats import PartialContext, coef_determination, corr, partial_corr, partial_R, r_star, v_vector
from .subsets import (
    CategoricalStudy,
    SubsetReport,
    enumerate_subsets,
    necessary_condition_strong,
    necessary_condition_weak,
    reversal_check,
    simpson_check,
)

__version__ = "0.1.0"
