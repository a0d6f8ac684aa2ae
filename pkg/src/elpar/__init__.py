"""Positional value engine for soccer.

Fits a Skellam regression of match goal differentials on line-level rating
differences, turns fitted rate pairs into win/draw/loss probabilities, and
prices individual players by the expected league points they add over a
replacement-level stand-in.
"""

from .data import (
    Line,
    MatchRecord,
    PlayerSnapshot,
    ReplacementLevels,
    SnapshotIndex,
    build_features,
    load_matches,
    load_players,
    position_to_line,
    replacement_levels,
    train_test_split,
)
from .errors import (
    DataError,
    DegenerateRedistributionError,
    DegenerateRegressionError,
    DomainError,
    EngineError,
    InfeasibleBudgetError,
    MissingPlayerError,
    NotConvergedError,
    ReplacementLevelPlayerError,
)
from .evaluate import (
    CalibrationBin,
    ResidualSummary,
    calibration_curve,
    outcome_label,
    residual_summary,
    write_evaluation_report,
)
from .glm import (
    FEATURE_ORDER,
    FeatureVector,
    FitConfig,
    SkellamGlmModel,
    fit,
    negative_log_likelihood,
    nll_gradient,
    predict_lambdas,
    predict_outcome,
)
from .market import (
    AllocationSlot,
    BudgetPointsFit,
    ValuationRecord,
    ValueCurve,
    build_value_curve,
    cost_per_point,
    fair_transfer_fee,
    fit_budget_points,
    optimize_budget,
    valuation_records,
    wage_redistribution,
    write_valuation_table,
)
from .model_io import load_model, model_to_document, save_model
from .points import (
    CANONICAL_FORMATIONS,
    ElparResult,
    Formation,
    elpar_formation_average,
    elpar_per_game,
    elpar_table,
    elpar_weighted,
    line_size,
)
from .simulate import draw_outcomes, draw_regression_data, write_synthetic_league
from .skellam import (
    OutcomeProbs,
    SkellamParams,
    dispersion_statistic,
    log_bessel_i,
    outcome_probs,
    poisson_diff_oracle,
    skellam_log_pmf,
)

__version__ = "0.1.0"

__all__ = [
    "AllocationSlot",
    "BudgetPointsFit",
    "CANONICAL_FORMATIONS",
    "CalibrationBin",
    "DataError",
    "DegenerateRedistributionError",
    "DegenerateRegressionError",
    "DomainError",
    "ElparResult",
    "EngineError",
    "FEATURE_ORDER",
    "FeatureVector",
    "FitConfig",
    "Formation",
    "InfeasibleBudgetError",
    "Line",
    "MatchRecord",
    "MissingPlayerError",
    "NotConvergedError",
    "OutcomeProbs",
    "PlayerSnapshot",
    "ReplacementLevelPlayerError",
    "ReplacementLevels",
    "ResidualSummary",
    "SkellamGlmModel",
    "SkellamParams",
    "SnapshotIndex",
    "ValuationRecord",
    "ValueCurve",
    "build_features",
    "build_value_curve",
    "calibration_curve",
    "cost_per_point",
    "dispersion_statistic",
    "draw_outcomes",
    "draw_regression_data",
    "elpar_formation_average",
    "elpar_per_game",
    "elpar_table",
    "elpar_weighted",
    "fair_transfer_fee",
    "fit",
    "fit_budget_points",
    "line_size",
    "load_matches",
    "load_model",
    "load_players",
    "log_bessel_i",
    "model_to_document",
    "negative_log_likelihood",
    "nll_gradient",
    "optimize_budget",
    "outcome_label",
    "outcome_probs",
    "poisson_diff_oracle",
    "position_to_line",
    "predict_lambdas",
    "predict_outcome",
    "replacement_levels",
    "residual_summary",
    "save_model",
    "train_test_split",
    "valuation_records",
    "wage_redistribution",
    "write_evaluation_report",
    "write_synthetic_league",
    "write_valuation_table",
    "__version__",
]
