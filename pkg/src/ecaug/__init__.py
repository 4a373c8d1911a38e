"""Treatment effect estimation for randomized trials augmented by external
control data: propensity scores, estimation of the systematic
concurrent-vs-external outcome difference, augmented locally efficient
estimators for tilted estimands, inference, and a Monte Carlo harness.
"""

from .bias import BiasKind, BiasSpec, FittedBias, fit_bias, fwl_estimate, pseudo_outcomes
from .data import ArmCounts, TrialDataset, read_csv, read_csv_string, validate, write_csv
from .estimators import (
    BUILTIN_ESTIMANDS,
    EstimandSpec,
    EstimateResult,
    augmented_atc,
    augmented_ate,
    augmented_ato,
    augmented_att,
    estimate_ancova,
    estimate_dr,
    estimate_md,
    estimate_mdp,
    estimate_ps,
    estimate_wate,
    true_wate,
    wate_influence,
)
from .inference import InferenceResult, bootstrap, if_variance, resample_stratified
from .linmod import (
    DesignSpec,
    FittedLinear,
    FittedLogistic,
    fit_logistic,
    fit_ols,
    predict,
)
from .outcomes import OutcomeModels, fit_outcome_models
from .pipeline import AnalysisConfig, AnalysisResult, analyze, point_estimate
from .propensity import (
    FittedPropensities,
    KnownConstant,
    estimate_propensities,
    overlap_report,
)
from .simulation import (
    ResultTable,
    SimulatedTruth,
    SimulationConfig,
    fit_estimators,
    generate,
    run_study,
    run_table,
    solve_alpha_z,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "AnalysisResult",
    "ArmCounts",
    "BUILTIN_ESTIMANDS",
    "BiasKind",
    "BiasSpec",
    "DesignSpec",
    "EstimandSpec",
    "EstimateResult",
    "FittedBias",
    "FittedLinear",
    "FittedLogistic",
    "FittedPropensities",
    "InferenceResult",
    "KnownConstant",
    "OutcomeModels",
    "ResultTable",
    "SimulatedTruth",
    "SimulationConfig",
    "TrialDataset",
    "analyze",
    "augmented_atc",
    "augmented_ate",
    "augmented_ato",
    "augmented_att",
    "bootstrap",
    "estimate_ancova",
    "estimate_dr",
    "estimate_md",
    "estimate_mdp",
    "estimate_propensities",
    "estimate_ps",
    "estimate_wate",
    "fit_bias",
    "fit_estimators",
    "fit_logistic",
    "fit_ols",
    "fit_outcome_models",
    "fwl_estimate",
    "generate",
    "if_variance",
    "overlap_report",
    "point_estimate",
    "predict",
    "pseudo_outcomes",
    "read_csv",
    "read_csv_string",
    "resample_stratified",
    "run_study",
    "run_table",
    "solve_alpha_z",
    "true_wate",
    "validate",
    "wate_influence",
    "write_csv",
]
