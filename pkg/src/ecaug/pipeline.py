"""End-to-end analysis of one dataset: propensities, bias form, outcome
models, augmented estimate, and optional uncertainty.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bias import BiasSpec
from .data import TrialDataset, validate
from .errors import EmptyCell
from .estimators import EstimandSpec, estimate_wate
from .inference import InferenceResult, bootstrap, if_variance
from .linmod import DesignSpec
from .outcomes import OutcomeModels, fit_outcome_models
from .propensity import (
    FittedPropensities,
    KnownConstant,
    estimate_propensities,
    overlap_report,
)


@dataclass(frozen=True)
class AnalysisConfig:
    estimand: EstimandSpec = field(default_factory=EstimandSpec.att)
    bias_spec: BiasSpec = field(default_factory=BiasSpec.mean_exchangeability)
    z_design: DesignSpec = DesignSpec()
    a_design: DesignSpec | KnownConstant = DesignSpec()
    outcome_design: DesignSpec = DesignSpec()
    z_stage1: str = "logistic"
    clamp_propensities: bool = False


@dataclass(frozen=True)
class AnalysisResult:
    counts: object
    overlap: dict
    propensities: FittedPropensities
    models: OutcomeModels
    theta: np.ndarray
    point: float
    sandwich: InferenceResult
    bootstrap: InferenceResult | None
    estimator_id: str
    estimand: str


def point_estimate(dataset: TrialDataset, config: AnalysisConfig) -> float:
    """One pass through the pipeline, returning only the point estimate.

    This is the closure handed to the bootstrap so every replicate refits
    all nuisances.
    """
    fp = estimate_propensities(
        dataset, config.z_design, config.a_design, clamp=config.clamp_propensities
    )
    models = fit_outcome_models(
        dataset, config.bias_spec, config.outcome_design, config.z_stage1
    )
    return estimate_wate(dataset, fp, models, config.estimand).point


def analyze(
    dataset: TrialDataset,
    config: AnalysisConfig = AnalysisConfig(),
    boot_reps: int | None = None,
    seed: int = 0,
    level: float = 0.95,
) -> AnalysisResult:
    """Validate, fit every nuisance, estimate, and attach uncertainty.

    The sandwich interval is always computed; a full-pipeline stratified
    bootstrap is added when boot_reps is given.
    """
    counts = validate(dataset)
    if counts.n11 == 0:
        raise EmptyCell(1, 1)
    fp = estimate_propensities(
        dataset, config.z_design, config.a_design, clamp=config.clamp_propensities
    )
    models = fit_outcome_models(
        dataset, config.bias_spec, config.outcome_design, config.z_stage1
    )
    result = estimate_wate(dataset, fp, models, config.estimand)
    sandwich = if_variance(dataset, fp, models, config.estimand, result.point, level)
    boot = None
    if boot_reps is not None:
        boot = bootstrap(
            dataset,
            lambda ds: point_estimate(ds, config),
            B=boot_reps,
            seed=seed,
            level=level,
        )
    return AnalysisResult(
        counts=counts,
        overlap=overlap_report(fp),
        propensities=fp,
        models=models,
        theta=models.bias.theta,
        point=result.point,
        sandwich=sandwich,
        bootstrap=boot,
        estimator_id=result.estimator_id,
        estimand=result.estimand,
    )
