"""Uncertainty for any estimator: a stratified nonparametric bootstrap that
refits the entire pipeline per replicate, and the influence-function
plug-in variance for the augmented weighted estimators.

Determinism contract: bootstrap replicate r draws from a generator seeded
by the pure pair (seed, r), so results do not depend on execution order and
can be reproduced bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import TrialDataset
from .errors import EcaugError, TooManyFailures
from .estimators import EstimandSpec, wate_influence

MAX_FAILURE_FRACTION = 0.05


@dataclass(frozen=True)
class InferenceResult:
    point: float
    std_error: float
    ci_low: float
    ci_high: float
    method: str
    level: float
    replicates_used: int


def _stratum_indices(dataset):
    return [
        np.flatnonzero(dataset.mask(1, 1)),
        np.flatnonzero(dataset.mask(1, 0)),
        np.flatnonzero(dataset.mask(0, 0)),
    ]


def resample_stratified(dataset: TrialDataset, rng: np.random.Generator) -> TrialDataset:
    """Resample rows with replacement within each (z, a) cell, preserving
    the cell sizes (the estimand's weights depend on them)."""
    picks = []
    for idx in _stratum_indices(dataset):
        if idx.size:
            picks.append(rng.choice(idx, size=idx.size, replace=True))
    order = np.concatenate(picks)
    return dataset.subset(order)


def bootstrap(
    dataset: TrialDataset,
    estimator_closure,
    B: int = 1000,
    seed: int = 0,
    level: float = 0.95,
) -> InferenceResult:
    """Percentile bootstrap of a full estimation pipeline.

    estimator_closure maps a TrialDataset to a float and is re-run on every
    stratified resample, so nuisance refitting (propensities, bias step,
    outcome models) is propagated into the interval. Replicates whose
    pipeline raises a package error are dropped; more than 5% of them
    raises TooManyFailures.
    """
    if B < 100:
        raise ValueError("bootstrap needs B >= 100")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    point = float(estimator_closure(dataset))
    points = []
    failures = 0
    for r in range(B):
        rng = np.random.default_rng((int(seed), r))
        sample = resample_stratified(dataset, rng)
        try:
            points.append(float(estimator_closure(sample)))
        except EcaugError:
            failures += 1
    if failures > MAX_FAILURE_FRACTION * B:
        raise TooManyFailures(failures, B)
    points = np.asarray(points)
    alpha = 1.0 - level
    lo, hi = np.quantile(points, (alpha / 2.0, 1.0 - alpha / 2.0))
    sd = float(points.std(ddof=1)) if points.size > 1 else 0.0
    return InferenceResult(
        point=point,
        std_error=sd,
        ci_low=float(lo),
        ci_high=float(hi),
        method="bootstrap_percentile",
        level=level,
        replicates_used=int(points.size),
    )


def if_variance(
    dataset: TrialDataset,
    fp,
    models,
    estimand: EstimandSpec,
    tau_hat: float,
    level: float = 0.95,
) -> InferenceResult:
    """Plug-in sandwich variance from the estimator's influence values:
    variance = sum(IF^2) / N^2, with a Wald interval at the given level."""
    from scipy.stats import norm

    iv = wate_influence(dataset, fp, models, estimand, tau_hat)
    n = dataset.n
    se = float(np.sqrt(np.sum(iv**2)) / n)
    zq = norm.ppf(1.0 - (1.0 - level) / 2.0)
    return InferenceResult(
        point=float(tau_hat),
        std_error=se,
        ci_low=float(tau_hat - zq * se),
        ci_high=float(tau_hat + zq * se),
        method="if_sandwich",
        level=level,
        replicates_used=0,
    )
