"""Point estimators of treatment effects in a hybrid trial.

Two RCT-only baselines (mean difference and model-predicted mean
difference), three conventional external-control estimators (propensity
weighting, doubly robust within the trial, ANCOVA), the augmented ATT
estimator, and its generalization to any tilted estimand via a tilting
function h(e_z). The closed forms for ATT/ATO/ATE/ATC are implemented
independently of the generic weighted estimator so each can check the
other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linmod
from .data import TrialDataset, require_cells
from .errors import DegenerateDenominator, EmptyCell
from .linmod import DesignSpec
from .outcomes import OutcomeModels
from .propensity import FittedPropensities

DENOM_TOL = 1e-12


@dataclass(frozen=True)
class EstimandSpec:
    """A target population expressed through a tilting function h(e) of the
    trial-membership propensity, with its analytic derivative h'(e).

    h must be positive over the observed propensity range; h_prime must be
    the exact derivative (the estimator weights need it exactly, so no
    numerical differentiation is offered).
    """

    name: str
    h: Callable[[np.ndarray], np.ndarray]
    h_prime: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def att(cls):
        return cls("ATT", lambda e: e, lambda e: np.ones_like(e))

    @classmethod
    def ate(cls):
        return cls("ATE", lambda e: np.ones_like(e), lambda e: np.zeros_like(e))

    @classmethod
    def atc(cls):
        return cls("ATC", lambda e: 1.0 - e, lambda e: -np.ones_like(e))

    @classmethod
    def ato(cls):
        return cls("ATO", lambda e: e * (1.0 - e), lambda e: 1.0 - 2.0 * e)

    @classmethod
    def custom(cls, name, h, h_prime):
        return cls(name, h, h_prime)


BUILTIN_ESTIMANDS = {
    "att": EstimandSpec.att,
    "ate": EstimandSpec.ate,
    "atc": EstimandSpec.atc,
    "ato": EstimandSpec.ato,
}


@dataclass(frozen=True)
class EstimateResult:
    estimator_id: str
    estimand: str
    point: float
    diagnostics: dict = field(default_factory=dict)


def _result(estimator_id, estimand, point, **diag):
    point = float(point)
    if not np.isfinite(point):
        raise DegenerateDenominator(f"{estimator_id} produced a non-finite estimate")
    return EstimateResult(estimator_id=estimator_id, estimand=estimand, point=point, diagnostics=diag)


def estimate_md(dataset: TrialDataset) -> EstimateResult:
    """Unadjusted mean difference between the two concurrent arms."""
    require_cells(dataset, (1, 1), (1, 0))
    m11, m10 = dataset.mask(1, 1), dataset.mask(1, 0)
    point = dataset.y[m11].mean() - dataset.y[m10].mean()
    return _result("MD", "ATT", point, n11=int(m11.sum()), n10=int(m10.sum()))


def estimate_mdp(dataset: TrialDataset, models: OutcomeModels) -> EstimateResult:
    """Mean difference of model-predicted outcomes over the trial rows.

    The models must have been fit to the trial subset only (fit the
    Flexible or ME form on dataset.subset(dataset.mask(z=1)); the two
    coincide there).
    """
    require_cells(dataset, (1, 1), (1, 0))
    trial = dataset.mask(z=1)
    mu11, mu10, _ = models.evaluate(dataset.x[trial])
    return _result("MDP", "ATT", (mu11 - mu10).mean(), n1=int(trial.sum()))


def estimate_ps(dataset: TrialDataset, fp: FittedPropensities) -> EstimateResult:
    """Propensity-weighted contrast of treated trial subjects against all
    controls, external controls weighted by e_z / (1 - e_z)."""
    require_cells(dataset, (1, 1), (1, 0))
    z, a, y = dataset.z, dataset.a, dataset.y
    w = np.ones(dataset.n)
    ext = z == 0
    w[ext] = fp.e_z[ext] / (1.0 - fp.e_z[ext])
    treated = (z == 1) & (a == 1)
    control = ~treated
    point = np.sum(y[treated] * w[treated]) / np.sum(w[treated]) - np.sum(
        y[control] * w[control]
    ) / np.sum(w[control])
    return _result("PS", "ATT", point, sum_weights=float(w.sum()))


def estimate_dr(
    dataset: TrialDataset, fp: FittedPropensities, models_me: OutcomeModels
) -> EstimateResult:
    """Doubly robust estimator over the trial rows, with outcome models
    that may borrow external controls (the ME fit in the reference use)."""
    require_cells(dataset, (1, 1), (1, 0))
    z, a, y = dataset.z, dataset.a, dataset.y
    mu11, mu10, _ = models_me.evaluate(dataset.x)
    n1 = z.sum()
    contrib = z * (
        mu11
        - mu10
        + a * (y - mu11) / fp.e_a
        - (1.0 - a) * (y - mu10) / (1.0 - fp.e_a)
    )
    return _result("DR", "ATT", contrib.sum() / n1, n1=int(n1))


def estimate_ancova(dataset: TrialDataset, include_z_intercept: bool = False) -> EstimateResult:
    """Coefficient of the treatment indicator in a single linear regression
    of y on the covariates and a (plus z when include_z_intercept)."""
    extra = ("a", "z") if include_z_intercept else ("a",)
    design = DesignSpec(extra=extra).build(dataset)
    fit = linmod.fit_ols(design, dataset.y)
    a_col = design.shape[1] - (2 if include_z_intercept else 1)
    label = "ANCOVA-const" if include_z_intercept else "ANCOVA-ME"
    return _result(label, "ATT", fit.coefficients[a_col])


def _residual_terms(dataset, models):
    z, a, y = dataset.z, dataset.a, dataset.y
    mu11, mu10, mu00 = models.evaluate(dataset.x)
    r11 = z * a * (y - mu11)
    r10 = z * (1.0 - a) * (y - mu10)
    r00 = (1.0 - z) * (y - mu00)
    return mu11 - mu10, r11, r10, r00


def augmented_att(
    dataset: TrialDataset, fp: FittedPropensities, models: OutcomeModels
) -> EstimateResult:
    """Augmented ATT estimator in its direct closed form.

    (1/N1) * sum{ z*(mu11 - mu10) + r11/e_a - e_z*(r10 + r00)/(1 - e_a*e_z) }.
    """
    require_cells(dataset, (1, 1))
    delta, r11, r10, r00 = _residual_terms(dataset, models)
    z = dataset.z
    n1 = z.sum()
    total = z * delta + r11 / fp.e_a - fp.e_z * (r10 + r00) / (1.0 - fp.e_a * fp.e_z)
    return _result("aug", "ATT", total.sum() / n1, n1=int(n1))


def augmented_ate(dataset, fp, models) -> EstimateResult:
    """Closed form for h = 1: mean of delta-hat plus the residual term."""
    delta, r11, r10, r00 = _residual_terms(dataset, models)
    t = r11 / (fp.e_z * fp.e_a) - (r10 + r00) / (1.0 - fp.e_z * fp.e_a)
    return _result("aug", "ATE", (delta + t).mean())


def augmented_atc(dataset, fp, models) -> EstimateResult:
    """Closed form for h = 1 - e_z, averaging over the external rows."""
    delta, r11, r10, r00 = _residual_terms(dataset, models)
    z = dataset.z
    n0 = (1.0 - z).sum()
    if n0 == 0:
        raise EmptyCell(0, 0)
    t = r11 / (fp.e_z * fp.e_a) - (r10 + r00) / (1.0 - fp.e_z * fp.e_a)
    total = (1.0 - z) * delta + (1.0 - fp.e_z) * t
    return _result("aug", "ATC", total.sum() / n0, n0=int(n0))


def augmented_ato(dataset, fp, models) -> EstimateResult:
    """Closed form for h = e_z(1 - e_z), with numerator weights
    z(1 - 2 e_z) + e_z^2."""
    delta, r11, r10, r00 = _residual_terms(dataset, models)
    z = dataset.z
    t = r11 / (fp.e_z * fp.e_a) - (r10 + r00) / (1.0 - fp.e_z * fp.e_a)
    w = z * (1.0 - 2.0 * fp.e_z) + fp.e_z**2
    denom = w.sum()
    if abs(denom) < DENOM_TOL:
        raise DegenerateDenominator("ATO weight total vanished")
    point = np.sum(w * delta + fp.e_z * (1.0 - fp.e_z) * t) / denom
    return _result("aug", "ATO", point)


def estimate_wate(
    dataset: TrialDataset,
    fp: FittedPropensities,
    models: OutcomeModels,
    estimand: EstimandSpec,
) -> EstimateResult:
    """Generalized augmented estimator for any tilting function h.

    tau-hat = sum h(e_z) * [lambda * (mu11 - mu10) + T] / sum h(e_z) * lambda,
    with lambda = (z - e_z) h'(e_z)/h(e_z) + 1 and T the propensity-weighted
    residual contrast. The returned point solves the estimating equation
    sum h(e_z) { lambda * (delta - tau) + T } = 0.
    """
    require_cells(dataset, (1, 1))
    delta, r11, r10, r00 = _residual_terms(dataset, models)
    z = dataset.z
    t = r11 / (fp.e_z * fp.e_a) - (r10 + r00) / (1.0 - fp.e_z * fp.e_a)
    h = np.asarray(estimand.h(fp.e_z), dtype=float)
    if not (h > 0).all():
        raise DegenerateDenominator("tilting function vanished on the observed propensities")
    hp = np.asarray(estimand.h_prime(fp.e_z), dtype=float)
    lam = (z - fp.e_z) * hp / h + 1.0
    denom = float(np.sum(h * lam))
    if abs(denom) < DENOM_TOL:
        raise DegenerateDenominator("sum of h * lambda vanished")
    point = float(np.sum(h * (lam * delta + t)) / denom)
    return _result(
        "aug",
        estimand.name,
        point,
        n1=int(z.sum()),
        n0=int((1 - z).sum()),
        sum_h_lambda=denom,
    )


def wate_influence(dataset, fp, models, estimand, tau_hat) -> np.ndarray:
    """Per-subject influence values of the generalized estimator at tau_hat.

    They average to zero at the estimator's own point; their scaled sum of
    squares is the plug-in variance used by the sandwich interval.
    """
    delta, r11, r10, r00 = _residual_terms(dataset, models)
    z = dataset.z
    t = r11 / (fp.e_z * fp.e_a) - (r10 + r00) / (1.0 - fp.e_z * fp.e_a)
    h = np.asarray(estimand.h(fp.e_z), dtype=float)
    if not (h > 0).all():
        raise DegenerateDenominator("tilting function vanished on the observed propensities")
    hp = np.asarray(estimand.h_prime(fp.e_z), dtype=float)
    lam = (z - fp.e_z) * hp / h + 1.0
    scale = np.mean(h * lam)
    if abs(scale) < DENOM_TOL / dataset.n:
        raise DegenerateDenominator("sum of h * lambda vanished")
    return h * (lam * (delta - tau_hat) + t) / scale


def true_wate(truth, estimand: EstimandSpec) -> float:
    """Finite-population tilted average of the unit-level effects of a
    simulated draw, using the true trial-membership propensities.

    This is the target subtracted from each replication's point estimate
    when tabulating bias.
    """
    h = np.asarray(estimand.h(truth.e_z_true), dtype=float)
    effects = truth.y11 - truth.y10
    return float(np.sum(h * effects) / np.sum(h))
