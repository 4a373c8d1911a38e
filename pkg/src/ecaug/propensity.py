"""The two propensity scores of a hybrid trial: e_z(x) = P(Z=1 | X=x) over
the combined sample and e_a(x) = P(A=1 | X=x, Z=1) within the concurrent
trial, plus overlap diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linmod
from .data import TrialDataset
from .errors import EmptyCell, OverlapViolation
from .linmod import DesignSpec, FittedLogistic

OVERLAP_EPS = 1e-6


@dataclass(frozen=True)
class KnownConstant:
    """Design-known treatment allocation probability, e.g. 0.5 in a 1:1 trial."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError("known allocation must be in (0, 1)")


@dataclass(frozen=True)
class FittedPropensities:
    """Per-subject e_z and e_a evaluated at every row, with the fitted models.

    z_model is None when the dataset has no external rows (e_z is then
    identically 1); a_model is None when e_a was declared known.
    """

    e_z: np.ndarray
    e_a: np.ndarray
    z_model: FittedLogistic | None
    a_model: FittedLogistic | None


def _check_open_unit(values, clamp):
    v = np.asarray(values, dtype=float)
    if clamp:
        return np.clip(v, OVERLAP_EPS, 1.0 - OVERLAP_EPS)
    bad = (v < OVERLAP_EPS) | (v > 1.0 - OVERLAP_EPS)
    if bad.any():
        i = int(np.argmax(bad))
        raise OverlapViolation(i, float(v[i]))
    return v


def estimate_propensities(
    dataset: TrialDataset,
    z_design: DesignSpec = DesignSpec(),
    a_design: DesignSpec | KnownConstant = DesignSpec(),
    clamp: bool = False,
) -> FittedPropensities:
    """Fit both propensity scores and evaluate them at every subject.

    e_z is a logistic regression of z on z_design over all rows; e_a is a
    logistic regression of a on a_design over the z = 1 rows only, then
    evaluated everywhere, or the constant q when a_design is
    KnownConstant(q). A fitted probability outside [1e-6, 1 - 1e-6] raises
    OverlapViolation unless clamp=True, which clips into that interval
    (clamping changes the estimand; it is never the default).

    A dataset with no external rows gets e_z identically 1: trial-only
    analyses reduce exactly to their within-trial forms.
    """
    trial = dataset.mask(z=1)
    if not trial.any():
        raise EmptyCell(1, "any")
    if trial.all():
        e_z = np.ones(dataset.n)
        z_model = None
    else:
        Xz = z_design.build(dataset)
        z_model = linmod.fit_logistic(Xz, dataset.z)
        e_z = _check_open_unit(linmod.predict(z_model, Xz), clamp)

    if isinstance(a_design, KnownConstant):
        e_a = np.full(dataset.n, a_design.q)
        a_model = None
    else:
        if not (trial & (dataset.a == 1)).any():
            raise EmptyCell(1, 1)
        if not (trial & (dataset.a == 0)).any():
            raise EmptyCell(1, 0)
        Xa = a_design.build(dataset)
        a_model = linmod.fit_logistic(Xa[trial], dataset.a[trial])
        e_a = _check_open_unit(linmod.predict(a_model, Xa), clamp)

    return FittedPropensities(e_z=e_z, e_a=e_a, z_model=z_model, a_model=a_model)


def overlap_report(fp: FittedPropensities) -> dict:
    """Descriptive summary of e_z, e_a and their product.

    The product e_z * e_a is every augmented estimator's denominator term;
    subjects with product above 1 - 1e-6 are flagged.
    """
    qs = (0.0, 0.05, 0.25, 0.5, 0.75, 0.95, 1.0)

    def summarize(v):
        quants = np.quantile(v, qs)
        return {
            "min": float(quants[0]),
            "max": float(quants[-1]),
            "quantiles": {q: float(val) for q, val in zip(qs, quants)},
        }

    product = fp.e_z * fp.e_a
    flagged = np.flatnonzero(product > 1.0 - OVERLAP_EPS)
    return {
        "e_z": summarize(fp.e_z),
        "e_a": summarize(fp.e_a),
        "e_z_times_e_a": summarize(product),
        "flagged_rows": [int(i) for i in flagged],
    }
