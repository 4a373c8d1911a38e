"""Conditional-mean evaluators mu11, mu10, mu00 for the three observed
(z, a) cells, under a chosen form for the control-group difference b(x).

For the ME / Constant / LinearInX forms, mu10 is fit by OLS on
pseudo-outcomes over all control rows (both groups contribute) and
mu00 = mu10 - b by construction. The Flexible form fits the two control
cells separately. mu11 only ever sees the (1,1) rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linmod
from .bias import BiasKind, BiasSpec, FittedBias, fit_bias, pseudo_outcomes
from .data import TrialDataset, require_cells
from .linmod import DesignSpec


@dataclass(frozen=True)
class OutcomeModels:
    """The three cell-mean evaluators plus the fitted bias they embed.

    family is "linear" except for binary outcomes, where mu11 (and the
    Flexible cell fits) use logistic regression; the pseudo-outcome path
    stays on the linear-probability scale so mu00 = mu10 - b is exact.
    """

    mu11: Callable[[np.ndarray], np.ndarray]
    mu10: Callable[[np.ndarray], np.ndarray]
    mu00: Callable[[np.ndarray], np.ndarray]
    bias: FittedBias
    family: str

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return self.mu11(x), self.mu10(x), self.mu00(x)


def _cell_fit(dataset, mask, design, family):
    sub = dataset.subset(mask)
    X = design.build(sub)
    if family == "logistic":
        fit = linmod.fit_logistic(X, sub.y)
    else:
        fit = linmod.fit_ols(X, sub.y)
    return fit


def _predictor(fit, design):
    def fn(x, fit=fit, design=design):
        return linmod.predict(fit, design.build(None, x=x))

    return fn


def fit_outcome_models(
    dataset: TrialDataset,
    spec: BiasSpec,
    design: DesignSpec = DesignSpec(),
    z_stage1: str = "logistic",
) -> OutcomeModels:
    """Fit mu11, mu10, mu00 under the given bias form.

    The default design (intercept plus main effects of every covariate) is
    shared by all three fits; pass a different design to study
    misspecification. z_stage1 selects the stage-1 trial-membership model
    for the FWL step ("logistic" or "linear").
    """
    require_cells(dataset, (1, 1))
    family = "logistic" if dataset.outcome_kind == "binary" else "linear"
    fit11 = _cell_fit(dataset, dataset.mask(1, 1), design, family)
    mu11 = _predictor(fit11, design)

    if spec.kind is BiasKind.FLEXIBLE:
        require_cells(dataset, (1, 0), (0, 0))
        fit10 = _cell_fit(dataset, dataset.mask(1, 0), design, family)
        fit00 = _cell_fit(dataset, dataset.mask(0, 0), design, family)
        mu10 = _predictor(fit10, design)
        mu00 = _predictor(fit00, design)
        fitted_bias = FittedBias(
            spec=spec,
            theta=np.empty(0),
            evaluate=lambda x: mu10(x) - mu00(x),
        )
        return OutcomeModels(mu11=mu11, mu10=mu10, mu00=mu00, bias=fitted_bias, family=family)

    fitted_bias = fit_bias(dataset, spec, design, z_stage1)
    controls = dataset.mask(a=0)
    if not controls.any():
        require_cells(dataset, (1, 0))
    ytilde = pseudo_outcomes(dataset, fitted_bias)
    fit10 = linmod.fit_ols(design.build(dataset.subset(controls)), ytilde)
    mu10 = _predictor(fit10, design)

    def mu00(x, mu10=mu10, b=fitted_bias):
        return mu10(x) - b.evaluate(x)

    return OutcomeModels(mu11=mu11, mu10=mu10, mu00=mu00, bias=fitted_bias, family=family)
