"""Systematic outcome difference b(x) between concurrent and external
controls: b(x) = E[Y | Z=1, A=0, X=x] - E[Y | Z=0, A=0, X=x].

b is identified from the control rows alone. The Constant and LinearInX
forms are estimated by a two-step partial regression in the
Frisch-Waugh-Lovell style: partial the covariates out of both Y and Z on
the control subsample, then regress residual on residual. With linear
stage-1 fits on a common design this reproduces, exactly, the Z
coefficient(s) of the single joint regression of Y on the design and Z.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linmod
from .data import TrialDataset
from .errors import DegenerateResiduals, EmptyCell
from .linmod import DesignSpec


class BiasKind(enum.Enum):
    MEAN_EXCHANGEABILITY = "me"
    CONSTANT = "constant"
    LINEAR_IN_X = "linear"
    FLEXIBLE = "flexible"


@dataclass(frozen=True)
class BiasSpec:
    """Functional form assumed for b(x).

    linear_cols selects which covariates enter the LinearInX form
    (None = all of them); ignored for the other kinds.
    """

    kind: BiasKind
    linear_cols: tuple[int, ...] | None = None

    @classmethod
    def mean_exchangeability(cls):
        return cls(BiasKind.MEAN_EXCHANGEABILITY)

    @classmethod
    def constant(cls):
        return cls(BiasKind.CONSTANT)

    @classmethod
    def linear_in_x(cls, cols=None):
        return cls(BiasKind.LINEAR_IN_X, None if cols is None else tuple(cols))

    @classmethod
    def flexible(cls):
        return cls(BiasKind.FLEXIBLE)


@dataclass(frozen=True)
class FittedBias:
    """Estimated b with its parameters (theta is empty for the ME and
    Flexible kinds; Flexible carries the two cell fits instead)."""

    spec: BiasSpec
    theta: np.ndarray
    evaluate: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return self.evaluate(x)


def _linear_cols(spec: BiasSpec, p: int) -> tuple[int, ...]:
    cols = spec.linear_cols if spec.linear_cols is not None else tuple(range(p))
    if any(not 0 <= j < p for j in cols) or len(set(cols)) != len(cols):
        raise ValueError(f"linear_cols out of bounds or duplicated: {cols}")
    return cols


def fwl_estimate(
    dataset: TrialDataset,
    spec: BiasSpec,
    stage1_design: DesignSpec = DesignSpec(),
    z_stage1: str = "logistic",
) -> FittedBias:
    """Two-step partial-regression estimate of theta for the Constant or
    LinearInX bias forms.

    Step 1, on control rows only: fit E[Y | X, A=0] by OLS and
    E[Z | X, A=0] by logistic regression (or OLS when z_stage1="linear")
    on stage1_design, keeping the residual u = y - yhat and the partialled
    trial-membership columns: z - zhat, and for LinearInX each interaction
    z * x_j minus its own stage-1 fit (x_j * zhat for the conditional-mean
    fit, the OLS projection of z * x_j for the linear fit, which is what
    makes the joint-regression identity exact).
    Step 2: OLS of u on the partialled columns, no intercept; those
    coefficients are theta.

    Raises DegenerateResiduals when trial membership carries no variation
    beyond the covariates on the control subsample (sum of squared
    partialled z below 1e-12, including a constant z).
    """
    if spec.kind not in (BiasKind.CONSTANT, BiasKind.LINEAR_IN_X):
        raise ValueError("fwl_estimate only fits the Constant and LinearInX forms")
    if z_stage1 not in ("logistic", "linear"):
        raise ValueError("z_stage1 must be 'logistic' or 'linear'")
    controls = dataset.subset(dataset.mask(a=0))
    if controls.n and controls.z.min() == controls.z.max():
        raise DegenerateResiduals("trial membership is constant on the controls")
    if int((controls.z == 1).sum()) < 2 or int((controls.z == 0).sum()) < 2:
        raise EmptyCell(1 if (controls.z == 1).sum() < 2 else 0, 0)

    X1 = stage1_design.build(controls)
    y_fit = linmod.fit_ols(X1, controls.y)
    u = controls.y - linmod.predict(y_fit, X1)
    if z_stage1 == "logistic":
        z_fit = linmod.fit_logistic(X1, controls.z)
    else:
        z_fit = linmod.fit_ols(X1, controls.z)
    zhat = linmod.predict(z_fit, X1)
    v = controls.z - zhat
    if float(v @ v) < 1e-12:
        raise DegenerateResiduals("no residual variation in trial membership")

    if spec.kind is BiasKind.CONSTANT:
        stage2 = v[:, None]
        cols = ()
    else:
        cols = _linear_cols(spec, dataset.p)
        partials = [v]
        for j in cols:
            target = controls.z * controls.x[:, j]
            if z_stage1 == "logistic":
                partials.append(target - zhat * controls.x[:, j])
            else:
                proj = linmod.fit_ols(X1, target)
                partials.append(target - linmod.predict(proj, X1))
        stage2 = np.column_stack(partials)
    theta = linmod.fit_ols(stage2, u).coefficients

    def evaluate(x, theta=theta, cols=cols):
        b = np.full(x.shape[0], theta[0])
        for k, j in enumerate(cols, start=1):
            b += theta[k] * x[:, j]
        return b

    return FittedBias(spec=spec, theta=theta, evaluate=evaluate)


def fit_bias(
    dataset: TrialDataset,
    spec: BiasSpec,
    outcome_design: DesignSpec = DesignSpec(),
    z_stage1: str = "logistic",
) -> FittedBias:
    """Fit b(x) under the requested form.

    MeanExchangeability returns b identically 0. Constant and LinearInX
    delegate to fwl_estimate with outcome_design as the stage-1 design.
    Flexible fits E[Y | X] by OLS separately on the (1,0) and (0,0) cells
    and returns the difference of the two predictions.
    """
    if spec.kind is BiasKind.MEAN_EXCHANGEABILITY:
        return FittedBias(
            spec=spec, theta=np.empty(0), evaluate=lambda x: np.zeros(x.shape[0])
        )
    if spec.kind in (BiasKind.CONSTANT, BiasKind.LINEAR_IN_X):
        return fwl_estimate(dataset, spec, outcome_design, z_stage1)

    m10, m00 = dataset.mask(1, 0), dataset.mask(0, 0)
    if not m10.any():
        raise EmptyCell(1, 0)
    if not m00.any():
        raise EmptyCell(0, 0)
    fit10 = linmod.fit_ols(outcome_design.build(dataset.subset(m10)), dataset.y[m10])
    fit00 = linmod.fit_ols(outcome_design.build(dataset.subset(m00)), dataset.y[m00])

    def evaluate(x, design=outcome_design, f10=fit10, f00=fit00):
        X = design.build(None, x=x)
        return linmod.predict(f10, X) - linmod.predict(f00, X)

    return FittedBias(spec=spec, theta=np.empty(0), evaluate=evaluate)


def pseudo_outcomes(dataset: TrialDataset, fitted: FittedBias) -> np.ndarray:
    """Control outcomes expressed on the concurrent scale.

    For each control row, ytilde = y when z = 1 and y + b(x) when z = 0, so
    E[ytilde | X] is the concurrent-control mean function for both groups.
    Returned in the order of the control rows (a == 0).
    """
    controls = dataset.mask(a=0)
    y = dataset.y[controls]
    z = dataset.z[controls]
    shift = fitted.evaluate(dataset.x[controls])
    return y + (1.0 - z) * shift
