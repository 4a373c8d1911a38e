"""Ordinary least squares and logistic regression, the two model families
every estimator in this package is built from.

OLS goes through numpy's SVD-based least squares (an orthogonal
decomposition, never an explicit inverse of X'X). Logistic regression is
iteratively reweighted least squares with step-halving; convergence is
declared when the score vector is below 1e-8 in max-norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch, NoConvergence, RankDeficient, Separation

RANK_RTOL = 1e-10
IRLS_MAX_ITER = 100
IRLS_SCORE_TOL = 1e-8
IRLS_MAX_HALVINGS = 20
COEF_NORM_LIMIT = 1e4
PROB_FLOOR = 1e-10


@dataclass(frozen=True)
class DesignSpec:
    """Which columns enter a regression design.

    covariate_cols are indices into the dataset's x matrix (None = all);
    extra names one or more of "z", "a" to append those indicators.
    """

    intercept: bool = True
    covariate_cols: tuple[int, ...] | None = None
    extra: tuple[str, ...] = ()

    def build(self, dataset, x=None) -> np.ndarray:
        x = dataset.x if x is None else np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        cols = []
        if self.intercept:
            cols.append(np.ones(x.shape[0]))
        idx = range(x.shape[1]) if self.covariate_cols is None else self.covariate_cols
        seen = set()
        for j in idx:
            if not 0 <= j < x.shape[1] or j in seen:
                raise DimensionMismatch(f"bad covariate column {j}")
            seen.add(j)
            cols.append(x[:, j])
        for name in self.extra:
            if dataset is None:
                raise DimensionMismatch("extra columns need the dataset")
            cols.append(getattr(dataset, name).astype(float))
        return np.column_stack(cols)


@dataclass(frozen=True)
class FittedLinear:
    """OLS fit: coefficients (intercept first when present) and residual variance."""

    coefficients: np.ndarray
    residual_variance: float


@dataclass(frozen=True)
class FittedLogistic:
    coefficients: np.ndarray
    converged: bool
    iterations: int


def _check_rank(singular_values, ncols):
    s = np.asarray(singular_values)
    if s.size < ncols or s.min() < RANK_RTOL * s.max():
        raise RankDeficient(float(s.min()) if s.size else 0.0)


def fit_ols(design, y, weights=None) -> FittedLinear:
    """Least squares fit of y on the design, optionally weighted.

    Raises RankDeficient when the (weighted) design's smallest singular
    value falls below 1e-10 times its largest.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"{n} design rows vs {y.shape[0]} responses")
    if n < k:
        raise RankDeficient(0.0)
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        sw = np.sqrt(w)
        Xw, yw = X * sw[:, None], y * sw
    else:
        Xw, yw = X, y
    beta, _, rank, sv = np.linalg.lstsq(Xw, yw, rcond=None)
    _check_rank(sv, k)
    resid = y - X @ beta
    if weights is not None:
        ssr = float(np.sum(w * resid**2))
    else:
        ssr = float(resid @ resid)
    dof = n - k
    return FittedLinear(coefficients=beta, residual_variance=ssr / dof if dof > 0 else 0.0)


def _bernoulli_loglik(y, eta):
    # log p = y*eta - log(1 + exp(eta)), stable via logaddexp
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)))


def fit_logistic(design, y) -> FittedLogistic:
    """Maximum-likelihood logistic regression via IRLS with step-halving.

    Raises Separation for an all-0/all-1 response, persistently degenerate
    fitted probabilities, or diverging coefficients; NoConvergence when the
    score has not dropped below tolerance after 100 iterations.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    if y.shape[0] != n:
        raise DimensionMismatch(f"{n} design rows vs {y.shape[0]} responses")
    if n < k:
        raise RankDeficient(0.0)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("logistic response must be 0/1")
    if y.min() == y.max():
        raise Separation("response is constant")

    beta = np.zeros(k)
    eta = X @ beta
    loglik = _bernoulli_loglik(y, eta)
    degenerate_streak = 0
    for it in range(1, IRLS_MAX_ITER + 1):
        p = expit(eta)
        w = np.clip(p * (1.0 - p), 1e-12, None)
        score = X.T @ (y - p)
        if np.abs(score).max() <= IRLS_SCORE_TOL:
            return FittedLogistic(beta, converged=True, iterations=it - 1)
        # weighted LS on the working response gives the Newton step
        sw = np.sqrt(w)
        zwork = eta + (y - p) / w
        step_beta, _, _, sv = np.linalg.lstsq(X * sw[:, None], zwork * sw, rcond=None)
        _check_rank(sv, k)
        new_beta, new_eta = step_beta, X @ step_beta
        new_loglik = _bernoulli_loglik(y, new_eta)
        halvings = 0
        while new_loglik < loglik and halvings < IRLS_MAX_HALVINGS:
            new_beta = 0.5 * (new_beta + beta)
            new_eta = X @ new_beta
            new_loglik = _bernoulli_loglik(y, new_eta)
            halvings += 1
        beta, eta, loglik = new_beta, new_eta, new_loglik
        if np.linalg.norm(beta) > COEF_NORM_LIMIT:
            raise Separation("coefficient norm diverged")
        p = expit(eta)
        if p.min() < PROB_FLOOR or p.max() > 1.0 - PROB_FLOOR:
            degenerate_streak += 1
            if degenerate_streak >= 3:
                raise Separation("fitted probabilities pinned at 0/1")
        else:
            degenerate_streak = 0
    score = X.T @ (y - expit(eta))
    if np.abs(score).max() <= IRLS_SCORE_TOL:
        return FittedLogistic(beta, converged=True, iterations=IRLS_MAX_ITER)
    raise NoConvergence(IRLS_MAX_ITER)


def predict(fit, design) -> np.ndarray:
    """Linear predictor for an OLS fit, expit of it for a logistic fit."""
    X = np.asarray(design, dtype=float)
    beta = fit.coefficients
    if X.ndim != 2 or X.shape[1] != beta.shape[0]:
        raise DimensionMismatch(
            f"design has {X.shape[1] if X.ndim == 2 else X.ndim} columns, fit expects {beta.shape[0]}"
        )
    eta = X @ beta
    if isinstance(fit, FittedLogistic):
        tiny = np.nextafter(0.0, 1.0)
        return np.clip(expit(eta), tiny, 1.0 - np.finfo(float).epsneg)
    return eta
