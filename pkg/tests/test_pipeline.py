import numpy as np
import pytest

from ecaug.bias import BiasSpec
from ecaug.datasets import demo_trial_path
from ecaug.data import read_csv
from ecaug.estimators import EstimandSpec
from ecaug.pipeline import AnalysisConfig, analyze, point_estimate

from conftest import random_dataset


def test_analyze_demo_dataset_end_to_end():
    ds = read_csv(demo_trial_path())
    config = AnalysisConfig(
        estimand=EstimandSpec.att(), bias_spec=BiasSpec.constant()
    )
    result = analyze(ds, config, boot_reps=120, seed=4)
    assert result.counts.total == 600
    assert result.theta.size == 1
    assert np.isfinite(result.point)
    assert result.sandwich.ci_low < result.point < result.sandwich.ci_high
    assert result.bootstrap.replicates_used == 120
    assert result.bootstrap.ci_low < result.bootstrap.ci_high


def test_analyze_deterministic_bootstrap():
    ds = read_csv(demo_trial_path())
    config = AnalysisConfig(bias_spec=BiasSpec.flexible())
    r1 = analyze(ds, config, boot_reps=120, seed=11)
    r2 = analyze(ds, config, boot_reps=120, seed=11)
    assert r1.bootstrap == r2.bootstrap


def test_point_estimate_matches_analyze(rng):
    ds = random_dataset(rng, n=120, min_cell=10)
    config = AnalysisConfig(bias_spec=BiasSpec.constant(), estimand=EstimandSpec.ato())
    assert point_estimate(ds, config) == pytest.approx(analyze(ds, config).point)


def test_trial_only_me_equals_dr():
    # with no external rows the augmented ME path reduces to the in-trial
    # doubly robust estimator
    from ecaug.estimators import estimate_dr
    from ecaug.outcomes import fit_outcome_models
    from ecaug.propensity import estimate_propensities

    rng = np.random.default_rng(8)
    ds = random_dataset(rng, n=100, min_cell=10)
    trial = ds.subset(ds.mask(z=1))
    result = analyze(trial, AnalysisConfig(bias_spec=BiasSpec.mean_exchangeability()))
    fp = estimate_propensities(trial)
    me = fit_outcome_models(trial, BiasSpec.mean_exchangeability())
    assert result.point == pytest.approx(estimate_dr(trial, fp, me).point, abs=1e-10)
