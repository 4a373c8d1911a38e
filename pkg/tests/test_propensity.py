import numpy as np
import pytest

from ecaug.data import TrialDataset
from ecaug.errors import OverlapViolation
from ecaug.linmod import DesignSpec, predict
from ecaug.propensity import (
    FittedPropensities,
    KnownConstant,
    estimate_propensities,
    overlap_report,
)
from ecaug.simulation import BETA_Z, SimulationConfig, generate

from conftest import random_dataset


def test_intercept_only_ez_is_trial_fraction(rng):
    n = 200
    z = rng.integers(0, 2, size=n).astype(float)
    a = np.where(z == 1, rng.integers(0, 2, size=n), 0).astype(float)
    ds = TrialDataset(z=z, a=a, x=rng.standard_normal((n, 2)), y=rng.standard_normal(n))
    fp = estimate_propensities(ds, z_design=DesignSpec(covariate_cols=()))
    np.testing.assert_allclose(fp.e_z, z.mean(), atol=1e-8)


def test_known_constant_allocation(rng):
    ds = random_dataset(rng, n=60)
    fp = estimate_propensities(ds, a_design=KnownConstant(0.5))
    np.testing.assert_array_equal(fp.e_a, 0.5)
    assert fp.a_model is None


def test_mean_ez_equals_trial_share(rng):
    # the logistic score equation ties the mean fitted value to the share
    ds = random_dataset(rng, n=150)
    fp = estimate_propensities(ds)
    assert abs(fp.e_z.mean() - ds.z.mean()) <= 1e-8


def test_ea_reproduces_in_sample_fit(rng):
    ds = random_dataset(rng, n=120)
    fp = estimate_propensities(ds)
    trial = ds.mask(z=1)
    in_sample = predict(fp.a_model, DesignSpec().build(ds.subset(trial)))
    np.testing.assert_array_equal(fp.e_a[trial], in_sample)


def test_simulation_recovers_beta_z():
    # MC standard errors from 500 refits to calibrate the check
    coefs = []
    for r in range(500):
        truth = generate(SimulationConfig(scenario="S1", b=0.0, m=1, seed=11), r)
        fp = estimate_propensities(truth.dataset)
        coefs.append(fp.z_model.coefficients[1:])
    coefs = np.asarray(coefs)
    se = coefs.std(axis=0, ddof=1)
    assert np.all(np.abs(coefs[0] - np.asarray(BETA_Z)) <= 3 * se)
    # and on average the fits center on the truth
    assert np.all(np.abs(coefs.mean(axis=0) - np.asarray(BETA_Z)) <= 5 * se / np.sqrt(500))


def test_overlap_report_constant_half():
    fp = FittedPropensities(
        e_z=np.full(10, 0.5), e_a=np.full(10, 0.5), z_model=None, a_model=None
    )
    rep = overlap_report(fp)
    assert rep["e_z_times_e_a"]["min"] == pytest.approx(0.25)
    assert rep["e_z_times_e_a"]["max"] == pytest.approx(0.25)
    assert rep["flagged_rows"] == []


def test_overlap_report_flags_threshold_case():
    e_z = np.array([0.5, 1.0 - 1e-7])
    e_a = np.array([0.5, 1.0 - 1e-8])
    fp = FittedPropensities(e_z=e_z, e_a=e_a, z_model=None, a_model=None)
    rep = overlap_report(fp)
    assert rep["flagged_rows"] == [1]


def test_simulation_draw_product_bounded():
    truth = generate(SimulationConfig(scenario="S1", b=0.0, m=1, seed=5), 0)
    fp = estimate_propensities(truth.dataset)
    assert (fp.e_z * fp.e_a).max() < 0.95


def test_overlap_violation_raised_and_clamp():
    # one mild outlier pushes a fitted probability past 1 - 1e-6 without
    # separating the fit (linear predictor stays below the IRLS pin range)
    rng = np.random.default_rng(77)
    n = 400
    x = rng.standard_normal(n)
    from scipy.special import expit

    z = rng.binomial(1, expit(2.0 * x)).astype(float)
    x[-1], z[-1] = 9.0, 1.0
    a = np.where(z == 1, rng.integers(0, 2, size=n), 0).astype(float)
    ds = TrialDataset(z=z, a=a, x=x[:, None], y=rng.standard_normal(n))
    with pytest.raises(OverlapViolation):
        estimate_propensities(ds)
    fp = estimate_propensities(ds, clamp=True)
    assert fp.e_z.max() <= 1.0 - 1e-6 and fp.e_z.min() >= 1e-6


def test_trial_only_dataset_gets_unit_ez(rng):
    ds = random_dataset(rng, n=50)
    trial = ds.subset(ds.mask(z=1))
    fp = estimate_propensities(trial)
    np.testing.assert_array_equal(fp.e_z, 1.0)
    assert fp.z_model is None
