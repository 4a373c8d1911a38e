import numpy as np
import pytest

from ecaug.errors import BracketFailure
from ecaug.estimators import EstimandSpec, true_wate
from ecaug.simulation import (
    BETA_Z,
    SimulationConfig,
    draw_covariates,
    generate,
    run_study,
    run_table,
    solve_alpha_z,
)


def test_composite_consistency_exact():
    for scenario in ("S1", "S2", "S2_lowNoise", "S3", "S4", "S4_constB"):
        truth = generate(SimulationConfig(scenario=scenario, b=0.2, m=5, seed=8), 3)
        d = truth.dataset
        assembled = truth.y11 * d.z * d.a + truth.y10 * d.z * (1 - d.a) + truth.y00 * (1 - d.z)
        np.testing.assert_array_equal(d.y, assembled)


def test_generate_is_deterministic_in_rep_and_seed():
    cfg = SimulationConfig(scenario="S2", b=0.4, m=2, seed=99)
    a1 = generate(cfg, 7)
    a2 = generate(cfg, 7)
    np.testing.assert_array_equal(a1.dataset.y, a2.dataset.y)
    b = generate(cfg, 8)
    assert not np.array_equal(a1.dataset.y, b.dataset.y)


def test_s1_b_zero_means_equal_control_laws():
    truth = generate(SimulationConfig(scenario="S1", b=0.0, m=1, seed=4), 0)
    np.testing.assert_array_equal(truth.y10, truth.y00)
    np.testing.assert_array_equal(truth.b_true(truth.dataset.x), 0.0)


def test_s2_b_true_form():
    truth = generate(SimulationConfig(scenario="S2", b=0.3, m=1, seed=4), 1)
    x = truth.dataset.x
    expected = 0.3 * (1 + x[:, 0] - 2 * x[:, 1] + x[:, 2] + 1.5 * x[:, 3])
    np.testing.assert_allclose(truth.b_true(x), expected, atol=1e-12)
    np.testing.assert_allclose(truth.y10 - truth.y00, expected, atol=1e-12)


def test_s3_b_true_form():
    truth = generate(SimulationConfig(scenario="S3", b=0.25, m=1, seed=4), 1)
    x = truth.dataset.x
    expected = 0.25 * (
        1 + x[:, 0] - 2 * x[:, 1] + x[:, 2] + 1.5 * x[:, 3] - (x[:, 1] ** 2 - 1)
    )
    np.testing.assert_allclose(truth.b_true(x), expected, atol=1e-12)


def test_s4_const_b_is_flat():
    truth = generate(SimulationConfig(scenario="S4_constB", b=0.4, m=1, seed=4), 0)
    np.testing.assert_allclose(truth.b_true(truth.dataset.x), 0.4, atol=1e-12)


def test_covariates_match_stated_laws():
    x = draw_covariates(np.random.default_rng(0), 200_000)
    assert set(np.unique(x[:, 0])) == {-1.0, 1.0}
    assert abs(x[:, 0].mean()) < 0.01
    for j in (1, 2, 3):
        assert abs(x[:, j].mean()) < 0.01
        assert abs(x[:, j].std() - 1.0) < 0.01


def test_alpha_symmetric_law_is_zero():
    assert abs(solve_alpha_z()) <= 0.01


def test_alpha_closed_form_when_beta_zero():
    for q in (0.3, 0.5, 0.7):
        a = solve_alpha_z(beta_z=(0.0, 0.0, 0.0, 0.0), target_fraction=q)
        assert a == pytest.approx(np.log(q / (1 - q)), abs=5e-3)


def test_alpha_hits_target_independent_mc():
    from scipy.special import expit

    alpha = solve_alpha_z(target_fraction=0.4)
    rng = np.random.default_rng(777777)  # different draw than the solver's
    x = draw_covariates(rng, 1_000_000)
    achieved = float(np.mean(expit(alpha + x @ np.asarray(BETA_Z))))
    assert abs(achieved - 0.4) <= 2e-3


def test_alpha_bracket_failure():
    with pytest.raises(BracketFailure):
        solve_alpha_z(target_fraction=1e-9)


def test_run_study_deterministic_and_parallel_identical():
    cfg = SimulationConfig(scenario="S1", b=0.2, m=1, reps=24, seed=5)
    serial = run_study(cfg, n_jobs=1).to_csv()
    again = run_study(cfg, n_jobs=1).to_csv()
    parallel = run_study(cfg, n_jobs=2).to_csv()
    assert serial == again == parallel


def test_run_study_rows_and_truth_targets():
    cfg = SimulationConfig(scenario="S4", b=0.2, m=2, reps=12, seed=6)
    table = run_study(cfg)
    keys = {(r.estimator, r.estimand) for r in table.rows}
    assert keys == {
        (e, d) for e in ("aug-ME", "aug-const", "aug-flex") for d in ("ATE", "ATC", "ATO")
    }
    assert all(r.reps == 12 for r in table.rows)


def test_md_sd_grows_with_fewer_controls():
    # strictly increasing dispersion across m in the homogeneous design
    sds = []
    for m in (1, 2, 5, 10, 20):
        cfg = SimulationConfig(
            scenario="S1", b=0.0, m=m, reps=400, seed=13, estimators=("MD",)
        )
        sds.append(run_study(cfg).lookup("MD").sd_raw)
    assert all(s2 > s1 for s1, s2 in zip(sds, sds[1:]))


def test_s1_and_s4const_zero_b_unbiased():
    cfg1 = SimulationConfig(
        scenario="S1", b=0.0, m=1, reps=400, seed=21, estimators=("MD", "aug-ME", "aug-const")
    )
    t1 = run_study(cfg1)
    for row in t1.rows:
        assert abs(row.bias_raw) < 0.02
    cfg2 = SimulationConfig(scenario="S4_constB", b=0.0, m=1, reps=300, seed=22)
    t2 = run_study(cfg2)
    for row in t2.rows:
        assert abs(row.bias_raw) < 0.03


def test_ancova_const_s2_spot_cell():
    # reference value 0 (13) at b=0.4, 1:5 in the heterogeneous design
    cfg = SimulationConfig(
        scenario="S2", b=0.4, m=5, reps=400, seed=23, estimators=("ANCOVA-const",)
    )
    row = run_study(cfg).lookup("ANCOVA-const")
    assert abs(row.bias_raw * 100 - 0) <= 3
    assert abs(row.sd_raw * 100 - 13) <= 3


def test_result_table_csv_and_text():
    cfg = SimulationConfig(scenario="S1", b=0.0, m=1, reps=10, seed=1, estimators=("MD",))
    table = run_study(cfg)
    csv_text = table.to_csv()
    header = csv_text.splitlines()[0]
    assert header == "scenario,b,m,estimator,estimand,bias_x100,sd_x100,bias_raw,sd_raw,reps"
    rendered = table.render_text()
    assert "MD" in rendered and "1:1" in rendered


def test_run_table_covers_grid():
    table = run_table("1", reps=2, seed=3)
    assert len(table.rows) == 3 * 5 * 9  # b grid x m grid x estimators
    bs = {r.b for r in table.rows}
    assert bs == {0.0, 0.2, 0.4}


def test_true_wate_matches_scenario_effects():
    truth = generate(SimulationConfig(scenario="S4_constB", b=0.4, m=1, seed=2), 0)
    x = truth.dataset.x
    delta = 0.4 + x @ np.array([-0.2, -0.7, 0.4, -0.4])
    np.testing.assert_allclose(truth.y11 - truth.y10, delta, atol=1e-12)
    expected_ate = delta.mean()
    assert true_wate(truth, EstimandSpec.ate()) == pytest.approx(expected_ate, abs=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(scenario="S9", b=0.0, m=1)
    with pytest.raises(ValueError):
        SimulationConfig(scenario="S1", b=0.0, m=0)
