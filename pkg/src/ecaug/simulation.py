"""Monte Carlo study harness: the four benchmark data-generating designs
(plus their low-noise and constant-difference variants), replication
drivers, and bias/SD tables.

Design shared by all scenarios: four covariates (one symmetric binary,
three standard normal), trial membership logistic in the covariates with
slope (-0.35, 0.3, 1.2, 0.5) and intercept solved so the external and
concurrent halves are equal in expectation, and a 1:m control-to-treatment
split inside the trial, so P(A=1 | Z=1) = m/(1+m). The three potential
outcomes of a unit share one noise draw; their means differ by cell.

Determinism: replicate r of a study seeded with s uses a generator built
from the pair (s, r) (numpy PCG64 via SeedSequence), so tables are
bit-identical across runs and across any degree of parallelism.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed
from scipy.special import expit

from .bias import BiasSpec
from .data import TrialDataset
from .errors import BracketFailure, EcaugError, TooManyFailures
from .estimators import (
    BUILTIN_ESTIMANDS,
    EstimandSpec,
    estimate_ancova,
    estimate_dr,
    estimate_md,
    estimate_mdp,
    estimate_ps,
    estimate_wate,
    true_wate,
)
from .outcomes import fit_outcome_models
from .propensity import estimate_propensities

BETA_Z = (-0.35, 0.3, 1.2, 0.5)

ATT_ESTIMATORS = (
    "MD",
    "MDP",
    "PS",
    "DR",
    "ANCOVA-ME",
    "ANCOVA-const",
    "aug-ME",
    "aug-const",
    "aug-flex",
)
WATE_ESTIMATORS = ("aug-ME", "aug-const", "aug-flex")

_BIAS_SPECS = {
    "aug-ME": BiasSpec.mean_exchangeability(),
    "aug-const": BiasSpec.constant(),
    "aug-flex": BiasSpec.flexible(),
}


@dataclass(frozen=True)
class _CellMeans:
    """Per-cell outcome mean: alpha + x'beta + quad * (x2^2 - 1)."""

    alpha: float
    beta: tuple[float, float, float, float]
    quad: float = 0.0

    def __call__(self, x):
        v = self.alpha + x @ np.asarray(self.beta)
        if self.quad:
            v = v + self.quad * (x[:, 1] ** 2 - 1.0)
        return v


def _cells_s1(b):
    beta_y = (-0.4, 0.3, -0.7, -0.4)
    return {
        "00": _CellMeans(0.3, beta_y),
        "10": _CellMeans(0.3 + b, beta_y),
        "11": _CellMeans(0.7 + b, beta_y),
    }


def _cells_s2(b):
    return {
        "00": _CellMeans(0.3 - b, (-0.4 - b, 0.4 + 2 * b, -0.7 - b, -0.4 - 1.5 * b)),
        "10": _CellMeans(0.3, (-0.4, 0.4, -0.7, -0.4)),
        "11": _CellMeans(0.7, (-0.8, 0.1, -0.5, -1.1)),
    }


def _cells_s3(b):
    base = _cells_s2(b)
    return {
        "00": replace(base["00"], quad=0.9 + b),
        "10": replace(base["10"], quad=0.9),
        "11": replace(base["11"], quad=0.6),
    }


def _cells_s4_const(b):
    shared = (-0.6, 0.8, -0.9, -0.7)
    return {
        "00": _CellMeans(0.3 - b, shared),
        "10": _CellMeans(0.3, shared),
        "11": _CellMeans(0.7, (-0.8, 0.1, -0.5, -1.1)),
    }


@dataclass(frozen=True)
class _ScenarioDef:
    cells: callable
    sigma: float
    estimators: tuple[str, ...]
    estimands: tuple[str, ...]


SCENARIOS = {
    "S1": _ScenarioDef(_cells_s1, 1.0, ATT_ESTIMATORS, ("ATT",)),
    "S2": _ScenarioDef(_cells_s2, 1.0, ATT_ESTIMATORS, ("ATT",)),
    "S2_lowNoise": _ScenarioDef(_cells_s2, 0.2, ATT_ESTIMATORS, ("ATT",)),
    "S3": _ScenarioDef(_cells_s3, 1.0, ATT_ESTIMATORS, ("ATT",)),
    "S4": _ScenarioDef(_cells_s2, 1.0, WATE_ESTIMATORS, ("ATE", "ATC", "ATO")),
    "S4_constB": _ScenarioDef(_cells_s4_const, 1.0, WATE_ESTIMATORS, ("ATE", "ATC", "ATO")),
}


@dataclass(frozen=True)
class SimulationConfig:
    scenario: str
    b: float = 0.0
    m: int = 1
    n: int = 1000
    sigma: float | None = None
    reps: int = 1000
    seed: int = 0
    estimands: tuple[str, ...] | None = None
    estimators: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.m < 1:
            raise ValueError("treatment:control ratio m must be a positive integer")
        if self.n < 10:
            raise ValueError("n too small")
        if self.reps < 1:
            raise ValueError("reps must be positive")

    @property
    def noise_sd(self) -> float:
        return SCENARIOS[self.scenario].sigma if self.sigma is None else self.sigma

    @property
    def estimand_names(self) -> tuple[str, ...]:
        return self.estimands or SCENARIOS[self.scenario].estimands

    @property
    def estimator_names(self) -> tuple[str, ...]:
        return self.estimators or SCENARIOS[self.scenario].estimators


@dataclass(frozen=True)
class SimulatedTruth:
    """A generated dataset plus everything unobservable about it: the three
    potential outcomes, the true membership propensities, and the true
    control-difference function."""

    dataset: TrialDataset
    y00: np.ndarray
    y10: np.ndarray
    y11: np.ndarray
    e_z_true: np.ndarray
    b_true: callable


def draw_covariates(rng: np.random.Generator, n: int) -> np.ndarray:
    """x1 uniform on {-1, +1}; x2, x3, x4 iid standard normal."""
    x1 = rng.integers(0, 2, size=n) * 2.0 - 1.0
    rest = rng.standard_normal((n, 3))
    return np.column_stack([x1, rest])


_ALPHA_CACHE: dict = {}


def solve_alpha_z(
    beta_z=BETA_Z,
    covariate_law=draw_covariates,
    target_fraction: float = 0.5,
    mc_draws: int = 1_000_000,
    mc_seed: int = 20_240_601,
    tol: float = 1e-4,
) -> float:
    """Intercept alpha making E[expit(alpha + x'beta_z)] hit the target
    trial fraction, by bisection on a fixed Monte Carlo draw.

    The expectation is estimated once on a seeded sample of mc_draws
    covariate vectors and the root bracketed on [-10, 10]; the result is
    cached per (beta_z, target) for the built-in covariate law.
    """
    if not 0.0 < target_fraction < 1.0:
        raise ValueError("target fraction must be in (0, 1)")
    cache_key = None
    if covariate_law is draw_covariates:
        cache_key = (tuple(beta_z), target_fraction, mc_draws, mc_seed)
        if cache_key in _ALPHA_CACHE:
            return _ALPHA_CACHE[cache_key]
    rng = np.random.default_rng(mc_seed)
    x = covariate_law(rng, mc_draws)
    index = x @ np.asarray(beta_z, dtype=float)

    def achieved(alpha):
        return float(np.mean(expit(alpha + index)))

    lo, hi = -10.0, 10.0
    f_lo, f_hi = achieved(lo) - target_fraction, achieved(hi) - target_fraction
    if f_lo > 0 or f_hi < 0:
        raise BracketFailure(f"target {target_fraction} not bracketed on [-10, 10]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = achieved(mid) - target_fraction
        if abs(f_mid) <= tol:
            break
        if f_mid > 0:
            hi = mid
        else:
            lo = mid
    else:
        mid = 0.5 * (lo + hi)
    if cache_key is not None:
        _ALPHA_CACHE[cache_key] = mid
    return mid


def generate(config: SimulationConfig, rep_index: int) -> SimulatedTruth:
    """Draw one replicate. The generator for replicate r is seeded by the
    pair (config.seed, r), independent of execution order."""
    rng = np.random.default_rng((int(config.seed), int(rep_index)))
    n = config.n
    x = draw_covariates(rng, n)
    alpha_z = solve_alpha_z()
    e_z = expit(alpha_z + x @ np.asarray(BETA_Z))
    z = rng.binomial(1, e_z).astype(float)
    p_treat = config.m / (1.0 + config.m)
    a = np.where(z == 1.0, rng.binomial(1, p_treat, size=n).astype(float), 0.0)

    cells = SCENARIOS[config.scenario].cells(config.b)
    eps = config.noise_sd * rng.standard_normal(n)
    y00 = cells["00"](x) + eps
    y10 = cells["10"](x) + eps
    y11 = cells["11"](x) + eps
    y = y11 * z * a + y10 * z * (1.0 - a) + y00 * (1.0 - z)

    def b_true(xq, c10=cells["10"], c00=cells["00"]):
        xq = np.asarray(xq, dtype=float)
        if xq.ndim == 1:
            xq = xq[:, None]
        return c10(xq) - c00(xq)

    dataset = TrialDataset(z=z, a=a, x=x, y=y, outcome_kind="continuous")
    return SimulatedTruth(
        dataset=dataset, y00=y00, y10=y10, y11=y11, e_z_true=e_z, b_true=b_true
    )


def fit_estimators(dataset: TrialDataset, estimators, estimands) -> dict:
    """Every requested estimator on one dataset, sharing nuisance fits.

    Returns {(estimator, estimand): point}. The augmented variants follow
    the reference configuration: logistic propensities with main effects,
    outcome regressions with main effects, and the constant-difference
    variant estimated by adding the trial indicator to the pooled control
    regression (the linear-partialling route).
    """
    out = {}
    fp = estimate_propensities(dataset)
    need_aug = [e for e in estimators if e.startswith("aug-")]
    models = {
        name: fit_outcome_models(dataset, _BIAS_SPECS[name], z_stage1="linear")
        for name in need_aug
    }
    if "MDP" in estimators:
        # ME on the trial subset = separate per-arm fits there (no external rows)
        trial = dataset.subset(dataset.mask(z=1))
        trial_models = fit_outcome_models(trial, BiasSpec.mean_exchangeability())
        out[("MDP", "ATT")] = estimate_mdp(dataset, trial_models).point
    if "MD" in estimators:
        out[("MD", "ATT")] = estimate_md(dataset).point
    if "PS" in estimators:
        out[("PS", "ATT")] = estimate_ps(dataset, fp).point
    if "DR" in estimators:
        me = models.get("aug-ME") or fit_outcome_models(dataset, BiasSpec.mean_exchangeability())
        out[("DR", "ATT")] = estimate_dr(dataset, fp, me).point
    if "ANCOVA-ME" in estimators:
        out[("ANCOVA-ME", "ATT")] = estimate_ancova(dataset, include_z_intercept=False).point
    if "ANCOVA-const" in estimators:
        out[("ANCOVA-const", "ATT")] = estimate_ancova(dataset, include_z_intercept=True).point
    for name in need_aug:
        for est_name in estimands:
            spec = BUILTIN_ESTIMANDS[est_name.lower()]()
            out[(name, est_name)] = estimate_wate(dataset, fp, models[name], spec).point
    return out


def _rep_errors(config: SimulationConfig, rep_index: int) -> dict:
    truth = generate(config, rep_index)
    estimands = config.estimand_names
    targets = {
        name: true_wate(truth, BUILTIN_ESTIMANDS[name.lower()]()) for name in estimands
    }
    errors = {}
    try:
        points = fit_estimators(truth.dataset, config.estimator_names, estimands)
    except EcaugError:
        return {"__failed__": True}
    for (estimator, estimand), point in points.items():
        errors[(estimator, estimand)] = point - targets[estimand]
    return errors


def _round_half_away(v: float) -> int:
    return int(np.sign(v) * np.floor(abs(v) + 0.5))


@dataclass(frozen=True)
class TableRow:
    scenario: str
    b: float
    m: int
    estimator: str
    estimand: str
    bias_x100: int
    sd_x100: int
    bias_raw: float
    sd_raw: float
    reps: int


@dataclass
class ResultTable:
    """Bias and SD of each estimator's per-replicate error against the
    finite-population target, on the raw scale and the reported x100
    integer scale (rounded half away from zero)."""

    rows: list = field(default_factory=list)

    def add(self, row: TableRow):
        self.rows.append(row)

    def extend(self, other: "ResultTable"):
        self.rows.extend(other.rows)

    def lookup(self, estimator, estimand=None, b=None, m=None) -> TableRow:
        matches = [
            r
            for r in self.rows
            if r.estimator == estimator
            and (estimand is None or r.estimand == estimand)
            and (b is None or abs(r.b - b) < 1e-12)
            and (m is None or r.m == m)
        ]
        if len(matches) != 1:
            raise KeyError(f"{len(matches)} rows match ({estimator}, {estimand}, b={b}, m={m})")
        return matches[0]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            [
                "scenario",
                "b",
                "m",
                "estimator",
                "estimand",
                "bias_x100",
                "sd_x100",
                "bias_raw",
                "sd_raw",
                "reps",
            ]
        )
        for r in self.rows:
            writer.writerow(
                [
                    r.scenario,
                    repr(float(r.b)),
                    r.m,
                    r.estimator,
                    r.estimand,
                    r.bias_x100,
                    r.sd_x100,
                    repr(float(r.bias_raw)),
                    repr(float(r.sd_raw)),
                    r.reps,
                ]
            )
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    def render_text(self) -> str:
        """Aligned table, one row per (b, 1:m), one column per estimator
        (per estimator-estimand pair for the multi-estimand studies)."""
        if not self.rows:
            return "(empty table)\n"
        col_keys = []
        for r in self.rows:
            key = (r.estimator, r.estimand)
            if key not in col_keys:
                col_keys.append(key)
        multi = len({k[1] for k in col_keys}) > 1
        headers = [f"{e}[{d}]" if multi else e for e, d in col_keys]
        row_keys = []
        for r in self.rows:
            key = (r.b, r.m)
            if key not in row_keys:
                row_keys.append(key)
        cells = {}
        for r in self.rows:
            cells[((r.b, r.m), (r.estimator, r.estimand))] = f"{r.bias_x100} ({r.sd_x100})"
        widths = [
            max(len(h), max(len(cells.get((rk, ck), "")) for rk in row_keys))
            for h, ck in zip(headers, col_keys)
        ]
        label_w = max(len("b      1:m"), 10)
        lines = ["b      1:m".ljust(label_w) + "  " + "  ".join(
            h.rjust(w) for h, w in zip(headers, widths)
        )]
        for b, m in row_keys:
            label = f"{b:<5g}  1:{m}".ljust(label_w)
            line = label + "  " + "  ".join(
                cells.get(((b, m), ck), "").rjust(w) for ck, w in zip(col_keys, widths)
            )
            lines.append(line)
        return "\n".join(lines) + "\n"


def run_study(config: SimulationConfig, n_jobs: int = 1) -> ResultTable:
    """Run all replications of one configuration and tabulate bias and SD.

    Replicates failing with a package error are dropped and counted; more
    than 1% of them aborts the study. Output is identical for any n_jobs.
    """
    runner = Parallel(n_jobs=n_jobs) if n_jobs != 1 else None
    if runner is not None:
        all_errors = runner(delayed(_rep_errors)(config, r) for r in range(config.reps))
    else:
        all_errors = [_rep_errors(config, r) for r in range(config.reps)]
    failed = sum(1 for e in all_errors if e.get("__failed__"))
    if failed > 0.01 * config.reps:
        raise TooManyFailures(failed, config.reps)
    good = [e for e in all_errors if not e.get("__failed__")]
    table = ResultTable()
    keys = []
    for name in config.estimator_names:
        if name.startswith("aug-"):
            keys.extend((name, d) for d in config.estimand_names)
        else:
            keys.append((name, "ATT"))
    for estimator, estimand in keys:
        errs = np.asarray([e[(estimator, estimand)] for e in good])
        bias = float(errs.mean())
        sd = float(errs.std(ddof=1)) if errs.size > 1 else 0.0
        table.add(
            TableRow(
                scenario=config.scenario,
                b=config.b,
                m=config.m,
                estimator=estimator,
                estimand=estimand,
                bias_x100=_round_half_away(100.0 * bias),
                sd_x100=_round_half_away(100.0 * sd),
                bias_raw=bias,
                sd_raw=sd,
                reps=len(good),
            )
        )
    return table


TABLE_SCENARIOS = {
    "1": "S1",
    "2": "S2",
    "2supp": "S2_lowNoise",
    "3": "S3",
    "4": "S4",
    "4supp": "S4_constB",
}
TABLE_B_GRID = (0.0, 0.2, 0.4)
TABLE_M_GRID = (1, 2, 5, 10, 20)

# spot cells from the reference benchmark tables, (b, m, estimator,
# estimand) -> (bias_x100, sd_x100); checked by `tables --assert`
REFERENCE_CELLS = {
    "1": [
        (0.4, 1, "aug-ME", "ATT", 20, 6),
        (0.4, 1, "aug-const", "ATT", 0, 6),
        (0.4, 1, "PS", "ATT", 26, 11),
        (0.4, 1, "DR", "ATT", 0, 6),
        (0.4, 1, "MD", "ATT", -1, 10),
        (0.2, 10, "aug-ME", "ATT", 16, 8),
        (0.2, 10, "ANCOVA-ME", "ATT", 17, 7),
    ],
    "2": [
        (0.4, 20, "aug-ME", "ATT", 44, 11),
        (0.4, 20, "aug-const", "ATT", -2, 30),
        (0.4, 20, "aug-flex", "ATT", -1, 24),
        (0.2, 5, "PS", "ATT", 23, 14),
    ],
    "2supp": [
        (0.4, 1, "MDP", "ATT", 0, 1),
        (0.4, 1, "aug-const", "ATT", -1, 3),
    ],
    "3": [
        (0.4, 10, "aug-ME", "ATT", 41, 16),
        (0.4, 10, "aug-flex", "ATT", 2, 27),
    ],
    "4": [
        (0.4, 1, "aug-ME", "ATE", 18, 10),
        (0.4, 1, "aug-const", "ATO", -8, 10),
    ],
    "4supp": [
        (0.4, 5, "aug-const", "ATC", 0, 17),
    ],
}


def check_reference_cells(which: str, table: ResultTable, tolerance: int = 2) -> list[str]:
    """Compare a produced table against the reference spot cells.

    Returns one line per cell, prefixed ok/OFF; meaningful only at full
    replication counts.
    """
    lines = []
    for b, m, estimator, estimand, bias, sd in REFERENCE_CELLS[which]:
        row = table.lookup(estimator, estimand, b=b, m=m)
        ok = abs(row.bias_x100 - bias) <= tolerance and abs(row.sd_x100 - sd) <= tolerance
        lines.append(
            f"{'ok ' if ok else 'OFF'} b={b} 1:{m} {estimator}[{estimand}]: "
            f"got ({row.bias_x100}, {row.sd_x100}) want ({bias}, {sd})"
        )
    return lines


def run_table(
    which: str, reps: int = 1000, seed: int = 0, n_jobs: int = 1, n: int = 1000
) -> ResultTable:
    """Reproduce one full benchmark table: every (b, m) cell of the named
    study at the given replication count."""
    scenario = TABLE_SCENARIOS[which]
    table = ResultTable()
    for b in TABLE_B_GRID:
        for m in TABLE_M_GRID:
            config = SimulationConfig(
                scenario=scenario, b=b, m=m, n=n, reps=reps, seed=seed
            )
            table.extend(run_study(config, n_jobs=n_jobs))
    return table
