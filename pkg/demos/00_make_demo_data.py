"""Regenerate the bundled demo dataset.

The packaged CSV is one draw from the heterogeneous-difference simulation
design (scenario S2, b = 0.2, 1:2 allocation, 600 subjects): a concurrent
trial with a modest control arm plus an external control pool whose
outcome level differs systematically from the concurrent controls.
"""

from pathlib import Path

from ecaug.data import write_csv
from ecaug.simulation import SimulationConfig, generate

OUT = Path(__file__).resolve().parents[1] / "src" / "ecaug" / "datasets" / "demo_trial.csv"

truth = generate(SimulationConfig(scenario="S2", b=0.2, m=2, n=600, seed=20240907), 0)
write_csv(truth.dataset, OUT)

counts = truth.dataset.counts()
print(f"wrote {OUT}")
print(f"cells: treated {counts.n11}, concurrent controls {counts.n10}, external {counts.n00}")
print(f"true control difference at the covariate mean: {truth.b_true(truth.dataset.x).mean():.3f}")
