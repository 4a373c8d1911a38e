"""Uncertainty with the full-pipeline bootstrap, and the determinism rule.

The bootstrap resamples within each (z, a) cell, keeping the design's arm
sizes fixed, and refits everything per replicate: propensities, the
control-difference step, the outcome models. Replicate r draws from a
generator seeded by the pure pair (seed, r), so the same seed reproduces
the same interval bit for bit, in any execution order.
"""

from ecaug.bias import BiasSpec
from ecaug.data import read_csv
from ecaug.datasets import demo_trial_path
from ecaug.estimators import EstimandSpec
from ecaug.inference import bootstrap
from ecaug.pipeline import AnalysisConfig, analyze, point_estimate

dataset = read_csv(demo_trial_path())
config = AnalysisConfig(estimand=EstimandSpec.att(), bias_spec=BiasSpec.constant())

result = analyze(dataset, config, boot_reps=400, seed=42)
print(f"point {result.point:+.4f}")
print(f"sandwich  se {result.sandwich.std_error:.4f}  "
      f"CI ({result.sandwich.ci_low:+.4f}, {result.sandwich.ci_high:+.4f})")
print(f"bootstrap se {result.bootstrap.std_error:.4f}  "
      f"CI ({result.bootstrap.ci_low:+.4f}, {result.bootstrap.ci_high:+.4f})  "
      f"[{result.bootstrap.replicates_used} replicates]")

again = bootstrap(dataset, lambda d: point_estimate(d, config), B=400, seed=42)
print(f"\nsame seed, run twice, identical results: {again == result.bootstrap}")

other = bootstrap(dataset, lambda d: point_estimate(d, config), B=400, seed=43)
print(f"different seed, different interval: "
      f"({other.ci_low:+.4f}, {other.ci_high:+.4f})")
