import numpy as np
import pytest

from ecaug.data import TrialDataset
from ecaug.estimators import EstimandSpec
from ecaug.outcomes import OutcomeModels
from ecaug.propensity import FittedPropensities


def random_dataset(rng, n=None, p=None, min_cell=2, binary_outcome=False):
    """A valid random hybrid-trial dataset with every (z, a) cell occupied."""
    if n is None:
        n = int(rng.integers(max(12, 6 * min_cell), 80))
    if p is None:
        p = int(rng.integers(1, 4))
    if n < 3 * min_cell:
        raise ValueError(f"n={n} cannot hold {min_cell} subjects per cell")
    while True:
        z = rng.integers(0, 2, size=n).astype(float)
        a = np.where(z == 1, rng.integers(0, 2, size=n), 0).astype(float)
        if min_cell == 0:
            break
        n11 = int(((z == 1) & (a == 1)).sum())
        n10 = int(((z == 1) & (a == 0)).sum())
        n00 = int((z == 0).sum())
        if min(n11, n10, n00) >= min_cell:
            break
    x = rng.standard_normal((n, p))
    if binary_outcome:
        y = rng.integers(0, 2, size=n).astype(float)
        kind = "binary"
    else:
        y = rng.standard_normal(n) + z - 0.5 * a + x @ rng.standard_normal(p)
        kind = "continuous"
    return TrialDataset(z=z, a=a, x=x, y=y, outcome_kind=kind)


def random_propensities(rng, dataset, lo=0.05, hi=0.95):
    """Arbitrary propensity vectors inside the overlap region (no fitting)."""
    n = dataset.n
    return FittedPropensities(
        e_z=rng.uniform(lo, hi, size=n),
        e_a=rng.uniform(lo, hi, size=n),
        z_model=None,
        a_model=None,
    )


def random_linear_models(rng, dataset):
    """Arbitrary linear conditional-mean evaluators (no fitting)."""
    p = dataset.p

    def make():
        intercept = rng.normal()
        beta = rng.standard_normal(p)
        return lambda x, i=intercept, b=beta: i + x @ b

    mu11, mu10, mu00 = make(), make(), make()
    from ecaug.bias import BiasSpec, FittedBias

    bias = FittedBias(
        spec=BiasSpec.flexible(),
        theta=np.empty(0),
        evaluate=lambda x: mu10(x) - mu00(x),
    )
    return OutcomeModels(mu11=mu11, mu10=mu10, mu00=mu00, bias=bias, family="linear")


ALL_ESTIMANDS = [
    EstimandSpec.att(),
    EstimandSpec.ate(),
    EstimandSpec.atc(),
    EstimandSpec.ato(),
]


@pytest.fixture
def rng():
    return np.random.default_rng(202406)
