"""Bundled example data."""

from importlib import resources


def demo_trial_path():
    """Path to the bundled synthetic hybrid-trial CSV (600 subjects, four
    covariates, heterogeneous control difference)."""
    return resources.files(__package__) / "demo_trial.csv"
