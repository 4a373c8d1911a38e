"""Observed-data model for a hybrid trial: a concurrent randomized study
(z = 1) plus external controls (z = 0, always a = 0), with covariates and a
continuous or binary outcome.

Datasets are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import EmptyCell, InvalidRow, ParseError

OUTCOME_KINDS = ("continuous", "binary")


@dataclass(frozen=True)
class ArmCounts:
    """Cell sizes of the three legal (z, a) groups."""

    n11: int
    n10: int
    n00: int

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n00


@dataclass(frozen=True)
class TrialDataset:
    """One row per subject: source z, treatment a, covariates x, outcome y.

    Parameters
    ----------
    z : ndarray of shape (n,)
        1 = concurrent trial, 0 = external control.
    a : ndarray of shape (n,)
        1 = active treatment, 0 = control. External rows must have a = 0.
    x : ndarray of shape (n, p)
        Pre-treatment covariates.
    y : ndarray of shape (n,)
        Observed outcome.
    outcome_kind : {"continuous", "binary"}
    """

    z: np.ndarray
    a: np.ndarray
    x: np.ndarray
    y: np.ndarray
    outcome_kind: str = "continuous"

    def __post_init__(self):
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float))
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        for arr in (self.z, self.a, self.x, self.y):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def mask(self, z=None, a=None) -> np.ndarray:
        m = np.ones(self.n, dtype=bool)
        if z is not None:
            m &= self.z == z
        if a is not None:
            m &= self.a == a
        return m

    def subset(self, mask: np.ndarray) -> "TrialDataset":
        return TrialDataset(
            self.z[mask], self.a[mask], self.x[mask], self.y[mask], self.outcome_kind
        )

    def counts(self) -> ArmCounts:
        return ArmCounts(
            n11=int(self.mask(1, 1).sum()),
            n10=int(self.mask(1, 0).sum()),
            n00=int(self.mask(0, 0).sum()),
        )


def validate(dataset: TrialDataset) -> ArmCounts:
    """Check every dataset invariant and return the (z, a) cell counts.

    Raises
    ------
    InvalidRow
        On the first row with a forbidden (z=0, a=1) combination, a
        non-binary indicator, a non-finite value, or (for binary outcomes)
        y outside {0, 1}.
    """
    ds = dataset
    if ds.outcome_kind not in OUTCOME_KINDS:
        raise InvalidRow(-1, f"unknown outcome_kind {ds.outcome_kind!r}")
    lengths = {ds.z.shape[0], ds.a.shape[0], ds.x.shape[0], ds.y.shape[0]}
    if len(lengths) != 1:
        raise InvalidRow(-1, "z, a, x, y lengths differ")
    for name, arr in (("z", ds.z), ("a", ds.a), ("y", ds.y)):
        bad = ~np.isfinite(arr)
        if bad.any():
            raise InvalidRow(int(np.argmax(bad)), f"non-finite {name}")
    bad = ~np.isfinite(ds.x).all(axis=1)
    if bad.any():
        raise InvalidRow(int(np.argmax(bad)), "non-finite covariate")
    for name, arr in (("z", ds.z), ("a", ds.a)):
        bad = ~np.isin(arr, (0.0, 1.0))
        if bad.any():
            raise InvalidRow(int(np.argmax(bad)), f"{name} not in {{0, 1}}")
    bad = (ds.z == 0) & (ds.a == 1)
    if bad.any():
        raise InvalidRow(int(np.argmax(bad)), "external treated")
    if ds.outcome_kind == "binary":
        bad = ~np.isin(ds.y, (0.0, 1.0))
        if bad.any():
            raise InvalidRow(int(np.argmax(bad)), "binary outcome not in {0, 1}")
    return ds.counts()


def require_cells(dataset: TrialDataset, *cells) -> None:
    """Raise EmptyCell unless every requested (z, a) cell is nonempty."""
    for z, a in cells:
        if not dataset.mask(z, a).any():
            raise EmptyCell(z, a)


def _expected_header(p: int) -> list[str]:
    return ["z", "a", "y"] + [f"x{j}" for j in range(1, p + 1)]


def read_csv(path, outcome_kind: str | None = None) -> TrialDataset:
    """Read a dataset from CSV with columns exactly ``z,a,y,x1,...,xp``.

    outcome_kind is inferred (binary iff every y is 0 or 1) unless given.
    Raises ParseError with 1-based line numbers on malformed input and
    InvalidRow on rows violating dataset invariants.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _read_csv_file(fh, outcome_kind)


def _read_csv_file(fh, outcome_kind=None) -> TrialDataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(1, "z", "empty file") from None
    header = [h.strip() for h in header]
    if len(header) < 4 or header[:3] != ["z", "a", "y"]:
        raise ParseError(1, header[0] if header else "z", "header must start z,a,y,x1,...")
    p = len(header) - 3
    if header != _expected_header(p):
        expected = _expected_header(p)
        bad = next(c for c, e in zip(header, expected) if c != e)
        raise ParseError(1, bad, f"expected columns {','.join(expected)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(lineno, header[min(len(row), len(header)) - 1], "wrong field count")
        parsed = []
        for col, raw in zip(header, row):
            try:
                parsed.append(float(raw))
            except ValueError:
                raise ParseError(lineno, col, f"not a number: {raw!r}") from None
        rows.append(parsed)
    if not rows:
        raise ParseError(2, "z", "no data rows")
    arr = np.asarray(rows, dtype=float)
    y = arr[:, 2]
    if outcome_kind is None:
        outcome_kind = "binary" if np.isin(y, (0.0, 1.0)).all() else "continuous"
    ds = TrialDataset(arr[:, 0], arr[:, 1], arr[:, 3:], y, outcome_kind)
    validate(ds)
    return ds


def read_csv_string(text: str, outcome_kind: str | None = None) -> TrialDataset:
    return _read_csv_file(io.StringIO(text), outcome_kind)


def write_csv(dataset: TrialDataset, path) -> None:
    """Write a dataset in the same column layout read_csv expects."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_expected_header(dataset.p))
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(dataset.z[i])), repr(float(dataset.a[i])), repr(float(dataset.y[i]))]
                + [repr(float(v)) for v in dataset.x[i]]
            )
