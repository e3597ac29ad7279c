"""Datasets, class bookkeeping, fold partitioning, and CSV I/O.

A dataset is a float64 feature matrix plus a 0/1 label vector; label 0 is
the majority class by convention, label 1 the minority. Instances are
frozen and their arrays are marked read-only, so they can be shared freely
across threads and tasks.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .exceptions import CsvFormatError, DimensionMismatch, TooFewMinority
from .rng import RngStream


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix (rows = samples) with binary labels.

    Invariants checked on construction: 2-D float features, labels exactly
    0 or 1, one label per row, at least one feature column.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if X.ndim != 2 or X.shape[1] < 1:
            raise DimensionMismatch(f"features must be 2-D with d >= 1, got shape {X.shape}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DimensionMismatch(
                f"labels shape {y.shape} does not match {X.shape[0]} feature rows")
        if not np.isin(y, (0, 1)).all():
            raise CsvFormatError("labels must be exactly 0 or 1")
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "labels", _readonly(y.astype(np.int64)))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    @property
    def n0(self) -> int:
        return int(np.count_nonzero(self.labels == 0))

    @property
    def n1(self) -> int:
        return int(np.count_nonzero(self.labels == 1))

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        idx = np.asarray(indices)
        return LabeledDataset(self.features[idx], self.labels[idx])


@dataclass(frozen=True)
class ClassSplit:
    """Per-class feature rows, source order preserved within each class."""

    majority: np.ndarray
    minority: np.ndarray


@dataclass(frozen=True)
class FoldAssignment:
    """K-fold partition as a per-sample fold index in [0, K)."""

    K: int
    fold_of: np.ndarray

    def validation_indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == k)

    def training_indices(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != k)


def split_by_class(data: LabeledDataset) -> ClassSplit:
    """Separate majority (label 0) and minority (label 1) feature rows."""
    if data.n == 0:
        raise DimensionMismatch("dataset is empty")
    return ClassSplit(
        majority=data.features[data.labels == 0],
        minority=data.features[data.labels == 1],
    )


def merge_classes(split: ClassSplit) -> LabeledDataset:
    """Inverse of split_by_class up to row order (majority first)."""
    X = np.vstack([split.majority, split.minority])
    y = np.concatenate([
        np.zeros(len(split.majority), dtype=np.int64),
        np.ones(len(split.minority), dtype=np.int64),
    ])
    return LabeledDataset(X, y)


def stratified_kfold(data: LabeledDataset, K: int, rng: RngStream) -> FoldAssignment:
    """Stratified K-fold assignment.

    Within each class the samples are shuffled by ``rng`` and dealt
    round-robin to folds, so per-class fold sizes differ by at most one and
    every fold sees both classes whenever each class has at least K rows.

    Raises:
        TooFewMinority: if either class has fewer than K samples (the
            balanced validation loss would be undefined on some fold).
    """
    if K < 2:
        raise ValueError(f"K must be >= 2, got {K}")
    if data.n1 < K:
        raise TooFewMinority(f"n1={data.n1} < K={K}; lower K")
    if data.n0 < K:
        raise TooFewMinority(f"n0={data.n0} < K={K}; lower K")
    gen = rng.generator()
    fold_of = np.empty(data.n, dtype=np.int64)
    for label in (0, 1):
        idx = np.flatnonzero(data.labels == label)
        perm = gen.permutation(idx)
        fold_of[perm] = np.arange(len(perm)) % K
    return FoldAssignment(K=K, fold_of=_readonly(fold_of))


# -- CSV format ---------------------------------------------------------------
#
# Header row; one column named `label` holding 0/1; every other column is a
# feature, kept in header order. UTF-8, '.' decimal separator. Floats are
# written with repr(), the shortest decimal that round-trips to the same
# float64, so save -> load is bit exact.

def save_csv(data: LabeledDataset, path, feature_names=None) -> None:
    names = feature_names or [f"x{j}" for j in range(data.d)]
    if len(names) != data.d:
        raise DimensionMismatch(f"{len(names)} names for {data.d} features")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(names) + ["label"])
        for row, label in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def load_csv(path) -> LabeledDataset:
    """Load a dataset CSV, rejecting malformed cells with their line number."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _parse_csv(fh)


def loads_csv(text: str) -> LabeledDataset:
    return _parse_csv(io.StringIO(text))


def _parse_csv(fh) -> LabeledDataset:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError("line 1: empty file, expected a header row") from None
    header = [h.strip() for h in header]
    if "label" not in header:
        raise CsvFormatError("line 1: no column named 'label'")
    label_col = header.index("label")
    feat_cols = [j for j in range(len(header)) if j != label_col]
    if not feat_cols:
        raise CsvFormatError("line 1: no feature columns besides 'label'")

    rows, labels = [], []
    for lineno, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise CsvFormatError(
                f"line {lineno}: expected {len(header)} cells, got {len(record)}")
        try:
            rows.append([float(record[j]) for j in feat_cols])
        except ValueError:
            raise CsvFormatError(f"line {lineno}: non-numeric feature cell") from None
        raw = record[label_col].strip()
        if raw not in ("0", "1"):
            raise CsvFormatError(f"line {lineno}: label must be 0 or 1, got {raw!r}")
        labels.append(int(raw))
    if not rows:
        raise CsvFormatError("line 2: no data rows")
    return LabeledDataset(np.array(rows, dtype=np.float64), np.array(labels))
