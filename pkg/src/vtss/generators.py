"""Synthetic minority generators behind one interface.

``generate(spec, minority, full_data, count, rng)`` returns ``count``
synthetic feature rows to be appended with label 1. Neighbor search is
exact brute force: every dataset here is desk scale and approximate
indexes would buy nothing.

Kinds:

* bootstrap          resample minority rows with replacement
* smote              interpolate toward a random one of the k nearest
                     minority neighbors, x + g*(x' - x), g ~ Unif(0,1)
* borderline_smote   smote restricted to DANGER base points (variant 1:
                     neighbors are still minority points)
* adasyn             smote with per-point allocation proportional to the
                     majority share of each point's full-data neighborhood
* gaussian_fit       sample a Gaussian fitted to the minority rows
* jitter             bootstrap plus noise scaled by per-feature minority SD
* perturbed_sampling bootstrap plus isotropic N(0, jitter_sigma^2 I) noise
* oracle             draw from a simulation model's true minority law
* semi_oracle        true model noise centered at the empirical minority mean

SMOTE-family edge cases: k shrinks to n1 - 1 when the minority is smaller
than k + 1, and a single-point minority falls back to jitter (logged).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset
from .exceptions import (DimensionMismatch, EmptyMinority, KTooLarge,
                         MissingFullData, MissingModelHandle)
from .rng import RngStream

logger = logging.getLogger(__name__)

KINDS = ("bootstrap", "smote", "borderline_smote", "adasyn", "gaussian_fit",
         "jitter", "perturbed_sampling", "oracle", "semi_oracle")
_NEEDS_FULL_DATA = ("borderline_smote", "adasyn")
_NEEDS_MODEL = ("oracle", "semi_oracle")


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str = "smote"
    k: int = 5
    jitter_sigma: float = 1.0
    ridge: float = 0.0          # gaussian_fit covariance regularizer
    model_handle: object = None  # simulation model for oracle kinds

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")
        if self.kind in _NEEDS_MODEL and self.model_handle is None:
            raise MissingModelHandle(f"{self.kind} generator needs model_handle")

    def to_config(self) -> dict:
        cfg = {"kind": self.kind, "k": self.k, "jitter_sigma": self.jitter_sigma,
               "ridge": self.ridge}
        if self.model_handle is not None:
            cfg["model_handle"] = getattr(self.model_handle, "name", "custom")
        return cfg


@dataclass(frozen=True)
class SyntheticBatch:
    rows: np.ndarray
    generator_used: GeneratorSpec
    seed_record: dict
    # (base index, neighbor index, interpolation gamma) per row, for
    # interpolation kinds; lets audits re-derive every output exactly.
    audit: tuple = field(default=None, repr=False)


def knn_minority(points: np.ndarray, query_index: int, k: int) -> np.ndarray:
    """Indices of the k nearest rows to ``points[query_index]`` (self excluded).

    Euclidean distance; ties broken by lower index.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n < 2:
        raise KTooLarge("need at least 2 points for neighbor search")
    if k > n - 1:
        raise KTooLarge(f"k={k} but only {n - 1} other points exist")
    d2 = np.einsum("ij,ij->i", points - points[query_index],
                   points - points[query_index])
    d2[query_index] = np.inf
    order = np.argsort(d2, kind="stable")
    return order[:k]


def _knn_table(points: np.ndarray, k: int) -> np.ndarray:
    """Neighbor lists for every row at once (Gram-based squared distances)."""
    sq = np.einsum("ij,ij->i", points, points)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (points @ points.T)
    np.fill_diagonal(d2, np.inf)
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :k]


def _majority_neighbor_counts(minority, full_data: LabeledDataset, k: int):
    """Per minority point: majority count among its k full-data neighbors."""
    X = full_data.features
    labels = full_data.labels
    min_idx = np.flatnonzero(labels == 1)
    if len(min_idx) != len(minority) or not np.array_equal(X[min_idx], minority):
        raise MissingFullData(
            "minority rows must be exactly full_data's label-1 rows")
    k_eff = min(k, full_data.n - 1)
    counts = np.empty(len(minority), dtype=np.int64)
    for pos, i in enumerate(min_idx):
        d2 = np.einsum("ij,ij->i", X - X[i], X - X[i])
        d2[i] = np.inf
        neigh = np.argsort(d2, kind="stable")[:k_eff]
        counts[pos] = np.count_nonzero(labels[neigh] == 0)
    return counts, k_eff


def _interpolate(minority, base_pool, counts_or_total, k, gen):
    """Shared SMOTE interpolation step.

    ``base_pool`` holds candidate base positions (indices into minority);
    ``counts_or_total`` is either a total count (uniform base choice) or a
    per-base allocation array.
    """
    k_eff = min(k, len(minority) - 1)
    table = _knn_table(minority, k_eff)
    if np.isscalar(counts_or_total):
        bases = base_pool[gen.integers(0, len(base_pool), size=counts_or_total)]
    else:
        bases = np.repeat(base_pool, counts_or_total)
    m = len(bases)
    neighbor_pos = gen.integers(0, k_eff, size=m)
    neighbors = table[bases, neighbor_pos]
    gammas = gen.random(m)
    xb = minority[bases]
    rows = xb + gammas[:, None] * (minority[neighbors] - xb)
    audit = tuple(zip(bases.tolist(), neighbors.tolist(), gammas.tolist()))
    return rows, audit


def _largest_remainder(shares: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation summing exactly to ``total`` (ties to lower index)."""
    quota = shares / shares.sum() * total
    alloc = np.floor(quota).astype(np.int64)
    short = total - int(alloc.sum())
    if short > 0:
        frac = quota - alloc
        top = np.argsort(-frac, kind="stable")[:short]
        alloc[top] += 1
    return alloc


def generate(spec: GeneratorSpec, minority: np.ndarray,
             full_data: LabeledDataset | None, count: int,
             rng: RngStream) -> SyntheticBatch:
    """Produce ``count`` synthetic minority feature rows.

    Deterministic in (spec, minority, full_data, count, rng).
    """
    minority = np.asarray(minority, dtype=np.float64)
    if minority.ndim == 1:
        minority = minority[None, :]
    n1 = minority.shape[0]
    if count < 0:
        raise ValueError("count must be >= 0")
    if n1 == 0 and spec.kind not in _NEEDS_MODEL:
        raise EmptyMinority(f"{spec.kind} needs at least one minority row")
    if spec.kind in _NEEDS_FULL_DATA and full_data is None:
        raise MissingFullData(f"{spec.kind} needs the full dataset for majority neighbors")

    d = full_data.d if (n1 == 0 and full_data is not None) else minority.shape[1]
    if count == 0:
        return SyntheticBatch(np.empty((0, d)), spec, rng.record())

    gen = rng.generator()
    kind = spec.kind
    audit = None

    if kind in ("smote", "borderline_smote", "adasyn") and n1 == 1:
        logger.warning("%s with a single minority point: falling back to jitter", kind)
        kind = "jitter"

    if kind == "bootstrap":
        rows = minority[gen.integers(0, n1, size=count)]

    elif kind == "smote":
        rows, audit = _interpolate(minority, np.arange(n1), count, spec.k, gen)

    elif kind == "borderline_smote":
        maj_counts, k_eff = _majority_neighbor_counts(minority, full_data, spec.k)
        danger = np.flatnonzero((maj_counts * 2 >= k_eff) & (maj_counts < k_eff))
        if len(danger) == 0:
            logger.warning("borderline_smote: DANGER set empty, falling back to smote")
            rows, audit = _interpolate(minority, np.arange(n1), count, spec.k, gen)
        else:
            rows, audit = _interpolate(minority, danger, count, spec.k, gen)

    elif kind == "adasyn":
        maj_counts, k_eff = _majority_neighbor_counts(minority, full_data, spec.k)
        r = maj_counts / k_eff
        if r.sum() == 0:
            logger.warning("adasyn: all neighborhoods pure minority, falling back to smote")
            rows, audit = _interpolate(minority, np.arange(n1), count, spec.k, gen)
        else:
            alloc = _largest_remainder(r, count)
            rows, audit = _interpolate(minority, np.arange(n1), alloc, spec.k, gen)

    elif kind == "gaussian_fit":
        mean = minority.mean(axis=0)
        cov = np.cov(minority.T, ddof=1).reshape(d, d) if n1 > 1 else np.zeros((d, d))
        cov = cov + spec.ridge * (np.trace(cov) / d) * np.eye(d)
        evals, evecs = np.linalg.eigh(cov)
        root = evecs * np.sqrt(np.clip(evals, 0.0, None))
        rows = mean + gen.standard_normal((count, d)) @ root.T

    elif kind == "jitter":
        sd = minority.std(axis=0, ddof=1) if n1 > 1 else np.zeros(d)
        base = minority[gen.integers(0, n1, size=count)]
        rows = base + gen.standard_normal((count, d)) * (spec.jitter_sigma * sd)

    elif kind == "perturbed_sampling":
        base = minority[gen.integers(0, n1, size=count)]
        rows = base + gen.standard_normal((count, d)) * spec.jitter_sigma

    elif kind == "oracle":
        rows = np.asarray(spec.model_handle.sample_minority(count, rng.child(0)))

    else:  # semi_oracle
        model = spec.model_handle
        if not hasattr(model, "sample_noise"):
            raise MissingModelHandle(
                "semi_oracle needs a model exposing its noise distribution")
        if n1 == 0:
            raise EmptyMinority("semi_oracle centers at the empirical minority mean")
        rows = minority.mean(axis=0) + np.asarray(model.sample_noise(count, rng.child(0)))

    rows = np.asarray(rows, dtype=np.float64)
    if rows.shape != (count, d):
        raise DimensionMismatch(f"generator produced shape {rows.shape}, wanted {(count, d)}")
    return SyntheticBatch(rows, spec, rng.record(), audit)


def augment(data: LabeledDataset, batch: SyntheticBatch) -> LabeledDataset:
    """Append the batch rows to the dataset with label 1."""
    if batch.rows.shape[0] == 0:
        return data
    if batch.rows.shape[1] != data.d:
        raise DimensionMismatch(
            f"batch has {batch.rows.shape[1]} features, dataset has {data.d}")
    X = np.vstack([data.features, batch.rows])
    y = np.concatenate([data.labels, np.ones(batch.rows.shape[0], dtype=np.int64)])
    return LabeledDataset(X, y)


def audit_rows(minority: np.ndarray, audit) -> np.ndarray:
    """Recompute interpolated rows from an audit log (bit-exact)."""
    minority = np.asarray(minority, dtype=np.float64)
    bases = np.array([a[0] for a in audit], dtype=np.int64)
    neighbors = np.array([a[1] for a in audit], dtype=np.int64)
    gammas = np.array([a[2] for a in audit], dtype=np.float64)
    xb = minority[bases]
    return xb + gammas[:, None] * (minority[neighbors] - xb)
