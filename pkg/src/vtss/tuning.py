"""Validation-tuned synthetic size.

Selects the synthetic-size multiplier gamma over a candidate grid by
repeated stratified K-fold cross-validation: for each (repeat, gamma,
fold), the training folds are augmented with synthetic minority rows
generated *from those folds only*, a model is fitted, and the configured
objective is evaluated on the untouched validation fold. The winning
gamma optimizes the mean over all repeats*K fold evaluations, ties going
to the smallest gamma (less synthesis). The final model is refitted on
the full dataset augmented to round(gamma_star * (n0 - n1)) rows.

Two deliberate choices beyond the bare procedure: folds are stratified by
class so the balanced validation objective is always defined, and the
per-fold synthetic count is recomputed from the training-split class
counts so every fold reaches the same effective class proportions.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset, split_by_class, stratified_kfold
from .exceptions import TooFewMinority, VtssError
from .generators import GeneratorSpec, augment, generate
from .losses import LossSpec
from .metrics import (balanced_accuracy, balanced_empirical_loss,
                      weighted_empirical_loss)
from .rng import RngStream
from .trainer import FitConfig, FittedModel, fit_erm

logger = logging.getLogger(__name__)

OBJECTIVES = ("balanced_loss", "balanced_accuracy", "weighted_loss")
_MAXIMIZE = {"balanced_accuracy"}


def default_gamma_grid() -> tuple[float, ...]:
    """21 evenly spaced multipliers on [0, 2], centered at 1."""
    return tuple(np.linspace(0.0, 2.0, 21))


@dataclass(frozen=True)
class VtssConfig:
    gamma_grid: tuple = field(default_factory=default_gamma_grid)
    K: int = 5
    repeats: int = 1
    objective: str = "balanced_loss"
    rho: float = 0.5
    generator: GeneratorSpec = field(default_factory=GeneratorSpec)
    loss: LossSpec = field(default_factory=LossSpec)
    fit: FitConfig = field(default_factory=FitConfig)

    def __post_init__(self):
        grid = tuple(float(g) for g in self.gamma_grid)
        if not grid:
            raise ValueError("gamma_grid must be nonempty")
        if any(g < 0 for g in grid) or list(grid) != sorted(grid):
            raise ValueError("gamma_grid must be sorted and nonnegative")
        object.__setattr__(self, "gamma_grid", grid)
        if self.K < 2:
            raise ValueError("K must be >= 2")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")

    def to_config(self) -> dict:
        return {
            "gamma_grid": list(self.gamma_grid),
            "K": self.K,
            "repeats": self.repeats,
            "objective": self.objective,
            "rho": self.rho,
            "generator": self.generator.to_config(),
            "loss": self.loss.to_config(),
        }


@dataclass(frozen=True)
class VtssResult:
    gamma_star: float
    n_syn_star: int
    cv_curve: list          # (gamma, mean objective, standard error)
    final_theta: np.ndarray
    final_model: FittedModel
    seed_record: dict
    objective: str
    excluded_gammas: list

    def to_json_dict(self) -> dict:
        return {
            "gamma_star": self.gamma_star,
            "n_syn_star": self.n_syn_star,
            "cv_curve": [[g, m, s] for g, m, s in self.cv_curve],
            "final_theta": [float(v) for v in self.final_theta],
            "seed_record": self.seed_record,
            "algorithm_id": self.seed_record["algorithm_id"],
            "objective": self.objective,
            "excluded_gammas": list(self.excluded_gammas),
        }


def synthetic_size(gamma: float, n0: int, n1: int) -> int:
    return int(round(gamma * (n0 - n1)))


def _gamma_key(gamma: float) -> int:
    # Streams are keyed by the gamma VALUE (its float64 bit pattern), not its
    # grid position: duplicate grid entries evaluate identically, and any
    # single gamma can be re-run in isolation with the same draws.
    return int.from_bytes(struct.pack(">d", float(gamma)), "big")


def _objective_value(cfg: VtssConfig, model, val: LabeledDataset) -> float:
    if cfg.objective == "balanced_loss":
        return balanced_empirical_loss(model.theta, cfg.loss, val)
    if cfg.objective == "balanced_accuracy":
        return balanced_accuracy(model, val)
    return weighted_empirical_loss(model.theta, cfg.loss, val, cfg.rho)


def fit_augmented(data: LabeledDataset, n_syn: int, cfg: VtssConfig,
                  rng: RngStream):
    """Generate n_syn rows from data's minority, augment, and fit."""
    minority = split_by_class(data).minority
    batch = generate(cfg.generator, minority, data, n_syn, rng)
    return fit_erm(augment(data, batch), cfg.loss, cfg.fit)


def _evaluate_grid(data: LabeledDataset, cfg: VtssConfig, rng: RngStream):
    """Per-gamma objective values over all (repeat, fold) cells.

    Returns (values, failures): values[gi] is a list in (repeat, fold)
    order; failures[gi] collects reasons for any failed cell.
    """
    if not data.n0 > data.n1:
        raise TooFewMinority(f"expected n0 > n1, got n0={data.n0}, n1={data.n1}")
    rng_folds, rng_cells = rng.child(0), rng.child(1)
    G = len(cfg.gamma_grid)
    values = [[] for _ in range(G)]
    failures = [[] for _ in range(G)]
    for r in range(cfg.repeats):
        folds = stratified_kfold(data, cfg.K, rng_folds.child(r))
        for gi, gamma in enumerate(cfg.gamma_grid):
            cell_rng = rng_cells.child(r).child(_gamma_key(gamma))
            for k in range(cfg.K):
                train = data.subset(folds.training_indices(k))
                val = data.subset(folds.validation_indices(k))
                n_syn = synthetic_size(gamma, train.n0, train.n1)
                try:
                    model = fit_augmented(train, n_syn, cfg, cell_rng.child(k))
                    values[gi].append(_objective_value(cfg, model, val))
                except VtssError as exc:
                    failures[gi].append(f"repeat={r} fold={k}: {exc}")
    return values, failures


def _aggregate(cfg: VtssConfig, values, failures):
    curve, excluded = [], []
    for gi, gamma in enumerate(cfg.gamma_grid):
        if failures[gi] or not values[gi]:
            excluded.append(gamma)
            logger.warning("gamma=%g excluded: %s", gamma,
                           "; ".join(failures[gi]) or "no evaluations")
            continue
        vals = np.asarray(values[gi])
        se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        curve.append((float(gamma), float(vals.mean()), se))
    if not curve:
        raise VtssError("every gamma candidate failed")
    return curve, excluded


def _select(cfg: VtssConfig, curve):
    sign = -1.0 if cfg.objective in _MAXIMIZE else 1.0
    best_gamma, best_val = None, None
    for gamma, mean, _ in curve:  # ascending gamma: first optimum = smallest
        if best_val is None or sign * mean < sign * best_val:
            best_gamma, best_val = gamma, mean
    return best_gamma


def cv_curve(data: LabeledDataset, cfg: VtssConfig, rng: RngStream):
    """(gamma, mean objective, stderr) over the grid, no final refit."""
    values, failures = _evaluate_grid(data, cfg, rng)
    curve, _ = _aggregate(cfg, values, failures)
    return curve


def vtss_tune(data: LabeledDataset, cfg: VtssConfig, rng: RngStream) -> VtssResult:
    """Run the full tuning procedure and refit on the augmented full data."""
    values, failures = _evaluate_grid(data, cfg, rng)
    curve, excluded = _aggregate(cfg, values, failures)
    gamma_star = _select(cfg, curve)
    n_syn_star = synthetic_size(gamma_star, data.n0, data.n1)
    final_model = fit_augmented(data, n_syn_star, cfg, rng.child(2))
    return VtssResult(
        gamma_star=gamma_star,
        n_syn_star=n_syn_star,
        cv_curve=curve,
        final_theta=final_model.theta,
        final_model=final_model,
        seed_record=rng.record(),
        objective=cfg.objective,
        excluded_gammas=excluded,
    )
