"""Balanced evaluation: losses, accuracy, and plug-in excess risk."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .exceptions import InvalidRho, MissingClass
from .losses import LossSpec, design_matrix, loss_values
from .trainer import FitConfig, FittedModel, fit_erm, predict_label


@dataclass(frozen=True)
class BalancedEval:
    balanced_loss: float
    balanced_accuracy: float
    n0_eval: int
    n1_eval: int


def _class_means(theta, spec, eval_data):
    if eval_data.n0 == 0 or eval_data.n1 == 0:
        raise MissingClass(
            f"evaluation set needs both classes, got n0={eval_data.n0}, n1={eval_data.n1}")
    X = design_matrix(spec, eval_data.features)
    vals = loss_values(spec, theta, X, eval_data.labels)
    mask1 = eval_data.labels == 1
    return float(vals[~mask1].mean()), float(vals[mask1].mean())


def balanced_empirical_loss(theta: np.ndarray, spec: LossSpec,
                            eval_data: LabeledDataset) -> float:
    """Equal-weight average of the two per-class mean losses."""
    m0, m1 = _class_means(theta, spec, eval_data)
    return 0.5 * m0 + 0.5 * m1


def weighted_empirical_loss(theta: np.ndarray, spec: LossSpec,
                            eval_data: LabeledDataset, rho: float) -> float:
    """rho * class-0 mean + (1 - rho) * class-1 mean.

    rho = 1/2 reduces to the balanced loss. The endpoints 0 and 1 are
    accepted (degenerate single-class weighting).
    """
    if not 0.0 <= rho <= 1.0:
        raise InvalidRho(f"rho must lie in [0, 1], got {rho}")
    m0, m1 = _class_means(theta, spec, eval_data)
    return rho * m0 + (1.0 - rho) * m1


def balanced_accuracy(model: FittedModel, eval_data: LabeledDataset,
                      threshold: float | None = None) -> float:
    """Mean of true-negative and true-positive rates."""
    if eval_data.n0 == 0 or eval_data.n1 == 0:
        raise MissingClass("balanced accuracy needs both classes")
    pred = predict_label(model, eval_data.features, threshold)
    mask1 = eval_data.labels == 1
    tpr = float(np.mean(pred[mask1] == 1))
    tnr = float(np.mean(pred[~mask1] == 0))
    return 0.5 * tnr + 0.5 * tpr


def threshold_sweep(model: FittedModel, eval_data: LabeledDataset,
                    thresholds) -> list[tuple[float, float]]:
    """(threshold, balanced accuracy) pairs over a custom threshold grid."""
    return [(float(t), balanced_accuracy(model, eval_data, t)) for t in thresholds]


def fit_balanced_erm(data: LabeledDataset, spec: LossSpec,
                     cfg: FitConfig | None = None) -> FittedModel:
    """ERM under per-class weights 1/(2 n0), 1/(2 n1): the balanced-loss fit."""
    if data.n0 == 0 or data.n1 == 0:
        raise MissingClass("balanced fit needs both classes")
    w = np.where(data.labels == 1, 0.5 / data.n1, 0.5 / data.n0)
    return fit_erm(data, spec, cfg, sample_weight=w)


def plug_in_excess_risk(theta_hat: np.ndarray, spec: LossSpec,
                        test_data: LabeledDataset,
                        cfg: FitConfig | None = None) -> float:
    """Balanced-loss gap to the plug-in optimum fitted on the test split.

    Fits theta*_test by minimizing the balanced empirical loss on
    ``test_data`` with the same loss spec, then returns
    L_bal(theta_hat) - L_bal(theta*_test). Nonnegative up to optimizer
    tolerance.
    """
    star = fit_balanced_erm(test_data, spec, cfg)
    return (balanced_empirical_loss(theta_hat, spec, test_data)
            - balanced_empirical_loss(star.theta, spec, test_data))


def metric_record(metric: str, value: float, eval_data: LabeledDataset,
                  seed_record: dict) -> dict:
    """JSON-ready record of one metric evaluation."""
    return {
        "metric": metric,
        "value": float(value),
        "n0_eval": eval_data.n0,
        "n1_eval": eval_data.n1,
        "seed": seed_record,
    }


def evaluate(model: FittedModel, eval_data: LabeledDataset,
             threshold: float | None = None) -> BalancedEval:
    return BalancedEval(
        balanced_loss=balanced_empirical_loss(model.theta, model.loss_spec, eval_data),
        balanced_accuracy=balanced_accuracy(model, eval_data, threshold),
        n0_eval=eval_data.n0,
        n1_eval=eval_data.n1,
    )
