"""Loss families for linear scores, with exact gradients and Hessians.

All losses act on the linear score t = theta'x and a 0/1 label y:

* logistic:         log(1 + exp(t)) - y*t
* squared, raw:     (t - y)^2
* squared, centered (y - 1/2 - t)^2
* hinge:            max(0, 1 - (2y-1)*t)

The logistic value uses the log1p-of-exp form (via logaddexp), so it stays
finite and accurate over the whole float range. The hinge gradient is the
fixed subgradient that is 0 at the kink; hinge has no Hessian.

Intercepts are handled by feature augmentation: when a spec asks for one,
``design_matrix`` appends a constant-1 column and theta gains a final
intercept coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, Unsupported

FAMILIES = ("logistic", "squared", "hinge")
SQUARED_TARGETS = ("raw", "centered")


@dataclass(frozen=True)
class LossSpec:
    family: str = "logistic"
    squared_target: str = "raw"
    fit_intercept: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown loss family {self.family!r}")
        if self.squared_target not in SQUARED_TARGETS:
            raise ValueError(f"unknown squared target {self.squared_target!r}")

    def to_config(self) -> dict:
        return {
            "family": self.family,
            "squared_target": self.squared_target,
            "fit_intercept": self.fit_intercept,
        }

    @staticmethod
    def from_config(cfg: dict) -> "LossSpec":
        return LossSpec(
            family=cfg.get("family", "logistic"),
            squared_target=cfg.get("squared_target", "raw"),
            fit_intercept=bool(cfg.get("fit_intercept", False)),
        )


def sigmoid(t: np.ndarray) -> np.ndarray:
    # tanh form avoids overflow for large |t|
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(t, dtype=np.float64)))


def design_matrix(spec: LossSpec, X: np.ndarray) -> np.ndarray:
    """Feature matrix seen by the optimizer (constant column if intercept)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if spec.fit_intercept:
        return np.hstack([X, np.ones((X.shape[0], 1))])
    return X


def _check_dims(theta: np.ndarray, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    theta = np.asarray(theta, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if theta.ndim != 1 or X.shape[1] != theta.shape[0]:
        raise DimensionMismatch(
            f"theta has length {theta.shape}, feature rows have {X.shape[1]} columns")
    return theta, X


def loss_values(spec: LossSpec, theta: np.ndarray, X: np.ndarray,
                y: np.ndarray) -> np.ndarray:
    """Per-sample loss values for a batch of rows."""
    theta, X = _check_dims(theta, X)
    y = np.asarray(y, dtype=np.float64)
    t = X @ theta
    if spec.family == "logistic":
        return np.logaddexp(0.0, t) - y * t
    if spec.family == "squared":
        target = y if spec.squared_target == "raw" else y - 0.5
        return (t - target) ** 2
    margin = (2.0 * y - 1.0) * t
    return np.maximum(0.0, 1.0 - margin)


def loss_gradients(spec: LossSpec, theta: np.ndarray, X: np.ndarray,
                   y: np.ndarray) -> np.ndarray:
    """Per-sample gradients, shape (n, len(theta))."""
    theta, X = _check_dims(theta, X)
    y = np.asarray(y, dtype=np.float64)
    t = X @ theta
    if spec.family == "logistic":
        coef = sigmoid(t) - y
    elif spec.family == "squared":
        target = y if spec.squared_target == "raw" else y - 0.5
        coef = 2.0 * (t - target)
    else:
        m = 2.0 * y - 1.0
        coef = np.where(1.0 - m * t > 0.0, -m, 0.0)
    return coef[:, None] * X


def mean_hessian(spec: LossSpec, theta: np.ndarray, X: np.ndarray,
                 y: np.ndarray, weights: np.ndarray | None = None) -> np.ndarray:
    """Weighted mean of per-sample Hessians (weights default to 1/n)."""
    theta, X = _check_dims(theta, X)
    n = X.shape[0]
    if weights is None:
        weights = np.full(n, 1.0 / n)
    if spec.family == "logistic":
        s = sigmoid(X @ theta)
        w = weights * s * (1.0 - s)
    elif spec.family == "squared":
        w = 2.0 * weights
    else:
        raise Unsupported("hinge loss has no Hessian")
    return X.T @ (w[:, None] * X)


def loss_value(spec: LossSpec, theta: np.ndarray, x: np.ndarray, y) -> float:
    return float(loss_values(spec, theta, x, np.atleast_1d(y))[0])


def loss_gradient(spec: LossSpec, theta: np.ndarray, x: np.ndarray, y) -> np.ndarray:
    return loss_gradients(spec, theta, x, np.atleast_1d(y))[0]


def loss_hessian(spec: LossSpec, theta: np.ndarray, x: np.ndarray, y) -> np.ndarray:
    """Hessian at a single sample (y only matters through the API shape)."""
    theta, X = _check_dims(theta, x)
    if spec.family == "hinge":
        raise Unsupported("hinge loss has no Hessian")
    return mean_hessian(spec, theta, X, np.atleast_1d(y), weights=np.ones(1))
