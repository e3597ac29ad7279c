"""Linear ERM trainers.

Minimizes  sum_i w_i * loss(theta; x_i, y_i) + ridge * ||theta||^2  over a
linear parameter. Weights default to uniform 1/n; the balanced plug-in fit
in :mod:`vtss.metrics` passes per-class weights instead.

Step rules: Newton with Armijo backtracking (default; d is small in every
use here), plain gradient descent with backtracking, and the exact normal
equations for squared loss. Hinge is nonsmooth and is always trained by
averaged subgradient descent regardless of the configured rule.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset
from .exceptions import (DimensionMismatch, SeparableWithoutRidge,
                         SingularNormalEquations)
from .losses import (LossSpec, design_matrix, loss_gradients, loss_values,
                     mean_hessian)

logger = logging.getLogger(__name__)

STEP_RULES = ("newton_backtracking", "gradient_backtracking", "closed_form")

_ARMIJO_C = 1e-4
_DIVERGENCE_NORM = 1e6


@dataclass(frozen=True)
class FitConfig:
    max_iters: int = 500
    grad_tol: float = 1e-8
    ridge: float | None = None  # None = family default (1e-8 logistic, else 0)
    step_rule: str = "newton_backtracking"

    def __post_init__(self):
        if self.step_rule not in STEP_RULES:
            raise ValueError(f"unknown step rule {self.step_rule!r}")
        if self.max_iters < 1 or self.grad_tol <= 0:
            raise ValueError("max_iters must be >= 1 and grad_tol > 0")
        if self.ridge is not None and self.ridge < 0:
            raise ValueError("ridge must be nonnegative")

    def resolved_ridge(self, spec: LossSpec) -> float:
        if self.ridge is not None:
            return float(self.ridge)
        return 1e-8 if spec.family == "logistic" else 0.0


@dataclass(frozen=True)
class FittedModel:
    theta: np.ndarray
    loss_spec: LossSpec
    converged: bool
    final_grad_norm: float


def erm_objective(spec: LossSpec, theta: np.ndarray, X: np.ndarray,
                  y: np.ndarray, ridge: float,
                  weights: np.ndarray) -> float:
    return float(weights @ loss_values(spec, theta, X, y) + ridge * theta @ theta)


def _erm_gradient(spec, theta, X, y, ridge, weights):
    g = loss_gradients(spec, theta, X, y).T @ weights
    return g + 2.0 * ridge * theta


def _normalized_weights(n: int, sample_weight) -> np.ndarray:
    if sample_weight is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(sample_weight, dtype=np.float64)
    if w.shape != (n,):
        raise DimensionMismatch(f"sample_weight shape {w.shape} for {n} rows")
    if (w < 0).any() or w.sum() <= 0:
        raise ValueError("sample weights must be nonnegative with positive sum")
    return w / w.sum()


def _closed_form_squared(spec, X, y, ridge, weights, uniform):
    target = y.astype(np.float64) if spec.squared_target == "raw" else y - 0.5
    if uniform:
        n = X.shape[0]
        A = X.T @ X / n
        rhs = X.T @ target / n
    else:
        XW = X * weights[:, None]
        A = X.T @ XW
        rhs = XW.T @ target
    A = A + ridge * np.eye(X.shape[1])
    evals = np.linalg.eigvalsh(A)
    if evals[0] <= max(evals[-1], 1.0) * 1e-12:
        raise SingularNormalEquations(
            "rank-deficient design with ridge = 0; add ridge or drop columns")
    theta = np.linalg.solve(A, rhs)
    # objective gradient is 2(A theta - rhs); no second pass over the rows
    gnorm = 2.0 * float(np.linalg.norm(A @ theta - rhs))
    return theta, gnorm


def _backtrack(f, theta, direction, g, f0):
    slope = float(g @ direction)
    step = 1.0
    for _ in range(60):
        cand = theta + step * direction
        if f(cand) <= f0 + _ARMIJO_C * step * slope:
            return cand
        step *= 0.5
    return None


def _check_not_separable(spec, theta, X, y, ridge, weights, f_theta):
    # With ridge 0 on separable data the logistic objective keeps improving
    # along the current direction forever; doubling theta detects that
    # regardless of feature scale, where a raw norm check would not.
    if spec.family != "logistic" or ridge != 0.0:
        return
    if np.linalg.norm(theta) > 0 and \
            erm_objective(spec, 2.0 * theta, X, y, ridge, weights) < f_theta - 1e-15:
        raise SeparableWithoutRidge(
            "logistic ERM has no finite minimizer on separable data; set ridge > 0")


def _fit_smooth(spec, X, y, ridge, weights, cfg):
    d = X.shape[1]
    theta = np.zeros(d)
    use_newton = cfg.step_rule == "newton_backtracking"

    def f(th):
        return erm_objective(spec, th, X, y, ridge, weights)

    g = _erm_gradient(spec, theta, X, y, ridge, weights)
    for _ in range(cfg.max_iters):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= cfg.grad_tol:
            break
        if spec.family == "logistic" and ridge == 0.0 \
                and np.linalg.norm(theta) > _DIVERGENCE_NORM:
            raise SeparableWithoutRidge(
                "logistic ERM diverging on (quasi-)separable data; set ridge > 0")
        direction = None
        if use_newton:
            H = mean_hessian(spec, theta, X, y, weights) + 2.0 * ridge * np.eye(d)
            try:
                cand = np.linalg.solve(H, -g)
                if cand @ g < 0:  # keep only descent directions
                    direction = cand
            except np.linalg.LinAlgError:
                pass
        if direction is None:
            if use_newton:
                logger.debug("hessian step rejected, taking a gradient step")
            direction = -g
        nxt = _backtrack(f, theta, direction, g, f(theta))
        if nxt is None:
            break
        theta = nxt
        g = _erm_gradient(spec, theta, X, y, ridge, weights)
    gnorm = float(np.linalg.norm(g))
    converged = gnorm <= cfg.grad_tol
    if converged:
        _check_not_separable(spec, theta, X, y, ridge, weights, f(theta))
    return theta, converged, gnorm


def _fit_hinge(spec, X, y, ridge, weights, cfg):
    # Subgradient descent with O(1/sqrt(t)) steps. The objective is
    # nonsmooth, so iterates oscillate; we keep the best iterate seen and
    # also try the tail average, returning whichever scores lower. Starting
    # from zero guarantees the descent property relative to theta = 0.
    d = X.shape[1]
    theta = np.zeros(d)
    scale = float(np.mean(np.linalg.norm(X, axis=1))) + 2.0 * ridge + 1e-12

    def f(th):
        return erm_objective(spec, th, X, y, ridge, weights)

    best, best_f = theta.copy(), f(theta)
    avg = np.zeros(d)
    n_avg = 0
    for t in range(cfg.max_iters):
        g = _erm_gradient(spec, theta, X, y, ridge, weights)
        theta = theta - g / (scale * math.sqrt(t + 1.0))
        ft = f(theta)
        if ft < best_f:
            best, best_f = theta.copy(), ft
        if t >= cfg.max_iters // 2:
            avg += theta
            n_avg += 1
    tail = avg / max(n_avg, 1)
    if f(tail) < best_f:
        best = tail
    gnorm = float(np.linalg.norm(_erm_gradient(spec, best, X, y, ridge, weights)))
    return best, gnorm <= cfg.grad_tol, gnorm


def fit_erm(train: LabeledDataset, spec: LossSpec,
            cfg: FitConfig | None = None,
            sample_weight=None) -> FittedModel:
    """Minimize the (weighted) empirical risk of ``spec`` over ``train``.

    Raises:
        SeparableWithoutRidge: logistic with ridge 0 on separable data
            (including single-class data, where divergence is certain).
        SingularNormalEquations: closed-form squared fit with ridge 0 on a
            rank-deficient design.
    """
    cfg = cfg or FitConfig()
    if train.n == 0:
        raise DimensionMismatch("training set is empty")
    X = design_matrix(spec, train.features)
    y = train.labels
    ridge = cfg.resolved_ridge(spec)
    weights = _normalized_weights(train.n, sample_weight)

    if spec.family == "logistic" and ridge == 0.0 and (train.n0 == 0 or train.n1 == 0):
        raise SeparableWithoutRidge(
            "single-class logistic ERM has no minimizer with ridge = 0")

    if cfg.step_rule == "closed_form":
        if spec.family != "squared":
            raise ValueError("closed_form step rule is only valid for squared loss")
        theta, gnorm = _closed_form_squared(spec, X, y, ridge, weights,
                                            uniform=sample_weight is None)
        return FittedModel(theta, spec, True, gnorm)

    if spec.family == "hinge":
        theta, converged, gnorm = _fit_hinge(spec, X, y, ridge, weights, cfg)
    else:
        theta, converged, gnorm = _fit_smooth(spec, X, y, ridge, weights, cfg)
    return FittedModel(theta, spec, converged, gnorm)


def decision_score(model: FittedModel, x: np.ndarray):
    """Linear score theta'x (plus intercept if fitted)."""
    X = design_matrix(model.loss_spec, x)
    if X.shape[1] != model.theta.shape[0]:
        raise DimensionMismatch(
            f"model has {model.theta.shape[0]} coefficients, rows have {X.shape[1]}")
    s = X @ model.theta
    return float(s[0]) if np.ndim(x) == 1 else s


def default_threshold(spec: LossSpec) -> float:
    """Score threshold equivalent to 'probability 1/2' for each family."""
    if spec.family == "squared" and spec.squared_target == "raw":
        return 0.5
    return 0.0


def predict_label(model: FittedModel, x: np.ndarray, threshold: float | None = None):
    """1 iff the decision score is >= threshold (ties go to the minority)."""
    if threshold is None:
        threshold = default_threshold(model.loss_spec)
    s = decision_score(model, x)
    if np.ndim(x) == 1:
        return int(s >= threshold)
    return (s >= threshold).astype(np.int64)
