import itertools

import numpy as np
import pytest
from scipy.optimize import minimize

from vtss.data import LabeledDataset
from vtss.exceptions import SeparableWithoutRidge, SingularNormalEquations
from vtss.losses import LossSpec, design_matrix
from vtss.rng import RngStream
from vtss.sim_models import TwoGaussianModel, gaussian_theta_star
from vtss.trainer import (FitConfig, decision_score, erm_objective, fit_erm,
                          predict_label)

SQ_RAW = LossSpec("squared", "raw")
LOGISTIC = LossSpec("logistic")


def _objective(spec, theta, data, ridge):
    X = design_matrix(spec, data.features)
    w = np.full(data.n, 1.0 / data.n)
    return erm_objective(spec, theta, X, data.labels, ridge, w)


def test_balanced_gaussian_recovers_closed_form_optimum():
    model = TwoGaussianModel(mu1=[1.0, 0.0])
    data = model.sample(200_000, 200_000, RngStream(20))
    fit = fit_erm(data, SQ_RAW, FitConfig(step_rule="closed_form"))
    star = gaussian_theta_star([1.0, 0.0])
    assert np.allclose(star, [1.0 / 3.0, 0.0], atol=1e-12)
    assert np.abs(fit.theta - star).max() < 2e-2


def test_all_zero_targets_give_zero_theta():
    gen = RngStream(3).generator()
    X = gen.standard_normal((40, 3))
    X -= X.mean(axis=0)
    data = LabeledDataset(X, np.zeros(40, dtype=int))
    fit = fit_erm(data, SQ_RAW, FitConfig(step_rule="closed_form", ridge=1e-6))
    assert np.allclose(fit.theta, 0.0, atol=1e-12)


def test_logistic_matches_grid_polish_oracle():
    # independent oracle: coarse grid then derivative-free polish of the
    # raw objective written out inline
    X = np.array([[1.0, 2.0], [2.0, 1.0], [-1.0, -1.5],
                  [-2.0, 0.5], [0.5, -2.0], [1.5, 1.5]])
    y = np.array([1, 1, 0, 0, 0, 1])
    ridge = 1e-3
    data = LabeledDataset(X, y)

    def raw_objective(theta):
        t = X @ theta
        return float(np.mean(np.logaddexp(0.0, t) - y * t) + ridge * theta @ theta)

    grid = np.linspace(-3.0, 3.0, 13)
    best = min((np.array(p) for p in itertools.product(grid, grid)),
               key=raw_objective)
    polished = minimize(raw_objective, best, method="Nelder-Mead",
                        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 5000})
    fit = fit_erm(data, LOGISTIC, FitConfig(ridge=ridge))
    assert fit.converged
    assert abs(raw_objective(fit.theta) - polished.fun) <= 1e-5


def test_decision_score_examples():
    model = fit_erm(
        LabeledDataset(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0, 1])),
        SQ_RAW, FitConfig(step_rule="closed_form"))
    zero = type(model)(np.zeros(2), SQ_RAW, True, 0.0)
    assert decision_score(zero, np.array([7.0, -2.0])) == 0.0
    unit = type(model)(np.array([1.0, 0.0]), SQ_RAW, True, 0.0)
    assert decision_score(unit, np.array([3.0, 7.0])) == 3.0


def test_score_orders_class_means_on_separated_fit():
    model = TwoGaussianModel(mu1=[3.0, 0.0])
    data = model.sample(500, 500, RngStream(8))
    fit = fit_erm(data, SQ_RAW, FitConfig(step_rule="closed_form"))
    m0 = data.features[data.labels == 0].mean(axis=0)
    m1 = data.features[data.labels == 1].mean(axis=0)
    assert decision_score(fit, m0) < decision_score(fit, m1)


def test_predict_label_defaults_and_ties():
    zero = fit_erm(
        LabeledDataset(np.array([[1.0], [-1.0]]), np.array([1, 0])),
        LOGISTIC, FitConfig(ridge=1.0))
    tie = type(zero)(np.zeros(1), LOGISTIC, True, 0.0)
    assert predict_label(tie, np.array([4.0]), threshold=0.0) == 1  # tie -> minority
    raw = type(zero)(np.array([1.0]), SQ_RAW, True, 0.0)
    assert predict_label(raw, np.array([0.9])) == 1   # 0.9 >= 0.5
    assert predict_label(raw, np.array([0.4])) == 0
    assert predict_label(raw, np.array([100.0]), threshold=np.inf) == 0


def test_descent_from_zero_for_convex_objectives():
    data = TwoGaussianModel(mu1=[1.0, 0.5]).sample(60, 40, RngStream(9))
    for spec, rule in [(LOGISTIC, "newton_backtracking"),
                       (SQ_RAW, "newton_backtracking"),
                       (LossSpec("hinge"), "newton_backtracking")]:
        cfg = FitConfig(ridge=1e-4, step_rule=rule)
        fit = fit_erm(data, spec, cfg)
        assert _objective(spec, fit.theta, data, 1e-4) <= \
            _objective(spec, np.zeros(2), data, 1e-4) + 1e-12


def test_newton_and_gradient_paths_agree():
    gen = RngStream(17).generator()
    for trial in range(3):
        X = gen.standard_normal((30, 2))
        y = (gen.random(30) < 0.5).astype(int)
        data = LabeledDataset(X, y)
        newton = fit_erm(data, LOGISTIC, FitConfig(ridge=1e-6))
        grad = fit_erm(data, LOGISTIC,
                       FitConfig(ridge=1e-6, step_rule="gradient_backtracking",
                                 max_iters=20000))
        fn = _objective(LOGISTIC, newton.theta, data, 1e-6)
        fg = _objective(LOGISTIC, grad.theta, data, 1e-6)
        assert abs(fn - fg) <= 1e-8


def test_closed_form_stationarity_residual():
    gen = RngStream(21).generator()
    X = gen.standard_normal((50, 4))
    y = (gen.random(50) < 0.3).astype(int)
    data = LabeledDataset(X, y)
    fit = fit_erm(data, SQ_RAW, FitConfig(step_rule="closed_form"))
    A = X.T @ X / 50
    rhs = X.T @ y / 50
    resid = np.linalg.norm(A @ fit.theta - rhs)
    assert resid <= 1e-10 * (1.0 + np.linalg.norm(rhs))


def test_separable_logistic_without_ridge_raises():
    X = np.array([[1.0], [2.0], [-1.0], [-2.0]])
    y = np.array([1, 1, 0, 0])
    with pytest.raises(SeparableWithoutRidge):
        fit_erm(LabeledDataset(X, y), LOGISTIC,
                FitConfig(ridge=0.0, max_iters=5000))


def test_singular_normal_equations():
    X = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])  # rank 1
    y = np.array([0, 1, 0])
    with pytest.raises(SingularNormalEquations):
        fit_erm(LabeledDataset(X, y), SQ_RAW,
                FitConfig(step_rule="closed_form", ridge=0.0))


def test_hinge_fit_separates_well_separated_classes():
    # boundary sits between the class means, so the fit needs an intercept
    data = TwoGaussianModel(mu1=[4.0, 0.0]).sample(200, 200, RngStream(30))
    spec = LossSpec("hinge", fit_intercept=True)
    fit = fit_erm(data, spec, FitConfig(ridge=1e-3, max_iters=2000))
    assert fit.theta.shape == (3,)
    pred = predict_label(fit, data.features)
    acc = float(np.mean(pred == data.labels))
    assert acc > 0.95
