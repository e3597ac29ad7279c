"""Loss families and linear ERM on the two-Gaussian model.

Walks through the basic building blocks: evaluating losses and their
derivatives, fitting by Newton / gradient descent / normal equations, and
checking the fit against the model's closed-form balanced optimum.

Run with:  python demos/01_losses_and_training.py
"""

import numpy as np

from vtss import FitConfig, LossSpec, RngStream, fit_erm, loss_gradient, loss_value
from vtss.sim_models import TwoGaussianModel, gaussian_balanced_risk, gaussian_theta_star

rng = RngStream(seed=7)

print("=== loss values at theta = 0 ===")
x = np.array([1.0, 2.0])
for spec in [LossSpec("logistic"), LossSpec("squared", "raw"),
             LossSpec("squared", "centered"), LossSpec("hinge")]:
    v0 = loss_value(spec, np.zeros(2), x, 0)
    v1 = loss_value(spec, np.zeros(2), x, 1)
    print(f"{spec.family:9s}{'/' + spec.squared_target if spec.family == 'squared' else '':10s}"
          f" loss(y=0) = {v0:.4f}   loss(y=1) = {v1:.4f}")

print("\n=== gradients drive the fit ===")
g = loss_gradient(LossSpec("logistic"), np.zeros(2), x, 1)
print(f"logistic gradient at 0 for (x, y=1): {g}  (= (sigmoid(0) - 1) x)")

print("\n=== ERM on a balanced two-Gaussian sample ===")
model = TwoGaussianModel(mu1=[1.0, 0.0])
data = model.sample(50_000, 50_000, rng.child(0))
star = gaussian_theta_star(model.mu1)
print(f"closed-form balanced optimum: {star}")

for rule in ("closed_form", "newton_backtracking", "gradient_backtracking"):
    fit = fit_erm(data, LossSpec("squared", "raw"),
                  FitConfig(step_rule=rule, max_iters=5000, ridge=0.0))
    gap = np.abs(fit.theta - star).max()
    print(f"{rule:22s} theta = {np.round(fit.theta, 4)}   "
          f"max gap to optimum = {gap:.4f}")

print("\n=== risk landscape ===")
for theta in [np.zeros(2), star, 2 * star]:
    print(f"balanced risk at {np.round(theta, 3)}: "
          f"{gaussian_balanced_risk(theta, model.mu1):.4f}")
print(f"(the optimum achieves 1/(mu^2 + 2) = {1 / 3:.4f})")
