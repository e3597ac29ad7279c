"""End-to-end synthetic-size tuning on an imbalanced sample.

Fits the cross-validation curve over the multiplier grid, selects gamma,
and compares the tuned model against naive balancing (gamma = 1) and the
raw imbalanced fit (gamma = 0) on a large held-out balanced test set.

Run with:  python demos/04_vtss_tuning.py
"""

import numpy as np

from vtss import (FitConfig, GeneratorSpec, LossSpec, RngStream, VtssConfig,
                  balanced_empirical_loss, fit_erm, vtss_tune)
from vtss.generators import augment, generate
from vtss.data import split_by_class
from vtss.sim_models import TwoGaussianModel

rng = RngStream(seed=33)

# consistent but imperfect generator: synthetic mean shrunk toward zero
model = TwoGaussianModel(mu1=[1.0, 0.0])
generator_model = TwoGaussianModel(mu1=[0.7, 0.0], name="imperfect")
train = model.sample(4000, 200, rng.child(0))
test = model.sample(50_000, 50_000, rng.child(1))

loss = LossSpec("squared", "raw")
cfg = VtssConfig(
    gamma_grid=tuple(np.linspace(0.0, 2.0, 21)),
    K=5,
    generator=GeneratorSpec("oracle", model_handle=generator_model),
    loss=loss,
    fit=FitConfig(step_rule="closed_form"),
)

result = vtss_tune(train, cfg, rng.child(2))
print(f"selected gamma* = {result.gamma_star:.2f} "
      f"(n_syn* = {result.n_syn_star} rows)\n")

print("cross-validation curve (gamma, mean balanced loss, stderr):")
for gamma, mean, se in result.cv_curve:
    marker = "  <-- selected" if gamma == result.gamma_star else ""
    print(f"  {gamma:4.1f}  {mean:.4f} +- {se:.4f}{marker}")

print("\nheld-out balanced test loss:")
minority = split_by_class(train).minority
for gamma in (0.0, 1.0, result.gamma_star):
    n_syn = int(round(gamma * (train.n0 - train.n1)))
    batch = generate(cfg.generator, minority, train, n_syn, rng.child(3))
    fit = fit_erm(augment(train, batch), loss, cfg.fit)
    test_loss = balanced_empirical_loss(fit.theta, loss, test)
    label = {0.0: "raw fit", 1.0: "naive balancing"}.get(gamma, "VTSS choice")
    print(f"  gamma = {gamma:4.1f} ({label:15s}): {test_loss:.4f}")
