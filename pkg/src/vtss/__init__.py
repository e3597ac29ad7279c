"""Synthetic minority augmentation for imbalanced binary classification.

The package covers the full pipeline: loss families with exact derivatives
(:mod:`vtss.losses`), linear ERM trainers (:mod:`vtss.trainer`), balanced
evaluation metrics (:mod:`vtss.metrics`), synthetic minority generators
(:mod:`vtss.generators`), bias diagnostics (:mod:`vtss.diagnostics`),
validation-tuned synthetic size selection (:mod:`vtss.tuning`), simulation
models with closed-form optima (:mod:`vtss.sim_models`), and seeded
experiment runners (:mod:`vtss.experiments`). The ``vtss`` console script
exposes all of it.
"""

__version__ = "0.1.0"

from .data import LabeledDataset, load_csv, save_csv, split_by_class, stratified_kfold
from .diagnostics import (bias_canceling_size, bias_vector,
                          estimate_phi_gradient, estimate_psi_gradient,
                          leading_terms)
from .generators import GeneratorSpec, SyntheticBatch, augment, generate
from .losses import LossSpec, loss_gradient, loss_hessian, loss_value
from .metrics import (balanced_accuracy, balanced_empirical_loss,
                      plug_in_excess_risk, weighted_empirical_loss)
from .rng import RngStream, derive_stream
from .trainer import FitConfig, FittedModel, decision_score, fit_erm, predict_label
from .tuning import VtssConfig, VtssResult, cv_curve, vtss_tune

__all__ = [
    "__version__",
    "LabeledDataset", "load_csv", "save_csv", "split_by_class", "stratified_kfold",
    "LossSpec", "loss_value", "loss_gradient", "loss_hessian",
    "FitConfig", "FittedModel", "fit_erm", "decision_score", "predict_label",
    "balanced_empirical_loss", "weighted_empirical_loss", "balanced_accuracy",
    "plug_in_excess_risk",
    "GeneratorSpec", "SyntheticBatch", "generate", "augment",
    "bias_vector", "bias_canceling_size", "estimate_phi_gradient",
    "estimate_psi_gradient", "leading_terms",
    "VtssConfig", "VtssResult", "vtss_tune", "cv_curve",
    "RngStream", "derive_stream",
]
