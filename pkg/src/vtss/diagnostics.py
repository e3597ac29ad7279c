"""Bias diagnostics: class-asymmetry and generator-mismatch gradients,
the first-order bias vector, bias-canceling synthetic sizes, and the
leading excess-risk terms.

Conventions. phi is the expected-loss gap majority-minus-minority, psi
the gap synthetic-minus-minority; their gradients at a plug-in parameter
are estimated by sample means of per-sample loss gradients. The bias
vector combines them through the effective proportions:

    b = (pi0 - rho) * grad_phi + pi_tilde * grad_psi.

The plug-in parameter is always an explicit argument: the population
quantities live at the unknown balanced optimum, and the caller must
decide what stands in for it (a fitted theta, or a closed form).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (DegenerateDenominator, NotPositiveDefinite,
                         SingularMatrix, TooFewSamples, ZeroPhi,
                         ZeroVectorAngle)
from .losses import LossSpec, design_matrix, loss_gradients, mean_hessian

REGIMES = ("local_symmetry", "local_asymmetry", "inconclusive")

# Regime thresholds in standard-error units: below 3 the measured asymmetry
# is indistinguishable from noise, above 6 it is unambiguous.
_SYMMETRY_SE = 3.0
_ASYMMETRY_SE = 6.0


@dataclass(frozen=True)
class GradientEstimate:
    vector: np.ndarray
    standard_error: np.ndarray
    n_used: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def se_norm(self) -> float:
        return float(np.linalg.norm(self.standard_error))


@dataclass(frozen=True)
class BiasDiagnostics:
    pi0: float
    pi1: float
    pi_tilde: float
    rho: float
    b: np.ndarray
    cos_angle: float | None
    sin_angle: float | None
    norm_phi: float
    norm_psi: float
    regime: str


@dataclass(frozen=True)
class LeadingTerms:
    T1: float
    T3_expected: float
    n_total: int
    hessians_source: str


def _mean_and_se(grads: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    n = grads.shape[0]
    if n < 2:
        raise TooFewSamples("need at least 2 rows per sample set")
    return grads.mean(axis=0), grads.var(axis=0, ddof=1) / n, n


def _gap_gradient(theta, spec, plus_set, plus_label, minus_set, minus_label):
    theta = np.asarray(theta, dtype=np.float64)
    gp = loss_gradients(spec, theta, design_matrix(spec, plus_set),
                        np.full(len(plus_set), plus_label))
    gm = loss_gradients(spec, theta, design_matrix(spec, minus_set),
                        np.full(len(minus_set), minus_label))
    mp, vp, n_p = _mean_and_se(gp)
    mm, vm, n_m = _mean_and_se(gm)
    return GradientEstimate(vector=mp - mm, standard_error=np.sqrt(vp + vm),
                            n_used=n_p + n_m)


def estimate_phi_gradient(theta, spec: LossSpec, majority, minority) -> GradientEstimate:
    """Sample estimate of grad phi: mean gradient over majority rows (label 0)
    minus mean gradient over minority rows (label 1), with per-coordinate
    standard errors sqrt(var0/m0 + var1/m1)."""
    return _gap_gradient(theta, spec, np.asarray(majority), 0,
                         np.asarray(minority), 1)


def estimate_psi_gradient(theta, spec: LossSpec, synthetic, minority) -> GradientEstimate:
    """Sample estimate of grad psi: synthetic rows minus minority rows, both
    evaluated as label-1 losses."""
    return _gap_gradient(theta, spec, np.asarray(synthetic), 1,
                         np.asarray(minority), 1)


def gradient_angle(u: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """(cos, sin) of the angle between two nonzero vectors."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorAngle("angle with a zero vector is undefined")
    cos = float(np.clip(u @ v / (nu * nv), -1.0, 1.0))
    return cos, math.sqrt(max(0.0, 1.0 - cos * cos))


def classify_regime(phi: GradientEstimate) -> str:
    if phi.norm <= _SYMMETRY_SE * phi.se_norm:
        return "local_symmetry"
    if phi.norm >= _ASYMMETRY_SE * phi.se_norm:
        return "local_asymmetry"
    return "inconclusive"


def bias_vector(phi: GradientEstimate, psi: GradientEstimate,
                n0: int, n1: int, n_syn: int, rho: float = 0.5) -> BiasDiagnostics:
    """First-order bias vector at counts (n0, n1, n_syn) and target weight rho.

    The angle fields are None when either gradient is the zero vector (the
    regime is still classified).
    """
    if min(n0, n1, n_syn) < 0 or n0 + n1 + n_syn <= 0:
        raise ValueError("counts must be nonnegative with positive total")
    total = n0 + n1 + n_syn
    pi0, pi1, pit = n0 / total, n1 / total, n_syn / total
    b = (pi0 - rho) * phi.vector + pit * psi.vector
    try:
        cos, sin = gradient_angle(phi.vector, psi.vector)
    except ZeroVectorAngle:
        cos, sin = None, None
    return BiasDiagnostics(pi0=pi0, pi1=pi1, pi_tilde=pit, rho=rho, b=b,
                           cos_angle=cos, sin_angle=sin,
                           norm_phi=phi.norm, norm_psi=psi.norm,
                           regime=classify_regime(phi))


def bias_canceling_size(phi: GradientEstimate, psi: GradientEstimate,
                        n0: int, n1: int) -> float:
    """Synthetic size that zeroes the bias component along grad phi:

        (n0 - n1) / (1 - 2 (|psi|/|phi|) cos(angle(phi, psi))).

    The result may be fractional (caller rounds) or negative (no valid
    cancellation by size alone). A zero psi reduces to naive balancing.
    """
    if phi.norm == 0.0:
        raise ZeroPhi("grad phi is zero; the size formula divides by its norm")
    if psi.norm == 0.0:
        return float(n0 - n1)
    cos, _ = gradient_angle(phi.vector, psi.vector)
    denom = 1.0 - 2.0 * (psi.norm / phi.norm) * cos
    if abs(denom) < 1e-12:
        raise DegenerateDenominator("bias-cancel denominator is zero")
    return float(n0 - n1) / denom


def leading_terms(b: np.ndarray, hessian_R: np.ndarray, jacobian_b: np.ndarray,
                  sigma: np.ndarray, n_total: int,
                  hessians_source: str = "closed_form") -> LeadingTerms:
    """Deterministic and expected-stochastic leading excess-risk terms.

    With H the balanced-risk Hessian at the optimum, A = H + jacobian_b,
    and Sigma the pooled gradient covariance:

        T1          = b' A^-1 H A^-1 b / 2
        E[T3]       = tr(A^-1 H A^-1 Sigma) / (2 n_total)

    The cross term has zero mean and is not reported.
    """
    b = np.asarray(b, dtype=np.float64)
    H = np.asarray(hessian_R, dtype=np.float64)
    A = H + np.asarray(jacobian_b, dtype=np.float64)
    S = np.asarray(sigma, dtype=np.float64)
    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite("hessian_R must be positive definite") from None
    if np.linalg.eigvalsh((S + S.T) / 2.0)[0] < -1e-10 * max(1.0, np.linalg.norm(S)):
        raise NotPositiveDefinite("sigma must be positive semidefinite")
    try:
        Ainv_b = np.linalg.solve(A, b)
        M = np.linalg.solve(A, H @ np.linalg.solve(A, S))
    except np.linalg.LinAlgError:
        raise SingularMatrix("hessian_R + jacobian_b is singular") from None
    T1 = 0.5 * float(Ainv_b @ H @ Ainv_b)
    T3 = float(np.trace(M)) / (2.0 * n_total)
    return LeadingTerms(T1=T1, T3_expected=T3, n_total=int(n_total),
                        hessians_source=hessians_source)


def estimate_gradient_covariances(theta, spec: LossSpec, majority, minority,
                                  synthetic=None):
    """Sample covariances of per-sample loss gradients, plus the count-weighted
    pool (n0 S0 + n1 S1 + ns Ss) / (n0 + n1 + ns).

    Returns (sigma0, sigma1, sigma_syn or None, pooled, (n0, n1, ns)).
    """
    theta = np.asarray(theta, dtype=np.float64)

    def cov_of(rows, label):
        rows = np.asarray(rows)
        if rows.shape[0] < 2:
            raise TooFewSamples("need at least 2 rows per supplied set")
        g = loss_gradients(spec, theta, design_matrix(spec, rows),
                           np.full(len(rows), label))
        return np.cov(g.T, ddof=1).reshape(g.shape[1], g.shape[1]), rows.shape[0]

    s0, n0 = cov_of(majority, 0)
    s1, n1 = cov_of(minority, 1)
    if synthetic is None:
        ss, ns = None, 0
        pooled = (n0 * s0 + n1 * s1) / (n0 + n1)
    else:
        ss, ns = cov_of(synthetic, 1)
        pooled = (n0 * s0 + n1 * s1 + ns * ss) / (n0 + n1 + ns)
    return s0, s1, ss, pooled, (n0, n1, ns)


def empirical_hessians(theta, spec: LossSpec, majority, minority, synthetic=None):
    """Empirical H = balanced-risk Hessian and the gap Hessians (phi, psi).

    Used when no closed form exists; same plug-in convention as the
    gradient estimators.
    """
    theta = np.asarray(theta, dtype=np.float64)

    def mh(rows, label):
        rows = np.asarray(rows)
        X = design_matrix(spec, rows)
        return mean_hessian(spec, theta, X, np.full(len(rows), label))

    H0 = mh(majority, 0)
    H1 = mh(minority, 1)
    H = 0.5 * H0 + 0.5 * H1
    hess_phi = H0 - H1
    hess_psi = None if synthetic is None else mh(synthetic, 1) - H1
    return H, hess_phi, hess_psi


def collinear_delta_size(n0: int, n1: int, s: int, n1_for_log: float) -> float:
    """Synthetic size of the collinear toy construction:

        sqrt(log m) / (sqrt(log m) -+ 2) * (n0 - n1),  s = +-1,

    where m is the sample size entering the mismatch scale (passed
    separately so the toy's asymptotics can be probed at any count).
    """
    if s not in (+1, -1):
        raise ValueError("s must be +1 or -1")
    if n1_for_log <= 1:
        raise DegenerateDenominator("need log(n1_for_log) > 0")
    root = math.sqrt(math.log(n1_for_log))
    denom = root - 2.0 if s == +1 else root + 2.0
    if abs(denom) < 1e-12:
        raise DegenerateDenominator("sqrt(log n1) equals 2; size diverges")
    if s == +1 and denom < 0:
        raise DegenerateDenominator("need log(n1_for_log) > 4 when s = +1")
    return root / denom * (n0 - n1)
