import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vtss.diagnostics import (GradientEstimate,
                              bias_canceling_size, bias_vector,
                              classify_regime, collinear_delta_size,
                              empirical_hessians,
                              estimate_gradient_covariances,
                              estimate_phi_gradient, estimate_psi_gradient,
                              gradient_angle, leading_terms)
from vtss.exceptions import (DegenerateDenominator, NotPositiveDefinite,
                             TooFewSamples, ZeroPhi, ZeroVectorAngle)
from vtss.generators import GeneratorSpec, generate
from vtss.losses import LossSpec
from vtss.rng import RngStream
from vtss.sim_models import (MeanShiftModel, TwoGaussianModel,
                             gaussian_balanced_risk, gaussian_closed_forms,
                             gaussian_theta_star, mean_shift_theta_star)

SQ_RAW = LossSpec("squared", "raw")
SQ_CEN = LossSpec("squared", "centered")


def estimate(vector, se=0.0):
    vector = np.asarray(vector, dtype=float)
    return GradientEstimate(vector=vector,
                            standard_error=np.full_like(vector, se), n_used=100)


# -- gradient estimators --------------------------------------------------------

def test_phi_gradient_hand_expansion():
    rows = np.array([[1.0, 0.0], [0.0, 2.0], [2.0, 2.0]])
    est = estimate_phi_gradient(np.zeros(2), SQ_RAW, rows, rows)
    # identical sets: class-0 gradients vanish at theta=0, class-1 give -2x
    assert np.allclose(est.vector, 2.0 * rows.mean(axis=0))


def test_psi_gradient_identical_sets_exactly_zero():
    rows = RngStream(1).generator().standard_normal((50, 3))
    est = estimate_psi_gradient(np.array([0.3, -0.2, 0.1]), SQ_RAW, rows, rows)
    assert np.array_equal(est.vector, np.zeros(3))


def test_phi_gradient_two_gaussian_closed_form():
    model = TwoGaussianModel(mu1=[1.0, 0.0])
    star = gaussian_theta_star([1.0, 0.0])
    data = model.sample(1_000_000, 1_000_000, RngStream(90))
    maj = data.features[data.labels == 0]
    mino = data.features[data.labels == 1]
    est = estimate_phi_gradient(star, SQ_RAW, maj, mino)
    assert np.linalg.norm(est.vector - [4.0 / 3.0, 0.0]) <= 3 * est.se_norm


def test_psi_gradient_two_gaussian_closed_form():
    model = TwoGaussianModel(mu1=[1.0, 0.0], mu_syn=[0.5, 0.0])
    star = gaussian_theta_star([1.0, 0.0])
    mino = model.sample_minority(1_000_000, RngStream(91))
    syn = model.biased_generator_model().sample_minority(1_000_000, RngStream(92))
    est = estimate_psi_gradient(star, SQ_RAW, syn, mino)
    assert np.linalg.norm(est.vector - [0.5, 0.0]) <= 3 * est.se_norm


def test_phi_gradient_mean_shift_statistically_zero():
    model = MeanShiftModel(mu=np.array([1.0] + [0.0] * 19), noise_kind="rademacher")
    star = mean_shift_theta_star(model)
    maj = model.sample_majority(100_000, RngStream(93))
    mino = model.sample_minority(100_000, RngStream(94))
    est = estimate_phi_gradient(star, SQ_CEN, maj, mino)
    assert est.norm <= 3 * est.se_norm
    assert classify_regime(est) == "local_symmetry"


def test_too_few_samples():
    with pytest.raises(TooFewSamples):
        estimate_phi_gradient(np.zeros(1), SQ_RAW, np.array([[1.0]]),
                              np.array([[1.0], [2.0]]))


# -- bias vector ------------------------------------------------------------------

def test_bias_reduces_to_psi_under_symmetry():
    phi = estimate([0.0, 0.0], se=0.1)
    psi = estimate([0.5, 0.0])
    diag = bias_vector(phi, psi, n0=2000, n1=100, n_syn=1900, rho=0.5)
    assert np.allclose(diag.b, diag.pi_tilde * psi.vector)
    assert diag.cos_angle is None and diag.sin_angle is None


def test_bias_zero_at_balanced_proportions_with_perfect_generator():
    phi = estimate([4.0 / 3.0, 0.0], se=1e-6)
    psi = estimate([0.0, 0.0])
    diag = bias_vector(phi, psi, n0=2000, n1=100, n_syn=1900, rho=0.5)
    assert diag.pi0 == pytest.approx(0.5)
    assert np.array_equal(diag.b, np.zeros(2))


def test_bias_arithmetic_example():
    phi = estimate([4.0 / 3.0, 0.0], se=1e-9)
    psi = estimate([0.5, 0.0])
    diag = bias_vector(phi, psi, n0=2000, n1=100, n_syn=1900, rho=0.5)
    assert np.allclose(diag.b, [0.2375, 0.0], atol=1e-12)
    assert diag.pi_tilde == pytest.approx(0.475)
    assert diag.regime == "local_asymmetry"
    assert diag.cos_angle == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 5000), st.integers(1, 5000), st.integers(0, 5000),
       st.floats(0.1, 0.9))
def test_bias_identity_property(n0, n1, n_syn, rho):
    gen = np.random.default_rng(n0 * 31 + n1 * 7 + n_syn)
    phi = estimate(gen.standard_normal(3))
    psi = estimate(gen.standard_normal(3))
    diag = bias_vector(phi, psi, n0, n1, n_syn, rho)
    total = n0 + n1 + n_syn
    expected = (n0 / total - rho) * phi.vector + (n_syn / total) * psi.vector
    assert np.abs(diag.b - expected).max() <= 1e-12
    if diag.cos_angle is not None:
        assert diag.sin_angle ** 2 + diag.cos_angle ** 2 == pytest.approx(1.0, abs=1e-12)


# -- bias-canceling size -----------------------------------------------------------

def test_cancel_size_zero_psi_recovers_naive():
    phi = estimate([4.0 / 3.0, 0.0])
    psi = estimate([0.0, 0.0])
    assert bias_canceling_size(phi, psi, 2000, 100) == 1900.0


def test_cancel_size_collinear_multiplier_four():
    phi = estimate([4.0 / 3.0, 0.0])
    psi = estimate([0.5, 0.0])
    assert bias_canceling_size(phi, psi, 2000, 100) == pytest.approx(4 * 1900)


def test_cancel_size_orthogonal_leaves_residual():
    phi = estimate([4.0 / 3.0, 0.0])
    psi = estimate([0.0, -4.0 / 3.0])
    size = bias_canceling_size(phi, psi, 2000, 100)
    assert size == pytest.approx(1900.0)  # cos = 0
    diag = bias_vector(phi, psi, 2000, 100, int(size), rho=0.5)
    assert np.linalg.norm(diag.b) > 0.1  # orthogonal part cannot be canceled


def test_cancel_size_plugged_back_zeroes_aligned_component():
    phi = estimate([4.0 / 3.0, 0.0])
    psi = estimate([0.5, 0.0])
    size = bias_canceling_size(phi, psi, 2000, 100)
    diag = bias_vector(phi, psi, 2000, 100, size, rho=0.5)
    aligned = abs(diag.b @ phi.vector) / np.linalg.norm(phi.vector)
    assert aligned <= 1e-9 * np.linalg.norm(phi.vector)


def test_cancel_size_empirical_two_gaussian():
    model = TwoGaussianModel(mu1=[1.0, 0.0], mu_syn=[0.5, 0.0])
    star = gaussian_theta_star([1.0, 0.0])
    n = 100_000
    maj = RngStream(95).generator().standard_normal((n, 2))
    mino = model.sample_minority(n, RngStream(96))
    syn = model.biased_generator_model().sample_minority(n, RngStream(97))
    phi = estimate_phi_gradient(star, SQ_RAW, maj, mino)
    psi = estimate_psi_gradient(star, SQ_RAW, syn, mino)
    ratio = bias_canceling_size(phi, psi, 2000, 100) / 1900.0
    assert 3.5 <= ratio <= 4.5


def test_cancel_size_errors():
    with pytest.raises(ZeroPhi):
        bias_canceling_size(estimate([0.0]), estimate([1.0]), 10, 5)
    phi = estimate([1.0, 0.0])
    psi = estimate([0.5, 0.0])  # 2 * 0.5 * cos(0) = 1 exactly
    with pytest.raises(DegenerateDenominator):
        bias_canceling_size(phi, psi, 10, 5)
    with pytest.raises(ZeroVectorAngle):
        gradient_angle(np.zeros(2), np.ones(2))


# -- leading terms ------------------------------------------------------------------

def test_leading_terms_zero_bias():
    lt = leading_terms(np.zeros(2), np.eye(2), np.zeros((2, 2)), np.eye(2), 100)
    assert lt.T1 == 0.0


def test_leading_terms_identity_algebra():
    b = np.array([0.3, -0.4])
    lt = leading_terms(b, np.eye(2), np.zeros((2, 2)), np.eye(2), 100)
    assert lt.T1 == pytest.approx(0.5 * 0.25)
    assert lt.T3_expected == pytest.approx(2.0 / 200.0)


def test_leading_terms_errors():
    with pytest.raises(NotPositiveDefinite):
        leading_terms(np.ones(2), -np.eye(2), np.zeros((2, 2)), np.eye(2), 10)
    with pytest.raises(NotPositiveDefinite):
        leading_terms(np.ones(2), np.eye(2), np.zeros((2, 2)), -np.eye(2), 10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_leading_terms_orthogonal_invariance(seed):
    gen = np.random.default_rng(seed)
    d = 3
    b = gen.standard_normal(d)
    M = gen.standard_normal((d, d))
    H = M @ M.T + np.eye(d)
    J = 0.1 * gen.standard_normal((d, d))
    Q, _ = np.linalg.qr(gen.standard_normal((d, d)))
    lt = leading_terms(b, H, J, np.eye(d), 50)
    lt_rot = leading_terms(Q @ b, Q @ H @ Q.T, Q @ J @ Q.T, np.eye(d), 50)
    assert lt_rot.T1 == pytest.approx(lt.T1, rel=1e-9)


def _bias_at_size(forms, n0, n1, n_syn):
    total = n0 + n1 + n_syn
    pi0, pit = n0 / total, n_syn / total
    return (pi0 - 0.5) * forms.grad_phi_at_star + pit * forms.grad_psi_at_star


def test_leading_term_matches_population_gap_near_cancel_point():
    # T1 vs the exact risk gap R(theta_tilde) - R(theta_star), 20 synthetic
    # sizes around the cancel point, all with |b| <= 0.05
    mu1, mus = [1.0, 0.0], [0.5, 0.0]
    n0, n1 = 2000, 100
    cancel = 4 * (n0 - n1)
    checked = 0
    for eps in np.linspace(-0.28, 0.28, 21):
        if eps == 0.0:
            continue
        n_syn = int(round(cancel * (1.0 + eps)))
        total = n0 + n1 + n_syn
        forms = gaussian_closed_forms(mu1, mus, pi1=n1 / total, pi_tilde=n_syn / total)
        b = _bias_at_size(forms, n0, n1, n_syn)
        assert np.linalg.norm(b) <= 0.05
        jac = (n0 / total - 0.5) * forms.hessian_phi + \
            (n_syn / total) * forms.hessian_psi
        lt = leading_terms(b, forms.hessian_R, jac, np.eye(2), total)
        gap = gaussian_balanced_risk(forms.theta_tilde, mu1) - \
            gaussian_balanced_risk(forms.theta_star, mu1)
        assert lt.T1 == pytest.approx(gap, rel=0.20)
        checked += 1
    assert checked == 20


# -- gradient covariances -------------------------------------------------------------

def test_covariances_identical_samples_zero():
    rows = np.tile([1.0, 2.0], (5, 1))
    s0, s1, ss, pooled, counts = estimate_gradient_covariances(
        np.array([0.1, 0.2]), SQ_RAW, rows, rows, rows)
    for m in (s0, s1, ss, pooled):
        assert np.allclose(m, 0.0)
    assert counts == (5, 5, 5)


def test_pooled_formula_without_synthetic():
    gen = RngStream(98).generator()
    maj = gen.standard_normal((40, 2))
    mino = gen.standard_normal((10, 2)) + 1.0
    s0, s1, ss, pooled, counts = estimate_gradient_covariances(
        np.array([0.3, -0.1]), SQ_RAW, maj, mino)
    assert ss is None and counts == (40, 10, 0)
    assert np.allclose(pooled, (40 * s0 + 10 * s1) / 50)


def test_majority_covariance_matches_closed_form_oracle():
    # squared loss, x ~ N(0, I): Cov(2(theta'x)x) = 4|theta|^2 I + 4 theta theta'
    star = gaussian_theta_star([1.0, 0.0])
    maj = RngStream(99).generator().standard_normal((1_000_000, 2))
    mino = TwoGaussianModel(mu1=[1.0, 0.0]).sample_minority(1000, RngStream(100))
    s0, _, _, _, _ = estimate_gradient_covariances(star, SQ_RAW, maj, mino)
    oracle = 4.0 * (star @ star) * np.eye(2) + 4.0 * np.outer(star, star)
    assert np.linalg.norm(s0 - oracle) / np.linalg.norm(oracle) < 0.02


def test_empirical_hessians_squared_loss():
    gen = RngStream(101).generator()
    maj = gen.standard_normal((2000, 2))
    mino = gen.standard_normal((2000, 2)) + [1.0, 0.0]
    H, hphi, hpsi = empirical_hessians(np.zeros(2), SQ_RAW, maj, mino, mino)
    # H0 = 2I, H1 = 2(I + mu mu'): balanced mean is 2I + mu mu'
    assert np.allclose(H, np.diag([3.0, 2.0]), atol=0.15)
    assert np.allclose(hphi, np.diag([-2.0, 0.0]), atol=0.3)
    assert np.allclose(hpsi, 0.0)


# -- generator-mismatch detectability ---------------------------------------------------

def test_mean_shift_generator_mismatch_detectable():
    model = MeanShiftModel(mu=np.array([1.0] + [0.0] * 19), noise_kind="uniform_cube")
    star = mean_shift_theta_star(model)
    base = model.sample_minority(500, RngStream(102))
    big_min = model.sample_minority(100_000, RngStream(103))

    oracle = generate(GeneratorSpec("oracle", model_handle=model),
                      base, None, 100_000, RngStream(104))
    est = estimate_psi_gradient(star, SQ_CEN, oracle.rows, big_min)
    assert est.norm <= 3 * est.se_norm

    for kind in ("gaussian_fit", "smote"):
        batch = generate(GeneratorSpec(kind), base, None, 100_000, RngStream(105))
        est = estimate_psi_gradient(star, SQ_CEN, batch.rows, big_min)
        assert est.norm > 3 * est.se_norm, kind


# -- collinear toy sizes -------------------------------------------------------------

def test_collinear_delta_size_examples():
    assert collinear_delta_size(1000, 100, +1, math.e ** 16) == \
        pytest.approx(2.0 * 900)
    assert collinear_delta_size(1000, 100, -1, math.e ** 16) == \
        pytest.approx(900 * 4.0 / 6.0)
    with pytest.raises(DegenerateDenominator):
        collinear_delta_size(1000, 100, +1, math.e ** 4)
