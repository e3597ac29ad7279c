"""Simulation models with samplers and closed-form optima.

Three data-generating processes drive every simulation study, plus one
mixture configuration used by the loss-curve sweep:

* two Gaussians: majority N(0, I), minority N(mu1, I), optional synthetic
  mean mu_syn for a biased generator; squared (raw-target) loss gives
  closed forms for the optimum, risks, gradients, and the bias-canceling
  synthetic size.
* mean shift: classes at -mu + xi and mu + xi with zero-mean unit-covariance
  noise; under the centered squared loss the class gap phi vanishes
  identically, the local-symmetry regime.
* sigmoid Bernoulli: P(y=1|x) = sigmoid(c v'x) with a two-point signal
  T in {-a, b} along v and orthogonal noise W; the mixing probability
  alpha below cancels the majority-minority bias at the true parameter.

All samplers draw from an RngStream and are pure given the stream.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .data import LabeledDataset
from .exceptions import DegenerateGenerator, NonPositiveInput, UnknownPreset
from .rng import RngStream

NOISE_KINDS = ("uniform_cube", "rademacher", "uniform_sphere", "custom")


def _sigma(t: float) -> float:
    return 0.5 * (1.0 + math.tanh(0.5 * t))


# ---------------------------------------------------------------------------
# Two-Gaussian model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TwoGaussianModel:
    """Majority N(0, I_d), minority N(mu1, I_d); loss = squared raw target."""

    mu1: np.ndarray
    mu_syn: np.ndarray | None = None
    name: str = "two_gaussian"

    def __post_init__(self):
        object.__setattr__(self, "mu1", np.asarray(self.mu1, dtype=np.float64))
        if self.mu_syn is not None:
            object.__setattr__(self, "mu_syn", np.asarray(self.mu_syn, dtype=np.float64))

    @property
    def d(self) -> int:
        return self.mu1.shape[0]

    def sample(self, n0: int, n1: int, rng: RngStream) -> LabeledDataset:
        if n0 < 1 or n1 < 1:
            raise ValueError("need n0 >= 1 and n1 >= 1")
        gen = rng.generator()
        X0 = gen.standard_normal((n0, self.d))
        X1 = self.mu1 + gen.standard_normal((n1, self.d))
        X = np.vstack([X0, X1])
        y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
        return LabeledDataset(X, y)

    def sample_minority(self, count: int, rng: RngStream) -> np.ndarray:
        return self.mu1 + rng.generator().standard_normal((count, self.d))

    def sample_noise(self, count: int, rng: RngStream) -> np.ndarray:
        return rng.generator().standard_normal((count, self.d))

    def biased_generator_model(self) -> "TwoGaussianModel":
        """Model whose minority law is N(mu_syn, I): the biased generator."""
        if self.mu_syn is None:
            raise DegenerateGenerator("model has no synthetic mean configured")
        return TwoGaussianModel(mu1=self.mu_syn, name=self.name + "-syn")


def gaussian_theta_star(mu1: np.ndarray) -> np.ndarray:
    """Balanced optimum (mu1 mu1' + 2I)^-1 mu1; equals (m/(m^2+2), 0) in 2-D."""
    mu1 = np.asarray(mu1, dtype=np.float64)
    d = mu1.shape[0]
    return np.linalg.solve(np.outer(mu1, mu1) + 2.0 * np.eye(d), mu1)


def gaussian_balanced_risk(theta: np.ndarray, mu1: np.ndarray) -> float:
    """theta'theta + (theta'mu1 - 1)^2 / 2, the exact balanced risk."""
    theta = np.asarray(theta, dtype=np.float64)
    mu1 = np.asarray(mu1, dtype=np.float64)
    return float(theta @ theta + 0.5 * (theta @ mu1 - 1.0) ** 2)


def gaussian_excess_risk(theta: np.ndarray, mu1: np.ndarray) -> float:
    return gaussian_balanced_risk(theta, mu1) - gaussian_balanced_risk(
        gaussian_theta_star(mu1), mu1)


@dataclass(frozen=True)
class GaussianClosedForms:
    theta_star: np.ndarray
    theta_tilde: np.ndarray
    grad_phi_at_star: np.ndarray
    grad_psi_at_star: np.ndarray
    hessian_R: np.ndarray
    hessian_phi: np.ndarray
    hessian_psi: np.ndarray
    bias_cancel_multiplier: float | None

    def bias_cancel_n_syn(self, n0: int, n1: int) -> float:
        if self.bias_cancel_multiplier is None:
            raise DegenerateGenerator("no bias-canceling size for this generator mean")
        return self.bias_cancel_multiplier * (n0 - n1)


def gaussian_closed_forms(mu1, mu_syn, pi1: float, pi_tilde: float) -> GaussianClosedForms:
    """Exact bias objects of the two-Gaussian model at the balanced optimum.

    ``theta_tilde`` minimizes the synthetic population risk at proportions
    (pi1, pi_tilde). The cancel multiplier solves for the synthetic size
    that zeroes the first-order bias; it reduces to
    mu * (n0-n1) / (a(mu^2+2) - mu(a^2+1)) for collinear means (mu,0), (a,0).

    Raises:
        DegenerateGenerator: mismatched generator whose first-order
            discrepancy vanishes (e.g. a = 2/mu), where no size-based
            cancellation is meaningful.
    """
    mu1 = np.asarray(mu1, dtype=np.float64)
    mu_syn = np.asarray(mu_syn, dtype=np.float64)
    d = mu1.shape[0]
    star = gaussian_theta_star(mu1)

    grad_phi = -2.0 * (star @ mu1 - 1.0) * mu1
    grad_psi = 2.0 * (star @ mu_syn - 1.0) * mu_syn - 2.0 * (star @ mu1 - 1.0) * mu1

    # synthetic-risk minimizer: (I + pi1 mu1 mu1' + pit ms ms') theta = pi1 mu1 + pit ms
    A = np.eye(d) + pi1 * np.outer(mu1, mu1) + pi_tilde * np.outer(mu_syn, mu_syn)
    theta_tilde = np.linalg.solve(A, pi1 * mu1 + pi_tilde * mu_syn)

    hessian_R = 2.0 * np.eye(d) + np.outer(mu1, mu1)
    hessian_phi = -2.0 * np.outer(mu1, mu1)
    hessian_psi = 2.0 * np.outer(mu_syn, mu_syn) - 2.0 * np.outer(mu1, mu1)

    norm_phi = float(np.linalg.norm(grad_phi))
    norm_psi = float(np.linalg.norm(grad_psi))
    multiplier: float | None
    if norm_psi <= 1e-12 * max(norm_phi, 1.0):
        if np.allclose(mu_syn, mu1, rtol=0.0, atol=1e-12):
            multiplier = 1.0  # perfect generator: naive balancing cancels
        else:
            raise DegenerateGenerator(
                "generator mean has zero first-order mismatch despite mu_syn != mu1")
    elif norm_phi == 0.0:
        multiplier = None
    else:
        u = mu1 / np.linalg.norm(mu1)
        a = float(mu_syn @ u)
        residual = mu_syn - a * u
        if np.linalg.norm(residual) <= 1e-12 * max(np.linalg.norm(mu_syn), 1.0):
            # collinear means: the size solves a rational equation in
            # (m, a) and is exact whenever those are exactly representable
            m = float(np.linalg.norm(mu1))
            denom = a * (m * m + 2.0) - m * (a * a + 1.0)
            multiplier = None if denom == 0.0 else m / denom
        else:
            cos = float(grad_phi @ grad_psi) / (norm_phi * norm_psi)
            denom = 1.0 - 2.0 * (norm_psi / norm_phi) * cos
            multiplier = None if abs(denom) < 1e-12 else 1.0 / denom

    return GaussianClosedForms(star, theta_tilde, grad_phi, grad_psi,
                               hessian_R, hessian_phi, hessian_psi, multiplier)


# ---------------------------------------------------------------------------
# Mean-shift model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanShiftModel:
    """Classes at -mu + xi and mu + xi; every builtin noise has Cov = I."""

    mu: np.ndarray
    noise_kind: str = "uniform_cube"
    custom_noise: object = None  # callable (count, generator) -> rows
    name: str = "mean_shift"

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=np.float64))
        if self.noise_kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.noise_kind!r}")
        if self.noise_kind == "custom" and self.custom_noise is None:
            raise ValueError("custom noise kind needs a sampler")

    @property
    def d(self) -> int:
        return self.mu.shape[0]

    def _noise(self, count: int, gen: np.random.Generator) -> np.ndarray:
        d = self.d
        if self.noise_kind == "uniform_cube":
            return gen.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=(count, d))
        if self.noise_kind == "rademacher":
            return 2.0 * gen.integers(0, 2, size=(count, d)).astype(np.float64) - 1.0
        if self.noise_kind == "uniform_sphere":
            g = gen.standard_normal((count, d))
            return math.sqrt(d) * g / np.linalg.norm(g, axis=1, keepdims=True)
        return np.asarray(self.custom_noise(count, gen), dtype=np.float64)

    def sample(self, n0: int, n1: int, rng: RngStream) -> LabeledDataset:
        if n0 < 1 or n1 < 1:
            raise ValueError("need n0 >= 1 and n1 >= 1")
        gen = rng.generator()
        X0 = -self.mu + self._noise(n0, gen)
        X1 = self.mu + self._noise(n1, gen)
        X = np.vstack([X0, X1])
        y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
        return LabeledDataset(X, y)

    def sample_minority(self, count: int, rng: RngStream) -> np.ndarray:
        return self.mu + self._noise(count, rng.generator())

    def sample_majority(self, count: int, rng: RngStream) -> np.ndarray:
        return -self.mu + self._noise(count, rng.generator())

    def sample_noise(self, count: int, rng: RngStream) -> np.ndarray:
        return self._noise(count, rng.generator())


def mean_shift_theta_star(model: MeanShiftModel) -> np.ndarray:
    """Balanced optimum (mu mu' + I)^-1 mu / 2 under the centered squared loss.

    The factor 1/2 is the closed form that the numeric minimizer of the
    empirical balanced risk confirms (see the sim-model test suite, which
    fails hard if the two ever disagree).
    """
    mu = model.mu
    return 0.5 * np.linalg.solve(np.outer(mu, mu) + np.eye(model.d), mu)


def mean_shift_balanced_risk(theta: np.ndarray, model: MeanShiftModel) -> float:
    """1/4 - theta'mu + theta'(mu mu' + I) theta, exact for unit-covariance noise."""
    theta = np.asarray(theta, dtype=np.float64)
    mu = model.mu
    return float(0.25 - theta @ mu + theta @ (np.outer(mu, mu) + np.eye(model.d)) @ theta)


def mean_shift_excess_risk(theta: np.ndarray, model: MeanShiftModel) -> float:
    return mean_shift_balanced_risk(theta, model) - mean_shift_balanced_risk(
        mean_shift_theta_star(model), model)


# ---------------------------------------------------------------------------
# Sigmoid Bernoulli model
# ---------------------------------------------------------------------------

def discrete_alpha(a: float, b: float, c: float) -> float:
    """Mixing probability that cancels the local class asymmetry.

    alpha = b s(cb)(1-s(cb)) / [a s(ca)(1-s(ca)) + b s(cb)(1-s(cb))].
    """
    if a <= 0 or b <= 0 or c <= 0:
        raise NonPositiveInput("a, b, c must all be positive")
    wa = a * _sigma(c * a) * (1.0 - _sigma(c * a))
    wb = b * _sigma(c * b) * (1.0 - _sigma(c * b))
    return wb / (wa + wb)


def sigmoid_minority_probability(a: float, b: float, c: float, alpha: float) -> float:
    """P(y=1) = alpha (1 - s(ca)) + (1 - alpha) s(cb); shrinks as a grows."""
    return alpha * (1.0 - _sigma(c * a)) + (1.0 - alpha) * _sigma(c * b)


def _orthogonal_basis(v: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of the complement of unit vector v."""
    d = v.shape[0]
    M = np.hstack([v[:, None], np.eye(d)])
    Q, _ = np.linalg.qr(M)
    if Q[:, 0] @ v < 0:
        Q = -Q
    return Q[:, 1:d]


@dataclass(frozen=True)
class SigmoidBernoulliModel:
    """x = T v + W with T in {-a, b}, labels y ~ Bernoulli(sigmoid(c T)).

    W lives in the orthogonal complement of v: W = B(z + s*offsets) with
    z ~ N(0, I), s = +-1 equally likely; zero offsets give plain Gaussian
    noise, nonzero offsets the symmetric non-Gaussian mixture. With the
    default alpha the balanced-risk optimum is exactly c*v.
    """

    c: float
    v: np.ndarray
    a: float
    b: float
    alpha: float | None = None
    noise_offsets: np.ndarray | None = None
    name: str = "sigmoid_bernoulli"

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        if abs(np.linalg.norm(v) - 1.0) > 1e-9:
            raise ValueError("v must be a unit vector")
        object.__setattr__(self, "v", v)
        if self.alpha is None:
            object.__setattr__(self, "alpha", discrete_alpha(self.a, self.b, self.c))
        if self.noise_offsets is not None:
            off = np.asarray(self.noise_offsets, dtype=np.float64)
            if off.shape != (self.d - 1,):
                raise ValueError(f"noise_offsets must have length d-1 = {self.d - 1}")
            object.__setattr__(self, "noise_offsets", off)

    @property
    def d(self) -> int:
        return self.v.shape[0]

    @property
    def theta_true(self) -> np.ndarray:
        return self.c * self.v

    @property
    def theta_star(self) -> np.ndarray:
        # balanced optimum coincides with the true parameter at this alpha
        return self.theta_true

    @property
    def minority_probability(self) -> float:
        return sigmoid_minority_probability(self.a, self.b, self.c, self.alpha)

    def _noise(self, count: int, gen: np.random.Generator) -> np.ndarray:
        if self.d == 1:
            return np.zeros((count, 1))
        B = _orthogonal_basis(self.v)
        w = gen.standard_normal((count, self.d - 1))
        if self.noise_offsets is not None:
            signs = 2.0 * gen.integers(0, 2, size=(count, 1)).astype(np.float64) - 1.0
            w = w + signs * self.noise_offsets
        return w @ B.T

    def _signal(self, count: int, p_minus_a: float, gen) -> np.ndarray:
        t = np.where(gen.random(count) < p_minus_a, -self.a, self.b)
        return t

    def sample(self, n: int, rng: RngStream) -> LabeledDataset:
        """n iid draws of (x, y); class counts are random."""
        if n < 1:
            raise ValueError("need n >= 1")
        gen = rng.generator()
        T = self._signal(n, self.alpha, gen)
        X = T[:, None] * self.v + self._noise(n, gen)
        y = (gen.random(n) < _sigma_vec(self.c * T)).astype(np.int64)
        return LabeledDataset(X, y)

    def _conditional_signal_prob(self, label: int) -> float:
        # P(T = -a | y = label) via Bayes on the two-point signal
        sa, sb = _sigma(self.c * self.a), _sigma(self.c * self.b)
        if label == 1:
            wa, wb = self.alpha * (1.0 - sa), (1.0 - self.alpha) * sb
        else:
            wa, wb = self.alpha * sa, (1.0 - self.alpha) * (1.0 - sb)
        return wa / (wa + wb)

    def sample_class(self, label: int, count: int, rng: RngStream) -> np.ndarray:
        """Exact class-conditional sampler (no rejection)."""
        gen = rng.generator()
        T = self._signal(count, self._conditional_signal_prob(label), gen)
        return T[:, None] * self.v + self._noise(count, gen)

    def sample_minority(self, count: int, rng: RngStream) -> np.ndarray:
        return self.sample_class(1, count, rng)

    def sample_majority(self, count: int, rng: RngStream) -> np.ndarray:
        return self.sample_class(0, count, rng)


def _sigma_vec(t: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(t, dtype=np.float64)))


# ---------------------------------------------------------------------------
# Gaussian-mixture minority (loss-curve sweep configuration)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MixtureMinorityModel:
    """Majority N(0, I_d); minority = even mixture of N(mu_plus/minus, I_d).

    Component means delta*e1 +- (xi/2)*e2. No closed-form risk; evaluation
    runs on large held-out samples.
    """

    d: int = 5
    delta: float = 2.0
    xi: float = 2.0
    name: str = "mixture_minority"

    def _component_means(self) -> tuple[np.ndarray, np.ndarray]:
        mp = np.zeros(self.d)
        mp[0] = self.delta
        mp[1] = 0.5 * self.xi
        mm = mp.copy()
        mm[1] = -0.5 * self.xi
        return mp, mm

    def sample_minority(self, count: int, rng: RngStream) -> np.ndarray:
        gen = rng.generator()
        mp, mm = self._component_means()
        pick = gen.integers(0, 2, size=count)
        means = np.where(pick[:, None] == 0, mp, mm)
        return means + gen.standard_normal((count, self.d))

    def sample(self, n0: int, n1: int, rng: RngStream) -> LabeledDataset:
        if n0 < 1 or n1 < 1:
            raise ValueError("need n0 >= 1 and n1 >= 1")
        X0 = rng.child(0).generator().standard_normal((n0, self.d))
        X1 = self.sample_minority(n1, rng.child(1))
        X = np.vstack([X0, X1])
        y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
        return LabeledDataset(X, y)


# ---------------------------------------------------------------------------
# Presets (data files, not code)
# ---------------------------------------------------------------------------

def preset_names() -> list[str]:
    files = resources.files("vtss") / "presets"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_preset_config(name: str) -> dict:
    path = resources.files("vtss") / "presets" / f"{name}.json"
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnknownPreset(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}") from None
    return json.loads(text)


def build_model(cfg: dict, name: str = ""):
    """Instantiate a simulation model from a preset config dict."""
    kind = cfg["model"]
    if kind == "two_gaussian":
        return TwoGaussianModel(mu1=cfg["mu1"], mu_syn=cfg.get("mu_syn"),
                                name=name or "two_gaussian")
    if kind == "mean_shift":
        mu = np.zeros(int(cfg["d"]))
        mu[0] = float(cfg.get("delta", 1.0))
        return MeanShiftModel(mu=mu, noise_kind=cfg["noise_kind"],
                              name=name or "mean_shift")
    if kind == "sigmoid_bernoulli":
        d = int(cfg["d"])
        v = np.zeros(d)
        v[0] = 1.0
        offsets = cfg.get("noise_offsets")
        return SigmoidBernoulliModel(
            c=float(cfg["c"]), v=v, a=float(cfg["a"]), b=float(cfg["b"]),
            noise_offsets=None if offsets is None else np.asarray(offsets, dtype=np.float64),
            name=name or "sigmoid_bernoulli")
    if kind == "mixture_minority":
        return MixtureMinorityModel(d=int(cfg["d"]), delta=float(cfg["delta"]),
                                    xi=float(cfg["xi"]), name=name or "mixture_minority")
    raise UnknownPreset(f"unknown model kind {kind!r}")


def load_model_preset(name: str):
    return build_model(load_preset_config(name), name=name)
