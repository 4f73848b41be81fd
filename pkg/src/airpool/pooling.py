"""The over-the-air pooling protocol.

A pooled feature is produced in four steps: each sensor raises its local
feature to a configurable power alpha and normalizes it to a zero-mean
unit-variance symbol; all sensors transmit simultaneously so the channel sums
the symbols; the server de-normalizes the aggregate back to sum_k f_k^alpha
plus an equivalent Gaussian noise term; finally the server divides by a
post-processing parameter beta, clips negatives, and takes the alpha-th root.

alpha = 1 with beta = K reproduces the exact average; large alpha with the
optimal beta approaches the maximum. A weighted-sum variant scales features
by K * w_k at the sensors and runs the averaging configuration (with the
clipping step disabled, since weighted aggregates may be legitimately
negative).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import features as feat
from ._mc import rng_from
from .channel import SystemParams
from .features import ALPHA_MAX, FeatureModel, MomentSet

AVERAGE = "average"
MAX = "max"
WEIGHTED_SUM = "weighted_sum"


@dataclass(frozen=True)
class PoolingMode:
    """Which pooling function the round should realize."""

    kind: str
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in (AVERAGE, MAX, WEIGHTED_SUM):
            raise ValueError(f"unknown pooling mode: {self.kind!r}")
        if self.kind == WEIGHTED_SUM:
            if self.weights is None:
                raise ValueError("weighted_sum mode requires weights")
            if not np.all(np.isfinite(self.weights)):
                raise ValueError("weights must be finite")
        elif self.weights is not None:
            raise ValueError("weights are only valid for weighted_sum mode")

    @classmethod
    def average(cls) -> "PoolingMode":
        return cls(AVERAGE)

    @classmethod
    def max(cls) -> "PoolingMode":
        return cls(MAX)

    @classmethod
    def weighted_sum(cls, weights) -> "PoolingMode":
        return cls(WEIGHTED_SUM, weights=np.asarray(weights, dtype=float))


@dataclass(frozen=True)
class AirPoolConfig:
    """Tunable state of one pooling round.

    Protocol configurations come from the `for_*` constructors, which pin the
    defaults (average: alpha=1, beta=K; max: beta=beta*(alpha)). The analysis
    sweeps additionally build average-ground-truth configurations at alpha>1
    via `average_ground_truth`, where beta=K^alpha keeps the noiseless output
    equal to ||f||_alpha / K.
    """

    mode: PoolingMode
    alpha: float
    beta: float
    p_rx_w: float
    noise_power_w: float
    moments: MomentSet

    def __post_init__(self):
        if not (1.0 <= self.alpha <= ALPHA_MAX):
            raise ValueError(f"alpha must lie in [1, {ALPHA_MAX}]")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.p_rx_w <= 0:
            raise ValueError("p_rx_w must be positive")
        if self.noise_power_w < 0:
            raise ValueError("noise_power_w must be >= 0")
        if self.moments.alpha != self.alpha:
            raise ValueError("moments were computed for a different alpha")

    @property
    def noise_sigma_sq(self) -> float:
        """Variance of the equivalent post-inversion aggregation noise."""
        return self.noise_power_w * self.moments.nu_sq / self.p_rx_w

    @classmethod
    def for_average(cls, model: FeatureModel, k: int, p_rx_w: float,
                    noise_power_w: float) -> "AirPoolConfig":
        """Protocol averaging configuration: alpha = 1, beta = K."""
        return cls(PoolingMode.average(), 1.0, float(k), p_rx_w, noise_power_w,
                   feat.normalization_moments(model, 1.0))

    @classmethod
    def for_max(cls, model: FeatureModel, k: int, alpha: float, p_rx_w: float,
                noise_power_w: float, trials: int = 1_000_000,
                seed: int = 0) -> "AirPoolConfig":
        """Protocol max configuration at the given alpha, with beta = beta*."""
        beta = feat.optimal_beta(model, k, alpha, trials=trials, seed=seed).value
        return cls(PoolingMode.max(), alpha, beta, p_rx_w, noise_power_w,
                   feat.normalization_moments(model, alpha, seed=seed))

    @classmethod
    def for_weighted_sum(cls, model: FeatureModel, weights, p_rx_w: float,
                         noise_power_w: float) -> "AirPoolConfig":
        """Weighted-sum via sensor-side scaling plus the averaging pipeline."""
        mode = PoolingMode.weighted_sum(weights)
        k = len(mode.weights)
        return cls(mode, 1.0, float(k), p_rx_w, noise_power_w,
                   weighted_sum_moments(model, mode.weights))

    @classmethod
    def average_ground_truth(cls, model: FeatureModel, k: int, alpha: float,
                             p_rx_w: float, noise_power_w: float,
                             seed: int = 0) -> "AirPoolConfig":
        """Average-as-ground-truth analysis configuration: beta = K^alpha."""
        return cls(PoolingMode.average(), alpha, float(k) ** alpha, p_rx_w,
                   noise_power_w, feat.normalization_moments(model, alpha, seed=seed))


def weighted_sum_moments(model: FeatureModel, weights: np.ndarray) -> MomentSet:
    """Normalization moments of the scaled-feature mixture K*w_k*f.

    All sensors share one (eta, nu) pair so the server can de-normalize the
    aggregate exactly; the mixture moments keep the average transmit power
    near the budget.
    """
    weights = np.asarray(weights, dtype=float)
    k = len(weights)
    m1 = feat.moment_abs_power(model, 1.0)
    m2 = feat.moment_abs_power(model, 2.0)
    eta = float(np.mean(k * weights) * m1)
    second = float(np.mean((k * weights) ** 2) * m2)
    nu_sq = second - eta * eta
    clamped = nu_sq < 0.0
    return MomentSet(alpha=1.0, eta=eta, nu_sq=max(nu_sq, 0.0), method="mixture",
                     clamped=clamped)


def true_pool(features: np.ndarray, mode: PoolingMode) -> np.ndarray:
    """Exact pooled value(s); the sensor axis is last."""
    features = np.asarray(features, dtype=float)
    if mode.kind == MAX:
        return features.max(axis=-1)
    if mode.kind == AVERAGE:
        return features.mean(axis=-1)
    if features.shape[-1] != len(mode.weights):
        raise ValueError("weights length must match the sensor count")
    return features @ mode.weights


def preprocess_and_modulate(features: np.ndarray, cfg: AirPoolConfig) -> np.ndarray:
    """Per-sensor symbols s_k = (f_k^alpha - eta) / nu; sensor axis last.

    Weighted-sum mode scales f_k by K*w_k first and uses alpha = 1.
    """
    if cfg.moments.nu_sq <= 0.0:
        raise ValueError("degenerate feature distribution: nu is zero")
    features = np.asarray(features, dtype=float)
    if cfg.mode.kind == WEIGHTED_SUM:
        if features.shape[-1] != len(cfg.mode.weights):
            raise ValueError("weights length must match the sensor count")
        v = features.shape[-1] * cfg.mode.weights * features
    else:
        if np.any(features < 0):
            raise ValueError("features must be >= 0")
        v = features ** cfg.alpha
    return (v - cfg.moments.eta) / cfg.moments.nu


def denormalize(y: np.ndarray, cfg: AirPoolConfig, k_sensors: int) -> np.ndarray:
    """Aggregate estimate before post-processing: (nu/sqrt(Prx)) y + eta K."""
    return cfg.moments.nu / math.sqrt(cfg.p_rx_w) * np.asarray(y, dtype=float) \
        + cfg.moments.eta * k_sensors


def postprocess(v_hat: np.ndarray, cfg: AirPoolConfig) -> np.ndarray:
    """Pooled-feature estimate ((v_hat)+ / beta)^(1/alpha).

    The clip keeps estimates of non-negative pooled features out of the
    negative half-line; weighted-sum aggregates may be negative, so there
    the clip is skipped (and alpha is 1).
    """
    v_hat = np.asarray(v_hat, dtype=float)
    if cfg.mode.kind == WEIGHTED_SUM:
        return v_hat / cfg.beta
    return (np.maximum(v_hat, 0.0) / cfg.beta) ** (1.0 / cfg.alpha)


def powered_sum(features: np.ndarray, cfg: AirPoolConfig) -> np.ndarray:
    """sum_k v_k over the last axis (v_k = f_k^alpha, or the scaled features
    in weighted-sum mode)."""
    features = np.asarray(features, dtype=float)
    if cfg.mode.kind == WEIGHTED_SUM:
        if features.shape[-1] != len(cfg.mode.weights):
            raise ValueError("weights length must match the sensor count")
        return (features.shape[-1] * cfg.mode.weights * features).sum(axis=-1)
    if np.any(features < 0):
        raise ValueError("features must be >= 0")
    return (features ** cfg.alpha).sum(axis=-1)


def aggregate_with_noise(v_sum: np.ndarray, cfg: AirPoolConfig,
                         rng: np.random.Generator) -> np.ndarray:
    """The de-normalized aggregate sum_k v_k + xi, xi ~ N(0, sigma^2 nu^2/Prx).

    Algebraically identical to denormalize(transmit_over_mac(preprocess(...)))
    but evaluated in the aggregate domain: the literal symbol-domain order
    cancels catastrophically in float64 at large alpha, where eta_alpha
    dwarfs sum_k v_k.
    """
    if cfg.noise_power_w == 0.0:
        return np.asarray(v_sum, dtype=float)
    sigma_xi = math.sqrt(cfg.noise_sigma_sq)
    return v_sum + sigma_xi * rng.standard_normal(np.shape(v_sum))


def airpool_round(features: np.ndarray, cfg: AirPoolConfig,
                  params: SystemParams, seed: int = 0) -> np.ndarray:
    """One pooling round over a K x N feature matrix; returns N estimates.

    Each feature dimension is aggregated with an independent noise draw;
    the whole round is deterministic given the seed.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2:
        raise ValueError("features must be a K x N matrix")
    if cfg.moments.nu_sq <= 0.0:
        raise ValueError("degenerate feature distribution: nu is zero")
    v_sum = powered_sum(features.T, cfg)  # one entry per dimension
    v_hat = aggregate_with_noise(v_sum, cfg, rng_from(seed))
    return postprocess(v_hat, cfg)


def pool_noisy_and_clean(features: np.ndarray, cfg: AirPoolConfig,
                         rng: np.random.Generator):
    """Paired noisy/noiseless/true pooled values for rows of draws.

    `features` is (n, K). Returns (g_hat, g_clean, g_true) where g_hat and
    g_clean share the same feature rows (only the noise differs), which keeps
    the variance of error-decomposition estimates low.
    """
    features = np.asarray(features, dtype=float)
    if cfg.moments.nu_sq <= 0.0:
        raise ValueError("degenerate feature distribution: nu is zero")
    v_sum = powered_sum(features, cfg)
    g_clean = postprocess(v_sum, cfg)
    g_hat = g_clean if cfg.noise_power_w == 0.0 else \
        postprocess(aggregate_with_noise(v_sum, cfg, rng), cfg)
    return g_hat, g_clean, true_pool(features, cfg.mode)
