"""Error analysis for over-the-air pooling.

Splits the pooled-feature mean squared error into a channel-noise part and a
function-approximation part, computes closed-form upper bounds for both,
checks the error decomposition, generates noise/approximation tradeoff
curves, and translates feature-space error into classification-accuracy
lower bounds through the margin argument.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from . import features as feat
from ._mc import MonteCarloEstimate, rng_from, worker_chunks
from .features import FeatureModel
from .pooling import (AVERAGE, MAX, WEIGHTED_SUM, AirPoolConfig, PoolingMode,
                      pool_noisy_and_clean)
from .specfun import ln_gamma, regularized_gamma_p, inverse_regularized_gamma_p

#: Standard-error multiple used by all statistical bound checks.
N_SIGMA = 4.0


def decomposition_c0(mode: PoolingMode, alpha: float) -> int:
    """Constant of the error-decomposition bound D <= c0 (D_chan + D_appr).

    The cross term between the noise error and the approximation error
    vanishes only when the noiseless pipeline reproduces the target exactly,
    i.e. for the averaging configuration at alpha = 1. Every other
    configuration gets the generic constant 2 (from (x+y)^2 <= 2x^2 + 2y^2,
    which holds per sample).
    """
    if mode.kind in (AVERAGE, WEIGHTED_SUM) and alpha == 1.0:
        return 1
    return 2


@dataclass(frozen=True)
class ErrorBreakdown:
    """Monte Carlo error estimates for one configuration, with bounds."""

    d_total: float
    d_chan: float
    d_appr: float
    se_total: float
    se_chan: float
    se_appr: float
    noise_bound: float          # closed-form bound on d_chan
    noise_bound_asymptotic: float
    approx_bound: float         # bound on d_appr for the active mode
    approx_bound_se: float
    c0: int
    trials: int

    @property
    def std_errors(self) -> Tuple[float, float, float]:
        return (self.se_total, self.se_chan, self.se_appr)

    def decomposition_slack(self, n_sigma: float = N_SIGMA) -> float:
        """c0 (d_chan + d_appr) + n_sigma SE - d_total; >= 0 when the bound holds."""
        combined = math.sqrt(self.se_total ** 2
                             + self.c0 ** 2 * (self.se_chan ** 2 + self.se_appr ** 2))
        return self.c0 * (self.d_chan + self.d_appr) + n_sigma * combined - self.d_total


def estimate_errors(model: FeatureModel, cfg: AirPoolConfig, k: int,
                    trials: int, seed: int, workers: int = 1) -> ErrorBreakdown:
    """Paired Monte Carlo estimates of D, D_chan, and D_appr.

    The noisy and noiseless pipelines run on identical feature draws so the
    decomposition checks see correlated, low-variance estimates. Bounds are
    filled from the closed forms (noise side) and an independent Monte Carlo
    stream (approximation side).
    """
    if trials < feat.MIN_MC_TRIALS:
        raise ValueError(f"estimate_errors requires trials >= {feat.MIN_MC_TRIALS}")
    sums = np.zeros(3)
    sums_sq = np.zeros(3)
    n_done = 0
    for w, n in enumerate(worker_chunks(trials, workers)):
        if n == 0:
            continue
        rng = rng_from(seed, 0, w)
        f = model.draw(rng, (n, k))
        g_hat, g_clean, g_true = pool_noisy_and_clean(f, cfg, rng)
        sq = np.stack([(g_hat - g_true) ** 2,
                       (g_hat - g_clean) ** 2,
                       (g_clean - g_true) ** 2])
        sums += sq.sum(axis=1)
        sums_sq += (sq * sq).sum(axis=1)
        n_done += n
    means = sums / n_done
    variances = np.maximum(sums_sq / n_done - means ** 2, 0.0)
    ses = np.sqrt(variances / n_done)
    eps = approx_error_bound(model, cfg.mode, k, cfg.alpha,
                             trials=trials, seed=seed, key=(1,), workers=workers)
    return ErrorBreakdown(
        d_total=float(means[0]), d_chan=float(means[1]), d_appr=float(means[2]),
        se_total=float(ses[0]), se_chan=float(ses[1]), se_appr=float(ses[2]),
        noise_bound=noise_error_bound_from_moments(cfg),
        noise_bound_asymptotic=noise_error_asymptote(cfg.alpha, cfg.p_rx_w,
                                                     cfg.noise_power_w),
        approx_bound=eps.value, approx_bound_se=eps.std_error,
        c0=decomposition_c0(cfg.mode, cfg.alpha), trials=n_done)


def noise_error_bound_from_moments(cfg: AirPoolConfig) -> float:
    """(sigma^2 nu_alpha^2 / P_rx)^(1/alpha) using the configured moments."""
    if cfg.noise_power_w == 0.0:
        return 0.0
    ln_inner = math.log(cfg.noise_power_w) + math.log(cfg.moments.nu_sq) \
        - math.log(cfg.p_rx_w)
    return math.exp(ln_inner / cfg.alpha)


def noise_error_bound(model: FeatureModel, alpha: float, p_rx_w: float,
                      noise_power_w: float, trials: int = 1_000_000,
                      seed: int = 0) -> float:
    """Channel-noise error bound (sigma^2 nu_alpha^2 / P_rx)^(1/alpha)."""
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    if noise_power_w == 0.0:
        return 0.0
    moments = feat.normalization_moments(model, alpha, trials=trials, seed=seed)
    ln_inner = math.log(noise_power_w) + math.log(moments.nu_sq) - math.log(p_rx_w)
    return math.exp(ln_inner / alpha)


def noise_error_bound_gamma_form(alpha: float, p_rx_w: float,
                                 noise_power_w: float) -> float:
    """Rectified-Gaussian noise bound through its gamma-function closed form.

    Algebraically identical to the generic bound with analytic moments, but
    evaluated as a separate expression (log domain) so the two routes can be
    cross-checked.
    """
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    if noise_power_w == 0.0:
        return 0.0
    ln_a = ln_gamma(alpha + 0.5)
    ln_b = 2.0 * ln_gamma((alpha + 1.0) / 2.0) - math.log(2.0 * math.sqrt(math.pi))
    ln_bracket = ln_a + math.log1p(-math.exp(ln_b - ln_a))
    ln_inner = math.log(noise_power_w) - math.log(p_rx_w) \
        - 0.5 * math.log(math.pi) + (alpha - 1.0) * math.log(2.0) + ln_bracket
    return math.exp(ln_inner / alpha)


def noise_error_asymptote(alpha: float, p_rx_w: float, noise_power_w: float) -> float:
    """Large-alpha surrogate of the noise bound: (2/e)(sigma^2/(sqrt2 P))^(1/a) a."""
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    if noise_power_w == 0.0:
        return 0.0
    base = noise_power_w / (math.sqrt(2.0) * p_rx_w)
    return 2.0 / math.e * base ** (1.0 / alpha) * alpha


def noise_error_asymptote_derivative(alpha: float, p_rx_w: float,
                                     noise_power_w: float) -> float:
    """d/d alpha of the asymptotic noise bound; tends to 2/e for large alpha."""
    base = noise_power_w / (math.sqrt(2.0) * p_rx_w)
    return 2.0 / math.e * base ** (1.0 / alpha) * (1.0 + math.log(1.0 / base) / alpha)


def approx_error_bound(model: FeatureModel, mode: PoolingMode, k: int,
                       alpha: float, trials: int = 1_000_000, seed: int = 0,
                       key: tuple = (), workers: int = 1) -> MonteCarloEstimate:
    """Function-approximation error bound for the requested ground truth.

    Max pooling: (1 - K^(-1/alpha)) E[fmax^2 | K], with the second moment
    estimated by Monte Carlo. Average pooling: E[(||f||_a / K - g_avg)^2],
    estimated directly.
    """
    if alpha < 1.0:
        raise ValueError("alpha must be >= 1")
    if mode.kind == MAX:
        scale = 1.0 - k ** (-1.0 / alpha)
        est = feat.max_second_moment(model, k, trials=trials, seed=seed,
                                     workers=workers) if k > 1 else \
            MonteCarloEstimate(0.0, 0.0, 0)
        return MonteCarloEstimate(scale * est.value, scale * est.std_error,
                                  est.trials)
    if mode.kind == AVERAGE:
        total, total_sq, n_done = 0.0, 0.0, 0
        for w, n in enumerate(worker_chunks(trials, workers)):
            if n == 0:
                continue
            f = model.draw(rng_from(seed, *key, w), (n, k))
            x = (feat.lp_norm_rescaled(f, alpha) / k - f.mean(axis=1)) ** 2
            total += float(x.sum())
            total_sq += float((x * x).sum())
            n_done += n
        mean = total / n_done
        var = max(total_sq / n_done - mean * mean, 0.0)
        return MonteCarloEstimate(mean, math.sqrt(var / n_done), n_done)
    raise ValueError("approximation bound is defined for max and average modes")


def tradeoff_curve(model: FeatureModel, k: int, p_rx_w: float,
                   noise_power_w: float, alpha_grid: Sequence[float],
                   trials: int = 200_000, seed: int = 0) -> Tuple[List[dict], List[str]]:
    """Noise-bound and approximation-bound columns along an alpha grid.

    Returns (rows, diagnostics). Each row holds alpha, the noise bound, its
    asymptote, the max-approximation bound, and their sum. When the power to
    noise ratio is at least one, the asymptote must be nondecreasing and the
    approximation bound nonincreasing along the grid; violations are reported
    as diagnostics (they indicate a numeric fault, not a statistical one).
    """
    alpha_grid = list(alpha_grid)
    if len(alpha_grid) < 2 or sorted(alpha_grid) != alpha_grid:
        raise ValueError("alpha_grid must be ascending with at least 2 points")
    fmax_sq = feat.max_second_moment(model, k, trials=trials, seed=seed).value
    rows = []
    for alpha in alpha_grid:
        if model.kind == feat.RECTIFIED_GAUSSIAN:
            delta = noise_error_bound_gamma_form(alpha, p_rx_w, noise_power_w)
        else:
            delta = noise_error_bound(model, alpha, p_rx_w, noise_power_w,
                                      trials=max(trials, feat.MIN_MC_TRIALS), seed=seed)
        eps_m = (1.0 - k ** (-1.0 / alpha)) * fmax_sq
        rows.append({
            "alpha": alpha,
            "noise_bound": delta,
            "noise_bound_asymptotic": noise_error_asymptote(alpha, p_rx_w, noise_power_w),
            "approx_bound_max": eps_m,
            "bound_sum": delta + eps_m,
        })
    diagnostics = []
    if p_rx_w >= noise_power_w:
        for prev, cur in zip(rows, rows[1:]):
            if cur["noise_bound"] < prev["noise_bound"] * (1.0 - 1e-12):
                diagnostics.append(
                    f"noise bound decreased between alpha={prev['alpha']} and {cur['alpha']}")
    for prev, cur in zip(rows, rows[1:]):
        if cur["approx_bound_max"] > prev["approx_bound_max"] * (1.0 + 1e-12):
            diagnostics.append(
                f"approximation bound increased between alpha={prev['alpha']} and {cur['alpha']}")
    return rows, diagnostics


@dataclass(frozen=True)
class MarginModel:
    """Classification margin of a trained server model in feature space."""

    margin: float
    clean_accuracy: float
    n_dims: int

    def __post_init__(self):
        if self.margin <= 0:
            raise ValueError("margin must be positive")
        if not (0.0 <= self.clean_accuracy <= 1.0):
            raise ValueError("clean_accuracy must lie in [0, 1]")


def accuracy_lower_bounds(margin: MarginModel, d_sigma: float) -> Tuple[float, float]:
    """Accuracy lower bounds given the summed feature error d_sigma.

    Returns (markov_bound, chi_bound): the distribution-free bound
    R0 (1 - d_sigma / margin^2) clipped at zero, and the tighter bound
    R0 P(N/2, N margin^2 / (2 d_sigma)) for averaging with Gaussian
    per-dimension error.
    """
    if d_sigma < 0:
        raise ValueError("d_sigma must be >= 0")
    r0 = margin.clean_accuracy
    if d_sigma == 0.0:
        return r0, r0
    markov = r0 * max(0.0, 1.0 - d_sigma / margin.margin ** 2)
    chi = r0 * regularized_gamma_p(margin.n_dims / 2.0,
                                   margin.n_dims * margin.margin ** 2 / (2.0 * d_sigma))
    return markov, chi


def required_error_budget(margin: MarginModel, r_target: float) -> Tuple[float, float]:
    """Feature-error budgets sufficient for a target accuracy.

    Returns (markov_budget, chi_budget); the chi budget assumes Gaussian
    per-dimension error and is never smaller than the markov one.
    """
    r0 = margin.clean_accuracy
    if not (0.0 < r_target <= r0):
        raise ValueError("r_target must satisfy 0 < r_target <= clean accuracy")
    ratio = r_target / r0
    markov = margin.margin ** 2 * (1.0 - ratio)
    if ratio >= 1.0:
        return 0.0, 0.0
    x = inverse_regularized_gamma_p(margin.n_dims / 2.0, ratio)
    chi = margin.n_dims * margin.margin ** 2 / (2.0 * x)
    return markov, chi


@dataclass(frozen=True)
class GoodnessOfFit:
    """Kolmogorov-style distance against a reference CDF."""

    statistic: float
    critical_1pct: float
    trials: int

    @property
    def passed(self) -> bool:
        return self.statistic < self.critical_1pct


def chi_error_check(k: int, n_dims: int, noise_power_w: float, p_rx_w: float,
                    nu1_sq: float, trials: int = 100_000, seed: int = 0) -> GoodnessOfFit:
    """Check that the averaging error-vector norm follows a scaled chi law.

    Simulates the per-dimension error xi/K of the averaging configuration,
    forms the Euclidean norm over n_dims dimensions, and measures the
    empirical-CDF max distance against chi with n_dims degrees of freedom
    (evaluated through the regularized gamma function). The 1 percent
    critical value is the asymptotic 1.6276/sqrt(trials).
    """
    if trials < feat.MIN_MC_TRIALS:
        raise ValueError("chi_error_check requires trials >= 10^4")
    sigma_xi = math.sqrt(noise_power_w * nu1_sq / p_rx_w)
    rng = rng_from(seed)
    e = rng.standard_normal((trials, n_dims)) * (sigma_xi / k)
    r = np.sqrt((e * e).sum(axis=1)) / (sigma_xi / k)
    r.sort()
    cdf = np.array([regularized_gamma_p(n_dims / 2.0, 0.5 * v * v) for v in r])
    steps = np.arange(1, trials + 1) / trials
    ks = float(np.max(np.maximum(np.abs(steps - cdf), np.abs(steps - 1.0 / trials - cdf))))
    return GoodnessOfFit(ks, 1.6276 / math.sqrt(trials), trials)
