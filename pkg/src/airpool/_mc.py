"""Monte Carlo plumbing: reproducible seeding and estimates with standard
errors.

The seeding contract: every stochastic routine takes an integer ``seed`` and
derives sub-streams with ``np.random.SeedSequence([seed, *key])``, so results
are bit-reproducible for a fixed (seed, worker-count) pair and independent of
scheduling order. Worker splits derive one sub-stream per worker, which makes
the worker count part of the reproducibility contract.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MonteCarloEstimate:
    """A Monte Carlo point estimate with its standard error."""

    value: float
    std_error: float
    trials: int

    def agrees_with(self, other: float, n_sigma: float = 4.0) -> bool:
        """True when `other` lies within n_sigma standard errors."""
        return abs(self.value - other) <= n_sigma * self.std_error


def rng_from(seed: int, *key: int) -> np.random.Generator:
    """Generator for the sub-stream identified by (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def worker_chunks(trials: int, workers: int) -> list:
    """Split `trials` into per-worker chunk sizes (first chunks get the rest)."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    base = trials // workers
    rem = trials % workers
    return [base + (1 if w < rem else 0) for w in range(workers)]


def mc_mean(sample_fn, trials: int, seed: int, workers: int = 1,
            key: tuple = ()) -> MonteCarloEstimate:
    """Estimate E[X] by averaging `sample_fn(rng, n)` draws across workers.

    `sample_fn` must return an array of n i.i.d. scalar samples. Each worker
    w draws from the sub-stream (seed, *key, w), so the estimate is
    reproducible for a fixed (seed, workers) pair.
    """
    total = 0.0
    total_sq = 0.0
    n_done = 0
    for w, n in enumerate(worker_chunks(trials, workers)):
        if n == 0:
            continue
        x = np.asarray(sample_fn(rng_from(seed, *key, w), n), dtype=float)
        total += float(x.sum())
        total_sq += float((x * x).sum())
        n_done += n
    mean = total / n_done
    var = max(total_sq / n_done - mean * mean, 0.0)
    return MonteCarloEstimate(mean, float(np.sqrt(var / n_done)), n_done)
