"""Sampling-based mutual-information estimate used as an end-to-end oracle.

Symbols are drawn from the alphabet, outcomes are sampled around the
propagated displacement with the engine's conditional noise, and the sample
covariance of (symbols, outcomes) is plugged into the Gaussian MI functional.
The plug-in bias is of order ``k m / (2 N)`` nats and is not corrected.

Random streams: numpy ``PCG64`` bit generators, one per batch, spawned in batch
order from ``SeedSequence(seed)``. Batch ``b`` always gets child ``b``, so the
result does not depend on how many worker threads draw the batches.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .detection import JointStatistics, gaussian_mi, propagate
from .schemes import SchemeSpec

NUM_BATCHES = 20
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class McEstimate:
    mi: float
    stderr: float
    samples: int
    seed: int


def _factor(cov: np.ndarray) -> np.ndarray:
    # PSD square-root factor; tolerates rank-deficient symbol covariances
    w, v = np.linalg.eigh(0.5 * (cov + cov.T))
    return v * np.sqrt(np.clip(w, 0.0, None))


def _sample_batch(rng: np.random.Generator, size: int, sym_factor, gain_map, noise_factor):
    k = sym_factor.shape[0]
    m = noise_factor.shape[0]
    symbols = rng.standard_normal((size, k)) @ sym_factor.T
    outcomes = symbols @ gain_map.T + rng.standard_normal((size, m)) @ noise_factor.T
    return np.hstack([symbols, outcomes])


def _plug_in(data: np.ndarray, k: int, log_base: float) -> float:
    cov = np.cov(data, rowvar=False, bias=False)
    cov = np.atleast_2d(cov)
    return gaussian_mi(JointStatistics(cov[:k, :k], cov[:k, k:], cov[k:, k:]), log_base)


def estimate_mi(spec: SchemeSpec, samples: int, seed: int, log_base: float = 2.0,
                threads: int = 1) -> McEstimate:
    """Monte Carlo MI estimate with a batch-means standard error."""
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    gain_map, noise = propagate(spec.state, spec.modulation, spec.detector, spec.channel)
    sym_factor = _factor(spec.modulation.symbol_cov)
    noise_factor = np.linalg.cholesky(noise)
    k = sym_factor.shape[0]

    children = np.random.SeedSequence(seed).spawn(NUM_BATCHES)
    sizes = [len(chunk) for chunk in np.array_split(np.arange(samples), NUM_BATCHES)]

    def run(b):
        rng = np.random.Generator(np.random.PCG64(children[b]))
        return _sample_batch(rng, sizes[b], sym_factor, gain_map, noise_factor)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(run, range(NUM_BATCHES)))
    else:
        batches = [run(b) for b in range(NUM_BATCHES)]

    per_batch = np.array([_plug_in(batch, k, log_base) for batch in batches])
    estimate = _plug_in(np.vstack(batches), k, log_base)
    stderr = float(per_batch.std(ddof=1) / np.sqrt(NUM_BATCHES))
    return McEstimate(mi=estimate, stderr=stderr, samples=samples, seed=seed)
