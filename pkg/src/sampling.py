"""
sampling.py

Seeded outcome sampling. Shots are drawn in fixed-size chunks, each from its own
Philox stream keyed by the seed with the chunk index as counter, so a histogram
depends only on (weights, shots, seed).
"""

from dataclasses import dataclass

import numpy as np
import scipy.stats
from tqdm import tqdm

from src.errors import InputError

CHUNK_SHOTS = 65536
WEIGHT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Histogram:
    counts: np.ndarray
    weights: np.ndarray
    shots: int
    seed: int

    @property
    def frequencies(self):
        return self.counts / self.shots

    def chi_square(self):
        return chi_square(self.counts, self.weights)

    def rows(self):
        """(outcome_index, count, exact_probability) per outcome, 0-based."""
        return [(i, int(c), float(w)) for i, (c, w) in enumerate(zip(self.counts, self.weights))]


def check_weights(weights):
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size == 0:
        raise InputError("no outcome weights")
    if np.any(w < -1e-12) or abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise InputError(f"weights must be a probability vector, got {w.tolist()}")
    w = np.clip(w, 0.0, None)
    return w / w.sum()


def _stream(seed, chunk):
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, chunk]))


def sample_counts(weights, shots, seed, progress=False):
    """
    Histogram of shots outcome indices drawn by inverse CDF from weights.
    """
    w = check_weights(weights)
    if int(shots) != shots or shots <= 0:
        raise InputError(f"shots must be a positive integer, got {shots}")
    if int(seed) != seed or seed < 0:
        raise InputError(f"seed must be a non-negative integer, got {seed}")
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    counts = np.zeros(len(w), dtype=np.int64)
    chunks = range((shots + CHUNK_SHOTS - 1) // CHUNK_SHOTS)
    for chunk in tqdm(chunks, desc="Sampling", unit="chunk", disable=not progress):
        size = min(CHUNK_SHOTS, shots - chunk * CHUNK_SHOTS)
        draws = _stream(int(seed), chunk).random(size)
        idx = np.minimum(np.searchsorted(cdf, draws, side="right"), len(w) - 1)
        counts += np.bincount(idx, minlength=len(w))
    return Histogram(counts, w, int(shots), int(seed))


def chi_square(counts, weights):
    """
    Pearson statistic and p-value over the outcomes with non-zero weight.
    """
    counts = np.asarray(counts, dtype=float)
    w = np.asarray(weights, dtype=float)
    live = w > 0
    if np.any(counts[~live] > 0):
        return float("inf"), 0.0
    if live.sum() < 2:
        return 0.0, 1.0
    expected = w[live] / w[live].sum() * counts.sum()
    result = scipy.stats.chisquare(counts[live], expected)
    return float(result.statistic), float(result.pvalue)


def log_p_value(pvalue):
    """-log10 of a p-value, 0 for p >= 1 and inf for p = 0."""
    return float("inf") if pvalue <= 0 else max(0.0, -float(np.log10(pvalue)))
