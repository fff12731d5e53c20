"""Shared Monte-Carlo machinery: two-sample KS statistic, the fixed critical
constant, seeded generator streams, and the weighted-minimum sampler."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "McReport", "two_sample_ks", "ks_critical", "KS_CONST_1PCT", "rng_stream",
    "weighted_min_samples", "ACCEPTANCE_SEEDS",
]

# large-sample two-sample critical constant at the 1% level
KS_CONST_1PCT = 1.628

# fixed seed protocol for acceptance-style MC tests: >= 18 of these 20 must pass
ACCEPTANCE_SEEDS = tuple(range(20))


@dataclass(frozen=True)
class McReport:
    ks: float
    critical: float
    n_samples: int
    seed: int
    passed: bool
    truncation_bound: float = 0.0

    def to_dict(self) -> dict:
        return {"ks": self.ks, "critical": self.critical, "n": self.n_samples,
                "seed": self.seed, "pass": self.passed,
                "truncation_bound": self.truncation_bound}


def ks_critical(n: int, m: int | None = None, const: float = KS_CONST_1PCT) -> float:
    """Critical value const * sqrt((n + m) / (n * m)); equal sizes by default."""
    if m is None:
        m = n
    return const * np.sqrt((n + m) / (n * m))


def two_sample_ks(x: np.ndarray, y: np.ndarray) -> float:
    """sup |ECDF_x - ECDF_y|, tie-correct (right-continuous ECDFs evaluated
    on the pooled sample)."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / x.size
    fy = np.searchsorted(y, pooled, side="right") / y.size
    return float(np.max(np.abs(fx - fy)))


def rng_stream(seed: int, batch: int = 0) -> np.random.Generator:
    """Generator for (seed, batch); batch index = stream index."""
    return np.random.default_rng([int(seed), int(batch)])


def weighted_min_samples(model, weights, rng: np.random.Generator, n_samples: int,
                         max_block: int = 1 << 24) -> np.ndarray:
    """n_samples i.i.d. realizations of min_j weights[j] * W_j, W_j i.i.d.
    from the model.  The draw layout is fixed, so equal (weights, rng state)
    give pathwise-equal output."""
    w = np.asarray(weights, dtype=float)
    k = w.size
    out = np.empty(n_samples)
    block = max(1, max_block // max(k, 1))
    done = 0
    while done < n_samples:
        b = min(block, n_samples - done)
        draws = model.sample(rng, b * k).reshape(b, k)
        out[done:done + b] = np.min(draws * w, axis=1)
        done += b
    return out
