"""Weighted-branching view of the equation: depth-n branch weights on the
|J|-ary tree and the depth-n distributional identity W =d min L(v) W(v).

The branch weight of v = (v_1, ..., v_n) is the product of the edge weights
T_{v_k}; the depth-n multiset of branch weights is the n-fold multiplicative
convolution of the weight multiset with itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stats import (McReport, ks_critical, rng_stream, two_sample_ks,
                    weighted_min_samples)
from .weights import WeightSpec

__all__ = ["BranchLevel", "level_weights", "branching_min_sample",
           "branching_invariance_test", "DEFAULT_CAP"]

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class BranchLevel:
    n: int
    weights: np.ndarray  # multiset {L(v) : |v| = n}, multiplicities preserved

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    @property
    def count(self) -> int:
        return int(self.weights.size)


def level_weights(spec: WeightSpec, n: int, cap: int = DEFAULT_CAP) -> BranchLevel:
    """All depth-n branch weights of a finite vector, multiplicities included.

    Depth 0 is the root alone with the empty product 1.  Enumeration refuses
    to exceed ``cap`` branches; sampled evaluation of the minimum would need a
    support bound to prune soundly and is not offered.
    """
    if not spec.is_finite:
        raise ValueError("branch enumeration requires a finite weight vector")
    if n < 0:
        raise ValueError("depth must be nonnegative")
    k = len(spec.head)
    if k**n > cap:
        raise ValueError(
            f"level size {k}**{n} exceeds the cap {cap}; "
            "no sound subsampling of a global minimum is available")
    out = np.ones(1)
    base = np.asarray(spec.head, dtype=float)
    for _ in range(n):
        out = (out[:, None] * base[None, :]).ravel()
    return BranchLevel(n, out)


def branching_min_sample(model, spec: WeightSpec, n: int,
                         rng: np.random.Generator, n_samples: int,
                         cap: int = DEFAULT_CAP) -> np.ndarray:
    """i.i.d. realizations of min over |v| = n of L(v) W(v)."""
    lv = level_weights(spec, n, cap=cap)
    return weighted_min_samples(model, lv.weights, rng, n_samples)


def branching_invariance_test(model, spec: WeightSpec, n: int, n_samples: int,
                              seed: int, cap: int = DEFAULT_CAP) -> McReport:
    """Two-sample KS test: depth-n branching minima against fresh model draws."""
    rng = rng_stream(seed)
    mins = branching_min_sample(model, spec, n, rng, n_samples, cap=cap)
    fresh = model.sample(rng, n_samples)
    ks = two_sample_ks(mins, fresh)
    crit = ks_critical(n_samples)
    return McReport(ks, crit, n_samples, seed, ks <= crit)
