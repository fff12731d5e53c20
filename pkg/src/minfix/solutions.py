"""Survival models for fixed-point candidates and the solution families.

Conventions.  F(t) = P(W < t) is the left-continuous distribution function,
F-bar(t) = 1 - F(t) = P(W >= t) its survival function, and F(t+) = P(W <= t)
the right limit.  nu(t) = -log F-bar(t) is nondecreasing and left continuous.
Atoms are evaluated by closed-form one-sided limits, never by perturbation.

Periodic profiles.  A multiplicatively r-periodic profile h > 0 with
h(t) * t**alpha nondecreasing is represented in one of two exact forms:

* ``StepProfile``: h(t) * t**alpha is piecewise constant on the fundamental
  cells (b_i, b_{i+1}] of [1, r), with stored levels v_0 <= ... <= v_k and the
  wrap condition v_k <= r**alpha * v_0.  (A step function in h itself, once
  h(t)t^alpha is required nondecreasing across a full period, collapses to a
  constant, so the step data parameterize h(t)t^alpha; h(t) is then
  level / s**alpha on each cell.)  Members are lattice distributions with
  atoms at the breakpoints shifted by powers of r.
* ``ConstantProfile``: h identically c, giving the ordinary Weibull survival
  exp(-c t**alpha).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import spectral as _spectral
from .weights import ACase, Classification, FamilyTag, WeightSpec, classify, split_signs

__all__ = [
    "SurvivalModel", "Dirac", "Weibull", "StepProfile", "ConstantProfile",
    "RPeriodicWeibull", "BoundedSupport", "Tabulated", "Mixture", "UTransform",
    "MirrorReciprocal", "Negated",
    "validate_profile", "survival", "cdf_right", "nu_of", "quantile", "sample",
    "power_transform", "mirror_reciprocal", "negate", "a3_membership",
    "FamilyDescription", "construct_family",
    "model_from_json", "model_to_json",
]

_TINY_U = 1e-300


def _as_array(t) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr: np.ndarray, scalar: bool):
    return float(arr[()]) if scalar else arr


class SurvivalModel:
    """Base class; subclasses implement survival, cdf_right, quantile and
    hi_quantile, and may override nu for closed-form accuracy."""

    support_sign: int = 1  # +1 on (0, inf), -1 on (-inf, 0), 0 otherwise

    def survival(self, t):
        raise NotImplementedError

    def cdf_right(self, t):
        raise NotImplementedError

    def nu(self, t):
        arr, scalar = _as_array(self.survival(t))
        with np.errstate(divide="ignore"):
            out = np.where(arr > 0, -np.log(np.maximum(arr, _TINY_U)), np.inf)
        return _ret(out, scalar)

    def nu_right(self, t):
        arr, scalar = _as_array(self.cdf_right(t))
        with np.errstate(divide="ignore"):
            out = np.where(arr < 1, -np.log(np.maximum(1.0 - arr, _TINY_U)), np.inf)
        return _ret(out, scalar)

    def quantile(self, u):
        raise NotImplementedError

    def hi_quantile(self, u):
        """sup{x : survival(x) >= u}; the upper generalized inverse."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = np.maximum(rng.random(n), _TINY_U)
        return np.asarray(self.quantile(u), dtype=float)


def _check_u(u):
    arr, scalar = _as_array(u)
    if np.any((arr <= 0) | (arr >= 1)):
        raise ValueError("quantile argument must lie in (0, 1)")
    return arr, scalar


@dataclass(frozen=True)
class Dirac(SurvivalModel):
    c: float = 0.0

    @property
    def support_sign(self) -> int:
        return 0 if self.c == 0 else (1 if self.c > 0 else -1)

    def survival(self, t):
        arr, scalar = _as_array(t)
        return _ret((arr <= self.c).astype(float), scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        return _ret((arr >= self.c).astype(float), scalar)

    def nu(self, t):
        arr, scalar = _as_array(t)
        return _ret(np.where(arr <= self.c, 0.0, np.inf), scalar)

    def quantile(self, u):
        arr, scalar = _check_u(u)
        return _ret(np.full_like(arr, self.c), scalar)

    hi_quantile = quantile


@dataclass(frozen=True)
class Weibull(SurvivalModel):
    """Survival exp(-c * t**alpha) on t > 0."""

    c: float
    alpha: float

    def __post_init__(self):
        if not (self.c > 0 and self.alpha > 0):
            raise ValueError("Weibull requires c > 0 and alpha > 0")

    def nu(self, t):
        arr, scalar = _as_array(t)
        pos = np.maximum(arr, 0.0)
        return _ret(np.where(arr > 0, self.c * pos**self.alpha, 0.0), scalar)

    nu_right = nu

    def survival(self, t):
        arr, scalar = _as_array(t)
        return _ret(np.exp(-np.asarray(self.nu(arr))), scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        return _ret(1.0 - np.asarray(self.survival(arr)), scalar)

    def quantile(self, u):
        arr, scalar = _check_u(u)
        w = -np.log1p(-arr)
        return _ret((w / self.c) ** (1.0 / self.alpha), scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        w = -np.log(arr)
        return _ret((w / self.c) ** (1.0 / self.alpha), scalar)


# -- periodic profiles --------------------------------------------------------

@dataclass(frozen=True)
class StepProfile:
    """Piecewise-constant h(t)*t**alpha on the fundamental domain [1, r).

    ``breakpoints`` = (1 = b_0 < b_1 < ... < b_k < r); ``levels`` = the value
    of h(t)*t**alpha on the cell (b_i, b_{i+1}] (left-continuous, periodic:
    the value at the lattice points r**n is levels[-1] / r**alpha scaled).
    """

    r: float
    alpha: float
    breakpoints: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))

    def validate(self) -> Optional[str]:
        if not self.r > 1:
            return f"period r = {self.r} must exceed 1"
        if not self.alpha > 0:
            return f"alpha = {self.alpha} must be positive"
        b, v = self.breakpoints, self.levels
        if len(b) != len(v) or not b:
            return "breakpoints and levels must be nonempty and equally long"
        if b[0] != 1.0:
            return "first breakpoint must be 1"
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            return "breakpoints must be strictly increasing"
        if b[-1] >= self.r:
            return f"last breakpoint {b[-1]} must lie below r = {self.r}"
        if any(x <= 0 for x in v):
            return "levels must be positive (h > 0)"
        for i in range(len(v) - 1):
            if v[i] > v[i + 1]:
                return (f"h(t)*t^alpha decreasing at breakpoint {b[i + 1]:g}: "
                        f"{v[i]:g} > {v[i + 1]:g}")
        if v[-1] > self.r**self.alpha * v[0]:
            return (f"h(t)*t^alpha decreasing at the wrap {b[-1]:g} -> {self.r:g}*1: "
                    f"{v[-1]:g} > r^alpha * {v[0]:g}")
        return None

    # reduction of t > 0 to (n, s) with t = s * r**n, s in [1, r)
    def _reduce(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = np.floor(np.log(t) / math.log(self.r))
        s = t / self.r**n
        too_low = s < 1.0
        n = np.where(too_low, n - 1, n)
        s = np.where(too_low, s * self.r, s)
        too_high = s >= self.r
        n = np.where(too_high, n + 1, n)
        s = np.where(too_high, s / self.r, s)
        return n, s

    def nu(self, t):
        """h(t) * t**alpha, left-continuous, for t > 0 (array-aware)."""
        arr, scalar = _as_array(t)
        n, s = self._reduce(np.maximum(arr, _TINY_U))
        b = np.asarray(self.breakpoints)
        v = np.asarray(self.levels)
        idx = np.searchsorted(b, s, side="left") - 1
        base = np.where(idx >= 0, v[np.maximum(idx, 0)],
                        v[-1] * self.r**-self.alpha)  # s == 1: wrapped cell
        out = base * self.r ** (n * self.alpha)
        out = np.where(arr > 0, out, 0.0)
        return _ret(out, scalar)

    def nu_right(self, t):
        arr, scalar = _as_array(t)
        n, s = self._reduce(np.maximum(arr, _TINY_U))
        b = np.asarray(self.breakpoints)
        v = np.asarray(self.levels)
        idx = np.searchsorted(b, s, side="right") - 1
        out = v[np.maximum(idx, 0)] * self.r ** (n * self.alpha)
        out = np.where(arr > 0, out, 0.0)
        return _ret(out, scalar)

    # exact atom bookkeeping: atom (n, i) sits at breakpoints[i] * r**n
    def atom_location(self, n: int, i: int) -> float:
        return self.breakpoints[i] * self.r**n

    def atom_nu_left(self, n: int, i: int) -> float:
        if i >= 1:
            return self.levels[i - 1] * self.r ** (n * self.alpha)
        return self.levels[-1] * self.r ** ((n - 1) * self.alpha)

    def atom_nu_right(self, n: int, i: int) -> float:
        return self.levels[i] * self.r ** (n * self.alpha)

    def atoms_between(self, lo: float, hi: float) -> list[tuple[int, int, float]]:
        """Atoms (n, i, location) with lo <= location <= hi, ordered."""
        out = []
        n = math.floor(math.log(lo) / math.log(self.r)) - 1
        while True:
            scale = self.r**n
            if self.breakpoints[0] * scale > hi:
                break
            for i, b in enumerate(self.breakpoints):
                loc = b * scale
                if lo <= loc <= hi:
                    out.append((n, i, loc))
            n += 1
        return out

    def quantile_w(self, w):
        """Smallest atom location with nu_right >= w (w > 0, array-aware)."""
        arr, scalar = _as_array(w)
        v = np.asarray(self.levels)
        la = self.alpha * math.log(self.r)
        n = np.ceil((np.log(arr) - math.log(v[-1])) / la)
        # float guards: n minimal with v[-1] * r**(n*alpha) >= w
        n = np.where(v[-1] * self.r ** ((n - 1) * self.alpha) >= arr, n - 1, n)
        n = np.where(v[-1] * self.r ** (n * self.alpha) < arr, n + 1, n)
        wr = arr * self.r ** (-n * self.alpha)
        idx = np.searchsorted(v, wr, side="left")
        idx = np.minimum(idx, len(v) - 1)
        b = np.asarray(self.breakpoints)
        out = b[idx] * self.r**n
        return _ret(out, scalar)

    def hi_quantile_w(self, w):
        """Largest x with nu(x) <= w = location of first atom with nu_right > w."""
        arr, scalar = _as_array(w)
        v = np.asarray(self.levels)
        n = np.ceil((np.log(arr) - math.log(v[-1])) / (self.alpha * math.log(self.r)))
        n = np.where(v[-1] * self.r ** ((n - 1) * self.alpha) > arr, n - 1, n)
        n = np.where(v[-1] * self.r ** (n * self.alpha) <= arr, n + 1, n)
        wr = arr * self.r ** (-n * self.alpha)
        idx = np.searchsorted(v, wr, side="right")
        idx = np.minimum(idx, len(v) - 1)
        b = np.asarray(self.breakpoints)
        out = b[idx] * self.r**n
        return _ret(out, scalar)

    def power(self, beta: float) -> "StepProfile":
        """Profile of L(W**(1/beta)): period r**(1/beta), index alpha*beta."""
        return StepProfile(self.r ** (1.0 / beta), self.alpha * beta,
                           tuple(b ** (1.0 / beta) for b in self.breakpoints),
                           self.levels)

    def to_dict(self) -> dict:
        return {"kind": "rweib", "r": self.r, "alpha": self.alpha,
                "breakpoints": list(self.breakpoints), "levels": list(self.levels)}


@dataclass(frozen=True)
class ConstantProfile:
    """h identically c: the ordinary Weibull member of the periodic class."""

    r: float
    alpha: float
    c: float

    def validate(self) -> Optional[str]:
        if not self.r > 1:
            return f"period r = {self.r} must exceed 1"
        if not self.alpha > 0:
            return f"alpha = {self.alpha} must be positive"
        if not self.c > 0:
            return f"constant level {self.c} must be positive (h > 0)"
        return None

    def nu(self, t):
        arr, scalar = _as_array(t)
        pos = np.maximum(arr, 0.0)
        return _ret(np.where(arr > 0, self.c * pos**self.alpha, 0.0), scalar)

    nu_right = nu

    def quantile_w(self, w):
        arr, scalar = _as_array(w)
        return _ret((arr / self.c) ** (1.0 / self.alpha), scalar)

    hi_quantile_w = quantile_w

    def atoms_between(self, lo: float, hi: float) -> list:
        return []

    def power(self, beta: float) -> "ConstantProfile":
        return ConstantProfile(self.r ** (1.0 / beta), self.alpha * beta, self.c)

    def to_dict(self) -> dict:
        return {"kind": "rweib", "r": self.r, "alpha": self.alpha, "h_const": self.c}


Profile = Union[StepProfile, ConstantProfile]


def validate_profile(profile: Profile) -> Optional[str]:
    """None when the profile belongs to the admissible periodic class; a
    message naming the offending breakpoint pair otherwise."""
    return profile.validate()


@dataclass(frozen=True)
class RPeriodicWeibull(SurvivalModel):
    """Survival exp(-h(t) * t**alpha) with a multiplicatively periodic profile."""

    profile: Profile

    def __post_init__(self):
        msg = self.profile.validate()
        if msg:
            raise ValueError(f"invalid periodic profile: {msg}")

    @property
    def r(self) -> float:
        return self.profile.r

    @property
    def alpha(self) -> float:
        return self.profile.alpha

    def nu(self, t):
        return self.profile.nu(t)

    def nu_right(self, t):
        return self.profile.nu_right(t)

    def survival(self, t):
        arr, scalar = _as_array(t)
        return _ret(np.exp(-np.asarray(self.profile.nu(arr))), scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        return _ret(1.0 - np.exp(-np.asarray(self.profile.nu_right(arr))), scalar)

    def quantile(self, u):
        arr, scalar = _check_u(u)
        w = -np.log1p(-arr)
        return _ret(np.asarray(self.profile.quantile_w(w)), scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        w = -np.log(arr)
        return _ret(np.asarray(self.profile.hi_quantile_w(w)), scalar)


@dataclass(frozen=True)
class BoundedSupport(SurvivalModel):
    """Continuous distribution on [l, u] given by a piecewise-linear CDF."""

    points: tuple[float, ...]
    cdf_values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(x) for x in self.points))
        object.__setattr__(self, "cdf_values", tuple(float(x) for x in self.cdf_values))
        p, c = self.points, self.cdf_values
        if len(p) != len(c) or len(p) < 2:
            raise ValueError("need matching points/cdf_values arrays, length >= 2")
        if any(b <= a for a, b in zip(p, p[1:])):
            raise ValueError("points must be strictly increasing")
        if c[0] != 0.0 or c[-1] != 1.0 or any(b < a for a, b in zip(c, c[1:])):
            raise ValueError("cdf_values must be nondecreasing from 0 to 1")

    @classmethod
    def uniform(cls, l: float, u: float) -> "BoundedSupport":
        return cls((l, u), (0.0, 1.0))

    @property
    def lower(self) -> float:
        return self.points[0]

    @property
    def upper(self) -> float:
        return self.points[-1]

    @property
    def support_sign(self) -> int:
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        return 0

    def _cdf(self, t):
        arr, scalar = _as_array(t)
        out = np.interp(arr, self.points, self.cdf_values, left=0.0, right=1.0)
        return _ret(out, scalar)

    def survival(self, t):
        arr, scalar = _as_array(t)
        return _ret(1.0 - np.asarray(self._cdf(arr)), scalar)

    cdf_right = _cdf

    def quantile(self, u):
        arr, scalar = _check_u(u)
        c = np.asarray(self.cdf_values)
        p = np.asarray(self.points)
        i = np.searchsorted(c, arr, side="left")
        i = np.clip(i, 1, len(c) - 1)
        c0, c1 = c[i - 1], c[i]
        frac = np.where(c1 > c0, (arr - c0) / np.where(c1 > c0, c1 - c0, 1.0), 0.0)
        out = p[i - 1] + frac * (p[i] - p[i - 1])
        return _ret(out, scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        val = 1.0 - arr
        c = np.asarray(self.cdf_values)
        p = np.asarray(self.points)
        j = np.searchsorted(c, val, side="right") - 1
        j = np.clip(j, 0, len(c) - 2)
        c0, c1 = c[j], c[j + 1]
        frac = np.where(c1 > c0, (val - c0) / np.where(c1 > c0, c1 - c0, 1.0), 0.0)
        out = p[j] + np.clip(frac, 0.0, 1.0) * (p[j + 1] - p[j])
        return _ret(out, scalar)


@dataclass(frozen=True)
class Tabulated(SurvivalModel):
    """nu tabulated on a positive grid, interpolated linearly in (log t, nu)
    and clamped outside the grid."""

    ts: tuple[float, ...]
    nus: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "ts", tuple(float(x) for x in self.ts))
        object.__setattr__(self, "nus", tuple(float(x) for x in self.nus))
        t, v = self.ts, self.nus
        if len(t) != len(v) or len(t) < 2:
            raise ValueError("need matching ts/nus arrays, length >= 2")
        if any(b <= a for a, b in zip(t, t[1:])) or t[0] <= 0:
            raise ValueError("ts must be positive and strictly increasing")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("nus must be nondecreasing")

    def nu(self, t):
        arr, scalar = _as_array(t)
        logt = np.log(np.maximum(arr, _TINY_U))
        out = np.interp(logt, np.log(self.ts), self.nus)
        out = np.where(arr > 0, out, 0.0)
        return _ret(out, scalar)

    nu_right = nu

    def survival(self, t):
        arr, scalar = _as_array(t)
        return _ret(np.exp(-np.asarray(self.nu(arr))), scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        return _ret(1.0 - np.asarray(self.survival(arr)), scalar)

    def _invert(self, w: np.ndarray, rightmost: bool) -> np.ndarray:
        nus = np.asarray(self.nus)
        logts = np.log(self.ts)
        side = "right" if rightmost else "left"
        i = np.searchsorted(nus, w, side=side)
        if rightmost:
            i = i - 1
            i = np.clip(i, 0, len(nus) - 2)
            n0, n1 = nus[i], nus[i + 1]
            frac = np.where(n1 > n0, (w - n0) / np.where(n1 > n0, n1 - n0, 1.0), 1.0)
            out = logts[i] + np.clip(frac, 0.0, 1.0) * (logts[i + 1] - logts[i])
        else:
            i = np.clip(i, 1, len(nus) - 1)
            n0, n1 = nus[i - 1], nus[i]
            frac = np.where(n1 > n0, (w - n0) / np.where(n1 > n0, n1 - n0, 1.0), 0.0)
            out = logts[i - 1] + np.clip(frac, 0.0, 1.0) * (logts[i] - logts[i - 1])
        out = np.where(w <= nus[0], logts[0], out)
        out = np.where(w >= nus[-1], logts[-1], out)
        return np.exp(out)

    def quantile(self, u):
        arr, scalar = _check_u(u)
        w = -np.log1p(-arr)
        return _ret(self._invert(w, rightmost=False), scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        w = -np.log(arr)
        return _ret(self._invert(w, rightmost=True), scalar)


class Mixture(SurvivalModel):
    """Finite mixture sum_i w_i * F_i; weights positive, summing to one."""

    def __init__(self, components: Sequence[tuple[float, SurvivalModel]]):
        comps = [(float(w), m) for w, m in components if w > 0]
        total = math.fsum(w for w, _ in comps)
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-12):
            raise ValueError(f"mixture weights sum to {total}, expected 1")
        self.components = comps

    @property
    def support_sign(self) -> int:
        signs = {m.support_sign for _, m in self.components}
        return signs.pop() if len(signs) == 1 else 0

    def survival(self, t):
        arr, scalar = _as_array(t)
        out = sum(w * np.asarray(m.survival(arr)) for w, m in self.components)
        return _ret(np.asarray(out), scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        out = sum(w * np.asarray(m.cdf_right(arr)) for w, m in self.components)
        return _ret(np.asarray(out), scalar)

    def _bracket(self) -> tuple[float, float]:
        eps = 1e-12
        lo = min(float(np.min(m.quantile(eps))) for _, m in self.components)
        hi = max(float(np.max(m.quantile(1 - eps))) for _, m in self.components)
        pad = max(1.0, abs(lo), abs(hi)) * 1e-6
        return lo - pad, hi + pad

    def quantile(self, u):
        arr, scalar = _check_u(u)
        lo0, hi0 = self._bracket()
        out = np.empty_like(arr)
        flat = arr.ravel()
        res = out.ravel()
        for k, uu in enumerate(flat):
            lo, hi = lo0, hi0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if float(self.cdf_right(mid)) >= uu:
                    hi = mid
                else:
                    lo = mid
            res[k] = hi
        return _ret(out, scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        lo0, hi0 = self._bracket()
        out = np.empty_like(arr)
        flat = arr.ravel()
        res = out.ravel()
        for k, uu in enumerate(flat):
            lo, hi = lo0, hi0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if float(self.survival(mid)) >= uu:
                    lo = mid
                else:
                    hi = mid
            res[k] = lo
        return _ret(out, scalar)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        cuts = np.cumsum([w for w, _ in self.components])
        pick = np.searchsorted(cuts, rng.random(n), side="right")
        pick = np.minimum(pick, len(self.components) - 1)
        out = np.empty(n)
        for i, (_, m) in enumerate(self.components):
            mask = pick == i
            k = int(mask.sum())
            if k:
                out[mask] = m.sample(rng, k)
        return out


@dataclass(frozen=True)
class UTransform(SurvivalModel):
    """The positive-part distribution built from a negative-supported G and
    all-negative weights: survival(t) = prod_j P(G <= t/T_j) for t > 0."""

    inner: SurvivalModel
    weights: tuple[float, ...]

    def __post_init__(self):
        if any(w >= 0 for w in self.weights):
            raise ValueError("UTransform requires all-negative weights")

    def survival(self, t):
        arr, scalar = _as_array(t)
        out = np.ones_like(arr)
        for w in self.weights:
            out = out * np.asarray(self.inner.cdf_right(arr / w))
        out = np.where(arr > 0, out, 1.0)
        return _ret(out, scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        out = np.ones_like(arr)
        for w in self.weights:
            out = out * (1.0 - np.asarray(self.inner.survival(arr / w)))
        out = np.where(arr > 0, 1.0 - out, 0.0)
        return _ret(out, scalar)

    def _bracket(self) -> tuple[float, float]:
        eps = 1e-12
        g_lo = float(np.min(self.inner.quantile(eps)))
        hi = max(abs(g_lo) * max(abs(w) for w in self.weights), 1.0) * 2
        return 0.0, hi

    def quantile(self, u):
        arr, scalar = _check_u(u)
        lo0, hi0 = self._bracket()
        out = np.empty_like(arr)
        flat, res = arr.ravel(), out.ravel()
        for k, uu in enumerate(flat):
            lo, hi = lo0, hi0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if float(self.cdf_right(mid)) >= uu:
                    hi = mid
                else:
                    lo = mid
            res[k] = hi
        return _ret(out, scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        lo0, hi0 = self._bracket()
        out = np.empty_like(arr)
        flat, res = arr.ravel(), out.ravel()
        for k, uu in enumerate(flat):
            lo, hi = lo0, hi0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if float(self.survival(mid)) >= uu:
                    lo = mid
                else:
                    hi = mid
            res[k] = lo
        return _ret(out, scalar)


@dataclass(frozen=True)
class MirrorReciprocal(SurvivalModel):
    """L(-1/W): the idempotent reflection across the sign of the support.

    For W > 0, -1/W < 0 and the map w -> -1/w is strictly increasing on each
    half line, so survival and quantiles transform without convention changes.
    """

    inner: SurvivalModel

    def __post_init__(self):
        if self.inner.support_sign == 0:
            raise ValueError("mirror-reciprocal requires a single-signed model")

    @property
    def support_sign(self) -> int:
        return -self.inner.support_sign

    def survival(self, t):
        arr, scalar = _as_array(t)
        safe = np.where(arr == 0.0, 1.0, arr)
        inner_val = np.asarray(self.inner.survival(-1.0 / safe))
        if self.support_sign < 0:
            out = np.where(arr < 0, inner_val, 0.0)
        else:
            out = np.where(arr > 0, inner_val, 1.0)
        return _ret(out, scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        safe = np.where(arr == 0.0, 1.0, arr)
        inner_val = np.asarray(self.inner.cdf_right(-1.0 / safe))
        if self.support_sign < 0:
            out = np.where(arr < 0, inner_val, 1.0)
        else:
            out = np.where(arr > 0, inner_val, 0.0)
        return _ret(out, scalar)

    def quantile(self, u):
        arr, scalar = _check_u(u)
        return _ret(-1.0 / np.asarray(self.inner.quantile(arr)), scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        return _ret(-1.0 / np.asarray(self.inner.hi_quantile(arr)), scalar)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return -1.0 / self.inner.sample(rng, n)


@dataclass(frozen=True)
class Negated(SurvivalModel):
    """L(-W): the bridge between the min- and max-forms of the equation."""

    inner: SurvivalModel

    @property
    def support_sign(self) -> int:
        return -self.inner.support_sign

    def survival(self, t):
        arr, scalar = _as_array(t)
        return _ret(np.asarray(self.inner.cdf_right(-arr)), scalar)

    def cdf_right(self, t):
        arr, scalar = _as_array(t)
        return _ret(np.asarray(self.inner.survival(-arr)), scalar)

    def quantile(self, u):
        arr, scalar = _check_u(u)
        return _ret(-np.asarray(self.inner.hi_quantile(arr)), scalar)

    def hi_quantile(self, u):
        arr, scalar = _check_u(u)
        return _ret(-np.asarray(self.inner.quantile(arr)), scalar)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return -self.inner.sample(rng, n)


# -- module-level operation surface -------------------------------------------

def survival(model: SurvivalModel, t):
    """P(W >= t) under the left-continuous convention."""
    return model.survival(t)


def cdf_right(model: SurvivalModel, t):
    """F(t+) = P(W <= t)."""
    return model.cdf_right(t)


def nu_of(model: SurvivalModel, t):
    """-log survival, +inf where the survival vanishes."""
    return model.nu(t)


def quantile(model: SurvivalModel, u):
    """Generalized inverse inf{s : F(s+) >= u}; ties resolve leftmost."""
    return model.quantile(u)


def sample(model: SurvivalModel, rng: np.random.Generator, n: int) -> np.ndarray:
    """Inverse-transform samples; deterministic given the generator state."""
    return model.sample(rng, n)


def power_transform(model: SurvivalModel, beta: float) -> SurvivalModel:
    """L(W**(1/beta)) for positive-supported W (or Dirac(c), c >= 0)."""
    if beta <= 0:
        raise ValueError("power transform requires beta > 0")
    if isinstance(model, Dirac):
        if model.c < 0:
            raise ValueError("power transform undefined for negative support")
        return Dirac(model.c ** (1.0 / beta))
    if isinstance(model, Weibull):
        return Weibull(model.c, model.alpha * beta)
    if isinstance(model, RPeriodicWeibull):
        return RPeriodicWeibull(model.profile.power(beta))
    if isinstance(model, Tabulated):
        return Tabulated(tuple(t ** (1.0 / beta) for t in model.ts), model.nus)
    if isinstance(model, BoundedSupport):
        if model.lower <= 0:
            raise ValueError("power transform undefined for negative support")
        return BoundedSupport(tuple(p ** (1.0 / beta) for p in model.points),
                              model.cdf_values)
    if model.support_sign < 0:
        raise ValueError("power transform undefined for negative support")
    raise TypeError(f"power transform not implemented for {type(model).__name__}")


def mirror_reciprocal(model: SurvivalModel) -> SurvivalModel:
    """Apply (or undo) the reflection W -> -1/W; involutive."""
    if isinstance(model, MirrorReciprocal):
        return model.inner
    if isinstance(model, Dirac):
        if model.c == 0:
            raise ValueError("mirror-reciprocal undefined at delta_0")
        return Dirac(-1.0 / model.c)
    return MirrorReciprocal(model)


def negate(model: SurvivalModel) -> SurvivalModel:
    """Apply (or undo) W -> -W; involutive."""
    if isinstance(model, Negated):
        return model.inner
    if isinstance(model, Dirac):
        return Dirac(-model.c)
    return Negated(model)


def a3_membership(G: SurvivalModel, spec: WeightSpec) -> bool:
    """Membership test for the bounded-support family: support inside
    (0, inf) with u_F / l_F at most the smallest weight above one."""
    if isinstance(G, Dirac):
        return G.c > 0
    if isinstance(G, BoundedSupport):
        l, u = G.lower, G.upper
    else:
        l = float(np.min(G.quantile(1e-15)))
        u = float(np.max(G.hi_quantile(1e-15)))
    if not (0 < l <= u < math.inf):
        return False
    return _inf_over_jstar(spec) >= u / l


def _inf_over_jstar(spec: WeightSpec) -> float:
    vals = [t for t in spec.head if t != 1.0]
    if spec.tail is not None:
        ti = spec.tail.mag_inf
        if ti != 1.0:
            vals.append(ti)
        else:
            vals.extend(v for v in spec.tail.terms(64) if v != 1.0)
    if not vals:
        return math.inf
    return min(vals)


# -- families ------------------------------------------------------------------

@dataclass
class FamilyDescription:
    """Parametric description of the full solution set, with an instantiation
    hook producing members.  delta_0 is always the trivial member."""

    tag: FamilyTag
    description: str
    spec: WeightSpec
    alpha: Optional[float] = None
    group: Optional[_spectral.GroupStructure] = None
    mirrored: bool = False
    inner: Optional["FamilyDescription"] = None
    param_doc: str = ""

    def member(self, **kw) -> SurvivalModel:
        m = self._make(**kw)
        if self.mirrored and not (isinstance(m, Dirac) and m.c == 0):
            m = mirror_reciprocal(m)
        return m

    def _make(self, **kw) -> SurvivalModel:
        if self.inner is not None:
            return self.inner._make(**kw)
        tag = self.tag
        if tag in (FamilyTag.ALL_DIRAC, FamilyTag.DIRAC_RAY, FamilyTag.ALL_DISTRIBUTIONS):
            c = float(kw.pop("c", 0.0))
            if kw:
                raise TypeError(f"unexpected member parameters {sorted(kw)}")
            if tag is not FamilyTag.ALL_DIRAC and c < 0:
                raise ValueError("this family contains only c >= 0")
            return Dirac(c)
        if tag is FamilyTag.TRIVIAL_ONLY:
            if kw:
                raise TypeError("the trivial family has no parameters")
            return Dirac(0.0)
        if tag is FamilyTag.BOUNDED_SUPPORT:
            G = kw.pop("G", None)
            if kw or G is None:
                raise TypeError("bounded-support family takes a single G=<model>")
            if not a3_membership(G, self.spec):
                raise ValueError(
                    "G violates the support-ratio bound of the bounded family")
            return G
        if tag is FamilyTag.SPECTRAL:
            return self._make_spectral(**kw)
        if tag is FamilyTag.NEG_FINITE_MINIMAX:
            return self._make_neg(**kw)
        raise TypeError(f"family {tag.value} has no direct instantiation hook")

    def _make_spectral(self, **kw) -> SurvivalModel:
        if "c" in kw:
            c = float(kw.pop("c"))
            if kw:
                raise TypeError(f"unexpected member parameters {sorted(kw)}")
            if c < 0:
                raise ValueError("scale c must be nonnegative")
            if c == 0.0:
                return Dirac(0.0)
            return Weibull(c, self.alpha)
        if not self.group.is_lattice:
            raise TypeError("continuous-group family takes a single scale c")
        if "profile" in kw:
            profile = kw.pop("profile")
        else:
            profile = StepProfile(self.group.r, self.alpha,
                                  tuple(kw.pop("breakpoints")),
                                  tuple(kw.pop("levels")))
        if kw:
            raise TypeError(f"unexpected member parameters {sorted(kw)}")
        if not math.isclose(profile.r, self.group.r, rel_tol=1e-12):
            raise ValueError(f"profile period {profile.r} != lattice span {self.group.r}")
        if not math.isclose(profile.alpha, self.alpha, rel_tol=1e-12):
            raise ValueError(f"profile index {profile.alpha} != exponent {self.alpha}")
        msg = validate_profile(profile)
        if msg:
            raise ValueError(f"invalid periodic profile: {msg}")
        return RPeriodicWeibull(profile)

    def _make_neg(self, **kw) -> SurvivalModel:
        G = kw.pop("G", None)
        if kw or G is None:
            raise TypeError("the all-negative family takes a single G=<model>")
        if G.support_sign >= 0:
            raise ValueError("G must be supported on (-inf, 0)")
        from .verify import alpha_negative
        n = len(self.spec.head)
        a = alpha_negative(n)
        return Mixture([(a, G), (a**n, UTransform(G, self.spec.head))])

    def to_dict(self) -> dict:
        d: dict = {"tag": self.tag.value, "description": self.description,
                   "mirrored": self.mirrored, "param_doc": self.param_doc}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.group is not None:
            d["group"] = self.group.to_dict()
        if self.inner is not None:
            d["inner"] = self.inner.to_dict()
        return d


def construct_family(classification: Classification,
                     char_exponent: Optional[_spectral.CharExponent] = None,
                     group: Optional[_spectral.GroupStructure] = None,
                     ) -> FamilyDescription:
    """Build the family description for a classified weight vector.

    For the spectral cases the caller must supply the characteristic exponent
    and group structure of the vector itself; reductions (mirror, mixed) do
    their own spectral analysis on derived vectors internally.
    """
    cls = classification
    spec = cls.spec
    tag = cls.summary.tag

    if tag is FamilyTag.SPECTRAL:
        if char_exponent is None or group is None:
            raise ValueError(
                "spectral case (A5/A6) requires char_exponent and group inputs")
        if group.is_lattice:
            desc = (f"r-periodic Weibull family: survival exp(-h(t) t^a), "
                    f"a = {char_exponent.alpha:.12g}, r = {group.r:.12g}; plus delta_0")
            doc = "c=<scale> (constant h) or profile=<StepProfile> / breakpoints=, levels="
        else:
            desc = (f"Weibull family: survival exp(-c t^a), "
                    f"a = {char_exponent.alpha:.12g}, c > 0; plus delta_0")
            doc = "c=<scale>; c=0 gives delta_0"
        return FamilyDescription(tag, desc, spec, alpha=char_exponent.alpha,
                                 group=group, param_doc=doc)

    if tag is FamilyTag.POS_EMPTY_MIRROR:
        inner = _positive_family_of_inverse(spec)
        if inner is None:
            return FamilyDescription(FamilyTag.TRIVIAL_ONLY, "{delta_0}", spec,
                                     param_doc="no parameters")
        return FamilyDescription(
            tag, "negative solutions: mirror-reciprocals of the family below; "
                 "plus delta_0",
            spec, alpha=inner.alpha, group=inner.group, mirrored=True,
            inner=inner, param_doc=inner.param_doc)

    if tag is FamilyTag.MIXED_REDUCTION:
        pos_part, _ = split_signs(spec)
        pos_cls = classify(pos_part)
        if pos_cls.summary.tag is FamilyTag.POS_EMPTY_MIRROR:
            inner = _positive_family_of_inverse(pos_part)
        elif pos_cls.summary.tag is FamilyTag.ALL_DIRAC:
            # positive part all ones: its negative solutions are delta_c, c < 0
            inner = FamilyDescription(FamilyTag.ALL_DIRAC,
                                      "{delta_c : c > 0}", pos_part.inverse(),
                                      param_doc="c=<positive scale>")
        else:
            inner = None  # positive part has no negative-supported solutions
        if inner is None:
            return FamilyDescription(FamilyTag.TRIVIAL_ONLY, "{delta_0}", spec,
                                     param_doc="no parameters")
        return FamilyDescription(
            tag, "F(0) = 1 and F solves the positive-part equation: members are "
                 "mirror-reciprocals of the family below; plus delta_0",
            spec, alpha=inner.alpha, group=inner.group, mirrored=True,
            inner=inner, param_doc=inner.param_doc)

    descriptions = {
        FamilyTag.ALL_DISTRIBUTIONS: "every distribution solves the equation",
        FamilyTag.ALL_DIRAC: "{delta_c : c in R}",
        FamilyTag.DIRAC_RAY: "{delta_0} u {delta_c : c > 0}",
        FamilyTag.TRIVIAL_ONLY: "{delta_0}",
        FamilyTag.BOUNDED_SUPPORT: str(cls.summary),
        FamilyTag.NEG_FINITE_MINIMAX: str(cls.summary),
    }
    docs = {
        FamilyTag.ALL_DISTRIBUTIONS: "c=<location> for Dirac members",
        FamilyTag.ALL_DIRAC: "c=<location>",
        FamilyTag.DIRAC_RAY: "c=<nonnegative location>",
        FamilyTag.TRIVIAL_ONLY: "no parameters",
        FamilyTag.BOUNDED_SUPPORT: "G=<bounded-support model>",
        FamilyTag.NEG_FINITE_MINIMAX: "G=<model on (-inf, 0) solving the minimax identity>",
    }
    return FamilyDescription(tag, descriptions[tag], spec, param_doc=docs[tag])


def _positive_family_of_inverse(spec: WeightSpec) -> Optional[FamilyDescription]:
    """Family of positive solutions for T^{-1}, or None when empty.

    Supports every vector expressible here: finite ones by direct inversion;
    infinite ones only reach a nonempty inverse family when the tail is the
    constant-one tail (then T^{-1} has the same ones and the family is the
    Dirac ray)."""
    if not spec.is_finite:
        tail = spec.tail
        if (tail.kind == "constant" and tail.a == 1.0 and tail.sign > 0
                and max(spec.head) <= 1.0):
            inv_ones = WeightSpec(tuple(1.0 / t for t in spec.head), tail)
            return construct_family(classify(inv_ones))
        return None
    inv = spec.inverse()
    inv_cls = classify(inv)
    t = inv_cls.summary.tag
    if t is FamilyTag.SPECTRAL:
        ce = _spectral.characteristic_exponent(inv)
        grp = _spectral.detect_group(inv)
        return construct_family(inv_cls, ce, grp)
    if t in (FamilyTag.ALL_DIRAC, FamilyTag.DIRAC_RAY, FamilyTag.BOUNDED_SUPPORT,
             FamilyTag.ALL_DISTRIBUTIONS):
        return construct_family(inv_cls)
    if t is FamilyTag.TRIVIAL_ONLY:
        return None
    if t is FamilyTag.POS_EMPTY_MIRROR:
        return None  # positives of the inverse are empty
    return None


# -- JSON distribution files ---------------------------------------------------

def model_from_json(obj: dict | str) -> SurvivalModel:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError('distribution spec must be an object with a "kind" field')
    kind = obj["kind"]
    try:
        if kind == "dirac":
            return Dirac(float(obj["c"]))
        if kind == "weibull":
            return Weibull(float(obj["c"]), float(obj["alpha"]))
        if kind == "rweib":
            if "h_const" in obj:
                prof: Profile = ConstantProfile(float(obj["r"]), float(obj["alpha"]),
                                                float(obj["h_const"]))
            else:
                prof = StepProfile(float(obj["r"]), float(obj["alpha"]),
                                   tuple(obj["breakpoints"]), tuple(obj["levels"]))
            return RPeriodicWeibull(prof)
        if kind == "uniform":
            return BoundedSupport.uniform(float(obj["l"]), float(obj["u"]))
        if kind == "bounded":
            return BoundedSupport(tuple(obj["points"]), tuple(obj["cdf"]))
        if kind == "tabulated":
            return Tabulated(tuple(obj["t"]), tuple(obj["nu"]))
        if kind == "mirror":
            return mirror_reciprocal(model_from_json(obj["inner"]))
        if kind == "negated":
            return negate(model_from_json(obj["inner"]))
        if kind == "mixture":
            return Mixture([(float(w), model_from_json(m))
                            for w, m in obj["components"]])
    except KeyError as e:
        raise ValueError(f"distribution spec kind {kind!r} is missing field {e}") from None
    raise ValueError(f"unknown distribution kind {kind!r}")


def model_to_json(model: SurvivalModel) -> dict:
    if isinstance(model, Dirac):
        return {"kind": "dirac", "c": model.c}
    if isinstance(model, Weibull):
        return {"kind": "weibull", "c": model.c, "alpha": model.alpha}
    if isinstance(model, RPeriodicWeibull):
        return model.profile.to_dict()
    if isinstance(model, BoundedSupport):
        return {"kind": "bounded", "points": list(model.points),
                "cdf": list(model.cdf_values)}
    if isinstance(model, Tabulated):
        return {"kind": "tabulated", "t": list(model.ts), "nu": list(model.nus)}
    if isinstance(model, MirrorReciprocal):
        return {"kind": "mirror", "inner": model_to_json(model.inner)}
    if isinstance(model, Negated):
        return {"kind": "negated", "inner": model_to_json(model.inner)}
    if isinstance(model, Mixture):
        return {"kind": "mixture",
                "components": [[w, model_to_json(m)] for w, m in model.components]}
    raise TypeError(f"cannot serialize {type(model).__name__}")
