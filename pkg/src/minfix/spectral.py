"""Moment function m(beta) = sum_j T_j**beta, characteristic exponent, and the
multiplicative group generated by the weights.

The characteristic exponent is the unique alpha > 0 with m(-alpha) = 1; it
exists for every supported vector with all weights > 1 (finite vectors, and
geometric tails, make m finite on the negative axis with range (0, inf)).

The closed multiplicative subgroup of (0, inf) generated by the weights is
either all of (0, inf) or r**Z for some r > 1.  Commensurability of logarithms
is undecidable from floats, so the lattice verdict is operational: each log
ratio must admit a rational approximation p/q (q <= max_den) of near-rational
quality |x - p/q| <= rel_eps / q**2, and the reconstructed powers r**n_j must
reproduce every weight to relative rel_eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .weights import WeightSpec

__all__ = [
    "CharExponent",
    "GroupStructure",
    "eval_m",
    "characteristic_exponent",
    "detect_group",
    "DEFAULT_ROOT_TOL",
    "DEFAULT_MAX_DEN",
    "DEFAULT_REL_EPS",
]

DEFAULT_ROOT_TOL = 1e-12
DEFAULT_MAX_DEN = 10**6
DEFAULT_REL_EPS = 1e-9


@dataclass(frozen=True)
class CharExponent:
    alpha: float
    residual: float
    bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "residual": self.residual,
                "bracket": list(self.bracket)}


@dataclass(frozen=True)
class GroupStructure:
    kind: str  # "continuous" | "lattice"
    r: Optional[float] = None
    exponents: Optional[tuple[int, ...]] = None
    generators: Optional[tuple[float, ...]] = None

    @property
    def is_lattice(self) -> bool:
        return self.kind == "lattice"

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.is_lattice:
            d["r"] = self.r
            d["exponents"] = list(self.exponents)
        return d


def eval_m(spec: WeightSpec, beta: float) -> float:
    """sum_j T_j**beta as an extended real (math.inf when divergent).

    Requires all weights positive.  Finite vectors sum exactly; geometric
    tails use the closed-form geometric series (finite iff beta < 0);
    constant and convergent tails diverge for every beta.
    """
    if not spec.all_positive:
        raise ValueError("eval_m requires all weights positive")
    head = math.fsum(t**beta for t in spec.head)
    if spec.tail is None:
        return head
    tail = spec.tail.m_sum(beta)
    return head + tail


def characteristic_exponent(spec: WeightSpec, tol: float = DEFAULT_ROOT_TOL,
                            ) -> CharExponent | None:
    """Solve m(-alpha) = 1 for alpha > 0 by bracketing and bisection.

    m(-a) is continuous and strictly decreasing in a when all weights exceed
    one, so bisection is safe; the interval is narrowed to floating-point
    resolution, which leaves |m(-alpha) - 1| at rounding level, far below
    ``tol``.  Returns None if no sign change can be bracketed (not reachable
    with the supported tail shapes).
    """
    mags = spec.magnitudes(tail_count=1)
    if not all(t > 1 for t in mags) or not spec.all_positive:
        raise ValueError("characteristic exponent requires all weights > 1")

    def f(a: float) -> float:
        return eval_m(spec, -a) - 1.0

    lo = 2.0**-40  # m(-lo) ~ m(0) = |J| >= 2, so f(lo) > 0
    if not f(lo) > 0:
        # pathological (weights barely above 1 at float resolution)
        return None
    hi = 1.0
    grow = 0
    while f(hi) > 0:
        lo = hi
        hi *= 2.0
        grow += 1
        if grow > 200:
            return None
    bracket = (lo, hi)
    # bisect to machine resolution or an exact root
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            lo = hi = mid
            break
        if fm > 0:
            lo = mid
        else:
            hi = mid
    alpha = lo if abs(f(lo)) <= abs(f(hi)) else hi
    residual = abs(f(alpha))
    if residual > tol:
        raise ArithmeticError(
            f"bisection residual {residual:.3e} exceeds tolerance {tol:.3e}")
    return CharExponent(alpha, residual, bracket)


def _group_generators(spec: WeightSpec) -> tuple[float, ...]:
    """Finite generator list of the group: head weights, plus (a, q) for a
    geometric tail (every tail value is a product a * q**k)."""
    gens = tuple(spec.head)
    if spec.tail is not None:
        if spec.tail.kind != "geometric":
            raise ValueError(
                "group detection supports finite vectors and geometric tails only")
        gens = gens + (spec.tail.a * spec.tail.sign, spec.tail.q)
    return gens


def detect_group(spec: WeightSpec, max_den: int = DEFAULT_MAX_DEN,
                 rel_eps: float = DEFAULT_REL_EPS) -> GroupStructure:
    """Classify the closed multiplicative group generated by the weights.

    Returns lattice structure r**Z with per-generator exponents n_j
    (gcd(n_j) = 1, every generator equal to r**n_j within rel_eps), or the
    continuous verdict.
    """
    gens = _group_generators(spec)
    if not all(g > 1 for g in gens):
        raise ValueError("group detection requires all weights > 1")

    logs = [math.log(g) for g in gens]
    base = logs[0]
    ratios = []
    for lg in logs:
        x = lg / base
        frac = Fraction(x).limit_denominator(max_den)
        if abs(x - float(frac)) > rel_eps / frac.denominator**2:
            return GroupStructure("continuous", generators=gens)
        ratios.append(frac)

    denom_lcm = math.lcm(*(f.denominator for f in ratios))
    exps = [int(f * denom_lcm) for f in ratios]
    g = math.gcd(*exps)
    exps = [e // g for e in exps]
    log_r = base * g / denom_lcm
    r = math.exp(log_r)
    for gen, n in zip(gens, exps):
        if abs(gen - r**n) / gen > rel_eps:
            return GroupStructure("continuous", generators=gens)
    return GroupStructure("lattice", r=r, exponents=tuple(exps), generators=gens)
