"""Weight vectors for the min-equation and their case classification.

A weight vector T is a finite list of nonzero reals, optionally followed by a
structured infinite tail (so the index set is all of N).  Three tail shapes are
supported; together with finite heads they realize every qualitative regime the
classifier distinguishes:

* ``geometric``   T_j = a * q**(j - j0), q > 1   (grows to infinity)
* ``constant``    T_j = a for j >= j0
* ``convergent``  T_j = L + a * s**(-(j - j0)), s > 1  (decreases to L)

Arbitrary lazily-evaluated infinite sequences are deliberately not supported.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Sequence

__all__ = [
    "TailSpec",
    "WeightSpec",
    "SignCase",
    "ACase",
    "FamilyTag",
    "Summary",
    "Classification",
    "reduce_zero",
    "split_signs",
    "classify",
    "weights_from_json",
    "weights_to_json",
    "parse_inline_weights",
]

_TAIL_KINDS = ("geometric", "constant", "convergent")


@dataclass(frozen=True)
class TailSpec:
    """Structured infinite tail of a weight vector.

    ``sign = -1`` negates every tail value; it exists so that all-negative
    infinite vectors are expressible (their solution set is {delta_0}).
    """

    kind: str
    a: float = 1.0
    q: float = 2.0
    L: float = 1.0
    s: float = 2.0
    j0: int = 1
    sign: int = 1

    def __post_init__(self):
        if self.kind not in _TAIL_KINDS:
            raise ValueError(f"unknown tail kind {self.kind!r}; expected one of {_TAIL_KINDS}")
        if self.sign not in (1, -1):
            raise ValueError("tail sign must be +1 or -1")
        if self.kind == "geometric":
            if not (self.a > 0 and self.q > 1):
                raise ValueError("geometric tail requires a > 0 and q > 1")
        elif self.kind == "constant":
            if not self.a >= 1:
                raise ValueError("constant tail requires a >= 1")
        else:
            if not (self.L >= 1 and self.a > 0 and self.s > 1):
                raise ValueError("convergent tail requires L >= 1, a > 0, s > 1")

    def term(self, k: int) -> float:
        """k-th tail value, k = 0, 1, 2, ... (magnitude times sign)."""
        if self.kind == "geometric":
            v = self.a * self.q**k
        elif self.kind == "constant":
            v = self.a
        else:
            v = self.L + self.a * self.s ** (-k)
        return self.sign * v

    def terms(self, count: int) -> list[float]:
        return [self.term(k) for k in range(count)]

    # analytic facts about the magnitude sequence |T_j|
    @property
    def mag_inf(self) -> float:
        if self.kind == "geometric":
            return self.a
        if self.kind == "constant":
            return self.a
        return self.L  # approached, never attained

    @property
    def mag_limit(self) -> float:
        if self.kind == "geometric":
            return math.inf
        if self.kind == "constant":
            return self.a
        return self.L

    @property
    def mag_sup(self) -> float:
        if self.kind == "geometric":
            return math.inf
        if self.kind == "constant":
            return self.a
        return self.L + self.a

    def count_ones(self) -> int | float:
        """How many tail values equal 1 exactly (can be infinite)."""
        if self.sign < 0:
            return 0
        if self.kind == "constant":
            return math.inf if self.a == 1.0 else 0
        if self.kind == "convergent":
            return 0  # values are strictly above L >= 1
        # geometric: a * q**k == 1 for at most one integer k >= 0
        n = 0
        k = 0
        while True:
            v = self.a * self.q**k
            if v > 1.0:
                break
            if v == 1.0:
                n += 1
            k += 1
        return n

    def m_sum(self, beta: float) -> float:
        """Sum of |T_j|**beta over the tail, as an extended real.

        Geometric tails admit the closed form a**beta / (1 - q**beta), finite
        exactly when beta < 0.  Constant and convergent tails have terms bounded
        away from zero, so their sum diverges for every beta.
        """
        if self.kind == "geometric":
            if beta < 0:
                return self.a**beta / (1.0 - self.q**beta)
            return math.inf
        return math.inf


@dataclass(frozen=True)
class WeightSpec:
    """The weight vector T: finite head plus optional infinite tail."""

    head: tuple[float, ...]
    tail: Optional[TailSpec] = None

    def __post_init__(self):
        head = tuple(float(t) for t in self.head)
        object.__setattr__(self, "head", head)
        if not head and self.tail is None:
            raise ValueError("weight vector must have at least one entry")
        for t in head:
            if t == 0.0 or not math.isfinite(t):
                raise ValueError(f"head weights must be nonzero finite reals, got {t}")

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    @property
    def size(self) -> int | float:
        return len(self.head) if self.is_finite else math.inf

    def magnitudes(self, tail_count: int = 0) -> list[float]:
        vals = [abs(t) for t in self.head]
        if self.tail is not None:
            vals += [abs(v) for v in self.tail.terms(tail_count)]
        return vals

    @property
    def all_positive(self) -> bool:
        return all(t > 0 for t in self.head) and (self.tail is None or self.tail.sign > 0)

    @property
    def all_negative(self) -> bool:
        return all(t < 0 for t in self.head) and (self.tail is None or self.tail.sign < 0)

    @property
    def inf_weight(self) -> float:
        """inf_j T_j for an all-positive vector."""
        vals = list(self.head)
        if self.tail is not None:
            vals.append(self.tail.mag_inf if self.tail.sign > 0 else -self.tail.mag_sup)
        return min(vals)

    @property
    def sup_weight(self) -> float:
        vals = list(self.head)
        if self.tail is not None:
            vals.append(self.tail.mag_sup if self.tail.sign > 0 else -self.tail.mag_inf)
        return max(vals)

    def count_ones(self) -> int | float:
        n = sum(1 for t in self.head if t == 1.0)
        if self.tail is not None:
            n += self.tail.count_ones()
        return n

    def inverse(self) -> "WeightSpec":
        """The vector T^{-1} = (1/T_j).  Finite vectors only."""
        if not self.is_finite:
            raise ValueError("inverse of an infinite weight vector is not representable")
        return WeightSpec(tuple(1.0 / t for t in self.head))

    def power(self, beta: float) -> "WeightSpec":
        """The vector T^beta, for positive finite vectors."""
        if not self.is_finite:
            raise ValueError("power of an infinite weight vector is not supported")
        if not self.all_positive:
            raise ValueError("power requires an all-positive vector")
        return WeightSpec(tuple(t**beta for t in self.head))


class SignCase(str, Enum):
    ALL_POSITIVE = "AllPositive"
    ALL_NEGATIVE = "AllNegative"
    MIXED = "Mixed"
    SINGLE_WEIGHT = "SingleWeight"


class ACase(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    A5 = "A5"
    A6 = "A6"


class FamilyTag(str, Enum):
    """Symbolic shape of the solution set."""

    ALL_DISTRIBUTIONS = "all_distributions"
    ALL_DIRAC = "all_dirac"              # {delta_c : c real}
    DIRAC_RAY = "dirac_ray"              # {delta_0} u {delta_c : c > 0}
    TRIVIAL_ONLY = "trivial_only"        # {delta_0}
    BOUNDED_SUPPORT = "bounded_support"  # A3 family: u_F/l_F <= inf over J*
    SPECTRAL = "spectral"                # A5/A6: Weibull or r-periodic family
    POS_EMPTY_MIRROR = "pos_empty_mirror"  # inf T < 1: positives empty, negatives via T^{-1}
    NEG_FINITE_MINIMAX = "neg_finite_minimax"  # all-negative finite: alpha*G + alpha^n*U_T G
    MIXED_REDUCTION = "mixed_reduction"  # mixed signs: F(0)=1 and F solves the T^> equation


@dataclass(frozen=True)
class Summary:
    tag: FamilyTag
    note: str = ""
    params: dict = field(default_factory=dict)

    def __str__(self) -> str:
        return self.note or self.tag.value


@dataclass(frozen=True)
class Classification:
    sign_case: SignCase
    had_zero: bool
    a_case: Optional[ACase]
    summary: Summary
    spec: WeightSpec
    positive_part: Optional["Classification"] = None

    def to_dict(self) -> dict:
        d = {
            "sign_case": self.sign_case.value,
            "had_zero": self.had_zero,
            "a_case": self.a_case.value if self.a_case else None,
            "summary": {"tag": self.summary.tag.value, "note": str(self.summary),
                        "params": self.summary.params},
        }
        if self.positive_part is not None:
            d["positive_part"] = self.positive_part.to_dict()
        return d


def reduce_zero(raw: Sequence[float], tail: Optional[TailSpec] = None) -> tuple[WeightSpec, bool]:
    """Drop zero weights from a raw list; report whether any were present.

    A zero weight restricts admissible solutions to those concentrated on
    (-inf, 0]; the classifier applies that restriction via the returned flag.
    """
    raw = list(raw)
    if not raw and tail is None:
        raise ValueError("empty weight list")
    head = tuple(float(t) for t in raw if t != 0.0)
    had_zero = len(head) < len(raw)
    if not head and tail is None:
        raise ValueError("all weights are zero; the equation degenerates to W =d 0")
    return WeightSpec(head, tail), had_zero


def split_signs(spec: WeightSpec) -> tuple[WeightSpec | None, WeightSpec | None]:
    """Split into the positive-weight and negative-weight subvectors.

    Either part may be None when empty.  Orderings are preserved; the tail,
    if any, joins the part matching its sign.
    """
    pos = tuple(t for t in spec.head if t > 0)
    neg = tuple(t for t in spec.head if t < 0)
    pos_tail = spec.tail if (spec.tail is not None and spec.tail.sign > 0) else None
    neg_tail = spec.tail if (spec.tail is not None and spec.tail.sign < 0) else None
    pos_spec = WeightSpec(pos, pos_tail) if (pos or pos_tail) else None
    neg_spec = WeightSpec(neg, neg_tail) if (neg or neg_tail) else None
    return pos_spec, neg_spec


def _a_case(spec: WeightSpec) -> ACase:
    """Subcase (A1)-(A6) for an all-positive vector with inf >= 1, |J| >= 2."""
    ones = spec.count_ones()
    infinite = not spec.is_finite
    if ones >= 2:
        return ACase.A1
    if infinite and spec.tail.mag_limit == 1.0:
        # liminf T_j = 1 with at most one exact 1
        return ACase.A2
    if ones == 1:
        return ACase.A3
    # no ones, inf > 1 from here on
    if not infinite:
        return ACase.A5
    return ACase.A6 if spec.tail.mag_limit == math.inf else ACase.A4


def classify(spec: WeightSpec, had_zero: bool = False) -> Classification:
    """Assign the sign case, the subcase (A1)-(A6) when applicable, and a
    symbolic description of the full solution set.

    ``had_zero`` records that the original vector contained a zero weight,
    which restricts solutions to distributions concentrated on (-inf, 0].
    """
    if spec.size == 1:
        t1 = spec.head[0]
        if t1 == 1.0:
            note = "all distributions" + (" on (-inf, 0]" if had_zero else "")
            summary = Summary(FamilyTag.ALL_DISTRIBUTIONS, note)
        else:
            summary = Summary(FamilyTag.TRIVIAL_ONLY, "{delta_0}")
        return Classification(SignCase.SINGLE_WEIGHT, had_zero, None, summary, spec)

    pos_part, neg_part = split_signs(spec)

    if pos_part is not None and neg_part is not None:
        # Mixed signs: nontrivial solutions satisfy F(0) = 1 and solve the
        # positive-part equation; the a-level analysis is that of T^>.
        inner = classify(pos_part)
        summary = Summary(
            FamilyTag.MIXED_REDUCTION,
            "nontrivial solutions: F(0) = 1 and F solves the positive-part equation",
            {"positive_part": [*pos_part.head]},
        )
        return Classification(SignCase.MIXED, had_zero, None, summary, spec,
                              positive_part=inner)

    if neg_part is not None:
        # All negative. With a zero weight or infinitely many terms only
        # delta_0 remains; finite vectors get the minimax characterization.
        if had_zero or not spec.is_finite:
            summary = Summary(FamilyTag.TRIVIAL_ONLY, "{delta_0}")
        else:
            n = len(spec.head)
            summary = Summary(
                FamilyTag.NEG_FINITE_MINIMAX,
                f"alpha*G + alpha^{n}*(U_T G) for G on (-inf,0) solving the "
                "minimax identity, alpha + alpha^n = 1",
                {"n": n},
            )
        return Classification(SignCase.ALL_NEGATIVE, had_zero, None, summary, spec)

    # All positive.
    inf_w = spec.inf_weight
    a_case = _a_case(spec) if inf_w >= 1 else None

    if had_zero:
        # Positive solutions are excluded; what remains of the nontrivial set
        # are the negative solutions, i.e. mirrors of positives for T^{-1}.
        if spec.sup_weight <= 1 and inf_w < 1:
            summary = Summary(
                FamilyTag.POS_EMPTY_MIRROR,
                "{delta_0} plus negative solutions (mirror of positives for T^{-1})",
            )
        elif spec.count_ones() == spec.size and spec.is_finite:
            summary = Summary(FamilyTag.ALL_DIRAC, "{delta_c : c <= 0}")
        else:
            summary = Summary(FamilyTag.TRIVIAL_ONLY, "{delta_0}")
        return Classification(SignCase.ALL_POSITIVE, had_zero, a_case, summary, spec)

    if inf_w < 1:
        summary = Summary(
            FamilyTag.POS_EMPTY_MIRROR,
            "positive solutions empty (some T_j < 1); negative solutions are "
            "mirror-reciprocals of positive solutions for T^{-1}",
        )
        return Classification(SignCase.ALL_POSITIVE, had_zero, None, summary, spec)

    all_ones = spec.count_ones() == spec.size
    if all_ones:
        summary = Summary(FamilyTag.ALL_DIRAC, "{delta_c : c in R}")
    elif a_case in (ACase.A1, ACase.A2):
        summary = Summary(FamilyTag.DIRAC_RAY, "{delta_0} u {delta_c : c > 0}")
    elif a_case is ACase.A3:
        bound = min(t for t in spec.magnitudes(tail_count=8) if t != 1.0) if spec.is_finite \
            else _a3_bound(spec)
        summary = Summary(
            FamilyTag.BOUNDED_SUPPORT,
            f"{{delta_0}} u {{F : 0 < l_F <= u_F < inf, u_F/l_F <= {bound:g}}}",
            {"bound": bound},
        )
    elif a_case is ACase.A4:
        summary = Summary(FamilyTag.TRIVIAL_ONLY, "{delta_0}")
    else:
        summary = Summary(
            FamilyTag.SPECTRAL,
            "unresolved: Weibull or r-periodic Weibull family; "
            "requires characteristic exponent and group structure",
        )
    return Classification(SignCase.ALL_POSITIVE, had_zero, a_case, summary, spec)


def _a3_bound(spec: WeightSpec) -> float:
    """inf of T_j over J* = {j : T_j != 1} for an A3 vector."""
    vals = [t for t in spec.head if t != 1.0]
    if spec.tail is not None:
        tail_inf = spec.tail.mag_inf
        vals.append(tail_inf if tail_inf != 1.0 else min(
            v for v in spec.tail.terms(64) if v != 1.0))
    return min(vals)


# -- JSON weight-spec files ---------------------------------------------------

def weights_from_json(obj: dict | str) -> tuple[WeightSpec, bool]:
    """Parse {"head": [...], "tail": {...}} (tail optional); returns the
    zero-reduced spec and the had-zero flag."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "head" not in obj:
        raise ValueError('weight spec must be an object with a "head" array')
    head = obj["head"]
    if not isinstance(head, list):
        raise ValueError('field "head" must be an array of numbers')
    tail = None
    if obj.get("tail") is not None:
        t = dict(obj["tail"])
        kind = t.pop("kind", None)
        if kind not in _TAIL_KINDS:
            raise ValueError(f'field "tail.kind" must be one of {_TAIL_KINDS}')
        allowed = {"a", "q", "L", "s", "j0", "sign"}
        unknown = set(t) - allowed
        if unknown:
            raise ValueError(f'unknown tail field(s): {sorted(unknown)}')
        tail = TailSpec(kind=kind, **t)
    return reduce_zero(head, tail)


def weights_to_json(spec: WeightSpec) -> dict:
    d: dict = {"head": list(spec.head)}
    if spec.tail is not None:
        t = spec.tail
        entry: dict = {"kind": t.kind}
        if t.kind == "geometric":
            entry.update(a=t.a, q=t.q)
        elif t.kind == "constant":
            entry.update(a=t.a)
        else:
            entry.update(L=t.L, a=t.a, s=t.s)
        if t.j0 != 1:
            entry["j0"] = t.j0
        if t.sign != 1:
            entry["sign"] = t.sign
        d["tail"] = entry
    return d


def parse_inline_weights(text: str) -> tuple[WeightSpec, bool]:
    """Parse the CLI inline form '(2, 4)' (finite vectors only)."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts = [p for p in (x.strip() for x in s.split(",")) if p]
    if not parts:
        raise ValueError(f"cannot parse weights from {text!r}")
    try:
        vals = [float(p) for p in parts]
    except ValueError as e:
        raise ValueError(f"cannot parse weights from {text!r}: {e}") from None
    return reduce_zero(vals)
