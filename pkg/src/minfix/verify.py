"""Fixed-point operators and verification: exact grid residuals, harmonicity
defects, Monte-Carlo distributional tests, and the all-negative / mixed-sign
machinery.

The candidate F solves the min-equation iff F-bar(t) = prod_j F-bar(t/T_j)
(all weights positive), resp. F-bar(t) = prod_j F(t/T_j +) (all negative).
Residuals are measured in sup norm on the survival scale (bounded), with the
harmonicity defect sup |nu(t) - sum_j nu(t/T_j)| reported separately.

Grids avoid atoms of lattice models by construction (geometric midpoints
between consecutive atoms); residuals at atoms are evaluated separately from
closed-form one-sided limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .branching import level_weights
from .solutions import (
    Dirac, MirrorReciprocal, Mixture, RPeriodicWeibull, StepProfile,
    SurvivalModel, Tabulated, Weibull, ConstantProfile, mirror_reciprocal,
)
from .stats import (McReport, ks_critical, rng_stream, two_sample_ks,
                    weighted_min_samples)
from .weights import WeightSpec, split_signs

__all__ = [
    "Grid", "McReport", "VerificationReport",
    "default_grid", "negative_grid",
    "apply_min_operator", "apply_min_operator_with_bound", "apply_max_operator",
    "residual_report", "harmonicity_check", "atom_residuals", "iterate_operator",
    "mc_fixed_point_test", "neg_min_operator", "ut_operator", "alpha_negative",
    "minimax_residual", "minimax_mc_test", "mixed_case_check",
    "DEFAULT_EPS_TRUNC", "DEFAULT_GRID_POINTS",
]

DEFAULT_EPS_TRUNC = 1e-14
DEFAULT_GRID_POINTS = 257
_TAIL_CAP = 100_000


@dataclass(frozen=True)
class Grid:
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 1 or np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)


@dataclass
class VerificationReport:
    sup_residual: Optional[float] = None
    argmax_t: Optional[float] = None
    residuals: Optional[np.ndarray] = None
    grid: Optional[np.ndarray] = None
    harmonicity_defect: Optional[float] = None
    truncation_bound: float = 0.0
    mc: Optional[McReport] = None
    passed: Optional[bool] = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d: dict = {}
        if self.sup_residual is not None:
            d["sup_residual"] = self.sup_residual
            d["argmax_t"] = self.argmax_t
        if self.harmonicity_defect is not None:
            d["harmonicity_defect"] = self.harmonicity_defect
        d["truncation_bound"] = self.truncation_bound
        if self.mc is not None:
            d["mc"] = self.mc.to_dict()
        if self.passed is not None:
            d["pass"] = self.passed
        d.update(self.details)
        return d


def _points(grid) -> np.ndarray:
    if grid is None:
        raise ValueError("grid required")
    return grid.points if isinstance(grid, Grid) else np.asarray(grid, dtype=float)


def _lattice_profile(model: SurvivalModel) -> Optional[StepProfile]:
    if isinstance(model, RPeriodicWeibull) and isinstance(model.profile, StepProfile):
        return model.profile
    return None


def default_grid(model: SurvivalModel, n_pts: int = DEFAULT_GRID_POINTS,
                 q_lo: float = 1e-4, q_hi: float = 1 - 1e-4) -> Grid:
    """Log-spaced grid across [quantile(q_lo), quantile(q_hi)].  For lattice
    models the points are the geometric midpoints between consecutive atoms,
    so that the grid avoids every atom."""
    lo = float(model.quantile(q_lo))
    hi = float(model.quantile(q_hi))
    prof = _lattice_profile(model)
    if prof is not None:
        atoms = prof.atoms_between(lo / prof.r, hi * prof.r)
        locs = [a[2] for a in atoms]
        mids = [math.sqrt(a * b) for a, b in zip(locs, locs[1:])]
        pts = [m for m in mids if lo <= m <= hi] or mids
        return Grid(np.asarray(sorted(set(pts))))
    if lo == 0.0 and hi == 0.0:  # delta_0
        lo, hi = 0.25, 4.0
    if hi <= 0:
        raise ValueError("model is negative-supported; use negative_grid")
    if lo <= 0:
        lo = hi * 1e-6
    if hi <= lo:  # point mass: spread a grid around it
        lo, hi = 0.25 * hi, 4.0 * hi
    return Grid(np.geomspace(lo, hi, n_pts))


def negative_grid(model: SurvivalModel, n_pts: int = DEFAULT_GRID_POINTS,
                  include_zero: bool = True) -> Grid:
    """Grid on the negative half line for a negative-supported model."""
    lo = float(model.quantile(1e-4))       # very negative
    hi = float(model.quantile(1 - 1e-4))   # close to zero
    lo_mag, hi_mag = abs(lo), max(abs(hi), 1e-12)
    pts = -np.geomspace(lo_mag, hi_mag, n_pts)
    if include_zero:
        pts = np.append(pts, 0.0)
    return Grid(pts)


# -- tail truncation ------------------------------------------------------------

def _nu_tail_remainder(model: SurvivalModel, s_next: float, q: float) -> float:
    """Upper bound on sum_{m>=0} nu(s_next * q**-m) for the supported models.

    Weibull-type tails give nu(s x) <= nu(s) x**alpha exactly; lattice models
    satisfy nu(s x) <= nu(s) * r**alpha * x**alpha for x <= 1.
    """
    if isinstance(model, Dirac):
        return 0.0 if s_next <= model.c else math.inf
    if isinstance(model, Weibull):
        a = model.alpha
        return model.c * s_next**a / (1.0 - q**-a)
    if isinstance(model, RPeriodicWeibull):
        a = model.alpha
        slack = 1.0 if isinstance(model.profile, ConstantProfile) else model.r**a
        return float(model.nu(s_next)) * slack / (1.0 - q**-a)
    nu0 = float(model.nu(s_next))
    if nu0 == 0.0:
        return 0.0
    raise ValueError(
        f"infinite tails are not supported for {type(model).__name__} candidates")


def apply_min_operator_with_bound(model: SurvivalModel, spec: WeightSpec, t: float,
                                  eps_trunc: float = DEFAULT_EPS_TRUNC,
                                  tail_cut: Optional[int] = None,
                                  ) -> tuple[float, float]:
    """prod_j F-bar(t/T_j) plus an upper bound on the dropped-tail effect."""
    if not spec.all_positive:
        raise ValueError("the min operator requires an all-positive weight vector")
    log_acc = 0.0
    for w in spec.head:
        v = float(model.nu(t / w))
        if not math.isfinite(v):
            return 0.0, 0.0
        log_acc += v
    bound = 0.0
    tail = spec.tail
    if tail is not None:
        if tail.kind in ("constant", "convergent"):
            # infinitely many copies of (at worst) F-bar(t / lim): exact limit
            lim = tail.a if tail.kind == "constant" else tail.L
            if float(model.survival(t / lim)) < 1.0:
                return 0.0, 0.0
        else:
            k = 0
            while True:
                if tail_cut is not None and k >= tail_cut:
                    bound = _nu_tail_remainder(model, t / tail.term(k), tail.q)
                    break
                if tail_cut is None and k >= _TAIL_CAP:
                    raise ValueError("geometric tail failed to converge")
                w = tail.term(k)
                nu_k = float(model.nu(t / w))
                if not math.isfinite(nu_k):
                    return 0.0, 0.0
                log_acc += nu_k
                if tail_cut is None and nu_k <= eps_trunc:
                    bound = _nu_tail_remainder(model, t / (w * tail.q), tail.q)
                    break
                k += 1
    return math.exp(-log_acc), bound


def apply_min_operator(model: SurvivalModel, spec: WeightSpec, t: float,
                       eps_trunc: float = DEFAULT_EPS_TRUNC,
                       tail_cut: Optional[int] = None) -> float:
    """Right side of the min-equation at t (all-positive weights)."""
    return apply_min_operator_with_bound(model, spec, t, eps_trunc, tail_cut)[0]


def apply_max_operator(model: SurvivalModel, spec: WeightSpec, t: float) -> float:
    """Right side of the max-equation, prod_j F(t/T_j +), finite positive
    weights; the duality partner of the min operator."""
    if not (spec.all_positive and spec.is_finite):
        raise ValueError("the max operator requires finite all-positive weights")
    acc = 1.0
    for w in spec.head:
        acc *= float(model.cdf_right(t / w))
    return acc


def residual_report(model: SurvivalModel, spec: WeightSpec, grid=None,
                    eps_trunc: float = DEFAULT_EPS_TRUNC) -> VerificationReport:
    """sup_t |prod_j F-bar(t/T_j) - F-bar(t)| over the grid, with the
    harmonicity defect alongside."""
    pts = _points(grid if grid is not None else default_grid(model))
    ops = np.empty_like(pts)
    bound = 0.0
    for i, t in enumerate(pts):
        ops[i], b = apply_min_operator_with_bound(model, spec, float(t), eps_trunc)
        bound = max(bound, b)
    fbar = np.asarray(model.survival(pts), dtype=float)
    res = np.abs(ops - fbar)
    k = int(np.argmax(res))
    defect = None
    if spec.is_finite or spec.tail.kind == "geometric":
        defect = harmonicity_check(model, spec, pts, eps_trunc)
    return VerificationReport(
        sup_residual=float(res[k]), argmax_t=float(pts[k]), residuals=res,
        grid=pts, harmonicity_defect=defect, truncation_bound=bound)


def harmonicity_check(model: SurvivalModel, spec: WeightSpec, grid=None,
                      eps_trunc: float = DEFAULT_EPS_TRUNC) -> float:
    """sup_t |nu(t) - sum_j nu(t/T_j)| over grid points where both sides are
    finite (the dropped-tail bound is added, conservatively)."""
    pts = _points(grid if grid is not None else default_grid(model))
    worst = 0.0
    for t in map(float, pts):
        nu_t = float(model.nu(t))
        if not math.isfinite(nu_t):
            continue
        acc = 0.0
        bound = 0.0
        ok = True
        for w in spec.head:
            v = float(model.nu(t / w))
            if not math.isfinite(v):
                ok = False
                break
            acc += v
        tail = spec.tail
        if ok and tail is not None:
            if tail.kind != "geometric":
                raise ValueError(
                    "harmonicity with an infinite tail supports geometric tails only")
            else:
                k = 0
                while True:
                    if k >= _TAIL_CAP:
                        raise ValueError("geometric tail failed to converge")
                    v = float(model.nu(t / tail.term(k)))
                    if not math.isfinite(v):
                        ok = False
                        break
                    if v <= eps_trunc:
                        bound = _nu_tail_remainder(model, t / (tail.term(k) * tail.q),
                                                   tail.q)
                        break
                    acc += v
                    k += 1
        if ok:
            worst = max(worst, abs(nu_t - acc) + bound)
    return worst


def atom_residuals(model: RPeriodicWeibull, exponents: Sequence[int],
                   n_atoms: int = 5) -> list[tuple[float, str, float]]:
    """Exact one-sided operator residuals at lattice atoms.

    ``exponents`` are the lattice powers n_j of the weights (T_j = r**n_j with
    r the model period).  Both sides of the equation are evaluated from the
    closed-form one-sided limits, never by perturbing t.
    """
    prof = _lattice_profile(model)
    if prof is None:
        raise ValueError("atom residuals require a lattice (step-profile) model")
    lo = float(model.quantile(0.01))
    hi = float(model.quantile(0.99))
    atoms = prof.atoms_between(lo, hi) or prof.atoms_between(lo / prof.r, hi * prof.r)
    step = max(1, len(atoms) // n_atoms)
    out = []
    for (n, i, loc) in atoms[::step][:n_atoms]:
        for side, nu_at in (("left", prof.atom_nu_left), ("right", prof.atom_nu_right)):
            lhs = math.exp(-nu_at(n, i))
            rhs = math.exp(-math.fsum(nu_at(n - e, i) for e in exponents))
            out.append((loc, side, abs(lhs - rhs)))
    return out


def iterate_operator(initial: SurvivalModel, spec: WeightSpec, n: int, grid,
                     cap: int = 10**6) -> Tabulated:
    """n-fold operator image of ``initial`` on the grid, via depth-n branch
    weights: nu_out(t) = sum_{|v|=n} nu(t / L(v)).  Exploratory; no
    convergence of the iteration is claimed."""
    if not (spec.is_finite and spec.all_positive):
        raise ValueError("operator iteration requires finite all-positive weights")
    pts = _points(grid)
    if n == 0:
        nus = np.asarray(initial.nu(pts), dtype=float)
    else:
        lv = level_weights(spec, n, cap=cap).weights
        nus = np.zeros_like(pts)
        for w in lv:
            nus = nus + np.asarray(initial.nu(pts / w), dtype=float)
    nus = np.minimum(nus, 1e6)
    nus = np.maximum.accumulate(nus)
    return Tabulated(tuple(pts), tuple(nus))


def mc_fixed_point_test(model: SurvivalModel, spec: WeightSpec, n_samples: int,
                        seed: int, tail_cut: int = 64) -> VerificationReport:
    """Two-sample KS test of min_j T_j W_j against the model itself.

    Any sign pattern is allowed; the minimum runs over all weights directly.
    Infinite tails are cut at ``tail_cut`` terms and the probability that a
    dropped term attains the minimum is bounded via the survival function and
    reported in the MC block.
    """
    if n_samples < 10**3:
        raise ValueError("mc_fixed_point_test requires n_samples >= 1000")
    rng = rng_stream(seed)
    weights = list(spec.head)
    trunc = 0.0
    if spec.tail is not None:
        weights += spec.tail.terms(tail_cut)
        if not (isinstance(model, Dirac) and model.c == 0.0):
            mins_probe = weighted_min_samples(
                model, weights, rng_stream(seed, batch=1), min(n_samples, 4096))
            m_ref = float(np.max(np.abs(mins_probe))) or 1.0
            acc = 0.0
            last = 0.0
            for k in range(tail_cut, tail_cut + 128):
                w = spec.tail.term(k)
                # dropped term attains the min only if T_k W <= m_ref
                last = float(model.cdf_right(m_ref / w)) if w > 0 else \
                    float(model.survival(m_ref / w))
                acc += last
                if last == 0.0:
                    break
            trunc = n_samples * (acc + 128 * last)
    mins = weighted_min_samples(model, weights, rng, n_samples)
    fresh = model.sample(rng, n_samples)
    ks = two_sample_ks(mins, fresh)
    crit = ks_critical(n_samples)
    mc = McReport(ks, crit, n_samples, seed, ks <= crit, truncation_bound=trunc)
    return VerificationReport(mc=mc, passed=mc.passed, truncation_bound=trunc)


# -- all-negative machinery ------------------------------------------------------

def neg_min_operator(model: SurvivalModel, spec: WeightSpec, t: float) -> float:
    """prod_j F(t/T_j +) for all-negative weights (the min-equation right side
    in the negative case, with the usual infinite-product convention)."""
    if not spec.all_negative:
        raise ValueError("neg_min_operator requires an all-negative weight vector")
    acc = 1.0
    for w in spec.head:
        acc *= float(model.cdf_right(t / w))
        if acc == 0.0:
            return 0.0
    tail = spec.tail
    if tail is not None:
        for k in range(_TAIL_CAP):
            f = float(model.cdf_right(t / tail.term(k)))
            if f == 1.0:
                break
            acc *= f
            if acc < 1e-320:
                return 0.0
        else:
            raise ValueError("negative tail factors failed to converge")
    return acc


def ut_operator(G: SurvivalModel, spec: WeightSpec, t: float) -> float:
    """CDF value of the positive-part transform: 1 - prod_j G((t/T_j)+)."""
    if not (spec.all_negative and spec.is_finite):
        raise ValueError("the U_T transform requires finite all-negative weights")
    acc = 1.0
    for w in spec.head:
        acc *= float(G.cdf_right(t / w))
    return 1.0 - acc


def alpha_negative(n: int) -> float:
    """Unique root of a + a**n = 1 in (0, 1), to machine precision."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if n == 1:
        return 0.5
    lo, hi = 0.0, 1.0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f = mid + mid**n - 1.0
        if f == 0.0:
            return mid
        if f < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(lo + lo**n - 1.0) <= abs(hi + hi**n - 1.0) else hi


def minimax_residual(G: SurvivalModel, spec: WeightSpec, grid=None,
                     ) -> VerificationReport:
    """sup over a nonpositive grid of the two sides of the minimax identity
    1 - a G(t) = prod_i (1 - prod_j a G(t/(T_i T_j))), a + a**n = 1."""
    if not (spec.all_negative and spec.is_finite):
        raise ValueError("the minimax identity requires finite all-negative weights")
    n = len(spec.head)
    a = alpha_negative(n)
    pts = _points(grid if grid is not None else negative_grid(G))
    T = np.asarray(spec.head)
    res = np.empty_like(pts)
    for k, t in enumerate(map(float, pts)):
        lhs = 1.0 - a * (1.0 - float(G.survival(t)))
        rhs = 1.0
        for ti in T:
            inner = 1.0
            for tj in T:
                inner *= a * (1.0 - float(G.survival(t / (ti * tj))))
            rhs *= 1.0 - inner
        res[k] = abs(lhs - rhs)
    i = int(np.argmax(res))
    return VerificationReport(sup_residual=float(res[i]), argmax_t=float(pts[i]),
                              residuals=res, grid=pts,
                              details={"alpha": a, "n": n})


def minimax_mc_test(G: SurvivalModel, spec: WeightSpec, n_samples: int, seed: int,
                    ) -> VerificationReport:
    """Sample the minimax statistic min_i max_j T_i T_j W(i,j) with W i.i.d.
    from H = a G + (1-a) delta_0 and KS-compare against fresh H samples."""
    if not (spec.all_negative and spec.is_finite):
        raise ValueError("the minimax test requires finite all-negative weights")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    n = len(spec.head)
    a = alpha_negative(n)
    H = Mixture([(a, G), (1.0 - a, Dirac(0.0))])
    rng = rng_stream(seed)
    T = np.asarray(spec.head)
    tt = np.outer(T, T)  # positive entries
    draws = H.sample(rng, n_samples * n * n).reshape(n_samples, n, n)
    stat = np.min(np.max(draws * tt, axis=2), axis=1)
    fresh = H.sample(rng, n_samples)
    ks = two_sample_ks(stat, fresh)
    crit = ks_critical(n_samples)
    mc = McReport(ks, crit, n_samples, seed, ks <= crit)
    return VerificationReport(mc=mc, passed=mc.passed,
                              details={"alpha": a, "n": n})


def mixed_case_check(model: SurvivalModel, spec: WeightSpec, n_samples: int = 10**5,
                     seed: int = 0, tol: float = 1e-9) -> VerificationReport:
    """Mixed-sign verification: (i) all mass on (-inf, 0); (ii) the mirrored
    model solves the inverse positive-part equation (exact residuals); (iii)
    direct MC of the full mixed equation, no reduction assumed."""
    pos_part, neg_part = split_signs(spec)
    if pos_part is None or neg_part is None:
        raise ValueError("mixed_case_check requires weights of both signs")
    if isinstance(model, Dirac) and model.c == 0.0:
        return VerificationReport(passed=True, details={"trivial": True})
    mass_ok = float(model.survival(0.0)) == 0.0 and float(model.cdf_right(0.0)) == 1.0
    rep = VerificationReport(details={"mass_negative_ok": mass_ok})
    if mass_ok and pos_part.is_finite:
        mirrored = mirror_reciprocal(model)
        inner = residual_report(mirrored, pos_part.inverse())
        rep.sup_residual = inner.sup_residual
        rep.argmax_t = inner.argmax_t
        rep.harmonicity_defect = inner.harmonicity_defect
        residual_ok = inner.sup_residual <= tol
    else:
        residual_ok = False
    rep.mc = mc_fixed_point_test(model, spec, n_samples, seed).mc
    rep.passed = bool(mass_ok and residual_ok and rep.mc.passed)
    return rep
