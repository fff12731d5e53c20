"""Command-line surface: classify | exponent | group | family | verify |
sample | simulate | minimax.

Reports are JSON on stdout (floats at 15 significant digits, keys sorted, so
identical argv and seed give byte-identical output); samples are CSV with a
"w" header.  Exit codes: 0 success or verification pass, 1 verification fail,
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import branching as _branching
from . import solutions as _sol
from . import spectral as _spectral
from . import verify as _verify
from .stats import rng_stream
from .weights import (SignCase, WeightSpec, classify, parse_inline_weights,
                      weights_from_json, weights_to_json)

__all__ = ["run", "main"]


def _fmt(obj):
    """Round every float to 15 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_fmt(float(v)) for v in obj]
    return obj


def _emit(report: dict, stream) -> None:
    print(json.dumps(_fmt(report), sort_keys=True), file=stream)


def _load_weights(args) -> tuple[WeightSpec, bool]:
    if getattr(args, "weights", None):
        return parse_inline_weights(args.weights)
    if getattr(args, "weights_file", None):
        text = Path(args.weights_file).read_text()
        return weights_from_json(json.loads(text))
    raise ValueError("provide --weights '(...)' or --weights-file FILE")


def _load_model(args) -> _sol.SurvivalModel:
    src = getattr(args, "dist", None)
    if not src:
        raise ValueError("provide --dist JSON|FILE|-")
    if src == "-":
        text = sys.stdin.read()
    elif src.lstrip().startswith("{"):
        text = src
    else:
        text = Path(src).read_text()
    return _sol.model_from_json(json.loads(text))


def _config(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys}


def _spectral_inputs(spec, args):
    ce = _spectral.characteristic_exponent(spec, tol=args.tol_root)
    grp = _spectral.detect_group(spec, max_den=args.lattice_max_den,
                                 rel_eps=args.lattice_rel_eps)
    return ce, grp


def _cmd_classify(args, out) -> int:
    spec, had_zero = _load_weights(args)
    cls = classify(spec, had_zero=had_zero)
    report = {"command": "classify", "config": _config(args, ("out",)),
              "weights": weights_to_json(spec), "had_zero": had_zero}
    report.update(cls.to_dict())
    _emit(report, out)
    return 0


def _cmd_exponent(args, out) -> int:
    spec, _ = _load_weights(args)
    ce = _spectral.characteristic_exponent(spec, tol=args.tol_root)
    if ce is None:
        raise ValueError("no characteristic exponent for this vector")
    report = {"command": "exponent", "config": _config(args, ("tol_root", "out")),
              "weights": weights_to_json(spec)}
    report.update(ce.to_dict())
    _emit(report, out)
    return 0


def _cmd_group(args, out) -> int:
    spec, _ = _load_weights(args)
    grp = _spectral.detect_group(spec, max_den=args.lattice_max_den,
                                 rel_eps=args.lattice_rel_eps)
    report = {"command": "group",
              "config": _config(args, ("lattice_max_den", "lattice_rel_eps", "out")),
              "weights": weights_to_json(spec), "group": grp.to_dict()}
    _emit(report, out)
    return 0


def _cmd_family(args, out) -> int:
    spec, had_zero = _load_weights(args)
    cls = classify(spec, had_zero=had_zero)
    ce = grp = None
    if cls.summary.tag.value == "spectral":
        ce, grp = _spectral_inputs(spec, args)
    fam = _sol.construct_family(cls, ce, grp)
    if args.emit_member:
        params = _parse_member_params(args.emit_member)
        member = fam.member(**params)
        _emit(_sol.model_to_json(member), out)
        return 0
    report = {"command": "family", "config": _config(args, ("tol_root", "out")),
              "weights": weights_to_json(spec), "family": fam.to_dict(),
              "classification": cls.to_dict()}
    if ce is not None:
        report["alpha"] = ce.alpha
        report["group"] = grp.to_dict()
    _emit(report, out)
    return 0


def _parse_member_params(text: str) -> dict:
    params: dict = {}
    for part in text.split(","):
        if not part.strip():
            continue
        key, _, val = part.partition("=")
        key = key.strip()
        if key == "c":
            params["c"] = float(val)
        elif key in ("levels", "breakpoints"):
            params[key] = tuple(float(x) for x in val.split(";"))
        else:
            raise ValueError(f"unknown member parameter {key!r}")
    if not params:
        raise ValueError("empty --emit-member specification")
    return params


def _span_grid(model) -> _verify.Grid:
    if model.support_sign < 0:
        return _verify.negative_grid(model)
    return _verify.default_grid(model)


def _cmd_verify(args, out) -> int:
    spec, had_zero = _load_weights(args)
    model = _load_model(args)
    cls = classify(spec, had_zero=had_zero)
    report = {"command": "verify",
              "config": _config(args, ("grid_points", "mc_n", "seed",
                                       "eps_trunc", "tol_verify", "out")),
              "weights": weights_to_json(spec),
              "dist": _sol.model_to_json(model),
              "sign_case": cls.sign_case.value}
    if cls.sign_case is SignCase.MIXED:
        rep = _verify.mixed_case_check(model, spec, n_samples=max(args.mc_n, 1000),
                                       seed=args.seed, tol=args.tol_verify)
        ok = bool(rep.passed)
        report["report"] = rep.to_dict()
    elif cls.sign_case is SignCase.ALL_NEGATIVE:
        pts = _neg_case_grid(model)
        res = [abs(_verify.neg_min_operator(model, spec, float(t))
                   - float(model.survival(float(t)))) for t in pts]
        sup = max(res)
        ok = sup <= args.tol_verify
        report["report"] = {"sup_residual": sup,
                            "argmax_t": float(pts[int(np.argmax(res))])}
    else:
        grid = _span_grid(model)
        rep = _verify.residual_report(model, spec, grid, eps_trunc=args.eps_trunc)
        ok = rep.sup_residual <= args.tol_verify
        if args.mc_n > 0:
            mc = _verify.mc_fixed_point_test(model, spec, args.mc_n, args.seed)
            rep.mc = mc.mc
            ok = ok and mc.mc.passed
        rep.passed = ok
        report["report"] = rep.to_dict()
    report["pass"] = ok
    _emit(report, out)
    return 0 if ok else 1


def _neg_case_grid(model) -> np.ndarray:
    if model.support_sign < 0:
        return _verify.negative_grid(model).points
    lo = float(model.quantile(1e-4)) or 1.0
    hi = float(model.quantile(1 - 1e-4)) or 1.0
    m = max(abs(lo), abs(hi), 1.0)
    half = np.geomspace(m * 1e-6, m * 4, 65)
    return np.concatenate([-half[::-1], [0.0], half])


def _cmd_sample(args, out) -> int:
    model = _load_model(args)
    rng = rng_stream(args.seed)
    vals = model.sample(rng, args.n)
    print("w", file=out)
    for v in vals:
        print(f"{v:.15g}", file=out)
    return 0


def _cmd_simulate(args, out) -> int:
    spec, _ = _load_weights(args)
    model = _load_model(args)
    rng = rng_stream(args.seed)
    vals = _branching.branching_min_sample(model, spec, args.depth, rng, args.samples)
    print("w", file=out)
    for v in vals:
        print(f"{v:.15g}", file=out)
    return 0


def _cmd_minimax(args, out) -> int:
    spec, _ = _load_weights(args)
    G = _load_model(args)
    rep = _verify.minimax_residual(G, spec)
    report = {"command": "minimax",
              "config": _config(args, ("mc_n", "seed", "out")),
              "weights": weights_to_json(spec), "dist": _sol.model_to_json(G),
              "residual": rep.to_dict()}
    ok = True
    if args.mc_n > 0:
        mc = _verify.minimax_mc_test(G, spec, args.mc_n, args.seed)
        report["mc"] = mc.mc.to_dict()
        ok = mc.mc.passed
    report["pass"] = ok
    _emit(report, out)
    return 0 if ok else 1


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minfix",
                                description="fixed points of W =d inf_j T_j W_j")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, weights=True, dist=False, mc=False):
        sp.add_argument("--out", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol-root", dest="tol_root", type=float, default=1e-12)
        sp.add_argument("--lattice-max-den", dest="lattice_max_den", type=int,
                        default=10**6)
        sp.add_argument("--lattice-rel-eps", dest="lattice_rel_eps", type=float,
                        default=1e-9)
        if weights:
            sp.add_argument("--weights")
            sp.add_argument("--weights-file", dest="weights_file")
        if dist:
            sp.add_argument("--dist")
        if mc:
            sp.add_argument("--grid-points", dest="grid_points", type=int,
                            default=_verify.DEFAULT_GRID_POINTS)
            sp.add_argument("--mc-n", dest="mc_n", type=int, default=0)
            sp.add_argument("--eps-trunc", dest="eps_trunc", type=float,
                            default=_verify.DEFAULT_EPS_TRUNC)
            sp.add_argument("--tol-verify", dest="tol_verify", type=float,
                            default=1e-9)

    add_common(sub.add_parser("classify"))
    add_common(sub.add_parser("exponent"))
    add_common(sub.add_parser("group"))
    fam = sub.add_parser("family")
    add_common(fam)
    fam.add_argument("--emit-member", dest="emit_member")
    add_common(sub.add_parser("verify"), dist=True, mc=True)
    smp = sub.add_parser("sample")
    add_common(smp, weights=False, dist=True)
    smp.add_argument("--n", type=int, default=1000)
    sim = sub.add_parser("simulate")
    add_common(sim, dist=True)
    sim.add_argument("--depth", type=int, default=1)
    sim.add_argument("--samples", type=int, default=1000)
    mmx = sub.add_parser("minimax")
    add_common(mmx, dist=True, mc=True)
    return p


_HANDLERS = {
    "classify": _cmd_classify,
    "exponent": _cmd_exponent,
    "group": _cmd_group,
    "family": _cmd_family,
    "verify": _cmd_verify,
    "sample": _cmd_sample,
    "simulate": _cmd_simulate,
    "minimax": _cmd_minimax,
}


def run(argv, out=None) -> int:
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0,) else 0
    try:
        return _HANDLERS[args.command](args, out)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
