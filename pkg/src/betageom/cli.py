"""Command-line interface.

Subcommands: ``theta``, ``cone``, ``polytope``, ``simulate``, ``verify``,
``tables``.  Formula reports are emitted as JSON (schema "betageom/1") with
numbers serialized at 17 significant digits; ``tables`` emits CSV.  Exit
codes: 0 success, 1 verification discordance, 2 usage error, 3 numerical
domain error (with a machine-readable error object on stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import cones as cn
from . import montecarlo as mc
from . import polytopes as pt
from .errors import BetaGeomError
from .quadrature import QuadConfig
from .quantities import ThetaArgs, theta, theta_factors
from .special import GammaMultiset

SCHEMA = "betageom/1"


def _fmt(x):
    if isinstance(x, float):
        return float(format(x, ".17g"))
    return x


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, float):
        return _fmt(obj)
    return obj


def _emit(payload: dict, fmt: str) -> None:
    payload = {"schema": SCHEMA, **payload}
    if fmt == "json":
        print(json.dumps(_jsonify(payload), separators=(", ", ": ")))
    else:
        flat = payload.get("value", payload)
        if isinstance(flat, dict):
            for k, v in flat.items():
                print(f"{k},{_fmt(v)}")
        else:
            print(_fmt(flat))


def _parse_betas(text: str, n: int | None) -> list:
    if text.startswith("uniform:"):
        if n is None:
            raise argparse.ArgumentTypeError("uniform:<beta> requires --n")
        return [float(text.split(":", 1)[1])] * n
    vals = [float(t) for t in text.split(",") if t.strip() != ""]
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(
            f"--betas lists {len(vals)} values but --n is {n}")
    return vals


def _parse_multiset(text: str) -> GammaMultiset:
    vals = [float(t) for t in text.split(",") if t.strip() != ""]
    return GammaMultiset(vals)


def _parse_indices(text: str) -> list:
    return [int(t) for t in text.split(",") if t.strip() != ""]


def _quad_config(args) -> QuadConfig:
    if args.tol is None:
        return QuadConfig()
    return QuadConfig(rel_tol=args.tol, abs_tol=args.tol * 1e-2)


def _config_defaults(argv: list) -> list:
    """Apply --config key=value file entries as defaults (flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    injected = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            flag = "--" + key.strip().replace("_", "-")
            if flag not in rest:
                injected += [flag, val.strip().strip('"')]
    return rest + injected


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="betageom",
                                description="Beta polytope and beta cone "
                                            "expectations and simulations")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, model=True):
        if model:
            sp.add_argument("--d", type=int, required=True)
            sp.add_argument("--n", type=int)
            sp.add_argument("--betas", type=str, required=True,
                            help="comma list or uniform:<beta>")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("theta", help="evaluate Theta(x; Y; Z)")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--Y", type=str, default="")
    sp.add_argument("--Z", type=str, default="")
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("cone", help="beta cone expectations")
    common(sp)
    sp.add_argument("--apex-beta", type=float, required=True)
    sp.add_argument("--quantity", required=True,
                    choices=("prob-full", "prob-proper", "upsilon",
                             "solid-angle", "solid-angle-proper", "fk",
                             "face-prob", "face-angle", "internal-angle",
                             "external-angle", "normal-angle",
                             "tangent-upsilon", "wendel"))
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--l", type=int, default=None)
    sp.add_argument("--K", type=str, default=None,
                    help="comma-separated point indices")
    sp.add_argument("--wendel-quantity", type=str, default=None)

    sp = sub.add_parser("polytope", help="beta polytope expectations")
    common(sp)
    sp.add_argument("--quantity", required=True,
                    choices=("volume", "content", "f0", "f1", "fk",
                             "intrinsic", "sylvester", "face-prob",
                             "skeleton", "moment", "angle-J", "angle-I"))
    sp.add_argument("--apex-beta", type=float, default=None,
                    help="parameter of the extra content point")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--x", type=float, default=None,
                    help="equal-beta parameter for angle-J / angle-I")
    sp.add_argument("--K", type=str, default=None)

    for name in ("simulate", "verify"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--target", choices=("cone", "polytope"),
                        default="polytope")
        sp.add_argument("--apex-beta", type=float, default=None)
        sp.add_argument("--quantity", type=str, required=True,
                        help="comma list of statistic names "
                             "(e.g. f0,volume,content:1.0)")
        sp.add_argument("--samples", type=int, default=100000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--stream", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("tables", help="CSV parameter sweeps")
    common(sp)
    sp.add_argument("--quantity", type=str, required=True)
    sp.add_argument("--apex-beta", type=float, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--sweep", type=str, required=True,
                    help="lo:hi:steps sweep over a common beta shift")
    return p


def _poly_spec(args) -> pt.PolySpec:
    betas = _parse_betas(args.betas, args.n)
    return pt.PolySpec(args.d, betas)


def _cone_spec(args) -> cn.ConeSpec:
    betas = _parse_betas(args.betas, args.n)
    if args.apex_beta is None:
        raise BetaGeomError("cone quantities need --apex-beta")
    return cn.ConeSpec(args.d, args.apex_beta, betas)


def _run_theta(args) -> int:
    cfg = _quad_config(args)
    t0 = time.perf_counter()
    ta = ThetaArgs(args.x, _parse_multiset(args.Y), _parse_multiset(args.Z))
    fy, fz = theta_factors(ta, cfg)
    val = theta(ta, cfg)
    _emit({
        "request": {"command": "theta", "x": args.x, "Y": list(ta.Y),
                    "Z": list(ta.Z)},
        "value": val,
        "method": ["product of one-sided factors"],
        "diagnostics": {"y_factor": fy, "z_factor": fz},
        "quad_config": cfg.__dict__,
        "wall_time_s": time.perf_counter() - t0,
    }, args.format)
    return 0


def _cone_value(spec, args, cfg) -> tuple:
    q = args.quantity
    K = _parse_indices(args.K) if args.K else []
    if q == "prob-full":
        return cn.prob_full_space(spec, cfg), "subset sum, sizes d+1, d+3, .."
    if q == "prob-proper":
        return cn.prob_proper(spec, cfg), "subset sum, sizes d-1, d-3, .."
    if q == "upsilon":
        return cn.expected_upsilon(spec, args.k, cfg), f"size-{args.k} sum"
    if q == "solid-angle":
        return cn.expected_solid_angle(spec, cfg), "top conic volume"
    if q == "solid-angle-proper":
        return cn.expected_solid_angle_on_proper(spec, cfg), "alternating sum"
    if q == "fk":
        return cn.expected_fk_cone(spec, args.k, cfg), "double subset sum"
    if q == "face-prob":
        return cn.face_probability_cone(spec, K, cfg), "face subset sum"
    if q == "face-angle":
        return (cn.expected_face_angles_cone(spec, K, "face_angle", None, cfg),
                "Theta(gamma; K; {})")
    if q == "internal-angle":
        return (cn.expected_face_angles_cone(spec, K, "internal_on_face_event",
                                             None, cfg), "alternating sum")
    if q == "external-angle":
        return (cn.expected_face_angles_cone(spec, K, "external_on_face_event",
                                             None, cfg), "Theta(..; {}; pool)")
    if q == "normal-angle":
        return (cn.expected_face_angles_cone(spec, K, "normal_angle", None,
                                             cfg), "external + improbability")
    if q == "tangent-upsilon":
        return (cn.expected_face_angles_cone(spec, K, "upsilon_of_tangent",
                                             args.l, cfg), "size sum")
    if q == "wendel":
        val = cn.wendel_reference(spec.n, spec.d,
                                  args.wendel_quantity or "prob_proper",
                                  args.k)
        return float(val), f"exact rational {val}"
    raise BetaGeomError(f"unhandled quantity {q}")


def _run_cone(args) -> int:
    cfg = _quad_config(args)
    t0 = time.perf_counter()
    spec = _cone_spec(args)
    val, method = _cone_value(spec, args, cfg)
    diag = {}
    if args.quantity in ("prob-full", "prob-proper"):
        diag["sum_to_one_residual"] = (cn.prob_full_space(spec, cfg)
                                       + cn.prob_proper(spec, cfg) - 1.0)
    _emit({
        "request": {"command": "cone", "d": spec.d,
                    "apex_beta": spec.apex_beta,
                    "betas": list(spec.point_betas),
                    "quantity": args.quantity, "k": args.k, "l": args.l,
                    "K": args.K},
        "value": val,
        "method": [method],
        "diagnostics": diag,
        "quad_config": cfg.__dict__,
        "wall_time_s": time.perf_counter() - t0,
    }, args.format)
    return 0


def _poly_value(spec, args, cfg) -> tuple:
    q = args.quantity
    if q == "volume":
        return pt.expected_volume(spec, cfg), "2 kappa_d size-(d+1) sum"
    if q == "content":
        if args.apex_beta is None:
            raise BetaGeomError("content needs --apex-beta")
        return (pt.expected_beta_content(spec, args.apex_beta, cfg),
                "dual subset sums")
    if q in ("f0", "f1", "fk"):
        ell = {"f0": 0, "f1": 1}.get(q, args.k)
        return pt.expected_fk_poly(spec, ell, cfg), "double subset sum"
    if q == "intrinsic":
        return (pt.expected_intrinsic_volume(spec, args.k, cfg),
                "prefactored size-(k+1) sum")
    if q == "sylvester":
        return pt.sylvester_probability(spec, cfg), "2 sum_j Theta"
    if q == "face-prob":
        K = _parse_indices(args.K) if args.K else list(range(args.k or 1))
        return (pt.face_probability_poly(spec, K, cfg, cross_check=True),
                "cheaper of the dual sums")
    if q == "skeleton":
        return (pt.skeleton_lp_volume(spec, args.k, args.p, cfg),
                "moment-weighted sum")
    if q == "moment":
        return (pt.simplex_volume_moment(spec, args.p), "Gamma-ratio product")
    if q in ("angle-J", "angle-I"):
        return (pt.equal_beta_angles(spec.n, args.k, args.x,
                                     "J" if q == "angle-J" else "I", cfg),
                "Theta reparameterization")
    raise BetaGeomError(f"unhandled quantity {q}")


def _run_polytope(args) -> int:
    cfg = _quad_config(args)
    t0 = time.perf_counter()
    spec = _poly_spec(args)
    val, method = _poly_value(spec, args, cfg)
    diag = {}
    if args.quantity == "volume":
        import math as _m

        from .special import kappa as _kappa
        from .quantities import theta_size_sums as _tss
        s = _tss(spec.d / 2.0, spec.gammas, cfg)
        other = _kappa(spec.d) * (1.0 - 2.0 * _m.fsum(
            s[j] for j in range(spec.d - 1, -1, -2)))
        diag["dual_path_residual"] = val - other
    _emit({
        "request": {"command": "polytope", "d": spec.d,
                    "betas": list(spec.point_betas),
                    "quantity": args.quantity, "k": args.k, "p": args.p,
                    "apex_beta": args.apex_beta, "K": args.K, "x": args.x},
        "value": val,
        "method": [method],
        "diagnostics": diag,
        "quad_config": cfg.__dict__,
        "wall_time_s": time.perf_counter() - t0,
    }, args.format)
    return 0


_POLY_STAT_FORMULA = {
    "f0": lambda spec, arg, cfg: pt.expected_fk_poly(spec, 0, cfg),
    "f1": lambda spec, arg, cfg: pt.expected_fk_poly(spec, 1, cfg),
    "volume": lambda spec, arg, cfg: pt.expected_volume(spec, cfg),
    "content": lambda spec, arg, cfg: pt.expected_beta_content(
        spec, float(arg), cfg),
    "sylvester": lambda spec, arg, cfg: pt.sylvester_probability(spec, cfg),
    "face": lambda spec, arg, cfg: pt.face_probability_poly(
        spec, _parse_indices(arg), cfg),
    "V1": lambda spec, arg, cfg: pt.expected_intrinsic_volume(spec, 1, cfg),
    "skeleton": lambda spec, arg, cfg: pt.skeleton_lp_volume(
        spec, int(arg.split(",")[0]), float(arg.split(",")[1]), cfg),
}

_CONE_STAT_FORMULA = {
    "prob_full_space": lambda spec, arg, cfg: cn.prob_full_space(spec, cfg),
    "prob_proper": lambda spec, arg, cfg: cn.prob_proper(spec, cfg),
    "upsilon": lambda spec, arg, cfg: cn.expected_upsilon(spec, int(arg), cfg),
    "solid_angle": lambda spec, arg, cfg: cn.expected_solid_angle(spec, cfg),
    "solid_angle_on_proper": lambda spec, arg, cfg:
        cn.expected_solid_angle_on_proper(spec, cfg),
    "fk": lambda spec, arg, cfg: cn.expected_fk_cone(spec, int(arg), cfg),
    "face": lambda spec, arg, cfg: cn.face_probability_cone(
        spec, _parse_indices(arg), cfg),
    "normal_upsilon0": lambda spec, arg, cfg: cn.expected_upsilon(spec, 0, cfg),
}


def _run_simulate(args, with_formulas: bool) -> int:
    cfg = _quad_config(args)
    stats = [s.strip() for s in args.quantity.split(",") if s.strip()]
    seed = mc.RngSpec(args.seed, args.stream)
    if args.target == "cone":
        spec = _cone_spec(args)
        est = mc.estimate_cone_statistics(spec, seed, args.samples, stats,
                                          args.jobs)
        formulas = _CONE_STAT_FORMULA
        request = {"command": "verify" if with_formulas else "simulate",
                   "target": "cone", "d": spec.d,
                   "apex_beta": spec.apex_beta,
                   "betas": list(spec.point_betas)}
    else:
        spec = _poly_spec(args)
        est = mc.estimate_polytope_statistics(spec, seed, args.samples, stats,
                                              args.jobs)
        formulas = _POLY_STAT_FORMULA
        request = {"command": "verify" if with_formulas else "simulate",
                   "target": "polytope", "d": spec.d,
                   "betas": list(spec.point_betas)}
    request.update({"quantity": args.quantity, "samples": args.samples,
                    "seed": args.seed, "stream": args.stream,
                    "jobs": args.jobs})
    results = {}
    any_discordant = False
    for s in stats:
        e = est[s]
        entry = {"mean": e.mean, "std_error": e.std_error,
                 "samples": e.samples}
        if with_formulas:
            name, _, arg = s.partition(":")
            formula = formulas[name](spec, arg, cfg)
            flag = mc.discordant(formula, e)
            any_discordant |= flag
            entry.update({"formula": formula, "discordant": flag,
                          "z": ((e.mean - formula) / e.std_error
                                if e.std_error > 0 else 0.0)})
        results[s] = entry
    payload = {"request": request, "value": results,
               "rng": {"seed": args.seed, "stream": args.stream}}
    if with_formulas:
        payload["quad_config"] = cfg.__dict__
    _emit(payload, args.format)
    return 1 if any_discordant else 0


def _run_tables(args) -> int:
    cfg = _quad_config(args)
    lo, hi, steps = args.sweep.split(":")
    lo, hi, steps = float(lo), float(hi), int(steps)
    betas = _parse_betas(args.betas, args.n)
    print("beta," + args.quantity)
    for i in range(steps):
        b = lo + (hi - lo) * i / max(steps - 1, 1)
        shifted = [bi + b for bi in betas]
        ns = argparse.Namespace(**vars(args))
        ns.betas = ",".join(str(v) for v in shifted)
        if args.quantity in ("f0", "f1", "volume", "sylvester"):
            spec = pt.PolySpec(args.d, shifted)
            val, _ = _poly_value(spec, argparse.Namespace(
                quantity=args.quantity, k=args.k, p=args.p, apex_beta=None,
                K=None, x=None), cfg)
        elif args.quantity == "content":
            spec = pt.PolySpec(args.d, betas)
            val = pt.expected_beta_content(spec, b, cfg)
        else:
            spec = cn.ConeSpec(args.d, args.apex_beta if args.apex_beta
                               is not None else b, shifted)
            val = {"prob-full": cn.prob_full_space,
                   "prob-proper": cn.prob_proper}[args.quantity](spec, cfg)
        print(f"{_fmt(b)},{_fmt(val)}")
    return 0


_NEGATIVE_VALUE_FLAGS = ("--betas", "--apex-beta", "--x", "--sweep", "--Y",
                         "--Z")


def _merge_negative_values(argv: list) -> list:
    """Join flags with values that begin with a minus sign (e.g. --betas
    -1,-1) so argparse does not mistake them for options."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if (tok in _NEGATIVE_VALUE_FLAGS and i + 1 < len(argv)
                and argv[i + 1].startswith("-")
                and len(argv[i + 1]) > 1
                and (argv[i + 1][1].isdigit() or argv[i + 1][1] == ".")):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _config_defaults(argv)
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 2
    argv = _merge_negative_values(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "theta":
            return _run_theta(args)
        if args.command == "cone":
            return _run_cone(args)
        if args.command == "polytope":
            return _run_polytope(args)
        if args.command == "simulate":
            return _run_simulate(args, with_formulas=False)
        if args.command == "verify":
            return _run_simulate(args, with_formulas=True)
        if args.command == "tables":
            return _run_tables(args)
        parser.error(f"unknown command {args.command}")
    except BetaGeomError as exc:
        print(json.dumps({"schema": SCHEMA,
                          "error": {"type": type(exc).__name__,
                                    "message": str(exc)}}))
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
