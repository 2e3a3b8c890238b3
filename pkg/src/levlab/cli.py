"""Deterministic command-line front end.

Every subcommand prints either a JSON report (with the full run
configuration and tool version embedded) or a fixed-header CSV, so output
files diff cleanly and downstream plot scripts can rely on the schema.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence,
4 cost-guard refusal.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import ConvergenceError, CostGuardError, ParameterError

_CSV_FMT = "%.14e"   # 15 significant digits, '.' decimal, stable diffs


def _workers() -> int:
    raw = os.environ.get("LEVLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"LEVLAB_THREADS must be a positive integer, "
                             f"got {raw!r}")
    if n < 1:
        raise ParameterError(f"LEVLAB_THREADS must be >= 1, got {n}")
    return n


def _jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _emit_json(result, config: dict, out: str | None) -> None:
    doc = {
        "tool": "levlab",
        "version": __version__,
        "config": _jsonable(config),
        "result": _jsonable(result),
    }
    _emit(json.dumps(doc, sort_keys=True, indent=2), out)


def _emit_csv(header: list[str], rows, out: str | None) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
                cells.append(str(int(v)))
            elif isinstance(v, bool):
                cells.append("1" if v else "0")
            else:
                cells.append(_CSV_FMT % float(v))
        lines.append(",".join(cells))
    _emit("\n".join(lines), out)


def _pick_character(q: int, index: int | None):
    from .dirichlet import enumerate_characters
    chars = enumerate_characters(q)
    if index is None:
        prim = [c for c in chars if c.is_primitive]
        if not prim:
            raise ParameterError(f"no primitive character mod {q}")
        return prim[0]
    if not (0 <= index < len(chars)):
        raise ParameterError(
            f"character index {index} out of range for modulus {q} "
            f"(phi(q) = {len(chars)})")
    chi = chars[index]
    if not chi.is_primitive:
        raise ParameterError(
            f"character {chi.label()} is imprimitive (conductor "
            f"{chi.conductor}); pick a primitive index")
    return chi


# ---------------------------------------------------------------- commands

def _cmd_kappa(args) -> None:
    from .constants import LevinsonParams, constant_report
    rep = constant_report(LevinsonParams(args.theta, args.r, args.R))
    _emit_json(rep, {"subcommand": "kappa", "theta": args.theta,
                     "r": args.r, "R": args.R}, args.out)


def _cmd_optimize(args) -> None:
    from .constants import optimize_kappa
    res = optimize_kappa(args.theta, box_lo=(args.box_r[0], args.box_R[0]),
                         box_hi=(args.box_r[1], args.box_R[1]),
                         tol=args.tol, grid=args.grid)
    _emit_json(res, {"subcommand": "optimize", "theta": args.theta,
                     "box_r": args.box_r, "box_R": args.box_R,
                     "tol": args.tol, "grid": args.grid}, args.out)


def _cmd_surface(args) -> None:
    from .constants import kappa_surface
    rows = kappa_surface(args.theta, box_lo=(args.box_r[0], args.box_R[0]),
                         box_hi=(args.box_r[1], args.box_R[1]),
                         grid=args.grid)
    _emit_csv(["r", "R", "kappaPrime"], rows, args.out)


def _cmd_zeros(args) -> None:
    from .dirichlet import find_critical_zeros
    chi = _pick_character(args.q, args.chi)
    zl = find_critical_zeros(chi, args.T, grid_step=args.grid_step)
    _emit_csv(["gamma", "simple"],
              [(z.gamma, z.simple) for z in zl.zeros], args.out)


def _cmd_count(args) -> None:
    from .dirichlet import count_zeros_argument
    chi = _pick_character(args.q, args.chi)
    n = count_zeros_argument(chi, args.T)
    _emit_json({"q": args.q, "chi": chi.index, "T": args.T, "count": n},
               {"subcommand": "count", "q": args.q, "chi": chi.index,
                "T": args.T}, args.out)


def _cmd_sums(args) -> None:
    from .mollifier import diagonal_main_term
    rows = []
    for X in args.X:
        qt = X ** (1.0 / args.theta)
        sigma = 0.5 - args.R / math.log(qt)
        cmp_ = diagonal_main_term(X, qt, sigma, args.r,
                                  zeta_mode=args.zeta_mode)
        rel = abs(cmp_.direct - cmp_.predicted) / abs(cmp_.predicted)
        rows.append((X, cmp_.direct, cmp_.predicted, rel))
    _emit_csv(["X", "direct", "asymptotic", "relError"], rows, args.out)


def _cmd_moment(args) -> None:
    from .moments import SmoothingPhi, family_average, single_modulus_report
    phi = SmoothingPhi(T=args.T, kind=args.phi_shape)
    if args.Q is not None:
        rep = family_average(args.Q, args.T, args.theta, args.r, args.R,
                             phi=phi, workers=_workers())
        cfg_scale = {"Q": args.Q}
    else:
        rep = single_modulus_report(args.q, args.T, args.theta, args.r,
                                    args.R, phi=phi)
        cfg_scale = {"q": args.q}
    _emit_json(rep, {"subcommand": "moment", **cfg_scale, "T": args.T,
                     "theta": args.theta, "r": args.r, "R": args.R,
                     "phi_shape": args.phi_shape}, args.out)


def _cmd_bound(args) -> None:
    from .bound import FamilySpec, optimize_bound, zero_count_bound
    from .dirichlet import enumerate_characters
    prim = [c for c in enumerate_characters(args.q) if c.is_primitive]
    if not prim:
        raise ParameterError(f"no primitive characters mod {args.q}")
    fam = FamilySpec.uniform(prim, T=args.T)
    if args.R is not None:
        rep = zero_count_bound(fam, args.R, args.theta, args.r)
    else:
        rep = optimize_bound(fam, args.theta, args.r)
    _emit_json(rep, {"subcommand": "bound", "q": args.q, "T": args.T,
                     "theta": args.theta, "r": args.r,
                     "R": args.R if args.R is not None else "optimized"},
               args.out)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="levlab",
        description="numerical laboratory for critical zeros of "
                    "Dirichlet L-functions")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand", required=True)

    def add_out(sp):
        sp.add_argument("--out", default=None,
                        help="output path (default: stdout)")

    sp = sub.add_parser("kappa", help="constants C, C*, c and kappa'")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)
    add_out(sp)
    sp.set_defaults(func=_cmd_kappa)

    sp = sub.add_parser("optimize", help="maximize kappa' over an (r, R) box")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--box-r", type=float, nargs=2, default=(0.5, 2.0))
    sp.add_argument("--box-R", type=float, nargs=2, default=(0.2, 2.0))
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--grid", type=int, default=64)
    add_out(sp)
    sp.set_defaults(func=_cmd_optimize)

    sp = sub.add_parser("surface", help="kappa'(r, R) grid as CSV")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--grid", type=int, default=50)
    sp.add_argument("--box-r", type=float, nargs=2, default=(0.5, 2.0))
    sp.add_argument("--box-R", type=float, nargs=2, default=(0.2, 2.0))
    add_out(sp)
    sp.set_defaults(func=_cmd_surface)

    sp = sub.add_parser("zeros", help="critical-line zeros as CSV")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--chi", type=int, default=None,
                    help="character index within enumerate_characters(q); "
                         "default: first primitive")
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--grid-step", type=float, default=None)
    add_out(sp)
    sp.set_defaults(func=_cmd_zeros)

    sp = sub.add_parser("count", help="argument-principle zero count")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--chi", type=int, default=None)
    sp.add_argument("--T", type=float, required=True)
    add_out(sp)
    sp.set_defaults(func=_cmd_count)

    sp = sub.add_parser("sums", help="diagonal mollifier sum vs predicted "
                                     "constant, one CSV row per X")
    sp.add_argument("--X", type=float, action="append", required=True,
                    help="mollifier length; repeat for a convergence series")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)
    sp.add_argument("--zeta-mode", choices=("polar", "true"), default="polar")
    add_out(sp)
    sp.set_defaults(func=_cmd_sums)

    sp = sub.add_parser("moment", help="mollified second moment report")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--q", type=int, help="single modulus")
    g.add_argument("--Q", type=float, help="conductor-family scale (q ~ Q..2Q)")
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--R", type=float, required=True)
    sp.add_argument("--phi-shape", choices=("gaussian", "bump"),
                    default="gaussian")
    add_out(sp)
    sp.set_defaults(func=_cmd_moment)

    sp = sub.add_parser("bound", help="Littlewood lower-bound pipeline")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--R", type=float, default=None,
                    help="fixed R; omitted means optimize over a grid")
    add_out(sp)
    sp.set_defaults(func=_cmd_bound)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ParameterError as exc:
        _emit(json.dumps({"error": "validation", "message": str(exc)},
                         sort_keys=True), None)
        return 2
    except ConvergenceError as exc:
        _emit(json.dumps({"error": "non-convergence", "message": str(exc)},
                         sort_keys=True), None)
        return 3
    except CostGuardError as exc:
        _emit(json.dumps({"error": "cost-guard", "message": str(exc)},
                         sort_keys=True), None)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
