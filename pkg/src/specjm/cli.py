"""Command-line interface: compatibility checks, robustness sweeps, witness
generators, region boundaries, and the selftest suite.

Exit codes: 0 on success, 1 on domain errors (bad input data, solver
failures), 2 on usage errors.  All file inputs and outputs use the versioned
JSON schemas; CSV is available for tabular output.  The SPECJM_THREADS
environment variable sizes the sweep worker pool.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

import numpy as np

from . import accept, constructions, jm, regions, sdp, spectra
from .errors import SpecjmError
from .quantum import (
    EffectTuple,
    effect_tuple_from_json,
    effect_tuple_to_json,
    parse_noise_model,
    random_effect_tuple,
)
from .serialize import stamp

__all__ = ["main"]


def _vector(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from exc


def _noise(text: str):
    try:
        return parse_noise_model(text)
    except SpecjmError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _region_kind(text: str) -> regions.RegionKind:
    try:
        return regions.RegionKind(text)
    except ValueError as exc:
        choices = ", ".join(k.value for k in regions.RegionKind)
        raise argparse.ArgumentTypeError(
            f"unknown region kind {text!r} (choose from {choices})") from exc


def _read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_effects(spec: str, seed: int) -> EffectTuple:
    """An effect tuple from a JSON file, or `random:G,D` drawn from --seed."""
    if spec.startswith("random:"):
        try:
            g_text, d_text = spec[len("random:"):].split(",")
            g, d = int(g_text), int(d_text)
        except ValueError as exc:
            raise SpecjmError(f"expected random:G,D, got {spec!r}") from exc
        return random_effect_tuple(g, d, seed=seed)
    return effect_tuple_from_json(_read_json(spec))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")


def _emit_json(doc: Any, out: str | None) -> None:
    _emit(json.dumps(doc, indent=2), out)


def _csv_line(values: Sequence[Any]) -> str:
    return ",".join(repr(v) if isinstance(v, float) else str(v) for v in values)


def _solver_args(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "tol": sdp.DEFAULT_TOL if args.tol is None else args.tol,
        "max_iter": sdp.DEFAULT_MAX_ITER if args.max_iter is None else args.max_iter,
    }


# --- subcommands ----------------------------------------------------------

def _cmd_jm_check(args: argparse.Namespace) -> int:
    effects = _load_effects(args.effects, args.seed)
    verdict = jm.check_compatibility(
        effects, cap_g=args.cap_g, **_solver_args(args))
    if args.format == "csv":
        _emit("status,margin\n"
              + _csv_line([verdict.status.value, verdict.margin]), args.out)
    else:
        _emit_json(jm.verdict_to_json(verdict), args.out)
    return 0


def _cmd_robustness(args: argparse.Namespace) -> int:
    effects = _load_effects(args.effects, args.seed)
    result = jm.robustness_detail(
        effects, args.direction, args.noise, t_cap=args.t_cap,
        cap_g=args.cap_g, **_solver_args(args))
    if args.format == "csv":
        header = [f"u{i + 1}" for i in range(len(args.direction))]
        _emit(",".join(header + ["t_star", "capped"]) + "\n"
              + _csv_line(list(args.direction) + [result.t_star, result.capped]),
              args.out)
    else:
        _emit_json(stamp({
            "status": result.status.value,
            "t_star": result.t_star,
            "capped": result.capped,
            "t_cap": result.t_cap,
            "direction": list(args.direction),
        }), args.out)
    return 0


def _sweep_directions(args: argparse.Namespace, g: int) -> list[tuple[float, ...]]:
    if args.directions is not None:
        doc = _read_json(args.directions)
        rows = doc["directions"] if isinstance(doc, dict) else doc
        return [tuple(float(x) for x in row) for row in rows]
    if g != 2:
        raise SpecjmError(
            f"--angular needs a 2-measurement tuple, got g={g}; "
            "pass --directions instead")
    return regions.angular_directions(args.angular)


def _cmd_sweep(args: argparse.Namespace) -> int:
    effects = _load_effects(args.effects, args.seed)
    dirs = _sweep_directions(args, effects.g)
    entries = jm.region_sweep(
        effects, dirs, args.noise, t_cap=args.t_cap,
        cap_g=args.cap_g, **_solver_args(args))
    if args.format == "csv":
        width = effects.g if not dirs else len(dirs[0])
        lines = [",".join([f"u{i + 1}" for i in range(width)]
                          + ["t_star", "capped", "error"])]
        for e in entries:
            lines.append(_csv_line(list(e.direction)
                                   + [e.t_star, e.capped, e.error or ""]))
        _emit("\n".join(lines), args.out)
    else:
        _emit_json(stamp({
            "entries": [
                {"direction": list(e.direction), "t_star": e.t_star,
                 "capped": e.capped, "error": e.error}
                for e in entries
            ],
        }), args.out)
    return 0


def _cmd_spin_gen(args: argparse.Namespace) -> int:
    sys_ = constructions.spin_system(args.g)
    _emit_json(constructions.spin_system_to_json(sys_), args.out)
    return 0


def _cmd_mub_gen(args: argparse.Namespace) -> int:
    fam = constructions.mub_family(args.d)
    _emit_json(constructions.mub_family_to_json(fam), args.out)
    return 0


def _cmd_zhu(args: argparse.Namespace) -> int:
    effects = _load_effects(args.effects, args.seed)
    eye = np.eye(effects.dim)
    povms = [[e.matrix, eye - e.matrix] for e in effects.effects]
    bound = constructions.zhu_bound(povms, **_solver_args(args))
    doc = stamp({
        "bound": bound,
        "dim": effects.dim,
        "certifies_incompatibility": bool(bound > effects.dim + 1e-7),
    })
    if args.format == "csv":
        _emit("bound,dim,certifies_incompatibility\n"
              + _csv_line([bound, effects.dim, doc["certifies_incompatibility"]]),
              args.out)
    else:
        _emit_json(doc, args.out)
    return 0


def _cmd_clone_region(args: argparse.Namespace) -> int:
    kind = args.kind
    if kind is regions.RegionKind.CLONE_SYMMETRIC_VALUE:
        dirs: list[tuple[float, ...]] = []
    elif args.directions is not None:
        doc = _read_json(args.directions)
        rows = doc["directions"] if isinstance(doc, dict) else doc
        dirs = [tuple(float(x) for x in row) for row in rows]
    else:
        dirs = regions.angular_directions(args.angular)
        expected = 2 if kind is regions.RegionKind.CLONE_PAIR else args.g
        if expected != 2:
            raise SpecjmError(
                f"--angular generates planar directions; g={args.g} needs "
                "--directions")
    if args.format == "csv":
        _emit(regions.boundary_csv(kind, args.g, args.d, dirs), args.out)
    else:
        rows = regions.region_boundary_rows(kind, args.g, args.d, dirs)
        _emit_json(stamp({
            "kind": kind.value,
            "g": args.g,
            "d": args.d,
            "rows": [{"direction": list(r[:-1]), "t_star": r[-1]} for r in rows],
        }), args.out)
    return 0


def _cmd_diamond_check(args: argparse.Namespace) -> int:
    if args.matrices.startswith("random:"):
        try:
            g_text, n_text = args.matrices[len("random:"):].split(",")
            g, n = int(g_text), int(n_text)
        except ValueError as exc:
            raise SpecjmError(
                f"expected random:G,N, got {args.matrices!r}") from exc
        tup = spectra.sample_diamond(g, n, seed=args.seed, count=1)[0]
    else:
        tup = spectra.matrix_tuple_from_json(_read_json(args.matrices))
    diamond = spectra.diamond_membership(tup, cap_g=args.cap_g)
    ball = spectra.matrix_ball_membership(tup)
    doc = stamp({
        "g": tup.g,
        "level": tup.level,
        "diamond": {"member": diamond.member, "margin": diamond.margin},
        "ball": {"member": ball.member, "margin": ball.margin},
    })
    if args.format == "csv":
        _emit("set,member,margin\n"
              + _csv_line(["diamond", diamond.member, diamond.margin]) + "\n"
              + _csv_line(["ball", ball.member, ball.margin]), args.out)
    else:
        _emit_json(doc, args.out)
    return 0


def _cmd_selftest(args: argparse.Namespace) -> int:
    names = args.only.split(",") if args.only else None
    try:
        selected = (accept.ALL_CHECK_NAMES if names is None else tuple(names))
        unknown = [n for n in selected if n not in accept.ALL_CHECK_NAMES]
        if unknown:
            raise SpecjmError(
                f"unknown checks: {', '.join(unknown)}; "
                f"available: {', '.join(accept.ALL_CHECK_NAMES)}")
        results = []
        width = max(len(n) for n in selected)
        print(f"{'check':<{width}}  {'status':<6}  {'time':>8}  measured (expected)")
        for name in selected:
            result = accept.run_check(name, tol=args.tol, max_iter=args.max_iter)
            results.append(result)
            status = "PASS" if result.passed else "FAIL"
            print(f"{result.name:<{width}}  {status:<6}  {result.elapsed:>7.2f}s  "
                  f"{result.measured} ({result.expected})")
            sys.stdout.flush()
    except KeyError as exc:
        raise SpecjmError(str(exc)) from exc
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failed: " + ", ".join(r.name for r in failed))
        return 1
    return 0


# --- parser ---------------------------------------------------------------

def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None,
                   help="solver convergence tolerance (default 1e-9)")
    p.add_argument("--max-iter", type=int, default=None,
                   help="solver iteration cap (default 200)")


def _add_common(p: argparse.ArgumentParser, cap_g: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0,
                   help="seed for random: input specs (default 0)")
    if cap_g:
        p.add_argument("--cap-g", type=int, default=jm.DEFAULT_CAP_G,
                       help="largest measurement count accepted (default 6)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="output format (default json)")
    p.add_argument("--out", default=None, metavar="FILE",
                   help="write output to FILE instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specjm",
        description=("Joint measurability of binary quantum measurements: "
                     "SDP verdicts, noise robustness, and closed-form "
                     "region cross-checks."),
        epilog=("Effect inputs are JSON files (schema specjm/1) or random:G,D "
                "with --seed.  SPECJM_THREADS sizes the sweep worker pool."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jm-check", help="decide joint measurability of an effect tuple")
    p.add_argument("--effects", required=True, help="effect tuple JSON file or random:G,D")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_jm_check)

    p = sub.add_parser("robustness", help="maximal compatible noise scaling along a direction")
    p.add_argument("--effects", required=True, help="effect tuple JSON file or random:G,D")
    p.add_argument("--direction", required=True, type=_vector, help="e.g. 1,1")
    p.add_argument("--noise", required=True, type=_noise,
                   help="balanced | linear | general:a1,a2,...")
    p.add_argument("--t-cap", type=float, default=None, help="search upper bound")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_robustness)

    p = sub.add_parser("sweep", help="robustness over many directions")
    p.add_argument("--effects", required=True, help="effect tuple JSON file or random:G,D")
    p.add_argument("--noise", required=True, type=_noise,
                   help="balanced | linear | general:a1,a2,...")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--directions", help="JSON file with a list of direction vectors")
    group.add_argument("--angular", type=int, metavar="N",
                       help="N planar angular directions (g=2 tuples only)")
    p.add_argument("--t-cap", type=float, default=None, help="search upper bound")
    _add_solver_flags(p)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("spin-gen", help="generate an anti-commuting matrix family")
    p.add_argument("--g", required=True, type=int, help="number of matrices")
    _add_common(p, cap_g=False)
    p.set_defaults(func=_cmd_spin_gen)

    p = sub.add_parser("mub-gen", help="generate a complete unbiased-bases family")
    p.add_argument("--d", required=True, type=int, help="prime dimension")
    _add_common(p, cap_g=False)
    p.set_defaults(func=_cmd_mub_gen)

    p = sub.add_parser("zhu", help="trace-criterion incompatibility bound for binary POVMs")
    p.add_argument("--effects", required=True, help="effect tuple JSON file or random:G,D")
    _add_solver_flags(p)
    _add_common(p, cap_g=False)
    p.set_defaults(func=_cmd_zhu)

    p = sub.add_parser("clone-region", help="boundary data for closed-form regions")
    p.add_argument("--kind", required=True, type=_region_kind,
                   help="|".join(k.value for k in regions.RegionKind))
    p.add_argument("--g", required=True, type=int)
    p.add_argument("--d", required=True, type=int)
    p.add_argument("--directions", default=None,
                   help="JSON file with a list of direction vectors")
    p.add_argument("--angular", type=int, default=64, metavar="N",
                   help="N planar angular directions when no file given (default 64)")
    _add_common(p, cap_g=False)
    p.set_defaults(func=_cmd_clone_region)

    p = sub.add_parser("diamond-check", help="diamond and matrix-ball membership")
    p.add_argument("--matrices", required=True,
                   help="matrix tuple JSON file or random:G,N")
    _add_common(p)
    p.set_defaults(func=_cmd_diamond_check)

    p = sub.add_parser("selftest", help="run the verification suite")
    p.add_argument("--only", default=None,
                   help="comma-separated subset of check names")
    _add_solver_flags(p)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecjmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyError as exc:
        print(f"error: missing field {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
