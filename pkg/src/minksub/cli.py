"""Command-line front end.

Subcommands operate on JSON config files and print JSON reports (CSV for
direction sweeps).  Exit codes: 0 on success or a CONSISTENT audit, 1 on
VIOLATION or a failed computation, 2 on usage or config schema errors.
Reports are deterministic: identical inputs and seed give identical bytes,
keys are sorted, and every numeric report embeds the tolerances it used.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import pencil as pencils
from .curvature import reports_to_csv, ricci_expanded, zeta_check
from .example import (ExampleParams, NoParamsFound, find_example_params,
                      verify_example)
from .germ import Germ
from .invariants import (audit_codim2, audit_hypersurface, audit_ruled,
                         point_invariants, sphere_grid)
from .minkowski import NormModel, validate_norm
from .norm_expr import ArityError, ExprSyntaxError, UnknownVariable


class ConfigError(ValueError):
    """Config schema problem; the message starts with a JSON pointer."""


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"/: cannot read {path!r}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"/: {path!r} is not valid JSON: {exc}") from exc


def _require(data, key: str, path: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or '/'}: expected a JSON object")
    if key not in data:
        raise ConfigError(f"{path}/{key}: missing")
    return data[key]


def _number(data, key: str, path: str) -> float:
    val = _require(data, key, path)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}/{key}: expected a number")
    return float(val)


def _integer(data, key: str, path: str) -> int:
    val = _require(data, key, path)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{path}/{key}: expected an integer")
    return val


def _array(data, key: str, path: str) -> np.ndarray:
    val = _require(data, key, path)
    try:
        return np.asarray(val, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}/{key}: not a numeric array: {exc}") from exc


def norm_from_config(data, path: str) -> NormModel:
    kind = _require(data, "kind", path)
    try:
        if kind == "euclidean":
            return NormModel.euclidean(_integer(data, "dim", path))
        if kind == "randers":
            return NormModel.randers(_array(data, "a", path),
                                     _array(data, "b", path))
        if kind == "example4":
            return NormModel.example4(_number(data, "A", path),
                                      _number(data, "B", path),
                                      _number(data, "eps1", path),
                                      _number(data, "eps2", path))
        if kind == "expression":
            text = _require(data, "text", path)
            if not isinstance(text, str):
                raise ConfigError(f"{path}/text: expected a string")
            return NormModel.expression(text, _integer(data, "dim", path))
    except (ExprSyntaxError, UnknownVariable, ArityError) as exc:
        raise ConfigError(f"{path}/text: {exc}") from exc
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}/kind: unknown norm kind {kind!r}")


def germ_from_config(data, path: str) -> Germ:
    n = _integer(data, "n", path)
    p = _integer(data, "p", path)
    d2 = _array(data, "d2", path)
    d3 = _array(data, "d3", path)
    try:
        return Germ.make(n, p, d2, d3)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _norm_section(data) -> NormModel:
    if isinstance(data, dict) and "kind" in data:
        return norm_from_config(data, "")
    return norm_from_config(_require(data, "norm", ""), "/norm")


def _germ_section(data) -> Germ:
    if isinstance(data, dict) and "d2" in data:
        return germ_from_config(data, "")
    return germ_from_config(_require(data, "germ", ""), "/germ")


def pencil_from_config(data, path: str = ""):
    try:
        pen = pencils.SymPencil.make(_array(data, "A1", path),
                                     _array(data, "A2", path))
    except ValueError as exc:
        raise ConfigError(f"{path or '/'}: {exc}") from exc
    N = pen.dim
    cubics = []
    for key in ("psi1", "psi2"):
        if key in data:
            T = _array(data, key, path)
            if T.shape != (N, N, N):
                raise ConfigError(f"{path}/{key}: expected shape "
                                  f"({N},{N},{N}), got {T.shape}")
            cubics.append(T)
        else:
            cubics.append(np.zeros((N, N, N)))
    return pen, cubics[0], cubics[1]


def _parse_direction(text: str, n: int) -> np.ndarray:
    try:
        parts = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"--direction: {exc}") from exc
    if len(parts) != n:
        raise ConfigError(f"--direction: expected {n} components, "
                          f"got {len(parts)}")
    return np.asarray(parts)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text)
    if out:
        Path(out).write_text(text)


def _emit_json(obj: dict, out: str | None) -> None:
    _emit(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n", out)


# -- subcommand handlers ------------------------------------------------------


def _cmd_check_norm(args) -> int:
    norm = _norm_section(_load_json(args.config))
    samples = args.grid if args.grid else 2000
    report = validate_norm(norm, samples=samples, seed=args.seed,
                           min_axis_fraction=args.min_axis_fraction)
    out = report.to_dict()
    out["norm"] = norm.to_config()
    _emit_json(out, args.out)
    return 0 if report.valid else 1


def _cmd_curvature(args) -> int:
    data = _load_json(args.config)
    norm = _norm_section(data)
    germ = _germ_section(data)
    u = _parse_direction(args.direction, germ.n)
    rep = ricci_expanded(norm, germ, u)
    zeta, zres = zeta_check(norm, germ, u)
    parts = dict(zip(("cubicGroup", "zetaGroup", "etaGroup", "rhoGroup"),
                     rep.ric_parts))
    _emit_json({"seed": args.seed,
                "u": rep.u, "S": rep.S, "Ric": rep.Ric, "ricParts": parts,
                "g": rep.g, "h": rep.h, "kappa": rep.kappa, "G": rep.G,
                "xi": rep.xi, "zeta": zeta, "eta": rep.eta, "rho": rep.rho,
                "Rik": rep.Rik,
                "zetaDetRatioResidual": zres,
                "tolerances": {"condLimit": 1e12,
                               "zetaDetRatioTol": 1e-10}}, args.out)
    return 0


def _cmd_ricci_grid(args) -> int:
    data = _load_json(args.config)
    norm = _norm_section(data)
    germ = _germ_section(data)
    grid = args.grid if args.grid else (720 if germ.n == 2 else 4096)
    reports = [ricci_expanded(norm, germ, u)
               for u in sphere_grid(germ.n, grid)]
    _emit(reports_to_csv(reports), args.out)
    return 0


def _cmd_invariants(args) -> int:
    germ = _germ_section(_load_json(args.config))
    inv = point_invariants(germ)
    out = inv.to_dict()
    out["seed"] = args.seed
    out["tolerances"] = {"rankTol": 1e-9}
    _emit_json(out, args.out)
    return 0


def _cmd_pencil_type(args) -> int:
    pen, _, _ = pencil_from_config(_load_json(args.file))
    method = "spectral"
    samples = None
    try:
        t = pencils.type_exact(pencils.spectral_split(pen))
    except (pencils.SingularA2, pencils.NotSemisimple):
        method = "sampled"
        samples = 10000
        t = pencils.type_sampled(pen, samples)
    _emit_json({"type": t, "method": method, "samples": samples,
                "seed": args.seed,
                "tolerances": {"eigTol": 1e-9, "clusterTol": 1e-6}},
               args.out)
    return 0


def _cmd_pencil_classify(args) -> int:
    pen, _, _ = pencil_from_config(_load_json(args.file))
    gen = pencils.genericity_check(pen, seed=args.seed)
    out = {"seed": args.seed, "genericity": gen.to_dict(),
           "spectral": None, "canonical": None, "topology": None,
           "type": None, "notes": [],
           "tolerances": {"eigTol": 1e-9, "clusterTol": 1e-6,
                          "canonicalAngleTol": 1e-6}}
    try:
        spec = pencils.spectral_split(pen)
        out["spectral"] = {"realPairs": [list(p) for p in spec.real_pairs],
                           "complexPairs": [list(p)
                                            for p in spec.complex_pairs]}
        out["type"] = pencils.type_exact(spec)
    except (pencils.SingularA2, pencils.NotSemisimple) as exc:
        out["notes"].append(f"spectral split unavailable: {exc}")
        spec = None
    if spec is not None:
        try:
            canon = pencils.canonical_from_spectral(spec)
            out["canonical"] = {"l": canon.l, "n": list(canon.n),
                                "s": canon.s}
            out["topology"] = pencils.classify_topology(canon).to_dict()
        except ValueError as exc:
            out["notes"].append(f"not at canonical angles: {exc}")
        except pencils.UnclassifiedConfiguration as exc:
            out["notes"].append(f"unclassified configuration: {exc}")
    _emit_json(out, args.out)
    return 0


def _cmd_pencil_common_zero(args) -> int:
    pen, T1, T2 = pencil_from_config(_load_json(args.file))
    point = pencils.common_zero_search(pen.A1, pen.A2, T1, T2,
                                       budget=args.budget, seed=args.seed)
    found = point is not None
    residual = None
    if found:
        vals = pencils._residuals(pen.A1, pen.A2, T1, T2, point)
        residual = float(np.sqrt(vals @ vals))
    _emit_json({"found": found,
                "point": point if found else None,
                "residual": residual,
                "budget": args.budget, "seed": args.seed,
                "tolerances": {"residualSq": 1e-16}}, args.out)
    return 0 if found else 1


def _cmd_verify_example(args) -> int:
    if args.auto:
        params = find_example_params(args.budget)
    elif args.params:
        params = ExampleParams.from_dict(_load_json(args.params))
    else:
        raise ConfigError("/: verify-example needs --params FILE or --auto")
    grid = args.grid if args.grid else 720
    report = verify_example(params, grid=grid)
    out = report.to_dict()
    out["seed"] = args.seed
    out["tolerances"] = {"relTol": 1e-6, "gridRefinementRad": 0.01}
    _emit_json(out, args.out)
    if args.csv:
        Path(args.csv).write_text(report.csv_text())
    return 0 if report.verdict == "SUCCESS" else 1


def _cmd_find_params(args) -> int:
    params = find_example_params(args.budget)
    _emit_json({"params": params.to_dict(), "budget": args.budget,
                "seed": args.seed}, args.out)
    return 0


def _cmd_audit(args) -> int:
    data = _load_json(args.config)
    norm = _norm_section(data)
    germ = _germ_section(data)
    tol = args.tol if args.tol else 1e-8
    if args.audit_cmd == "hyper":
        report = audit_hypersurface(norm, germ, grid=args.grid, tol=tol)
    elif args.audit_cmd == "codim2":
        report = audit_codim2(norm, germ, grid=args.grid, tol=tol)
    else:
        u = _parse_direction(args.direction, germ.n)
        report = audit_ruled(norm, germ, u, grid=args.grid, tol=tol)
    out = report.to_dict()
    out["seed"] = args.seed
    out["tolerances"] = {"ricNonnegTol": tol, "ruledTol": 1e-10}
    _emit_json(out, args.out)
    return 0 if report.verdict == "CONSISTENT" else 1


# -- parser -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="seed for all randomized steps (default 0)")
    common.add_argument("--grid", type=int, default=None,
                        help="direction-grid size (default per command)")
    common.add_argument("--tol", type=float, default=None,
                        help="override the command's main tolerance")
    common.add_argument("--out", default=None,
                        help="also write the report to this file")

    parser = argparse.ArgumentParser(
        prog="minksub",
        description="local invariants of submanifold germs in Minkowski "
                    "spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-norm", parents=[common],
                       help="validate a norm config")
    p.add_argument("--config", required=True)
    p.add_argument("--min-axis-fraction", type=float, default=0.0)
    p.set_defaults(handler=_cmd_check_norm)

    p = sub.add_parser("curvature", parents=[common],
                       help="full curvature report at one direction")
    p.add_argument("--config", required=True)
    p.add_argument("--direction", required=True,
                   help="comma-separated tangent components")
    p.set_defaults(handler=_cmd_curvature)

    p = sub.add_parser("ricci-grid", parents=[common],
                       help="CSV sweep of curvature reports")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=_cmd_ricci_grid)

    p = sub.add_parser("invariants", parents=[common],
                       help="relative nullity, point type, kernel basis")
    p.add_argument("--config", required=True)
    p.set_defaults(handler=_cmd_invariants)

    pencil_parser = sub.add_parser("pencil", help="symmetric pencil tools")
    pencil_sub = pencil_parser.add_subparsers(dest="pencil_cmd",
                                              required=True)
    p = pencil_sub.add_parser("type", parents=[common])
    p.add_argument("--file", required=True)
    p.set_defaults(handler=_cmd_pencil_type)
    p = pencil_sub.add_parser("classify", parents=[common])
    p.add_argument("--file", required=True)
    p.set_defaults(handler=_cmd_pencil_classify)
    p = pencil_sub.add_parser("common-zero", parents=[common])
    p.add_argument("--file", required=True)
    p.add_argument("--budget", type=int, default=64)
    p.set_defaults(handler=_cmd_pencil_common_zero)

    p = sub.add_parser("verify-example", parents=[common],
                       help="reproduce the surface example")
    p.add_argument("--params", default=None,
                   help="JSON file with A, B, eps1, eps2, eps3, C")
    p.add_argument("--auto", action="store_true",
                   help="search the parameter grid first")
    p.add_argument("--budget", type=int, default=729)
    p.add_argument("--csv", default=None,
                   help="write per-angle closed-form vs pipeline CSV here")
    p.set_defaults(handler=_cmd_verify_example)

    p = sub.add_parser("find-params", parents=[common],
                       help="search the example parameter grid")
    p.add_argument("--budget", type=int, default=729)
    p.set_defaults(handler=_cmd_find_params)

    audit_parser = sub.add_parser("audit", help="proposition auditors")
    audit_sub = audit_parser.add_subparsers(dest="audit_cmd", required=True)
    for name in ("hyper", "codim2", "ruled"):
        p = audit_sub.add_parser(name, parents=[common])
        p.add_argument("--config", required=True)
        if name == "ruled":
            p.add_argument("--direction", required=True)
        p.set_defaults(handler=_cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError, ArithmeticError,
            RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
