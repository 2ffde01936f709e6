"""Command-line entry point.

Exit codes: 0 success, 1 hypothesis or conclusion failure, 2 cap
exceeded, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

from .complexes import SUPair, homology
from .config import Config
from .dimension import KINDS, dimension_group, induced_map, rationalized
from .errors import CapExceeded, HypothesisFailure, InputError, NotConstantToOne
from .graph_core import adjacency_matrix, trim_essential
from .io import graph_to_json, jsonable, load_document, parse_code, parse_graph, parse_pair, parse_sft, parse_square, parse_triple
from .sft import (
    SFT,
    degree,
    fibre_product,
    is_conjugacy,
    is_injective,
    is_left_covering,
    is_right_covering,
    is_s_bijective,
    is_surjective,
    is_u_bijective,
)

SCHEMA_VERSION = 1

EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3


def _doc(path: str):
    return load_document(path)


def cmd_analyze(args, cfg: Config):
    obj, base = _doc(args.graph)
    g = parse_graph(obj, base)
    t = trim_essential(g)
    out = {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "essential": t is g,
        "adjacency": adjacency_matrix(g).tolist(),
    }
    if not t.is_empty:
        rep = SFT(t).analysis
        out.update({
            "components": jsonable([list(c) for c in rep.components]),
            "strongly_connected": rep.is_strongly_connected,
            "nonwandering": rep.is_nonwandering,
            "mixing": rep.is_mixing,
            "period": rep.period,
        })
    return out, True


def cmd_dimgroup(args, cfg: Config):
    obj, base = _doc(args.sft)
    s = parse_sft(obj, base)
    g = dimension_group(s, args.side)
    return {**g.to_json(), "rational_dim": g.rational_dim}, True


def cmd_induced(args, cfg: Config):
    obj, base = _doc(args.code)
    c = parse_code(obj, base)
    f = induced_map(c, args.kind, cfg.recoding_cap)
    return {**f.to_json(), "rationalized": jsonable(rationalized(f).tolist())}, True


def cmd_fibre(args, cfg: Config):
    o1, b1 = _doc(args.code1)
    o2, b2 = _doc(args.code2)
    c1, c2 = parse_code(o1, b1), parse_code(o2, b2)
    s, p1, p2 = fibre_product(c1, c2)
    return {
        "vertices": len(s.graph.vertices),
        "edges": len(s.graph.edges),
        "graph": graph_to_json(s.graph),
        "P1_s_bijective": _safe(is_s_bijective, p1),
        "P1_u_bijective": _safe(is_u_bijective, p1),
        "P2_s_bijective": _safe(is_s_bijective, p2),
        "P2_u_bijective": _safe(is_u_bijective, p2),
    }, True


def _safe(test: Callable, c):
    try:
        return test(c)
    except HypothesisFailure as exc:
        return exc.name


def cmd_homology(args, cfg: Config):
    obj, base = _doc(args.pair)
    p = parse_pair(obj, base)
    if isinstance(p, SUPair):
        p.validate()
    else:
        from .complexes import validate_sigma

        validate_sigma(p)
    r = homology(p, args.side, cfg.L_cap, cfg.M_cap, cfg.recoding_cap, cfg.level_window)
    return r.to_json(), True


def cmd_verify_square(args, cfg: Config):
    from .verify import verify_pullback_identity

    obj, base = _doc(args.square)
    d = parse_square(obj, base)
    r = verify_pullback_identity(d, args.level, cfg.recoding_cap, cfg.L_cap, cfg.M_cap, cfg.period_cap)
    return r.to_json(), r.passed


def cmd_degree(args, cfg: Config):
    obj, base = _doc(args.code)
    c = parse_code(obj, base)
    out = {
        "injective": is_injective(c),
        "surjective": is_surjective(c),
        "conjugacy": is_conjugacy(c),
        "s_bijective": _safe(is_s_bijective, c),
        "u_bijective": _safe(is_u_bijective, c),
        "left_covering": is_left_covering(c.trimmed().hom),
        "right_covering": is_right_covering(c.trimmed().hom),
    }
    out["degree"] = degree(c)
    return out, True


def cmd_cube(args, cfg: Config):
    from .verify import build_pullback_cube, build_sigma_cube

    obj, base = _doc(args.square)
    d = parse_square(obj, base)
    cube = build_pullback_cube(d, recoding_cap=cfg.recoding_cap)
    r = build_sigma_cube(cube, min(cfg.L_cap, 1), min(cfg.M_cap, 1), cfg.recoding_cap)
    return r.to_json(), r.passed


def cmd_naturality(args, cfg: Config):
    from .verify import verify_theta_naturality

    o1, b1 = _doc(args.triple1)
    o2, b2 = _doc(args.triple2)
    t1, t2 = parse_triple(o1, b1), parse_triple(o2, b2)
    r = verify_theta_naturality(t1, t2, cfg.L_cap, cfg.M_cap, cfg.recoding_cap)
    return r.to_json(), r.passed


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smalehom", description="Dimension groups and homology of SFT pairs.")
    ap.add_argument("--config", help="JSON file overriding the default caps")
    ap.add_argument("--format", choices=("json", "text"), help="output format")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="graph predicates")
    p.add_argument("graph")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("dimgroup", help="dimension group of an SFT")
    p.add_argument("sft")
    p.add_argument("--side", choices=("s", "u"), default="s")
    p.set_defaults(func=cmd_dimgroup)

    p = sub.add_parser("induced", help="map induced by a code on dimension groups")
    p.add_argument("code")
    p.add_argument("--kind", choices=KINDS, default="s")
    p.set_defaults(func=cmd_induced)

    p = sub.add_parser("fibre", help="fibre product of two codes")
    p.add_argument("code1")
    p.add_argument("code2")
    p.set_defaults(func=cmd_fibre)

    p = sub.add_parser("homology", help="homology of a pair")
    p.add_argument("pair")
    p.add_argument("--side", choices=("s", "u"), default="s")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("verify-square", help="pullback identity on a commuting square")
    p.add_argument("square")
    p.add_argument("--level", choices=("dimension", "homology"), default="dimension")
    p.set_defaults(func=cmd_verify_square)

    p = sub.add_parser("degree", help="degree and decision procedures for a code")
    p.add_argument("code")
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("cube", help="pullback cube of a square")
    p.add_argument("square")
    p.set_defaults(func=cmd_cube)

    p = sub.add_parser("naturality", help="naturality of the comparison map for two triples")
    p.add_argument("triple1")
    p.add_argument("triple2")
    p.set_defaults(func=cmd_naturality)
    return ap


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v)}")
    else:
        lines.append(f"{pad}{json.dumps(obj)}")
    return lines


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, dict) and (not isinstance(x, list) or _flat(x)) for x in v)
    return False


def _emit(payload: dict, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        stream.write("\n".join(_text(payload)) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    fmt = "json"
    try:
        cfg = Config.from_file(args.config) if args.config else Config()
        cfg = cfg.replace(output=args.format)
        fmt = cfg.output
        result, ok = args.func(args, cfg)
        payload = {"schema_version": SCHEMA_VERSION, "command": args.command, "ok": ok, "result": jsonable(result)}
        _emit(payload, fmt, stdout)
        return EXIT_OK if ok else EXIT_FAIL
    except InputError as exc:
        stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except CapExceeded as exc:
        _emit({"schema_version": SCHEMA_VERSION, "command": args.command, "ok": False,
               "error": {"kind": "cap exceeded", "detail": str(exc)}}, fmt, stdout)
        return EXIT_CAP
    except (HypothesisFailure, NotConstantToOne) as exc:
        name = getattr(exc, "name", type(exc).__name__)
        _emit({"schema_version": SCHEMA_VERSION, "command": args.command, "ok": False,
               "error": {"kind": "hypothesis failure", "name": name, "detail": str(exc)}}, fmt, stdout)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
