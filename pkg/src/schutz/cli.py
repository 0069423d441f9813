"""Command-line front end.

Subcommands: graph, fl, folner, propa, oplab, verify, families.
Exit codes: 0 certified/success, 1 refuted (or failed verification),
2 parse error, 3 budget exhaustion, 4 inconclusive at scope,
5 certificate schema mismatch.

Flag precedence: command-line flags over --config file over defaults; the
effective configuration is embedded in every output artifact.  The env var
SCHUTZ_BUDGET overrides the default enumeration budgets.  Outputs are
written atomically; identical configs yield byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .certs import (SchemaError, fl_to_cert, folner_to_cert, load_certificate,
                    make_certificate, verify_certificate, witness_to_cert,
                    write_certificate)
from .core import BudgetExceededError
from .families import FAMILY_HELP, parse_family
from .fl import FLCertificate, FLInconclusive, FLRefutation, check_fl
from .folner import FolnerCertificate, folner_search
from .graph import Fragment, fragment_to_json_str
from .lp import lp_optimal_witness
from .operators import (Window, matrix_unit_separation, non_fl_gap_operator,
                        propagation, rep_V)
from .witness import ball_average_witness, check_witness, tree_ray_witness

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_INCONCLUSIVE = 4
EXIT_SCHEMA = 5


def _default_budget() -> int:
    try:
        return int(os.environ.get("SCHUTZ_BUDGET", "20000"))
    except ValueError:
        return 20_000


def _write_atomic(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _parse_k1(text: str) -> list[int]:
    """'1..20' or '1,3,5' in 1-based stream positions -> 0-based indices."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo) - 1, int(hi)))
    return [int(p) - 1 for p in text.split(",")]


def _effective(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    config = {}
    path = getattr(args, "config", None)
    if path:
        with open(path) as fh:
            config = json.load(fh)
    merged = {}
    for key, value in vars(args).items():
        if key in ("func", "config"):
            continue
        if value is None and key in config:
            merged[key] = config[key]
        else:
            merged[key] = value
    return merged


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise ValueError(f"missing required option(s): {', '.join('--' + m for m in missing)}")


def cmd_graph(cfg: dict) -> int:
    oracle = parse_family(cfg["family"])
    _require(cfg, "family", "seed", "radius")
    seeds = [oracle.parse(s) for s in cfg["seed"]]
    prefix = cfg.get("prefix") or min(oracle.gen_count() or 4, 8)
    budget = cfg.get("budget") or _default_budget()

    def build(seed):
        return Fragment(oracle, seed, cfg["radius"], prefix,
                        cap=cfg.get("cap") or 8, max_vertices=budget)

    with ThreadPoolExecutor(max_workers=min(4, len(seeds))) as pool:
        fragments = list(pool.map(build, seeds))
    outdir = cfg.get("out") or "."
    os.makedirs(outdir, exist_ok=True)
    for i, frag in enumerate(fragments):
        if cfg.get("format") == "dot":
            _write_atomic(os.path.join(outdir, f"fragment{i}.dot"), frag.to_dot())
        else:
            body = frag.to_json()
            body["config"] = {k: v for k, v in cfg.items() if v is not None}
            _write_atomic(os.path.join(outdir, f"fragment{i}.json"),
                          json.dumps(body, indent=2, sort_keys=True) + "\n")
        print(f"fragment {i}: {len(frag)} vertices, {len(frag.edges)} edges, "
              f"complete={frag.complete}")
    return EXIT_OK


def cmd_fl(cfg: dict) -> int:
    _require(cfg, "family", "k1", "C")
    oracle = parse_family(cfg["family"])
    k1 = _parse_k1(cfg["k1"])
    radius = cfg.get("radius") or 2
    prefix = cfg.get("prefix") or max(k1) + 4
    outcome = check_fl(oracle, k1, cfg["C"], radius, prefix,
                       max_elements=cfg.get("budget") or _default_budget())
    if isinstance(outcome, FLInconclusive):
        print(f"inconclusive at scope: {outcome.reason}")
        return EXIT_INCONCLUSIVE
    cert = fl_to_cert(cfg["family"], outcome)
    cert["config"] = {k: v for k, v in cfg.items() if v is not None}
    if cfg.get("out"):
        write_certificate(cfg["out"], cert)
    if isinstance(outcome, FLCertificate):
        print(f"certificate at scope (radius={radius}, prefix={prefix}): "
              f"{outcome.edges_checked} edges labeled by K1 words of length <= {cfg['C']}")
        return EXIT_OK
    x, k, y = outcome.witness
    print("refutation: edge "
          f"{oracle.format(x)} --{oracle.format(k)}--> {oracle.format(y)} "
          f"admits no K1 word of length <= {cfg['C']}")
    return EXIT_REFUTED


def cmd_folner(cfg: dict) -> int:
    _require(cfg, "family", "eps", "mode")
    oracle = parse_family(cfg["family"])
    eps = Fraction(cfg["eps"])
    mode = cfg["mode"]
    centers = [oracle.parse(s) for s in (cfg.get("center") or [])]
    if not centers:
        centers = [oracle.gens(1)[0]]
    tests = [oracle.parse(s) for s in (cfg.get("tests") or [])]
    if not tests and mode != "neighborhood":
        tests = oracle.gens(cfg.get("prefix") or 4)
    outcome = folner_search(
        oracle, tests, eps, mode,
        centers=centers,
        max_radius=cfg.get("max_radius") or 6,
        prefix=cfg.get("prefix") or 4,
        max_subset_size=cfg.get("subset_size") or 0,
        neighborhood_R=cfg.get("R") or 1,
        localize=bool(cfg.get("localize")),
        max_vertices=cfg.get("budget") or _default_budget())
    if isinstance(outcome, FolnerCertificate):
        scope = None
        if mode == "neighborhood":
            c = centers[0]
            scope = {"seed": oracle.format(c), "radius": cfg.get("max_radius") or 6,
                     "prefix": cfg.get("prefix") or 4}
        cert = folner_to_cert(cfg["family"], outcome, fragment_scope=scope)
        cert["config"] = {k: v for k, v in cfg.items() if v is not None}
        if cfg.get("out"):
            write_certificate(cfg["out"], cert)
        shown = ", ".join(oracle.format(x) for x in outcome.F[:8])
        more = "..." if len(outcome.F) > 8 else ""
        print(f"certificate: |F|={len(outcome.F)} {{{shown}{more}}} "
              f"max ratio {outcome.max_ratio} <= {eps}")
        return EXIT_OK
    print(f"not found at budget after {outcome.candidates_tried} candidates")
    return EXIT_INCONCLUSIVE


def cmd_propa(cfg: dict) -> int:
    _require(cfg, "family", "seed", "radius", "R", "eps", "C")
    oracle = parse_family(cfg["family"])
    seed = oracle.parse(cfg["seed"][0] if isinstance(cfg["seed"], list) else cfg["seed"])
    prefix = cfg.get("prefix") or min(oracle.gen_count() or 4, 8)
    frag = Fragment(oracle, seed, cfg["radius"], prefix,
                    max_vertices=cfg.get("budget") or _default_budget())
    eps = Fraction(cfg["eps"])
    method = cfg.get("method") or "ball"
    if method == "ball":
        wit = ball_average_witness(frag, cfg["C"], cfg["R"])
    elif method == "tree":
        wit = tree_ray_witness(frag, cfg["C"], cfg["R"])
    elif method == "lp":
        _, wit = lp_optimal_witness(frag, cfg["R"], cfg["C"])
    else:
        raise ValueError(f"unknown method {method!r}")
    achieved = wit.eps
    report = check_witness(frag, wit)
    cert = witness_to_cert(frag, wit)
    cert["config"] = {k: v for k, v in cfg.items() if v is not None}
    if cfg.get("out"):
        write_certificate(cfg["out"], cert)
    print(f"{method} witness on {len(frag)} vertices: achieved eps* = {achieved} "
          f"(target {eps}), self-check {'ok' if report.ok else 'FAILED'}")
    return EXIT_OK if report.ok and achieved <= eps else EXIT_INCONCLUSIVE


def cmd_oplab(cfg: dict) -> int:
    _require(cfg, "family", "op")
    oracle = parse_family(cfg["family"])
    op = cfg["op"]
    if op == "propagation":
        _require(cfg, "s", "seed", "radius")
        s = oracle.parse(cfg["s"])
        seed = oracle.parse(cfg["seed"][0] if isinstance(cfg["seed"], list) else cfg["seed"])
        prefix = cfg.get("prefix") or min(oracle.gen_count() or 4, 8)
        frag = Fragment(oracle, seed, cfg["radius"], prefix)
        V = rep_V(frag, s)
        p = propagation(V)
        e = oracle.mul(oracle.star(s), s)
        d = frag.distance(e, s) if e in frag else None
        print(f"p(V_{oracle.format(s)}) = {p.value} on {len(frag)} vertices"
              + (f"; d(s*s, s) = {d.value}" if d and d.exact else ""))
        if cfg.get("out"):
            body = make_certificate("oplab", cfg["family"],
                                    {"op": "propagation", "s": cfg["s"]},
                                    {"propagation": p.value, "coo": V.to_coo()})
            body["config"] = {k: v for k, v in cfg.items() if v is not None}
            write_certificate(cfg["out"], body)
        return EXIT_OK
    if op == "gap":
        _require(cfg, "k1", "C")
        k1 = _parse_k1(cfg["k1"])
        outcome = check_fl(oracle, k1, cfg["C"], cfg.get("radius") or 1,
                           cfg.get("prefix") or max(k1) + 4)
        if not isinstance(outcome, FLRefutation):
            print("no refutation at this scope; no gap operator")
            return EXIT_INCONCLUSIVE
        x, _, y = outcome.witness
        window = Window(oracle, [x, y], prefix=cfg.get("prefix") or max(k1) + 4)
        gap = non_fl_gap_operator(window, [(x, y)])
        value = gap.check_combo(oracle, [], 0)
        print(f"gap operator on witness ({oracle.format(x)}, {oracle.format(y)}): "
              f"empty-combination distance^2 = {value} >= 1")
        return EXIT_OK
    raise ValueError(f"unknown oplab operation {op!r}")


def cmd_verify(cfg: dict) -> int:
    try:
        cert = load_certificate(cfg["file"])
    except SchemaError as exc:
        print(f"schema error: {exc}")
        return EXIT_SCHEMA
    ok = verify_certificate(cert)
    print(f"{cert['kind']} certificate: {'verified' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_families(cfg: dict) -> int:
    for spec, help_text in FAMILY_HELP:
        print(f"{spec:24s} {help_text}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schutz",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--family")
        p.add_argument("--config")
        p.add_argument("--prefix", type=int)
        p.add_argument("--budget", type=int)

    g = sub.add_parser("graph", help="build fragments, export DOT/JSON")
    common(g)
    g.add_argument("--seed", action="append")
    g.add_argument("--radius", type=int)
    g.add_argument("--cap", type=int)
    g.add_argument("--format", choices=["dot", "json"], default="json")
    g.add_argument("--out")
    g.set_defaults(func=cmd_graph)

    f = sub.add_parser("fl", help="finite-labeling certificate or refutation")
    common(f)
    f.add_argument("--k1")
    f.add_argument("--C", type=int)
    f.add_argument("--radius", type=int)
    f.add_argument("--out")
    f.set_defaults(func=cmd_fl)

    fo = sub.add_parser("folner", help="search Folner sets")
    common(fo)
    fo.add_argument("--eps")
    fo.add_argument("--mode", choices=["domain", "amenable", "neighborhood"])
    fo.add_argument("--R", type=int)
    fo.add_argument("--center", action="append")
    fo.add_argument("--tests", action="append")
    fo.add_argument("--max-radius", dest="max_radius", type=int)
    fo.add_argument("--subset-size", dest="subset_size", type=int)
    fo.add_argument("--localize", action="store_true", default=None)
    fo.add_argument("--out")
    fo.set_defaults(func=cmd_folner)

    pa = sub.add_parser("propa", help="construct and check property-A witnesses")
    common(pa)
    pa.add_argument("--seed", action="append")
    pa.add_argument("--radius", type=int)
    pa.add_argument("--R", type=int)
    pa.add_argument("--eps")
    pa.add_argument("--C", type=int)
    pa.add_argument("--method", choices=["ball", "tree", "lp"])
    pa.add_argument("--out")
    pa.set_defaults(func=cmd_propa)

    ol = sub.add_parser("oplab", help="operator experiments")
    common(ol)
    ol.add_argument("--op", choices=["propagation", "gap"])
    ol.add_argument("--s")
    ol.add_argument("--seed", action="append")
    ol.add_argument("--radius", type=int)
    ol.add_argument("--k1")
    ol.add_argument("--C", type=int)
    ol.add_argument("--out")
    ol.set_defaults(func=cmd_oplab)

    v = sub.add_parser("verify", help="re-verify a certificate file")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    fam = sub.add_parser("families", help="list built-in families")
    fam.set_defaults(func=cmd_families)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _effective(args, parser)
        return args.func(cfg)
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
