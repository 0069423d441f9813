"""Certificate files: emission, hashing, and independent re-verification.

Schema: {"kind": fl | fl-refutation | folner | qi | witness, "family": spec,
"scope": {...}, "data": {...}, "recheck": sha256 of the canonical payload}.
`verify_file` re-derives every asserted inequality from scratch; it never
trusts stored ratios.
"""

from __future__ import annotations

import hashlib
import json
import os
from fractions import Fraction

from .core import El, Oracle
from .families import parse_family
from .fl import FLCertificate, FLInconclusive, FLRefutation, check_fl
from .folner import FolnerCertificate, boundary_ratios, neighborhood_ratio
from .graph import Fragment
from .qi import check_qi
from .witness import Witness, check_witness


class SchemaError(ValueError):
    """Certificate file does not match the expected schema."""


def _sha(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def make_certificate(kind: str, family: str, scope: dict, data: dict) -> dict:
    payload = {"kind": kind, "family": family, "scope": scope, "data": data}
    return {**payload, "recheck": _sha(payload)}


def write_certificate(path: str, cert: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(cert, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def load_certificate(path: str) -> dict:
    with open(path) as fh:
        cert = json.load(fh)
    for key in ("kind", "family", "scope", "data", "recheck"):
        if key not in cert:
            raise SchemaError(f"missing key {key!r}")
    payload = {k: cert[k] for k in ("kind", "family", "scope", "data")}
    if _sha(payload) != cert["recheck"]:
        raise SchemaError("recheck hash does not match the payload")
    return cert


# -- emission helpers --------------------------------------------------------

def fl_to_cert(family: str, outcome) -> dict:
    if isinstance(outcome, FLCertificate):
        return make_certificate("fl", family, outcome.scope.to_json(),
                                {"edges_checked": outcome.edges_checked})
    if isinstance(outcome, FLRefutation):
        oracle = parse_family(family)
        x, k, y = outcome.witness
        return make_certificate("fl-refutation", family, outcome.scope.to_json(),
                                {"witness": {"x": oracle.format(x),
                                             "k": oracle.format(k),
                                             "y": oracle.format(y)}})
    raise ValueError(f"cannot emit a certificate for {outcome!r}")


def folner_to_cert(family: str, cert: FolnerCertificate, *,
                   fragment_scope: dict | None = None) -> dict:
    oracle = parse_family(family)
    scope = {"mode": cert.mode, "eps": str(cert.eps)}
    if cert.neighborhood_R is not None:
        scope["R"] = cert.neighborhood_R
        scope.update(fragment_scope or {})
    return make_certificate("folner", family, scope, {
        "tests": [oracle.format(s) for s in cert.tests],
        "F": [oracle.format(x) for x in cert.F],
        "ratios": [str(r) for r in cert.ratios],
        "localized": cert.localized,
    })


def witness_to_json(fragment: Fragment, witness: Witness) -> dict:
    fmt = fragment.oracle.format
    return {
        "params": {"R": witness.R, "eps": str(witness.eps), "C": witness.C},
        "fragment": {"family": fragment.oracle.family, "seed": fmt(fragment.seed),
                     "radius": fragment.radius, "prefix": fragment.prefix},
        "vectors": {fmt(x): [[fmt(z), str(v)] for z, v in pairs]
                    for x, pairs in witness.vectors.items()},
        "interior": [fmt(x) for x in witness.interior],
    }


def witness_to_cert(fragment: Fragment, witness: Witness) -> dict:
    body = witness_to_json(fragment, witness)
    return make_certificate("witness", fragment.oracle.family,
                            body["fragment"], body)


def qi_to_cert(family_x: str, family_y: str, frag_x: Fragment, frag_y: Fragment,
               phi: dict[El, El], M: Fraction, C: Fraction, R: int) -> dict:
    fx, fy = frag_x.oracle.format, frag_y.oracle.format
    scope = {"X": {"family": family_x, "seed": fx(frag_x.seed),
                   "radius": frag_x.radius, "prefix": frag_x.prefix},
             "Y": {"family": family_y, "seed": fy(frag_y.seed),
                   "radius": frag_y.radius, "prefix": frag_y.prefix}}
    data = {"map": [[fx(x), fy(y)] for x, y in phi.items()],
            "M": str(M), "C": str(C), "R": R}
    return make_certificate("qi", family_x, scope, data)


# -- verification ------------------------------------------------------------

def _fragment_from_scope(scope: dict, family: str | None = None) -> Fragment:
    oracle = parse_family(family or scope["family"])
    seed = oracle.parse(scope["seed"])
    return Fragment(oracle, seed, int(scope["radius"]), int(scope["prefix"]))


def verify_certificate(cert: dict) -> bool:
    """Recompute every assertion in the certificate; exact agreement only."""
    kind = cert["kind"]
    family = cert["family"]
    if kind in ("fl", "fl-refutation"):
        oracle = parse_family(family)
        sc = cert["scope"]
        outcome = check_fl(oracle, [int(i) for i in sc["k1"]], int(sc["C"]),
                           int(sc["radius"]), int(sc["prefix"]))
        if isinstance(outcome, FLInconclusive):
            return False
        if kind == "fl":
            return isinstance(outcome, FLCertificate) and \
                outcome.edges_checked == cert["data"]["edges_checked"]
        if not isinstance(outcome, FLRefutation):
            return False
        x, k, y = outcome.witness
        w = cert["data"]["witness"]
        return (oracle.format(x), oracle.format(k), oracle.format(y)) == \
            (w["x"], w["k"], w["y"])
    if kind == "folner":
        oracle = parse_family(family)
        data = cert["data"]
        scope = cert["scope"]
        eps = Fraction(scope["eps"])
        F = [oracle.parse(t) for t in data["F"]]
        stated = [Fraction(r) for r in data["ratios"]]
        if data.get("localized") and len({oracle.l_key(x) for x in F}) != 1:
            return False
        if scope["mode"] == "neighborhood":
            frag = _fragment_from_scope(scope, family)
            ratio, exact = neighborhood_ratio(frag, F, int(scope["R"]))
            return exact and stated == [ratio - 1] and ratio - 1 <= eps
        tests = [oracle.parse(t) for t in data["tests"]]
        try:
            ratios = boundary_ratios(oracle, F, tests, scope["mode"])
        except Exception:
            return False
        return ratios == stated and all(r <= eps for r in ratios)
    if kind == "witness":
        data = cert["data"]
        frag = _fragment_from_scope(data["fragment"])
        oracle = frag.oracle
        witness = Witness(
            int(data["params"]["R"]), Fraction(data["params"]["eps"]),
            int(data["params"]["C"]),
            {oracle.parse(x): [(oracle.parse(z), Fraction(v)) for z, v in pairs]
             for x, pairs in data["vectors"].items()},
            [oracle.parse(x) for x in data["interior"]])
        return check_witness(frag, witness).ok
    if kind == "qi":
        scope = cert["scope"]
        frag_x = _fragment_from_scope(scope["X"])
        frag_y = _fragment_from_scope(scope["Y"])
        data = cert["data"]
        phi = {frag_x.oracle.parse(a): frag_y.oracle.parse(b)
               for a, b in data["map"]}
        wit = check_qi(phi, frag_x, frag_y, Fraction(data["M"]),
                       Fraction(data["C"]), int(data["R"]))
        return wit.ok
    raise SchemaError(f"unknown certificate kind {kind!r}")


def verify_file(path: str) -> bool:
    return verify_certificate(load_certificate(path))
