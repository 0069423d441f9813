"""Folner certificates for domain measurability and amenability.

Ratios are exact rationals end to end.  A certificate records, for each
test element s, the boundary ratio |s (F n D_{s*s}) \\ F| / |F|; amenable
mode additionally demands F inside every domain, and neighborhood mode
bounds |N_R F| / |F| on a fragment.  Not-found verdicts are budgeted, never
disproofs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .core import El, Oracle
from .families import ProductOracle
from .graph import Fragment


@dataclass
class FolnerCertificate:
    family: str
    mode: str                         # domain | amenable | neighborhood
    tests: list[El]
    eps: Fraction
    F: list[El]
    ratios: list[Fraction]            # per test element; [|N_R F|/|F| - 1] in neighborhood mode
    neighborhood_R: int | None = None
    localized: bool = False

    @property
    def max_ratio(self) -> Fraction:
        return max(self.ratios) if self.ratios else Fraction(0)


@dataclass
class FolnerNotFound:
    family: str
    mode: str
    eps: Fraction
    candidates_tried: int
    evidence: list[dict] = field(default_factory=list)
    verdict: str = "not-found-at-budget"


class DomainViolation(Exception):
    """Candidate F is not contained in a required domain (amenable mode)."""


def in_domain(oracle: Oracle, s: El, x: El) -> bool:
    """x lies in D_{s*s}, tested uniformly as s*s x == x."""
    return oracle.mul(oracle.mul(oracle.star(s), s), x) == x


def boundary_ratios(oracle: Oracle, F: list[El], tests: list[El],
                    mode: str) -> list[Fraction]:
    """Exact |s (F n D_{s*s}) \\ F| / |F| per test element.

    In amenable mode raises DomainViolation unless F is inside every domain.
    """
    if not F:
        raise ValueError("F must be non-empty")
    fset = set(F)
    out = []
    for s in tests:
        inside = [x for x in F if in_domain(oracle, s, x)]
        if mode == "amenable" and len(inside) != len(F):
            raise DomainViolation(s)
        moved = {oracle.mul(s, x) for x in inside}
        out.append(Fraction(len(moved - fset), len(F)))
    return out


def folner_verify(oracle: Oracle, cert: FolnerCertificate,
                  fragment: Fragment | None = None) -> bool:
    """Independent recount of every stated ratio; exact match required."""
    if cert.mode == "neighborhood":
        if fragment is None:
            raise ValueError("neighborhood certificates need the fragment")
        ratio, exact = neighborhood_ratio(fragment, cert.F, cert.neighborhood_R or 0)
        return exact and [ratio - 1] == cert.ratios and ratio - 1 <= cert.eps
    try:
        ratios = boundary_ratios(oracle, cert.F, cert.tests, cert.mode)
    except DomainViolation:
        return False
    if ratios != cert.ratios:
        return False
    if cert.localized and len({oracle.l_key(x) for x in cert.F}) != 1:
        return False
    return all(r <= cert.eps for r in ratios)


def neighborhood_ratio(fragment: Fragment, F: list[El], R: int
                       ) -> tuple[Fraction, bool]:
    """Exact |N_R F| / |F| and whether the neighborhood is truncation-free."""
    if not F:
        raise ValueError("F must be non-empty")
    hood, exact = fragment.neighborhood(F, R)
    return Fraction(len(hood), len(F)), exact


def _ball_candidates(fragment: Fragment, max_radius: int):
    for r in range(max_radius + 1):
        members, exact = fragment.ball(fragment.seed, r)
        if exact:
            yield f"B_{r}({fragment.oracle.format(fragment.seed)})", members


def folner_search(oracle: Oracle, tests: list[El], eps: Fraction, mode: str,
                  *, centers: list[El], max_radius: int = 6, prefix: int = 4,
                  max_subset_size: int = 0, subset_universe: list[El] | None = None,
                  max_candidates: int = 50_000, neighborhood_R: int = 1,
                  localize: bool = False, fragment_cap: int = 8,
                  max_vertices: int = 20_000):
    """Search ball candidates around each center, then exhaustive small subsets.

    First success wins (balls by growing radius, then subsets by size and
    lexicographic index order), which realises the smallest-|F| tie-break
    within each candidate family.
    """
    if mode not in ("domain", "amenable", "neighborhood"):
        raise ValueError(f"unknown mode {mode!r}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    tried = 0
    evidence: list[dict] = []
    fragments = [Fragment(oracle, c, max_radius, prefix, cap=fragment_cap,
                          max_vertices=max_vertices) for c in centers]

    def attempt(desc: str, F: list[El], frag: Fragment | None):
        nonlocal tried
        tried += 1
        if localize and len({oracle.l_key(x) for x in F}) != 1:
            return None
        entry: dict = {"candidate": desc, "size": len(F)}
        if frag is not None:
            bratio, bexact = neighborhood_ratio(frag, F, 1)
            if bexact:
                entry["boundary_ratio"] = bratio - 1
        if mode == "neighborhood":
            assert frag is not None
            ratio, exact = neighborhood_ratio(frag, F, neighborhood_R)
            entry["ratio"] = ratio - 1
            evidence.append(entry)
            if exact and ratio - 1 <= eps:
                return FolnerCertificate(oracle.family, mode, tests, eps, F,
                                         [ratio - 1], neighborhood_R, localize)
            return None
        try:
            ratios = boundary_ratios(oracle, F, tests, mode)
        except DomainViolation as dv:
            entry["domain_violation"] = oracle.format(dv.args[0])
            evidence.append(entry)
            return None
        entry["max_ratio"] = max(ratios) if ratios else Fraction(0)
        evidence.append(entry)
        if all(r <= eps for r in ratios):
            return FolnerCertificate(oracle.family, mode, tests, eps, F,
                                     ratios, None, localize)
        return None

    for frag in fragments:
        for desc, members in _ball_candidates(frag, max_radius):
            if tried >= max_candidates:
                return FolnerNotFound(oracle.family, mode, eps, tried, evidence)
            got = attempt(desc, members, frag)
            if got is not None and folner_verify(oracle, got, frag):
                return got

    universe = subset_universe
    if universe is None and fragments:
        universe = fragments[0].verts
    if max_subset_size and universe:
        frag0 = fragments[0] if fragments else None
        for size in range(1, max_subset_size + 1):
            for combo in itertools.combinations(range(len(universe)), size):
                if tried >= max_candidates:
                    return FolnerNotFound(oracle.family, mode, eps, tried, evidence)
                F = [universe[i] for i in combo]
                frag = frag0 if frag0 and all(x in frag0 for x in F) else None
                got = attempt(f"subset{list(combo)}", F, frag)
                if got is not None and folner_verify(oracle, got, frag):
                    return got
    return FolnerNotFound(oracle.family, mode, eps, tried, evidence)


def project_product_folner(product: ProductOracle, cert: FolnerCertificate,
                           tests: list[El]) -> FolnerCertificate:
    """Transfer a certificate on S x G to S: F = {s : (s, g) in F_G}.

    From an eps/|G| certificate for S x G (tests paired with every group
    element) the projected set certifies eps for S.
    """
    base = product.base
    order = product.group.order
    F = list(dict.fromkeys(product.left(x) for x in cert.F))
    ratios = boundary_ratios(base, F, tests, cert.mode)
    eps = cert.eps * order
    got = FolnerCertificate(base.family, cert.mode, tests, eps, F, ratios)
    if not all(r <= eps for r in ratios):
        raise ValueError("projected set fails the transferred Folner bound")
    return got


@dataclass
class PullbackReport:
    F_S: list[El]
    ratio_S: Fraction
    ratio_T: Fraction
    fiber_bound: int
    R: int
    blown_R: int
    eps_adjusted: Fraction
    ok: bool


def pullback_folner(phi: dict[El, El], frag_S: Fragment, frag_T: Fragment,
                    F_T: list[El], R: int, M: Fraction, C: Fraction
                    ) -> PullbackReport:
    """Pull a Folner set back through a surjective quasi-isometry.

    F_S = phi^{-1}(F_T).  With B the largest fiber of phi, the exact counting
    bound at finite scale is

        |N_R F_S| <= B |N_{MR+C} F_T \\ F_T| + |F_S| <= (1 + B eps_T) |F_S|,

    using N_R F_S inside phi^{-1}(N_{MR+C} F_T) and |F_T| <= |F_S|.
    """
    target = set(F_T)
    F_S = [x for x in frag_S.verts if phi[x] in target]
    if not F_S or len(set(phi.values()) & target) != len(target):
        raise ValueError("the map is not surjective onto F_T")
    blown = int(M * R + C)
    ratio_S, exact_S = neighborhood_ratio(frag_S, F_S, R)
    ratio_T, exact_T = neighborhood_ratio(frag_T, F_T, blown)
    if not (exact_S and exact_T):
        raise ValueError("neighborhoods touch the fragment boundary; enlarge radii")
    fibers: dict[El, int] = {}
    for x in frag_S.verts:
        fibers[phi[x]] = fibers.get(phi[x], 0) + 1
    fiber_bound = max(fibers.values())
    hood_S, _ = frag_S.neighborhood(F_S, R)
    hood_T, _ = frag_T.neighborhood(F_T, blown)
    eps_adjusted = fiber_bound * (ratio_T - 1)
    ok = all(phi[x] in hood_T for x in hood_S) and ratio_S - 1 <= eps_adjusted
    return PullbackReport(F_S, ratio_S, ratio_T, fiber_bound, R, blown,
                          eps_adjusted, ok)
