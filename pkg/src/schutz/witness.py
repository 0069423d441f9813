"""Property-A witness functions on fragments.

A witness assigns to each interior vertex x a probability vector supported
in the C-ball around x; the quality of the witness is the largest l1
distance between vectors at fragment distance at most R.  Constructions are
exact rationals; checking never trusts a censored distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import El, Oracle
from .families import FiniteGroupOracle
from .finite import FiniteSemigroup, max_group_image
from .graph import Fragment


@dataclass
class Witness:
    R: int
    eps: Fraction
    C: int
    vectors: dict[El, list[tuple[El, Fraction]]]
    interior: list[El]

    def vector(self, x: El) -> dict[El, Fraction]:
        return dict(self.vectors[x])


def interior_vertices(fragment: Fragment, C: int, R: int) -> list[El]:
    """Vertices whose C-balls and R-pair distances are certified exact."""
    margin = max(C, R)
    return [x for x in fragment.verts if fragment.interior(x, margin)]


def l1_distance(u: dict[El, Fraction], v: dict[El, Fraction]) -> Fraction:
    keys = set(u) | set(v)
    return sum((abs(u.get(k, Fraction(0)) - v.get(k, Fraction(0))) for k in keys),
               Fraction(0))


@dataclass
class WitnessReport:
    ok: bool
    achieved_eps: Fraction
    violations: list[str] = field(default_factory=list)
    checked_pairs: int = 0
    censored_pairs: int = 0


def check_witness(fragment: Fragment, witness: Witness) -> WitnessReport:
    """All three defining conditions, in exact arithmetic.

    Norm one and positivity per vertex; support inside B_C(x); l1 distance
    at most eps for interior pairs at exact distance <= R.  Pairs whose
    distance cannot be certified are skipped and counted.
    """
    fmt = fragment.oracle.format
    report = WitnessReport(True, Fraction(0))
    vec: dict[El, dict[El, Fraction]] = {}
    for x in witness.interior:
        if x not in fragment:
            report.violations.append(f"{fmt(x)} is not a fragment vertex")
            continue
        if x not in witness.vectors:
            report.violations.append(f"no vector at interior vertex {fmt(x)}")
            continue
        v = witness.vector(x)
        vec[x] = v
        if any(val < 0 for val in v.values()):
            report.violations.append(f"negative mass at {fmt(x)}")
        if sum(v.values(), Fraction(0)) != 1:
            report.violations.append(f"vector at {fmt(x)} does not have norm 1")
        for z, val in v.items():
            if val == 0:
                continue
            # an upper bound <= C certifies membership in B_C(x); a lower
            # bound > C certifies a violation; anything else is censored
            d = fragment.distance(x, z)
            if d.kind in ("exact", "upper") and d.value <= witness.C:
                continue
            if d.kind in ("exact", "lower") and d.value > witness.C:
                report.violations.append(
                    f"support of {fmt(x)} leaves B_{witness.C}: {fmt(z)}")
            else:
                report.censored_pairs += 1
    inter = [x for x in witness.interior if x in vec]
    for i in range(len(inter)):
        for j in range(i + 1, len(inter)):
            x, y = inter[i], inter[j]
            near = fragment.distance_at_most(x, y, witness.R)
            if near is None:
                report.censored_pairs += 1
                continue
            if not near:
                continue
            report.checked_pairs += 1
            dist = l1_distance(vec[x], vec[y])
            report.achieved_eps = max(report.achieved_eps, dist)
            if dist > witness.eps:
                report.violations.append(
                    f"||xi_{fmt(x)} - xi_{fmt(y)}||_1 = {dist} > {witness.eps}")
    report.ok = not report.violations
    return report


def ball_average_witness(fragment: Fragment, C: int, R: int) -> Witness:
    """xi_x = uniform distribution on B_C(x); eps is the achieved maximum."""
    interior = interior_vertices(fragment, C, R)
    if not interior:
        raise ValueError("no interior vertex at this radius")
    vectors: dict[El, list[tuple[El, Fraction]]] = {}
    for x in interior:
        ball, exact = fragment.ball(x, C)
        assert exact
        w = Fraction(1, len(ball))
        vectors[x] = [(z, w) for z in ball]
    witness = Witness(R, Fraction(2), C, vectors, interior)
    witness.eps = achieved_eps(fragment, witness)
    return witness


def achieved_eps(fragment: Fragment, witness: Witness) -> Fraction:
    """Largest l1 distance over interior pairs certified within R."""
    best = Fraction(0)
    inter = witness.interior
    for i in range(len(inter)):
        vi = witness.vector(inter[i])
        for j in range(i + 1, len(inter)):
            if fragment.distance_at_most(inter[i], inter[j], witness.R):
                best = max(best, l1_distance(vi, witness.vector(inter[j])))
    return best


def _tree_parents(fragment: Fragment) -> dict[int, int]:
    """BFS parents; error when the fragment is not a tree."""
    pairs = fragment.simple_pairs()
    if len(pairs) != len(fragment.verts) - 1:
        raise ValueError("fragment is not a tree")
    parent: dict[int, int] = {0: 0}
    order = [0]
    seen = {0}
    idx = 0
    adjacency: dict[int, list[int]] = {i: [] for i in range(len(fragment.verts))}
    for a, b in sorted(pairs):
        adjacency[a].append(b)
        adjacency[b].append(a)
    while idx < len(order):
        v = order[idx]
        idx += 1
        for w in sorted(adjacency[v]):
            if w not in seen:
                seen.add(w)
                parent[w] = v
                order.append(w)
    if len(seen) != len(fragment.verts):
        raise ValueError("fragment is not connected as a simple graph")
    return parent


def tree_ray_witness(fragment: Fragment, C: int, R: int) -> Witness:
    """Average along the geodesic toward the root (the seed), C steps.

    Steps past the root stay at the root, so the root absorbs the remaining
    mass; adjacent vectors then differ by exactly 2/C in l1.  The support
    walks toward the root and never leaves the fragment, so only the pair
    radius R constrains the interior.
    """
    if C < 1:
        raise ValueError("C must be >= 1")
    parent = _tree_parents(fragment)
    interior = interior_vertices(fragment, 0, R)
    if not interior:
        raise ValueError("no interior vertex at this radius")
    vectors: dict[El, list[tuple[El, Fraction]]] = {}
    w = Fraction(1, C)
    for x in interior:
        i = fragment.index[x]
        mass: dict[El, Fraction] = {}
        for _ in range(C):
            v = fragment.verts[i]
            mass[v] = mass.get(v, Fraction(0)) + w
            i = parent[i]
        vectors[x] = sorted(mass.items(), key=lambda kv: fragment.index[kv[0]])
    witness = Witness(R, Fraction(2), C, vectors, interior)
    witness.eps = achieved_eps(fragment, witness)
    return witness


@dataclass
class PushReport:
    group_oracle: FiniteGroupOracle
    group_fragment: Fragment
    witness: Witness
    bijective: bool
    check: WitnessReport


def push_witness_to_group_image(sg: FiniteSemigroup, src_fragment: Fragment,
                                witness: Witness) -> PushReport:
    """Push a witness on the minimum L-class down to the maximal group image.

    At the terminal stage of the projection chain the minimum idempotent e
    makes sigma restricted to S e a bijection onto G(S) (verified here), and
    right multiplication by e is a labeled-graph isomorphism of the class
    onto the Cayley graph of G(S); the pushed witness therefore satisfies
    the same (R, eps, C).
    """
    e = sg.min_idempotent()
    if src_fragment.seed != e:
        raise ValueError("source fragment must be seeded at the minimum idempotent")
    if not src_fragment.complete:
        raise ValueError("source fragment must cover the whole class")
    group, sigma, goracle = max_group_image(sg)
    class_elements = set(src_fragment.verts)
    reps = {}
    for s in sg.elements:
        r = sg.oracle.mul(s, e)
        if r not in class_elements:
            raise ValueError("sigma restricted to S e does not land in the class")
        reps[sigma[s]] = r
    bijective = len(reps) == group.order == len(class_elements)
    if not bijective:
        raise ValueError("sigma restricted to S e is not a bijection onto G(S)")
    gfrag = Fragment(goracle, goracle.el(group.identity),
                     max(len(sg), 1), goracle.gen_count())
    beta = {goracle.el(g): reps[g] for g in range(group.order)}
    vectors: dict[El, list[tuple[El, Fraction]]] = {}
    for gx in gfrag.verts:
        src_vec = witness.vector(beta[gx])
        vectors[gx] = [(gz, src_vec.get(beta[gz], Fraction(0)))
                       for gz in gfrag.verts if beta[gz] in src_vec]
    pushed = Witness(witness.R, witness.eps, witness.C, vectors, list(gfrag.verts))
    report = check_witness(gfrag, pushed)
    return PushReport(goracle, gfrag, pushed, bijective, report)


@dataclass
class UniformAReport:
    R: int
    eps: Fraction
    per_component: list[dict]
    uniform: bool
    sup_C: int | None
    scope: str


def uniform_property_a(oracle: Oracle, seeds: list[El], R: int, eps: Fraction,
                       C_range: range, *, prefix: int, method: str = "ball",
                       radius: int | None = None,
                       lp_kwargs: dict | None = None) -> UniformAReport:
    """Smallest admissible C per enumerated component; uniform verdict.

    The verdict is scoped to the listed seeds: 'uniform' means one C works
    for every component in the enumeration, nothing more.
    """
    per: list[dict] = []
    sup_C: int | None = 0
    for seed in seeds:
        rad = radius if radius is not None else max(C_range) + R + 1
        frag = Fragment(oracle, seed, rad, prefix)
        found: int | None = None
        achieved = None
        for C in C_range:
            if method == "ball":
                wit = ball_average_witness(frag, C, R)
                value = wit.eps
            elif method == "lp":
                from .lp import lp_optimal_witness
                value, _ = lp_optimal_witness(frag, R, C, **(lp_kwargs or {}))
                value = Fraction(value).limit_denominator(10 ** 6)
            else:
                raise ValueError(f"unknown method {method!r}")
            if value <= eps:
                found, achieved = C, value
                break
        per.append({"seed": oracle.format(seed), "C": found, "eps": achieved,
                    "complete": frag.complete})
        if found is None:
            sup_C = None
        elif sup_C is not None:
            sup_C = max(sup_C, found)
    return UniformAReport(R, eps, per, sup_C is not None, sup_C,
                          f"{len(seeds)} components, C in {C_range!r}")
