"""Radius-bounded fragments of left Schutzenberger graphs.

A fragment is the BFS exploration of one L-class from a seed, over a finite
generator prefix, up to a radius.  An edge x --k--> y is recorded exactly
when y = kx stays in the L-class of x (equivalently x lies in the domain of
k).  Fragments of infinite graphs are truncations, so every distance and
ball size is flagged exact or censored; consumers must only trust exact
values.  All construction is deterministic: generator index order first,
insertion order second.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable

from .core import BudgetExceededError, El, Oracle

INF = math.inf


@dataclass(frozen=True)
class Dist:
    """Extended distance with exactness bookkeeping.

    kind 'exact': the value is the true distance (INF means distinct
    components).  kind 'upper': a path of this length was found but a
    shorter one might leave the fragment.  kind 'lower': no path found;
    the true distance exceeds value - 1.
    """

    value: float
    kind: str = "exact"

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    def is_infinite(self) -> bool:
        return self.value == INF

    def __le__(self, other: float) -> bool:
        return self.value <= other


def l_related(oracle: Oracle, x: El, y: El) -> bool:
    """Green's L-relation: star(x) x == star(y) y."""
    oracle.check_family(x, y)
    return oracle.l_key(x) == oracle.l_key(y)


class Fragment:
    """One connected piece of a left Schutzenberger graph around a seed."""

    def __init__(self, oracle: Oracle, seed: El, radius: int, prefix: int,
                 cap: int = 8, max_vertices: int = 20_000):
        oracle.check_family(seed)
        if radius < 0:
            raise ValueError("radius must be >= 0")
        self.oracle = oracle
        self.seed = seed
        self.radius = radius
        self.prefix = prefix
        self.cap = cap
        self.verts: list[El] = [seed]
        self.index: dict[El, int] = {seed: 0}
        self.depth: list[int] = [0]
        self.edges: list[tuple[int, int, int]] = []   # (x index, gen index, y index)
        self.adj: list[list[tuple[int, int]]] = [[]]  # per-vertex (neighbour, gen index)
        self._pair_count: dict[tuple[int, int], int] = {}
        self.complete = True
        self._gens = oracle.gens(prefix)
        self._key = oracle.l_key(seed)
        self._build(max_vertices)
        self._dist_cache: dict[int, list[float]] = {}

    # -- construction -------------------------------------------------------

    def _build(self, max_vertices: int) -> None:
        oracle = self.oracle
        queue = deque([0])
        while queue:
            xi = queue.popleft()
            x = self.verts[xi]
            at_rim = self.depth[xi] == self.radius
            for gi, k in enumerate(self._gens):
                y = oracle.mul(k, x)
                if oracle.l_key(y) != self._key:
                    continue
                yi = self.index.get(y)
                if yi is None:
                    if at_rim:
                        self.complete = False
                        continue
                    if len(self.verts) >= max_vertices:
                        raise BudgetExceededError(
                            f"fragment exceeded {max_vertices} vertices")
                    yi = len(self.verts)
                    self.verts.append(y)
                    self.index[y] = yi
                    self.depth.append(self.depth[xi] + 1)
                    self.adj.append([])
                    queue.append(yi)
                self._add_edge(xi, gi, yi)

    def _add_edge(self, xi: int, gi: int, yi: int) -> None:
        n = self._pair_count.get((xi, yi), 0)
        if n >= self.cap:
            return
        self._pair_count[(xi, yi)] = n + 1
        self.edges.append((xi, gi, yi))
        self.adj[xi].append((yi, gi))

    # -- basic views --------------------------------------------------------

    def __len__(self) -> int:
        return len(self.verts)

    def __contains__(self, x: El) -> bool:
        return x in self.index

    def generator(self, gi: int) -> El:
        return self._gens[gi]

    def vertex_depth(self, x: El) -> int:
        return self.depth[self.index[x]]

    def simple_pairs(self) -> set[tuple[int, int]]:
        """Unordered non-loop adjacency (the simple-graph quotient)."""
        out = set()
        for xi, _, yi in self.edges:
            if xi != yi:
                out.add((min(xi, yi), max(xi, yi)))
        return out

    def loops_at(self, xi: int) -> list[int]:
        return [gi for a, gi, b in self.edges if a == b == xi]

    # -- metric -------------------------------------------------------------

    def _bfs_from(self, xi: int) -> list[float]:
        if xi not in self._dist_cache:
            dist = [INF] * len(self.verts)
            dist[xi] = 0
            queue = deque([xi])
            while queue:
                v = queue.popleft()
                for w, _ in self.adj[v]:
                    if dist[w] == INF:
                        dist[w] = dist[v] + 1
                        queue.append(w)
            self._dist_cache[xi] = dist
        return self._dist_cache[xi]

    def distance(self, x: El, y: El) -> Dist:
        """Extended path distance with exactness flag.

        Distinct L-classes are at exact infinite distance regardless of
        truncation (the class key comparison is scope-free).
        """
        self.oracle.check_family(x, y)
        if self.oracle.l_key(y) != self._key or self.oracle.l_key(x) != self._key:
            return Dist(INF, "exact")
        xi = self.index.get(x)
        yi = self.index.get(y)
        if xi is None:
            raise KeyError(f"{x!r} is not a fragment vertex")
        if yi is None:
            if self.complete:
                # the component was fully enumerated: y sits in the same
                # L-class but in a different component of the prefix graph
                return Dist(INF, "exact")
            return Dist(self.radius - self.depth[xi] + 1, "lower")
        d = self._bfs_from(xi)[yi]
        if d == INF:  # cannot happen: fragments are connected by construction
            return Dist(INF, "exact")
        if self.complete or min(self.depth[xi], self.depth[yi]) + d <= self.radius:
            return Dist(d, "exact")
        return Dist(d, "upper")

    def distance_at_most(self, x: El, y: El, r: int) -> bool | None:
        """Certified d(x, y) <= r (True), certified > r (False), or None.

        A found path of length <= r certifies True even when censored; a
        found value > r certifies False whenever a hypothetical shorter
        path could not have left the fragment (both depths <= radius - r).
        """
        d = self.distance(x, y)
        if d.value <= r and d.kind in ("exact", "upper"):
            return True
        if d.value > r:
            if d.kind in ("exact", "lower"):
                return False
            xi, yi = self.index[x], self.index[y]
            if min(self.depth[xi], self.depth[yi]) + r <= self.radius:
                return False
        return None

    def ball(self, x: El, r: int) -> tuple[list[El], bool]:
        """Vertices within distance r of x, plus an exactness flag."""
        xi = self.index[x]
        dist = self._bfs_from(xi)
        members = [self.verts[i] for i in range(len(self.verts)) if dist[i] <= r]
        exact = self.complete or self.depth[xi] + r <= self.radius
        return members, exact

    def neighborhood(self, members: list[El], r: int) -> tuple[set[El], bool]:
        """r-neighborhood of a vertex set; exact iff every ball is exact."""
        out: set[El] = set()
        exact = True
        for f in members:
            ball, ok = self.ball(f, r)
            exact = exact and ok
            out.update(ball)
        return out, exact

    def interior(self, x: El, margin: int) -> bool:
        """True when every ball of radius `margin` around x is exact."""
        return self.complete or self.depth[self.index[x]] + margin <= self.radius

    # -- export -------------------------------------------------------------

    def to_json(self) -> dict:
        fmt = self.oracle.format
        return {
            "family": self.oracle.family,
            "seed": fmt(self.seed),
            "radius": self.radius,
            "prefix": self.prefix,
            "complete": self.complete,
            "vertices": [fmt(v) for v in self.verts],
            "edges": [{"x": fmt(self.verts[xi]),
                       "label": fmt(self._gens[gi]),
                       "y": fmt(self.verts[yi])}
                      for xi, gi, yi in self.edges],
            "distances": list(self.depth),
        }

    def to_dot(self) -> str:
        fmt = self.oracle.format
        lines = ["graph fragment {"]
        for i, v in enumerate(self.verts):
            lines.append(f'  n{i} [label="{fmt(v)}"];')
        seen: set[tuple[int, int, int]] = set()
        for xi, gi, yi in self.edges:
            a, b = min(xi, yi), max(xi, yi)
            if (a, b, gi) in seen:
                continue
            seen.add((a, b, gi))
            # the reverse edge carries the starred label; emit one direction
            if xi <= yi:
                lines.append(f'  n{xi} -- n{yi} [label="{fmt(self._gens[gi])}"];')
            else:
                rev = self.oracle.star(self._gens[gi])
                lines.append(f'  n{yi} -- n{xi} [label="{fmt(rev)}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_fragment(oracle: Oracle, seed: El, radius: int, prefix: int,
                   cap: int = 8, max_vertices: int = 20_000) -> Fragment:
    return Fragment(oracle, seed, radius, prefix, cap=cap, max_vertices=max_vertices)


def edge_criteria_agree(oracle: Oracle, x: El, k: El) -> bool:
    """(kx L x)  iff  (k*k x == x): the two domain-membership tests."""
    via_class = oracle.l_key(oracle.mul(k, x)) == oracle.l_key(x)
    via_domain = oracle.mul(oracle.mul(oracle.star(k), k), x) == x
    return via_class == via_domain


def max_ball_size(fragment: Fragment, r: int) -> tuple[int, int]:
    """Maximum |B_r(x)| over vertices with exact r-balls.

    Returns (max size, number of vertices with exact balls).
    """
    best = 0
    counted = 0
    for x in fragment.verts:
        members, exact = fragment.ball(x, r)
        if exact:
            counted += 1
            best = max(best, len(members))
    return best, counted


def bounded_geometry_probe(oracle: Oracle, r: int, prefix: int, seeds: list[El],
                           cap: int = 8, max_vertices: int = 20_000) -> dict:
    """Compare interior r-ball sizes against the |K|^r estimate and, when a
    group image is available, against ball sizes in G(S)."""
    gens = oracle.gens(prefix)
    report: dict[str, Any] = {
        "r": r,
        "prefix": len(gens),
        "bound": len(gens) ** r,
        "per_seed": [],
    }
    overall = 0
    for seed in seeds:
        frag = build_fragment(oracle, seed, 2 * r, prefix,
                              cap=cap, max_vertices=max_vertices)
        size, counted = max_ball_size(frag, r)
        overall = max(overall, size)
        report["per_seed"].append({
            "seed": oracle.format(seed),
            "max_interior_ball": size,
            "exact_vertices": counted,
            "complete": frag.complete,
        })
    report["max_interior_ball"] = overall
    report["within_bound"] = overall <= report["bound"]
    group_image = getattr(oracle, "group_image", None)
    if group_image is not None:
        _, goracle = group_image()
        gfrag = build_fragment(goracle, goracle.el(goracle.group.identity),
                               2 * r, goracle.gen_count(), cap=cap)
        gsize, _ = max_ball_size(gfrag, r)
        report["group_image_ball"] = gsize
        report["group_ball_within_semigroup_max"] = gsize <= overall or not gfrag.complete
    return report


@dataclass
class MapReport:
    """Outcome of a structural graph-map check."""
    mapping: dict[El, El]
    target: Fragment
    isomorphic: bool
    violations: list[str]


def rho_map(oracle: Oracle, s: El, src: Fragment) -> MapReport:
    """Right multiplication by star(s) from the class of s*s to the class of s s*.

    The source fragment must be seeded at s*s.  Verifies bijectivity onto
    the matching ball and label-preserving adjacency; any violation is a bug.
    """
    star_s = oracle.star(s)
    e = oracle.mul(star_s, s)
    if src.seed != e:
        raise ValueError("source fragment must be seeded at star(s) s")
    target = Fragment(oracle, oracle.mul(e, star_s), src.radius, src.prefix,
                      cap=src.cap)
    mapping = {x: oracle.mul(x, star_s) for x in src.verts}
    violations: list[str] = []
    images = set(mapping.values())
    if len(images) != len(src.verts):
        violations.append("rho is not injective on the fragment")
    if images != set(target.verts):
        violations.append("rho image does not match the target ball")
    src_edges = {(mapping[src.verts[xi]], gi, mapping[src.verts[yi]])
                 for xi, gi, yi in src.edges}
    tgt_edges = {(target.verts[xi], gi, target.verts[yi])
                 for xi, gi, yi in target.edges}
    if src_edges != tgt_edges:
        violations.append("adjacency with labels is not preserved")
    return MapReport(mapping, target, not violations, violations)


@dataclass
class InvolutionReport:
    mapping: dict[El, El]
    right_edges: list[tuple[El, El, El]]   # (x*, k*, y*) with y* = x* k*
    isomorphic: bool
    violations: list[str]


def involution_graph(fragment: Fragment) -> InvolutionReport:
    """Map x -> star(x); every left edge y = kx becomes a right edge
    y* = x* k*.  Checks the right-multiplication identity on each edge."""
    oracle = fragment.oracle
    mapping = {x: oracle.star(x) for x in fragment.verts}
    violations: list[str] = []
    if len(set(mapping.values())) != len(fragment.verts):
        violations.append("involution is not injective")
    right_edges = []
    for xi, gi, yi in fragment.edges:
        x, y = fragment.verts[xi], fragment.verts[yi]
        k = fragment.generator(gi)
        xs, ys, ks = mapping[x], mapping[y], oracle.star(k)
        if oracle.mul(xs, ks) != ys:
            violations.append(
                f"edge {oracle.format(x)} --{oracle.format(k)}--> {oracle.format(y)}"
                " fails star(y) == star(x) star(k)")
        right_edges.append((xs, ks, ys))
    return InvolutionReport(mapping, right_edges, not violations, violations)


def fragment_to_json_str(fragment: Fragment) -> str:
    return json.dumps(fragment.to_json(), indent=2, sort_keys=True) + "\n"
