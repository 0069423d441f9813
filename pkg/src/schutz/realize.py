"""Realize a finite loop-decorated connected graph as a Schutzenberger graph.

The inverse semigroup behind the construction is generated by the vertices
(partial identities), the edges in both orientations, and a zero.  Elements
of the distinguished L-class are oriented paths starting at the base vertex
v0; two such paths are equal exactly when they share their final vertex, so
the class is represented by endpoint pairs.  Only the action on that class
(plus products that stay length-one) has a normal form here; arbitrary
products of longer paths are out of scope and raise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import El, Oracle, UnsupportedOperationError, ZERO
from .graph import Fragment


class GraphOracle(Oracle):
    """Restricted oracle for the path semigroup of a loop-decorated graph.

    Payloads: ZERO, or ('p', start, end) for a path from `start` to `end`.
    Vertex letters are the length-zero paths ('p', v, v) (a vertex equals
    its own loop edge by the defining relations); edge letters are the
    length-one paths; elements of the class of v0 are ('p', v0, w).
    """

    def __init__(self, vertices: list, edges: list[tuple], v0):
        self.vertices = sorted(vertices, key=str)
        vset = set(self.vertices)
        if v0 not in vset:
            raise ValueError("base vertex is not in the graph")
        self.v0 = v0
        self.pairs: set[frozenset] = set()
        self.loops: set = set()
        for u, w in edges:
            if u not in vset or w not in vset:
                raise ValueError(f"edge ({u}, {w}) leaves the vertex set")
            if u == w:
                self.loops.add(u)
            else:
                self.pairs.add(frozenset((u, w)))
        missing = [v for v in self.vertices if v not in self.loops]
        if missing:
            raise ValueError(f"every vertex needs a loop; missing at {missing}")
        if not self._connected():
            raise ValueError("input graph must be connected")
        self.family = f"graph:{len(self.vertices)}v"
        self._gens = self._generator_list()

    def _connected(self) -> bool:
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            u = stack.pop()
            for pair in self.pairs:
                if u in pair:
                    (w,) = tuple(pair - {u})
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return len(seen) == len(self.vertices)

    def _generator_list(self) -> list[El]:
        gens = [El(self.family, ("p", v, v)) for v in self.vertices]
        for pair in sorted(self.pairs, key=lambda p: sorted(map(str, p))):
            u, w = sorted(pair, key=str)
            gens.append(El(self.family, ("p", u, w)))
            gens.append(El(self.family, ("p", w, u)))
        gens.append(El(self.family, ZERO))
        return gens

    def adjacent(self, u, w) -> bool:
        if u == w:
            return True  # every vertex carries a loop
        return frozenset((u, w)) in self.pairs

    @property
    def zero(self) -> El:
        return El(self.family, ZERO)

    def point(self, w) -> El:
        """The element of the class of v0 ending at w."""
        return El(self.family, ("p", self.v0, w))

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        if a.is_zero() or b.is_zero():
            return self.zero
        _, s1, e1 = a.payload
        _, s2, e2 = b.payload
        if s1 != e2:
            return self.zero
        if s2 == self.v0:
            return El(self.family, ("p", self.v0, e1))
        if s1 == e1:      # a is a partial identity
            return b
        if s2 == e2:      # b is a partial identity
            return a
        raise UnsupportedOperationError(
            "product of paths not anchored at the base vertex has no normal form here")

    def star(self, a: El) -> El:
        self.check_family(a)
        if a.is_zero():
            return a
        _, s, e = a.payload
        if s == e:
            return a
        if self.adjacent(s, e):
            return El(self.family, ("p", e, s))
        raise UnsupportedOperationError(
            "star of a longer path leaves the representable class")

    def gen(self, i: int) -> El:
        return self._gens[i]

    def gen_count(self) -> int:
        return len(self._gens)

    def is_idem(self, x: El) -> bool:
        return x.is_zero() or x.payload[1] == x.payload[2]

    def l_key(self, x: El):
        return ZERO if x.is_zero() else ("L", x.payload[1])

    def sigma_key(self, x: El):
        return "*"  # the zero equalises everything

    def format(self, x: El) -> str:
        if x.is_zero():
            return "0"
        _, s, e = x.payload
        if s == e:
            return f"[{s}]"
        return f"[{s}->{e}]"

    def parse(self, text: str) -> El:
        text = text.strip()
        if text == "0":
            return self.zero
        if not (text.startswith("[") and text.endswith("]")):
            raise ValueError(f"cannot parse graph element {text!r}")
        body = text[1:-1]
        if "->" in body:
            s, e = body.split("->", 1)
        else:
            s = e = body
        lookup = {str(v): v for v in self.vertices}
        return El(self.family, ("p", lookup[s.strip()], lookup[e.strip()]))


@dataclass
class RealizeReport:
    oracle: GraphOracle
    fragment: Fragment
    isomorphic: bool
    violations: list[str]


def realize_graph(vertices: list, edges: list[tuple], v0,
                  cap: int = 8) -> RealizeReport:
    """Build the restricted oracle, explore the class of v0, and verify the
    fragment is isomorphic (as a loop-decorated simple graph) to the input."""
    oracle = GraphOracle(vertices, edges, v0)
    fragment = Fragment(oracle, oracle.point(v0), radius=len(vertices),
                        prefix=oracle.gen_count(), cap=cap)
    violations: list[str] = []
    if not fragment.complete:
        violations.append("fragment did not close on a finite graph")
    endpoint = {v: oracle.point(v) for v in oracle.vertices}
    if set(fragment.verts) != set(endpoint.values()):
        violations.append("vertex sets differ under the endpoint bijection")
    else:
        got_pairs = set()
        for xi, yi in fragment.simple_pairs():
            a = fragment.verts[xi].payload[2]
            b = fragment.verts[yi].payload[2]
            got_pairs.add(frozenset((a, b)))
        if got_pairs != oracle.pairs:
            violations.append("simple adjacency differs from the input graph")
        for i, v in enumerate(fragment.verts):
            if not fragment.loops_at(i):
                violations.append(f"missing loop at {oracle.format(v)}")
    return RealizeReport(oracle, fragment, not violations, violations)


def graph_oracle_from_file(path: str) -> GraphOracle:
    with open(path) as fh:
        data = json.load(fh)
    edges = [tuple(e) for e in data["edges"]]
    return GraphOracle(list(data["vertices"]), edges, data["v0"])
