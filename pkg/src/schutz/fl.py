"""Finite-labeling certificates and refutations.

A pair (K1, C) labels the graph when every single-generator edge y = kx
within an L-class is also realised by a K1-word of length at most C.  A
certificate is always stamped with its scope (word-ball radius and prefix);
a refutation exhibits one edge together with the exhausted search and is
therefore scope-free.  The cover form of the same condition produces, for
a radius R, a finite set F with m s*s = s for every s with d(s*s, s) <= R.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import (BudgetExceededError, El, Oracle, WordBall, word_ball,
                   with_generators)
from .graph import Fragment


@dataclass
class FLScope:
    radius: int
    prefix: int
    k1: tuple[int, ...]
    C: int

    def to_json(self) -> dict:
        return {"radius": self.radius, "prefix": self.prefix,
                "k1": list(self.k1), "C": self.C}


@dataclass
class FLCertificate:
    scope: FLScope
    edges_checked: int
    verdict: str = "certificate"


@dataclass
class FLRefutation:
    scope: FLScope
    witness: tuple[El, El, El]            # (x, k, y) with y = kx, x L y
    transcript: list[list[El]] = field(repr=False)  # reached values per word length
    verdict: str = "refutation"


@dataclass
class FLInconclusive:
    scope: FLScope
    reason: str
    verdict: str = "inconclusive"


def _reach_by_levels(oracle: Oracle, k1_gens: list[El], x: El, C: int,
                     key) -> list[list[El]]:
    """Values of K1-words of length 1..C applied to x, kept inside the class.

    The empty word does not count: x itself is reached only when some
    nonempty word maps x back to itself (a labeled loop).  Restricting to
    the L-class loses nothing: if a word maps x to an L-related y, every
    intermediate product stays in the class (domains shrink along the word
    and are pinched between equal idempotents).
    """
    levels: list[list[El]] = []
    reached: set[El] = set()
    expanded = {x}
    frontier = [x]
    for _ in range(C):
        level_new: list[El] = []
        next_frontier: list[El] = []
        for k in k1_gens:
            for z in frontier:
                w = oracle.mul(k, z)
                if oracle.l_key(w) != key:
                    continue
                if w not in reached:
                    reached.add(w)
                    level_new.append(w)
                if w not in expanded:
                    expanded.add(w)
                    next_frontier.append(w)
        levels.append(level_new)
        if not next_frontier:
            break  # everything reachable is expanded; later levels add nothing
        frontier = next_frontier
    return levels


def check_fl(oracle: Oracle, k1: list[int], C: int, radius: int, prefix: int,
             max_elements: int = 200_000):
    """Examine every edge incident to the radius/prefix word ball.

    Returns FLCertificate when each edge is labeled by a K1-word of length
    <= C, FLRefutation with the first failing edge otherwise, and
    FLInconclusive when the enumeration budget runs out.
    """
    scope = FLScope(radius, prefix, tuple(k1), C)
    if C < 1:
        raise ValueError("C must be >= 1")
    gens = oracle.gens(prefix)
    if any(i < 0 or i >= len(gens) for i in k1):
        raise ValueError("K1 must index into the generator prefix")
    k1_gens = [gens[i] for i in k1]
    try:
        ball = word_ball(oracle, radius, prefix, max_elements=max_elements)
    except BudgetExceededError as exc:
        return FLInconclusive(scope, str(exc))
    edges_checked = 0
    for x in ball:
        key = oracle.l_key(x)
        reach_levels: list[list[El]] | None = None
        reached: set[El] | None = None
        for k in gens:
            y = oracle.mul(k, x)
            if oracle.l_key(y) != key:
                continue
            edges_checked += 1
            if reached is None:
                reach_levels = _reach_by_levels(oracle, k1_gens, x, C, key)
                reached = {z for lvl in reach_levels for z in lvl}
                # a loop y == x is labeled only by an actual word value x
            if y not in reached:
                return FLRefutation(scope, (x, k, y), reach_levels or [])
    return FLCertificate(scope, edges_checked)


@dataclass
class CoverForm:
    R: int
    scope: FLScope
    cover: list[El]
    cylinder_size: int
    verdict: str = "cover"


@dataclass
class CoverCounterexample:
    R: int
    scope: FLScope
    witness: El
    cover: list[El]
    verdict: str = "counterexample"


def fl_cover_form(oracle: Oracle, k1: list[int], C: int, R: int,
                  radius: int, prefix: int, max_elements: int = 200_000,
                  fragment_budget: int = 20_000):
    """Cover form of the labeling condition at the same scope.

    F is the set of values of K1-words of length <= R*C.  Every s in the
    word ball with d(s*s, s) <= R (distance in its own class over the
    prefix alphabet) must satisfy m s*s = s for some m in F.  Returns the
    verified CoverForm or the first counterexample.
    """
    scope = FLScope(radius, prefix, tuple(k1), C)
    gens = oracle.gens(prefix)
    k1_gens = [gens[i] for i in k1]
    sub = with_generators(oracle, k1_gens)
    try:
        cover_ball = word_ball(sub, max(1, R * C), len(k1_gens),
                               max_elements=max_elements)
        ball = word_ball(oracle, radius, prefix, max_elements=max_elements)
    except BudgetExceededError as exc:
        return FLInconclusive(scope, str(exc))
    cover = list(cover_ball.order)
    fragments: dict = {}
    cylinder = 0
    for s in ball:
        e = oracle.mul(oracle.star(s), s)
        key = oracle.l_key(s)
        frag = fragments.get(key)
        if frag is None:
            frag = Fragment(oracle, e, R, prefix, max_vertices=fragment_budget)
            fragments[key] = frag
        if s not in frag:
            continue  # d(s*s, s) > R: the R-ball around e is fully enumerated
        cylinder += 1
        if not any(oracle.mul(m, e) == s for m in cover):
            return CoverCounterexample(R, scope, s, cover)
    return CoverForm(R, scope, cover, cylinder)
