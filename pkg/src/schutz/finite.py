"""Finite inverse semigroups: closures of partial-bijection generators,
multiplication tables, the sigma-quotient onto the maximal group image,
decreasing projection chains and the E-unitary test."""

from __future__ import annotations

from .core import BudgetExceededError, El, Oracle
from .families import FiniteGroup, FiniteGroupOracle, PBOracle


class FiniteSemigroup:
    """An enumerated finite inverse semigroup over some oracle.

    Carries the element list (discovery order) and a full multiplication
    table as index pairs.  Everything downstream (Green's relations, the
    sigma quotient, witnesses) works from this enumeration.
    """

    def __init__(self, oracle: Oracle, elements: list[El]):
        self.oracle = oracle
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.table: dict[tuple[int, int], int] = {}
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                c = oracle.mul(a, b)
                if c not in self.index:
                    raise ValueError("element list is not closed under multiplication")
                self.table[(i, j)] = self.index[c]
        for a in self.elements:
            if oracle.star(a) not in self.index:
                raise ValueError("element list is not closed under star")

    def __len__(self) -> int:
        return len(self.elements)

    def idempotents(self) -> list[El]:
        return [e for e in self.elements if self.oracle.is_idem(e)]

    def idempotents_commute(self) -> bool:
        idems = self.idempotents()
        mul = self.oracle.mul
        return all(mul(e, f) == mul(f, e) for e in idems for f in idems)

    def min_idempotent(self) -> El:
        """Product of all idempotents; minimum in the natural partial order."""
        idems = self.idempotents()
        e = idems[0]
        for f in idems[1:]:
            e = self.oracle.mul(e, f)
        for f in idems:
            if self.oracle.mul(e, f) != e:
                raise ValueError("no minimum idempotent (not a finite inverse semigroup?)")
        return e

    def sigma_class_of(self, s: El) -> El:
        """Canonical representative s e of the sigma class, e the minimum idempotent."""
        return self.oracle.mul(s, self.min_idempotent())

    def is_e_unitary(self) -> bool:
        """sigma intersected with Green's L is the equality relation."""
        e = self.min_idempotent()
        mul, star = self.oracle.mul, self.oracle.star
        for s in self.elements:
            for t in self.elements:
                if s == t:
                    continue
                if mul(star(s), s) == mul(star(t), t) and mul(s, e) == mul(t, e):
                    return False
        return True


def closure(oracle: Oracle, generators: list[El], cap: int = 10_000) -> FiniteSemigroup:
    """Close a symmetric-completed generator list under multiplication.

    Deterministic BFS products; raises BudgetExceededError past `cap`.
    """
    seen: dict[El, int] = {}
    order: list[El] = []
    for g in generators:
        for e in (g, oracle.star(g)):
            if e not in seen:
                seen[e] = len(order)
                order.append(e)
    frontier = list(order)
    while frontier:
        new: list[El] = []
        for a in list(order):
            for b in frontier:
                for c in (oracle.mul(a, b), oracle.mul(b, a)):
                    if c not in seen:
                        if len(order) >= cap:
                            raise BudgetExceededError(f"closure exceeded cap {cap}")
                        seen[c] = len(order)
                        order.append(c)
                        new.append(c)
        frontier = new
    return FiniteSemigroup(oracle, order)


def pb_closure(generator_maps: list[dict[int, int]], ground: int,
               cap: int = 10_000) -> FiniteSemigroup:
    """Closure of partial bijections of {1..ground} under product and star."""
    oracle = PBOracle(ground, generator_maps)
    sg = closure(oracle, oracle.gens(oracle.gen_count()), cap=cap)
    oracle.set_elements(sg.elements)
    return sg


def max_group_image(sg: FiniteSemigroup) -> tuple[FiniteGroup, dict[El, int], FiniteGroupOracle]:
    """The quotient G(S) = S/sigma as an explicit group table.

    Returns (group, sigma map element -> group index, Cayley oracle whose
    generators are the sigma images of the semigroup generators).
    """
    e = sg.min_idempotent()
    mul = sg.oracle.mul
    reps: list[El] = []
    rep_index: dict[El, int] = {}
    sigma: dict[El, int] = {}
    for s in sg.elements:
        r = mul(s, e)
        if r not in rep_index:
            rep_index[r] = len(reps)
            reps.append(r)
        sigma[s] = rep_index[r]
    n = len(reps)
    table = tuple(tuple(rep_index[mul(mul(reps[i], reps[j]), e)] for j in range(n))
                  for i in range(n))
    group = FiniteGroup(f"G({len(sg)})", tuple(sg.oracle.format(r) for r in reps),
                        table, rep_index[e])
    group.check_axioms()
    # sigma must be a homomorphism
    for i, a in enumerate(sg.elements):
        for j, b in enumerate(sg.elements):
            c = sg.elements[sg.table[(i, j)]]
            if sigma[c] != table[sigma[a]][sigma[b]]:
                raise ValueError("sigma failed the homomorphism check")
    gen_idx = [sigma[g] for g in sg.oracle.gens(sg.oracle.gen_count() or 0)] or None
    return group, sigma, FiniteGroupOracle(group, gen_indices=gen_idx)


def projection_chain(oracle: Oracle, idempotents: list[El]) -> list[El]:
    """Decreasing chain e_n = f_1 ... f_n through an enumeration of E(S).

    The last element is below every listed idempotent.
    """
    if not idempotents:
        raise ValueError("need at least one idempotent")
    chain = [idempotents[0]]
    for f in idempotents[1:]:
        chain.append(oracle.mul(chain[-1], f))
    for prev, nxt in zip(chain, chain[1:]):
        if oracle.mul(prev, nxt) != nxt:
            raise ValueError("chain is not decreasing")
    return chain
