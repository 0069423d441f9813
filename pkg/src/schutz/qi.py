"""Quasi-isometry checks on fragments.

A map phi between fragments is checked against the two displayed
inequalities (multiplicative constant M, additive constant C) on every pair
whose distances are exact on both sides, plus coarse density at radius R.
Only exact distances are used; censored pairs are counted, never trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import El
from .families import FiniteGroup, ProductOracle
from .graph import Fragment


@dataclass
class QIWitness:
    M: Fraction
    C: Fraction
    R: int
    checked_pairs: int
    censored_pairs: int
    violations: list[str] = field(default_factory=list)
    density_violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.density_violations


def _exact_pairs(phi: dict[El, El], X: Fragment, Y: Fragment):
    verts = X.verts
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            dx = X.distance(verts[i], verts[j])
            dy = Y.distance(phi[verts[i]], phi[verts[j]])
            yield verts[i], verts[j], dx, dy


def check_qi(phi: dict[El, El], X: Fragment, Y: Fragment,
             M: Fraction, C: Fraction, R: int) -> QIWitness:
    """Verify the two QI inequalities and R-density on exact pairs."""
    if M <= 0:
        raise ValueError("M must be positive")
    wit = QIWitness(Fraction(M), Fraction(C), R, 0, 0)
    fx, fy = X.oracle.format, Y.oracle.format
    for x, xp, dx, dy in _exact_pairs(phi, X, Y):
        if not (dx.exact and dy.exact):
            wit.censored_pairs += 1
            continue
        wit.checked_pairs += 1
        if dx.is_infinite() or dy.is_infinite():
            if dx.is_infinite() != dy.is_infinite():
                wit.violations.append(
                    f"({fx(x)}, {fx(xp)}): one side infinite, the other not")
            continue
        lo = Fraction(1, 1) / M * int(dx.value) - C
        hi = M * int(dx.value) + C
        if not (lo <= dy.value <= hi):
            wit.violations.append(
                f"({fx(x)}, {fx(xp)}): d_X={dx.value}, d_Y={dy.value} "
                f"outside [{lo}, {hi}]")
    image = list(phi.values())
    for y in Y.verts:
        if not Y.interior(y, R):
            continue
        if not any(Y.distance(y, v).exact and Y.distance(y, v) <= R for v in image):
            wit.density_violations.append(f"{fy(y)} is farther than {R} from the image")
    return wit


@dataclass
class QIEstimate:
    M: Fraction
    C: Fraction
    R: int
    checked_pairs: int


def estimate_qi_constants(phi: dict[El, El], X: Fragment, Y: Fragment) -> QIEstimate:
    """Least constants valid on the exactly-known sample.

    M is the worst multiplicative distortion among pairs with both
    distances finite and positive; C covers collapsed pairs (distinct
    points with equal images); R is the worst density radius.
    """
    M = Fraction(1)
    C = Fraction(0)
    checked = 0
    collapsed: list[int] = []
    for x, xp, dx, dy in _exact_pairs(phi, X, Y):
        if not (dx.exact and dy.exact):
            continue
        if dx.is_infinite() or dy.is_infinite():
            if dx.is_infinite() != dy.is_infinite():
                raise ValueError("map mixes components; no finite constants exist")
            continue
        checked += 1
        a, b = int(dx.value), int(dy.value)
        if a > 0 and b > 0:
            M = max(M, Fraction(b, a), Fraction(a, b))
        elif a > 0 and b == 0:
            collapsed.append(a)
    for a in collapsed:
        C = max(C, Fraction(1, 1) / M * a)
    image = list(phi.values())
    R = 0
    for y in Y.verts:
        best = None
        for v in image:
            d = Y.distance(y, v)
            if d.exact and not d.is_infinite():
                best = d.value if best is None else min(best, d.value)
        if best is not None:
            R = max(R, int(best))
    if checked == 0:
        raise ValueError("no exact pairs; cannot estimate constants")
    return QIEstimate(M, C, R, checked)


def compose_qi(first: tuple[Fraction, Fraction, int],
               second: tuple[Fraction, Fraction, int]
               ) -> tuple[Fraction, Fraction, int]:
    """Constants for a composition of checked quasi-isometries.

    With phi: X->Y at (M1, C1, R1) and psi: Y->Z at (M2, C2, R2), the
    composite is a quasi-isometry at (M1 M2, M2 C1 + C2, R2 + M2 R1 + C2).
    """
    M1, C1, R1 = first
    M2, C2, R2 = second
    return (M1 * M2, M2 * C1 + C2, int(R2 + M2 * R1 + C2))


@dataclass
class ExtensionReport:
    product_oracle: ProductOracle
    product_fragment: Fragment
    mapping: dict[El, El]
    covered_interior: bool
    uncovered: list[El]


def surjective_qi_extension(X: Fragment, Y: Fragment, phi: dict[El, El],
                            R: int, group: FiniteGroup) -> ExtensionReport:
    """Extend an R-dense quasi-isometry to a surjection from S x G.

    Slots: the identity coordinate of each x keeps the value phi(x); the
    remaining |G| - 1 coordinates are assigned greedily to uncovered target
    vertices at exact distance <= R from phi(x).  Surjectivity is verified
    on the exact interior of the target fragment and reported honestly.
    """
    product = ProductOracle(X.oracle, group)
    frag = Fragment(product, product.el(X.seed, group.identity),
                    X.radius, X.prefix * group.order, cap=X.cap)
    assignment: dict[tuple[El, int], El] = {}
    free: dict[El, list[int]] = {
        x: [g for g in range(group.order) if g != group.identity] for x in X.verts}
    covered = set(phi[x] for x in X.verts)
    targets = [y for y in Y.verts if Y.interior(y, R)]
    uncovered = []
    for y in targets:
        if y in covered:
            continue
        done = False
        for x in X.verts:
            d = Y.distance(phi[x], y)
            if d.exact and d.value <= R and free[x]:
                assignment[(x, free[x].pop(0))] = y
                covered.add(y)
                done = True
                break
        if not done:
            uncovered.append(y)
    mapping: dict[El, El] = {}
    for v in frag.verts:
        x, g = v.payload
        mapping[v] = assignment.get((x, g), phi.get(x))
    missing = [v for v, img in mapping.items() if img is None]
    if missing:
        raise ValueError("product fragment contains points outside the base fragment")
    return ExtensionReport(product, frag, mapping, not uncovered, uncovered)
