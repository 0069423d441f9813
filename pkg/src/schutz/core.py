"""Element values and the oracle contract shared by every semigroup family.

An element is a frozen (family, payload) pair whose payload is a canonical
normal form: two elements are equal exactly when the semigroup elements are.
All arithmetic goes through an oracle, which also exposes an indexed,
symmetric stream of generators.  Infinite generating sets are only ever
consumed as finite prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable


class FamilyMismatchError(ValueError):
    """Raised when elements from different families are combined."""


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration exceeds its size budget."""


class UnsupportedOperationError(ValueError):
    """Raised for products/stars the family's normal form cannot represent."""


ZERO = "0"  # payload of the distinguished zero in families that have one


@dataclass(frozen=True)
class El:
    family: str
    payload: Any

    def is_zero(self) -> bool:
        return self.payload == ZERO

    def __repr__(self) -> str:
        return f"El({self.family}:{self.payload!r})"


class Oracle:
    """Abstract multiply/star/equality contract plus a generator stream.

    Subclasses must define `family`, `mul`, `star`, `gen`, `gen_count`,
    `format`, `parse`.  Everything else has workable defaults; finite
    families may override `elements` to unlock exhaustive operations.
    """

    family: str

    # -- arithmetic ---------------------------------------------------------

    def mul(self, a: El, b: El) -> El:
        raise NotImplementedError

    def star(self, a: El) -> El:
        raise NotImplementedError

    def check_family(self, *els: El) -> None:
        for e in els:
            if e.family != self.family:
                raise FamilyMismatchError(
                    f"element of family {e.family!r} fed to {self.family!r} oracle")

    # -- generator stream ---------------------------------------------------

    def gen(self, i: int) -> El:
        raise NotImplementedError

    def gen_count(self) -> int | None:
        """Number of generators, or None for an infinite stream."""
        raise NotImplementedError

    def gens(self, m: int) -> list[El]:
        """First m generators (clipped to the stream length)."""
        n = self.gen_count()
        if n is not None:
            m = min(m, n)
        return [self.gen(i) for i in range(m)]

    # -- predicates and closed forms ---------------------------------------

    def is_idem(self, x: El) -> bool:
        return self.mul(x, x) == x

    def l_key(self, x: El) -> Any:
        """Hashable key with l_key(x) == l_key(y) iff x*x == y*y."""
        return self.mul(self.star(x), x).payload

    def sigma_key(self, x: El) -> Any:
        """Closed-form sigma-class key, or None when no closed form exists."""
        return None

    def elements(self) -> list[El] | None:
        """Full element list for finite families, else None."""
        return None

    def idempotents(self) -> list[El] | None:
        els = self.elements()
        if els is None:
            return None
        return [e for e in els if self.is_idem(e)]

    # -- text format --------------------------------------------------------

    def format(self, x: El) -> str:
        raise NotImplementedError

    def parse(self, text: str) -> El:
        raise NotImplementedError


class RelabeledOracle(Oracle):
    """Same semigroup, custom finite generator list (e.g. a coarser alphabet)."""

    def __init__(self, base: Oracle, generators: list[El]):
        base.check_family(*generators)
        self.base = base
        self._gens = list(generators)
        for g in self._gens:
            if base.star(g) not in self._gens:
                raise ValueError("custom generator list is not symmetric")

    @property
    def family(self) -> str:  # type: ignore[override]
        return self.base.family

    def mul(self, a, b):
        return self.base.mul(a, b)

    def star(self, a):
        return self.base.star(a)

    def gen(self, i):
        return self._gens[i]

    def gen_count(self):
        return len(self._gens)

    def is_idem(self, x):
        return self.base.is_idem(x)

    def l_key(self, x):
        return self.base.l_key(x)

    def sigma_key(self, x):
        return self.base.sigma_key(x)

    def elements(self):
        return self.base.elements()

    def format(self, x):
        return self.base.format(x)

    def parse(self, text):
        return self.base.parse(text)


def with_generators(oracle: Oracle, generators: list[El]) -> Oracle:
    return RelabeledOracle(oracle, generators)


def stream_is_symmetric(oracle: Oracle, m: int) -> bool:
    """Every generator in the m-prefix has its star somewhere in the stream."""
    gens = oracle.gens(m)
    pool = set(gens)
    n = oracle.gen_count()
    if n is not None:
        pool = set(oracle.gens(n))
    return all(oracle.star(g) in pool for g in gens)


class WordBall:
    """Elements expressible as products of at most `radius` generators from a
    prefix of the stream, tagged with their minimal word length (BFS level)."""

    def __init__(self, oracle: Oracle, radius: int, prefix: int,
                 order: list[El], level: dict[El, int], closed: bool):
        self.oracle = oracle
        self.radius = radius
        self.prefix = prefix
        self.order = order
        self.level = level
        self.closed = closed

    def __contains__(self, x: El) -> bool:
        return x in self.level

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def length(self, x: El) -> int:
        return self.level[x]


def word_ball(oracle: Oracle, radius: int, prefix: int,
              max_elements: int = 200_000) -> WordBall:
    """BFS enumeration of products of <= radius generators from the prefix.

    Deterministic order: generator index, then insertion order.  Raises
    BudgetExceededError when more than max_elements distinct values appear.
    """
    if radius < 1 or prefix < 1:
        raise ValueError("radius and prefix must be >= 1")
    gens = oracle.gens(prefix)
    order: list[El] = []
    level: dict[El, int] = {}
    for g in gens:
        if g not in level:
            level[g] = 1
            order.append(g)
    frontier = list(order)
    closed = False
    for depth in range(2, radius + 1):
        new: list[El] = []
        for g in gens:
            for x in frontier:
                y = oracle.mul(g, x)
                if y not in level:
                    if len(level) >= max_elements:
                        raise BudgetExceededError(
                            f"word ball exceeded {max_elements} elements")
                    level[y] = depth
                    order.append(y)
                    new.append(y)
        if not new:
            closed = True
            break
        frontier = new
    else:
        # check whether the last frontier was already closed
        closed = all(oracle.mul(g, x) in level for g in gens for x in frontier)
    return WordBall(oracle, radius, prefix, order, level, closed)


def natural_leq(s: El, t: El, oracle: Oracle) -> bool:
    """Natural partial order: s <= t iff s = t e for some idempotent e.

    Uses the identity s <= t iff s == t (s*s), valid in any inverse
    semigroup, so no enumeration of E(S) is needed.
    """
    oracle.check_family(s, t)
    return s == oracle.mul(t, oracle.mul(oracle.star(s), s))


def natural_leq_bruteforce(s: El, t: El, oracle: Oracle) -> bool:
    """Exhaustive check over E(S); only for finite families (test oracle)."""
    idems = oracle.idempotents()
    if idems is None:
        raise UnsupportedOperationError("no finite idempotent list available")
    return any(oracle.mul(t, e) == s for e in idems)


def sigma_related(s: El, t: El, oracle: Oracle) -> bool:
    """Maximal group image congruence: s sigma t iff s e = t e for some e.

    Built-ins carry closed forms; finite families fall back to the minimum
    idempotent (s e = t e for some e iff it holds for the minimum one).
    """
    oracle.check_family(s, t)
    ks, kt = oracle.sigma_key(s), oracle.sigma_key(t)
    if ks is not None and kt is not None:
        return ks == kt
    idems = oracle.idempotents()
    if idems is None:
        raise UnsupportedOperationError(
            f"family {oracle.family!r} has no sigma closed form and E(S) is not enumerable")
    e = idems[0]
    for f in idems[1:]:
        e = oracle.mul(e, f)
    return oracle.mul(s, e) == oracle.mul(t, e)


def multiply_word(oracle: Oracle, letters: Iterable[El], x: El) -> El:
    """Apply a word k_d ... k_1 (given left-to-right) to x by left action."""
    for k in reversed(list(letters)):
        x = oracle.mul(k, x)
    return x
