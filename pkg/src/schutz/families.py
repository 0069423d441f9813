"""Built-in inverse-semigroup families with canonical normal forms.

Families: bicyclic (pairs a^i a*^j plus zero), polycyclic:n (reduced pairs
u v* plus 0 and 1), nat-min / nat-max on {1, 2, ...}, free:n (reduced group
words; free:1 is the integers), box:Z:m1,m2,... (levelled quotients of the
integers with the min-rule), finite groups given by table, partial
bijections on a finite ground set, and coordinatewise products S x G.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import (El, FamilyMismatchError, Oracle, UnsupportedOperationError,
                   ZERO)

LETTERS = "abcdefghijklmnopqrstuvwxyz"


# ---------------------------------------------------------------------------
# bicyclic: P1 = { a^i a*^j } with an adjoined zero
# ---------------------------------------------------------------------------

class BicyclicOracle(Oracle):
    family = "bicyclic"

    def el(self, i: int, j: int) -> El:
        if i < 0 or j < 0:
            raise ValueError("bicyclic exponents must be non-negative")
        return El(self.family, (i, j))

    @property
    def zero(self) -> El:
        return El(self.family, ZERO)

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        if a.is_zero() or b.is_zero():
            return self.zero
        i, j = a.payload
        p, q = b.payload
        m = min(j, p)
        return El(self.family, (i + p - m, q + j - m))

    def star(self, a: El) -> El:
        self.check_family(a)
        if a.is_zero():
            return a
        i, j = a.payload
        return El(self.family, (j, i))

    def gen(self, i: int) -> El:
        return [self.el(1, 0), self.el(0, 1), self.zero][i]

    def gen_count(self) -> int:
        return 3

    def is_idem(self, x: El) -> bool:
        return x.is_zero() or x.payload[0] == x.payload[1]

    def l_key(self, x: El):
        if x.is_zero():
            return ZERO
        return x.payload[1]

    def sigma_key(self, x: El):
        # the adjoined zero equalises every pair (s*0 = t*0), so sigma is trivial
        return "*"

    def grade(self, x: El) -> int | None:
        """Degree i - j of the zero-free bicyclic submonoid; None on 0."""
        if x.is_zero():
            return None
        return x.payload[0] - x.payload[1]

    def format(self, x: El) -> str:
        if x.is_zero():
            return "0"
        i, j = x.payload
        return f"a^{i} a*^{j}"

    def parse(self, text: str) -> El:
        text = text.strip()
        if text == "0":
            return self.zero
        m = re.fullmatch(r"a\^(\d+)\s*a\*\^(\d+)", text)
        if not m:
            raise ValueError(f"cannot parse bicyclic element {text!r}")
        return self.el(int(m.group(1)), int(m.group(2)))


# ---------------------------------------------------------------------------
# polycyclic:n  (elements u v*, reduced; 1 = empty pair; explicit zero)
# ---------------------------------------------------------------------------

class PolycyclicOracle(Oracle):
    def __init__(self, n: int):
        if not 1 <= n <= 26:
            raise ValueError("polycyclic rank must be between 1 and 26")
        self.n = n
        self.family = f"polycyclic:{n}"
        self.letters = LETTERS[:n]

    def el(self, u: str, v: str) -> El:
        for c in u + v:
            if c not in self.letters:
                raise ValueError(f"letter {c!r} not in alphabet {self.letters!r}")
        return El(self.family, (u, v))

    @property
    def zero(self) -> El:
        return El(self.family, ZERO)

    @property
    def one(self) -> El:
        return El(self.family, ("", ""))

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        if a.is_zero() or b.is_zero():
            return self.zero
        u1, v1 = a.payload
        u2, v2 = b.payload
        # (u1 v1*)(u2 v2*): cancel v1* against u2
        if u2.startswith(v1):
            return El(self.family, (u1 + u2[len(v1):], v2))
        if v1.startswith(u2):
            return El(self.family, (u1, v2 + v1[len(u2):]))
        return self.zero

    def star(self, a: El) -> El:
        self.check_family(a)
        if a.is_zero():
            return a
        u, v = a.payload
        return El(self.family, (v, u))

    def gen(self, i: int) -> El:
        # a, a*, b, b*, ..., 0
        if i == 2 * self.n:
            return self.zero
        letter = self.letters[i // 2]
        if i % 2 == 0:
            return El(self.family, (letter, ""))
        return El(self.family, ("", letter))

    def gen_count(self) -> int:
        return 2 * self.n + 1

    def is_idem(self, x: El) -> bool:
        return x.is_zero() or x.payload[0] == x.payload[1]

    def l_key(self, x: El):
        return ZERO if x.is_zero() else x.payload[1]

    def sigma_key(self, x: El):
        return "*"

    def format(self, x: El) -> str:
        if x.is_zero():
            return "0"
        u, v = x.payload
        if not u and not v:
            return "1"
        if not v:
            return u
        if not u:
            return f"{v}*"
        return f"{u} {v}*"

    def parse(self, text: str) -> El:
        text = text.strip()
        if text == "0":
            return self.zero
        if text == "1":
            return self.one
        m = re.fullmatch(r"([a-z]*)\s*(?:([a-z]+)\*)?", text)
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse polycyclic element {text!r}")
        return self.el(m.group(1) or "", m.group(2) or "")


# ---------------------------------------------------------------------------
# nat-min / nat-max on {1, 2, 3, ...}
# ---------------------------------------------------------------------------

class NatOracle(Oracle):
    def __init__(self, kind: str):
        if kind not in ("min", "max"):
            raise ValueError("kind must be 'min' or 'max'")
        self.kind = kind
        self.family = f"nat-{kind}"
        self._op = min if kind == "min" else max

    def el(self, n: int) -> El:
        if n < 1:
            raise ValueError("nat elements start at 1")
        return El(self.family, n)

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        return El(self.family, self._op(a.payload, b.payload))

    def star(self, a: El) -> El:
        self.check_family(a)
        return a

    def gen(self, i: int) -> El:
        return El(self.family, i + 1)

    def gen_count(self) -> None:
        return None

    def is_idem(self, x: El) -> bool:
        return True

    def l_key(self, x: El):
        return x.payload

    def sigma_key(self, x: El):
        # min(s,e) = min(t,e) resp. max(s,e) = max(t,e) for a suitable e
        return "*"

    def format(self, x: El) -> str:
        return str(x.payload)

    def parse(self, text: str) -> El:
        return self.el(int(text.strip()))


# ---------------------------------------------------------------------------
# free:n  (free group on n letters as reduced words; free:1 is Z)
# ---------------------------------------------------------------------------

class FreeGroupOracle(Oracle):
    def __init__(self, n: int):
        if not 1 <= n <= 26:
            raise ValueError("free rank must be between 1 and 26")
        self.n = n
        self.family = f"free:{n}"
        self.letters = LETTERS[:n]

    @property
    def identity(self) -> El:
        return El(self.family, ())

    def el(self, word) -> El:
        reduced: list[tuple[int, int]] = []
        for letter, power in word:
            if not 0 <= letter < self.n:
                raise ValueError("letter index out of range")
            if reduced and reduced[-1][0] == letter:
                merged = reduced[-1][1] + power
                reduced.pop()
                if merged:
                    reduced.append((letter, merged))
            elif power:
                reduced.append((letter, power))
        return El(self.family, tuple(reduced))

    def integer(self, k: int) -> El:
        """Convenience for free:1, where elements are just integers."""
        return self.el([(0, k)])

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        return self.el(list(a.payload) + list(b.payload))

    def star(self, a: El) -> El:
        self.check_family(a)
        return El(self.family,
                  tuple((letter, -power) for letter, power in reversed(a.payload)))

    def gen(self, i: int) -> El:
        letter, sign = divmod(i, 2)
        return self.el([(letter, 1 if sign == 0 else -1)])

    def gen_count(self) -> int:
        return 2 * self.n

    def is_idem(self, x: El) -> bool:
        return x.payload == ()

    def l_key(self, x: El):
        return ()

    def sigma_key(self, x: El):
        return x.payload

    def format(self, x: El) -> str:
        if not x.payload:
            return "1"
        parts = []
        for letter, power in x.payload:
            name = self.letters[letter]
            parts.append(name if power == 1 else f"{name}^{power}")
        return " ".join(parts)

    def parse(self, text: str) -> El:
        text = text.strip()
        if text == "1":
            return self.identity
        if self.n == 1 and re.fullmatch(r"-?\d+", text):
            return self.integer(int(text))
        word = []
        for part in text.split():
            m = re.fullmatch(r"([a-z])(?:\^(-?\d+))?", part)
            if not m:
                raise ValueError(f"cannot parse free-group word {text!r}")
            letter = self.letters.index(m.group(1))
            word.append((letter, int(m.group(2) or 1)))
        return self.el(word)


# ---------------------------------------------------------------------------
# box:Z:m1,m2,...  (levelled quotients Z/m_i with the min-rule product)
# ---------------------------------------------------------------------------

class BoxZOracle(Oracle):
    def __init__(self, moduli: list[int]):
        if not moduli:
            raise ValueError("box space needs at least one modulus")
        for a, b in zip(moduli, moduli[1:]):
            if b % a != 0 or b <= a:
                raise ValueError(
                    "box moduli must be strictly increasing and divisible: "
                    f"{moduli}")
        if moduli[0] < 1:
            raise ValueError("moduli must be positive")
        self.moduli = list(moduli)
        self.family = "box:Z:" + ",".join(str(m) for m in moduli)

    def el(self, level: int, residue: int) -> El:
        if not 1 <= level <= len(self.moduli):
            raise ValueError(f"level {level} out of range")
        return El(self.family, (level, residue % self.moduli[level - 1]))

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        i, g = a.payload
        j, h = b.payload
        k = min(i, j)
        return El(self.family, (k, (g + h) % self.moduli[k - 1]))

    def star(self, a: El) -> El:
        self.check_family(a)
        i, g = a.payload
        return El(self.family, (i, (-g) % self.moduli[i - 1]))

    def gen(self, i: int) -> El:
        level, sign = divmod(i, 2)
        return self.el(level + 1, 1 if sign == 0 else -1)

    def gen_count(self) -> int:
        return 2 * len(self.moduli)

    def is_idem(self, x: El) -> bool:
        return x.payload[1] == 0

    def l_key(self, x: El):
        return x.payload[0]

    def sigma_key(self, x: El):
        return x.payload[1] % self.moduli[0]

    def group_image(self) -> tuple["FiniteGroup", "FiniteGroupOracle"]:
        g = FiniteGroup.cyclic(self.moduli[0])
        return g, FiniteGroupOracle(g, gen_indices=[1 % g.order, (-1) % g.order])

    def format(self, x: El) -> str:
        i, g = x.payload
        return f"q[{i}]({g})"

    def parse(self, text: str) -> El:
        m = re.fullmatch(r"q\[(\d+)\]\((-?\d+)\)", text.strip())
        if not m:
            raise ValueError(f"cannot parse box element {text!r}")
        return self.el(int(m.group(1)), int(m.group(2)))


# ---------------------------------------------------------------------------
# finite groups by multiplication table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup:
    name: str
    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]   # table[i][j] = index of g_i g_j
    identity: int

    @property
    def order(self) -> int:
        return len(self.names)

    def inverse(self, i: int) -> int:
        for j in range(self.order):
            if self.table[i][j] == self.identity:
                return j
        raise ValueError(f"element {i} has no inverse; not a group table")

    def check_axioms(self) -> None:
        n = self.order
        for i in range(n):
            if self.table[self.identity][i] != i or self.table[i][self.identity] != i:
                raise ValueError("identity axiom fails")
            self.inverse(i)
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]]:
                        raise ValueError("associativity fails")

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise ValueError("cyclic order must be >= 1")
        table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
        return cls(f"cyclic{n}", tuple(str(i) for i in range(n)), table, 0)

    @classmethod
    def trivial(cls) -> "FiniteGroup":
        return cls.cyclic(1)


class FiniteGroupOracle(Oracle):
    def __init__(self, group: FiniteGroup, gen_indices: list[int] | None = None):
        self.group = group
        self.family = f"fingroup:{group.name}"
        if gen_indices is None:
            gen_indices = [i for i in range(group.order) if i != group.identity]
            if not gen_indices:
                gen_indices = [group.identity]
        # close the generator list under inverses
        gens = list(dict.fromkeys(gen_indices))
        for i in list(gens):
            inv = group.inverse(i)
            if inv not in gens:
                gens.append(inv)
        self.gen_indices = gens

    def el(self, i: int) -> El:
        if not 0 <= i < self.group.order:
            raise ValueError("group index out of range")
        return El(self.family, i)

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        return El(self.family, self.group.table[a.payload][b.payload])

    def star(self, a: El) -> El:
        self.check_family(a)
        return El(self.family, self.group.inverse(a.payload))

    def gen(self, i: int) -> El:
        return self.el(self.gen_indices[i])

    def gen_count(self) -> int:
        return len(self.gen_indices)

    def is_idem(self, x: El) -> bool:
        return x.payload == self.group.identity

    def l_key(self, x: El):
        return ()

    def sigma_key(self, x: El):
        return x.payload

    def elements(self) -> list[El]:
        return [self.el(i) for i in range(self.group.order)]

    def format(self, x: El) -> str:
        return self.group.names[x.payload]

    def parse(self, text: str) -> El:
        return self.el(self.group.names.index(text.strip()))


# ---------------------------------------------------------------------------
# partial bijections on {1, ..., n}
# ---------------------------------------------------------------------------

def pb_payload(n: int, mapping: dict[int, int]) -> tuple:
    pairs = tuple(sorted(mapping.items()))
    values = [d for _, d in pairs]
    if len(set(values)) != len(values):
        raise ValueError("mapping is not injective")
    for s, d in pairs:
        if not (1 <= s <= n and 1 <= d <= n):
            raise ValueError("mapping leaves the ground set")
    return (n, pairs)


class PBOracle(Oracle):
    """Partial bijections of {1..n}; product is composition (apply right first)."""

    def __init__(self, n: int, generator_maps: list[dict[int, int]] | None = None):
        self.n = n
        self.family = f"pb:{n}"
        maps = generator_maps or []
        gens = [El(self.family, pb_payload(n, m)) for m in maps]
        for g in list(gens):
            s = self.star(g)
            if s not in gens:
                gens.append(s)
        self._gens = list(dict.fromkeys(gens))
        self._elements: list[El] | None = None

    def el(self, mapping: dict[int, int]) -> El:
        return El(self.family, pb_payload(self.n, mapping))

    @property
    def empty(self) -> El:
        return self.el({})

    @property
    def identity(self) -> El:
        return self.el({i: i for i in range(1, self.n + 1)})

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        fa = dict(a.payload[1])
        out = {}
        for s, d in b.payload[1]:
            if d in fa:
                out[s] = fa[d]
        return self.el(out)

    def star(self, a: El) -> El:
        self.check_family(a)
        return self.el({d: s for s, d in a.payload[1]})

    def gen(self, i: int) -> El:
        return self._gens[i]

    def gen_count(self) -> int:
        return len(self._gens)

    def is_idem(self, x: El) -> bool:
        return all(s == d for s, d in x.payload[1])

    def l_key(self, x: El):
        # L-classes of partial bijections are indexed by the domain
        return tuple(s for s, _ in x.payload[1])

    def elements(self) -> list[El] | None:
        return self._elements

    def set_elements(self, els: list[El]) -> None:
        self._elements = list(els)

    def format(self, x: El) -> str:
        pairs = x.payload[1]
        if not pairs:
            return "{}"
        return "{" + ", ".join(f"{s}->{d}" for s, d in pairs) + "}"

    def parse(self, text: str) -> El:
        text = text.strip()
        if not (text.startswith("{") and text.endswith("}")):
            raise ValueError(f"cannot parse partial bijection {text!r}")
        body = text[1:-1].strip()
        mapping = {}
        if body:
            for chunk in body.split(","):
                m = re.fullmatch(r"\s*(\d+)\s*->\s*(\d+)\s*", chunk)
                if not m:
                    raise ValueError(f"cannot parse partial bijection {text!r}")
                mapping[int(m.group(1))] = int(m.group(2))
        return self.el(mapping)


# ---------------------------------------------------------------------------
# product S x G, G a finite group; product and star are coordinatewise
# ---------------------------------------------------------------------------

class ProductOracle(Oracle):
    def __init__(self, base: Oracle, group: FiniteGroup):
        self.base = base
        self.group = group
        self.family = f"product:{group.name}:{base.family}"

    def el(self, s: El, g: int) -> El:
        self.base.check_family(s)
        if not 0 <= g < self.group.order:
            raise ValueError("group index out of range")
        return El(self.family, (s, g))

    def mul(self, a: El, b: El) -> El:
        self.check_family(a, b)
        s, g = a.payload
        t, h = b.payload
        return El(self.family, (self.base.mul(s, t), self.group.table[g][h]))

    def star(self, a: El) -> El:
        self.check_family(a)
        s, g = a.payload
        return El(self.family, (self.base.star(s), self.group.inverse(g)))

    def gen(self, i: int) -> El:
        base_i, g = divmod(i, self.group.order)
        return self.el(self.base.gen(base_i), g)

    def gen_count(self) -> int | None:
        n = self.base.gen_count()
        return None if n is None else n * self.group.order

    def is_idem(self, x: El) -> bool:
        s, g = x.payload
        return g == self.group.identity and self.base.is_idem(s)

    def l_key(self, x: El):
        return self.base.l_key(x.payload[0])

    def sigma_key(self, x: El):
        ks = self.base.sigma_key(x.payload[0])
        return None if ks is None else (ks, x.payload[1])

    def elements(self) -> list[El] | None:
        base_els = self.base.elements()
        if base_els is None:
            return None
        return [self.el(s, g) for s in base_els for g in range(self.group.order)]

    def left(self, x: El) -> El:
        return x.payload[0]

    def format(self, x: El) -> str:
        s, g = x.payload
        return f"({self.base.format(s)}, {self.group.names[g]})"

    def parse(self, text: str) -> El:
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError(f"cannot parse product element {text!r}")
        body = text[1:-1]
        left, _, right = body.rpartition(",")
        return self.el(self.base.parse(left.strip()),
                       self.group.names.index(right.strip()))


def product_with_group(oracle: Oracle, group: FiniteGroup) -> ProductOracle:
    return ProductOracle(oracle, group)


# ---------------------------------------------------------------------------
# family registry / CLI spec grammar
# ---------------------------------------------------------------------------

FAMILY_HELP = [
    ("bicyclic", "pairs a^i a*^j with an adjoined zero; K = {a, a*, 0}"),
    ("polycyclic:N", "reduced pairs u v* over N letters, with 0 and 1"),
    ("nat-min", "(N, min): positive integers, product is min"),
    ("nat-max", "(N, max): positive integers, product is max"),
    ("free:N", "free group on N letters (free:1 is the integers)"),
    ("box:Z:m1,m2,...", "levelled quotients Z/m_i with the min-rule product"),
    ("pb:FILE.json", 'partial bijections: {"ground": n, "generators": [{"1": 2, ...}]}'),
    ("graph:FILE.json", 'graph realization: {"vertices": [...], "edges": [[u,v],...], "v0": ...}'),
    ("product:cyclicN:SPEC", "product of the SPEC family with the cyclic group of order N"),
]


def parse_family(spec: str) -> Oracle:
    """Resolve a family spec string to an oracle; ValueError on bad specs."""
    spec = spec.strip()
    if spec == "bicyclic":
        return BicyclicOracle()
    if spec.startswith("polycyclic:"):
        return PolycyclicOracle(int(spec.split(":", 1)[1]))
    if spec == "nat-min":
        return NatOracle("min")
    if spec == "nat-max":
        return NatOracle("max")
    if spec.startswith("free:"):
        return FreeGroupOracle(int(spec.split(":", 1)[1]))
    if spec == "Z":
        return FreeGroupOracle(1)
    if spec.startswith("box:Z:"):
        moduli = [int(x) for x in spec.split(":", 2)[2].split(",")]
        return BoxZOracle(moduli)
    if spec.startswith("pb:"):
        return _pb_from_file(spec.split(":", 1)[1])
    if spec.startswith("graph:"):
        from .realize import graph_oracle_from_file
        return graph_oracle_from_file(spec.split(":", 1)[1])
    if spec.startswith("product:"):
        _, gspec, rest = spec.split(":", 2)
        m = re.fullmatch(r"cyclic(\d+)", gspec)
        if not m:
            raise ValueError(f"unknown group spec {gspec!r} (use cyclicN)")
        return ProductOracle(parse_family(rest), FiniteGroup.cyclic(int(m.group(1))))
    raise ValueError(f"unknown family spec {spec!r}")


def _pb_from_file(path: str) -> PBOracle:
    import json
    with open(path) as fh:
        data = json.load(fh)
    ground = int(data["ground"])
    maps = [{int(k): int(v) for k, v in g.items()} for g in data["generators"]]
    return PBOracle(ground, maps)


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())
