"""Finite truncations of the left regular representation.

Operators are stored sparsely with exact rational entries over a fixed
index set (a fragment or a plain element window).  Every operator carries
its safe-column set: identity checks quantify only over safe indices and
report the censored remainder, since finite windows of infinite
representations are never exact at the boundary.  Separation bounds are
evaluation lower bounds computed in exact arithmetic; no operator-norm
upper bounds are ever claimed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import El, Oracle
from .graph import Dist, Fragment, INF


class CensoredDistanceError(RuntimeError):
    """A nonzero entry sits on a pair whose distance is not exact."""


class Window:
    """A finite element window of an oracle with a per-class metric.

    Distances are taken inside radius-bounded fragments seeded at the first
    window element of each L-class (enough for the loop/diagonal operators
    used here; anything censored raises rather than guessing).
    """

    def __init__(self, oracle: Oracle, elements: list[El], *,
                 metric_radius: int = 8, prefix: int = 4):
        self.oracle = oracle
        self.verts = list(dict.fromkeys(elements))
        self.index = {e: i for i, e in enumerate(self.verts)}
        self.metric_radius = metric_radius
        self.prefix = prefix
        self._frags: dict = {}

    def __contains__(self, x: El) -> bool:
        return x in self.index

    def distance(self, x: El, y: El) -> Dist:
        kx, ky = self.oracle.l_key(x), self.oracle.l_key(y)
        if kx != ky:
            return Dist(INF, "exact")
        if x == y:
            return Dist(0, "exact")
        frag = self._frags.get((kx, x))
        if frag is None:
            frag = Fragment(self.oracle, x, self.metric_radius, self.prefix)
            self._frags[(kx, x)] = frag
        return frag.distance(x, y)


@dataclass
class FragmentOperator:
    space: object                     # Fragment or Window
    entries: dict[tuple[int, int], Fraction]   # (row, column) -> value
    safe_columns: set[int]
    meta: str = ""

    def entry(self, y: El, x: El) -> Fraction:
        return self.entries.get((self.space.index[y], self.space.index[x]),
                                Fraction(0))

    def adjoint(self) -> "FragmentOperator":
        flipped = {(c, r): v for (r, c), v in self.entries.items()}
        rows = {r for r, _ in self.entries}
        return FragmentOperator(self.space, flipped,
                                safe_columns=set(rows), meta=f"({self.meta})*")

    def matmul(self, other: "FragmentOperator") -> "FragmentOperator":
        bycol: dict[int, list[tuple[int, Fraction]]] = {}
        for (r, c), v in self.entries.items():
            bycol.setdefault(c, []).append((r, v))
        out: dict[tuple[int, int], Fraction] = {}
        for (k, c), v in other.entries.items():
            for r, w in bycol.get(k, []):
                key = (r, c)
                out[key] = out.get(key, Fraction(0)) + v * w
        out = {k: v for k, v in out.items() if v != 0}
        return FragmentOperator(self.space, out,
                                safe_columns=self.safe_columns & other.safe_columns,
                                meta=f"{self.meta}.{other.meta}")

    def sub(self, other: "FragmentOperator") -> "FragmentOperator":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, Fraction(0)) - v
        out = {k: v for k, v in out.items() if v != 0}
        return FragmentOperator(self.space, out,
                                safe_columns=self.safe_columns & other.safe_columns,
                                meta=f"{self.meta}-{other.meta}")

    def equal_on_columns(self, other: "FragmentOperator",
                         columns: set[int]) -> bool:
        keys = (set(self.entries) | set(other.entries))
        for r, c in keys:
            if c in columns and self.entries.get((r, c), Fraction(0)) != \
                    other.entries.get((r, c), Fraction(0)):
                return False
        return True

    def to_coo(self) -> list[tuple[str, str, str]]:
        fmt = self.space.oracle.format
        rows = []
        for (r, c), v in sorted(self.entries.items()):
            rows.append((fmt(self.space.verts[r]), fmt(self.space.verts[c]), str(v)))
        return rows


def in_domain(oracle: Oracle, s: El, x: El) -> bool:
    return oracle.mul(oracle.mul(oracle.star(s), s), x) == x


def rep_V(space, s: El) -> FragmentOperator:
    """Truncation of V_s: column x carries delta_{sx} when x is in D_{s*s}.

    Columns with sx outside the window are unsafe (truncated); columns
    outside the domain are zero and safe.
    """
    oracle = space.oracle
    entries: dict[tuple[int, int], Fraction] = {}
    safe: set[int] = set()
    for xi, x in enumerate(space.verts):
        if not in_domain(oracle, s, x):
            safe.add(xi)
            continue
        y = oracle.mul(s, x)
        yi = space.index.get(y)
        if yi is None:
            continue  # truncated column
        entries[(yi, xi)] = Fraction(1)
        safe.add(xi)
    return FragmentOperator(space, entries, safe, meta=f"V[{oracle.format(s)}]")


def rep_diag(space, f: dict[El, Fraction]) -> FragmentOperator:
    entries = {}
    for x, v in f.items():
        xi = space.index.get(x)
        if xi is not None and v != 0:
            entries[(xi, xi)] = Fraction(v)
    return FragmentOperator(space, entries, set(range(len(space.verts))),
                            meta="diag")


def propagation(T: FragmentOperator) -> Dist:
    """sup of d(x, y) over nonzero entries; exact distances required."""
    best = Dist(0, "exact")
    for (r, c), v in T.entries.items():
        if v == 0:
            continue
        d = T.space.distance(T.space.verts[c], T.space.verts[r])
        if not d.exact:
            raise CensoredDistanceError(
                f"entry ({r},{c}) sits on a censored pair")
        if d.value > best.value:
            best = d
    return best


def evaluation_distance_sq(oracle: Oracle, target: El, x: El,
                           combos: list[tuple[dict[El, Fraction], El]]) -> Fraction:
    """|| delta_target - (sum_i f_i V_{s_i}) delta_x ||^2, exactly.

    The amplitude at z is the sum of f_i(s_i x) over i with s_i x = z.
    """
    amp: dict[El, Fraction] = {}
    for f, s in combos:
        if in_domain(oracle, s, x):
            z = oracle.mul(s, x)
            amp[z] = amp.get(z, Fraction(0)) + Fraction(f.get(z, Fraction(0)))
    value = (1 - amp.pop(target, Fraction(0))) ** 2
    for a in amp.values():
        value += a * a
    return value


def matrix_unit_separation(oracle: Oracle, x: El, y: El,
                           combos: list[tuple[dict[El, Fraction], El]]) -> Fraction:
    """Evaluation bound || (M_{x,y} - sum f_i V_{s_i}) delta_x ||^2 >= 1.

    Requires star(x) x != star(y) y; then no s can map x to y, the target
    amplitude vanishes, and the value is 1 plus a sum of squares.
    """
    if oracle.l_key(x) == oracle.l_key(y):
        raise ValueError("x and y are L-related; the separation bound does not apply")
    for _, s in combos:
        if in_domain(oracle, s, x):
            assert oracle.mul(s, x) != y, "sx = y would force x*x = y*y"
    value = evaluation_distance_sq(oracle, y, x, combos)
    assert value >= 1
    return value


@dataclass
class GapOperator:
    T: FragmentOperator
    witnesses: list[tuple[El, El]]

    def check_combo(self, oracle: Oracle,
                    combos: list[tuple[dict[El, Fraction], El]],
                    level: int) -> Fraction:
        """Exact || (T - sum f_i V_{s_i}) delta_{x_level} ||^2."""
        x, y = self.witnesses[level]
        return evaluation_distance_sq(oracle, y, x, combos)


def non_fl_gap_operator(space, witnesses: list[tuple[El, El]]) -> GapOperator:
    """The operator T delta_{x_k} = delta_{y_k} built from refutation witnesses.

    Each witness pair is an edge of the graph, so T has propagation <= 1;
    evaluation at the level-n witness stays >= 1 against any combination of
    V_s with s a short word over the first n generators, because no such
    word maps x_n to y_n.
    """
    if not witnesses:
        raise ValueError("no refutation witnesses at this scope")
    entries: dict[tuple[int, int], Fraction] = {}
    for x, y in witnesses:
        entries[(space.index[y], space.index[x])] = Fraction(1)
    T = FragmentOperator(space, entries, set(range(len(space.verts))), meta="gap")
    p = propagation(T)
    assert p.value <= 1
    return GapOperator(T, list(witnesses))


# ---------------------------------------------------------------------------
# crossed-product identities on tensor windows
# ---------------------------------------------------------------------------

class _Escape(Exception):
    pass


@dataclass
class CrossedReport:
    window_size: int
    checks: dict[str, dict] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c["violations"] == 0 for c in self.checks.values())


def crossed_product_check(oracle: Oracle, window: list[El],
                          s_list: list[El],
                          f_list: list[dict[El, Fraction]] | None = None
                          ) -> CrossedReport:
    """Verify the intertwiner and covariance identities on a finite window.

    Basis vectors delta_x (x) delta_y with x, y in the window.  Operators
    map such a vector to a scalar multiple of another one, so each identity
    is compared state-by-state; pairs where an intermediate element escapes
    the window are censored, not judged.  The diagonal functions f are
    finitely supported dicts (zero outside), so pi needs no guard.
    """
    wset = set(window)
    star, mul = oracle.star, oracle.mul

    def guard(e: El) -> El:
        if e not in wset:
            raise _Escape
        return e

    # states are None (the zero vector) or (coeff, (x, y))

    def apply_w(state):
        if state is None:
            return None
        c, (x, y) = state
        if mul(x, star(x)) == mul(star(y), y):
            return (c, (x, guard(mul(y, x))))
        return None

    def apply_wstar(state):
        if state is None:
            return None
        c, (u, v) = state
        if mul(star(u), u) == mul(star(v), v):
            return (c, (u, guard(mul(v, star(u)))))
        return None

    def apply_onev(s, state):
        if state is None:
            return None
        c, (x, y) = state
        if in_domain(oracle, s, y):
            return (c, (x, guard(mul(s, y))))
        return None

    def apply_pi(f, state):
        if state is None:
            return None
        c, (x, y) = state
        if mul(mul(star(y), y), x) != x:
            return None
        coeff = f.get(mul(y, x), Fraction(0))
        return None if coeff == 0 else (c * coeff, (x, y))

    report = CrossedReport(len(window))

    def run(name: str, lhs, rhs):
        violations = 0
        censored = 0
        checked = 0
        for x in window:
            for y in window:
                start = (Fraction(1), (x, y))
                try:
                    a = lhs(start)
                    b = rhs(start)
                except _Escape:
                    censored += 1
                    continue
                checked += 1
                if a != b:
                    violations += 1
        report.checks[name] = {"checked": checked, "violations": violations,
                               "censored": censored}

    run("WW*W=W",
        lambda st: apply_w(apply_wstar(apply_w(st))),
        apply_w)
    run("W*W=proj[xx*=y*y]",
        lambda st: apply_wstar(apply_w(st)),
        lambda st: st if mul(st[1][0], star(st[1][0])) ==
        mul(star(st[1][1]), st[1][1]) else None)
    run("WW*=proj[u*u=v*v]",
        lambda st: apply_w(apply_wstar(st)),
        lambda st: st if mul(star(st[1][0]), st[1][0]) ==
        mul(star(st[1][1]), st[1][1]) else None)

    for s in s_list:
        tag = oracle.format(s)
        run(f"W(1xV[{tag}])=(1xV[{tag}])W",
            lambda st, s=s: apply_w(apply_onev(s, st)),
            lambda st, s=s: apply_onev(s, apply_w(st)))

    for fi, f in enumerate(f_list or []):
        support = [z for z, v in f.items() if v != 0]
        for s in s_list:
            if any(not in_domain(oracle, s, z) for z in support):
                continue  # covariance requires supp(f) inside D_{s*s}
            sf = {mul(s, z): v for z, v in f.items()
                  if v != 0 and in_domain(oracle, s, z)}
            run(f"cov[{oracle.format(s)},f{fi}]",
                lambda st, s=s, f=f: apply_onev(
                    s, apply_pi(f, apply_onev(star(s), st))),
                lambda st, sf=sf: apply_pi(sf, st))

    return report
