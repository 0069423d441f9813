"""Dense two-phase simplex (Bland's rule) and the optimal-witness LP.

The witness LP minimises t subject to: each xi_x a probability vector on
B_C(x), and sum_z |xi_x(z) - xi_y(z)| <= t for interior pairs at exact
distance <= R, absolute values split through auxiliary variables.  Solving
is floating point; the returned witness is re-verified in exact rationals
after rounding (denominators <= 10^6 before the final normalisation).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import BudgetExceededError, El
from .graph import Fragment
from .witness import Witness, achieved_eps, interior_vertices


@dataclass
class SimplexResult:
    status: str                  # optimal | infeasible | unbounded | iteration-limit
    x: np.ndarray | None
    objective: float | None
    iterations: int


def simplex_min(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *,
                tol: float = 1e-9, max_iter: int = 200_000) -> SimplexResult:
    """min c.x subject to A_ub x <= b_ub, A_eq x = b_eq, x >= 0.

    Deterministic dense tableau; Bland's rule (smallest eligible index)
    guarantees termination.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m1, m2 = A_ub.shape[0], A_eq.shape[0]
    m = m1 + m2

    A = np.vstack([np.hstack([A_ub, np.eye(m1), np.zeros((m1, m2))]),
                   np.hstack([A_eq, np.zeros((m2, m1)), np.zeros((m2, m2))])])
    b = np.concatenate([b_ub, b_eq])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] = -b[neg]

    slack_cols = n + np.arange(m1)
    needs_art = np.ones(m, dtype=bool)
    basis = np.empty(m, dtype=int)
    for i in range(m1):
        if not neg[i]:
            basis[i] = slack_cols[i]
            needs_art[i] = False
    art_rows = np.flatnonzero(needs_art)
    n_art = len(art_rows)
    total = n + m1 + m2 + n_art  # m2 zero columns keep eq-slack indexing simple
    T = np.zeros((m, total + 1))
    T[:, :n + m1 + m2] = A
    T[:, total] = b
    for k, i in enumerate(art_rows):
        col = n + m1 + m2 + k
        T[i, col] = 1.0
        basis[i] = col
    art_set = set(range(n + m1 + m2, total))

    iterations = 0

    def pivot(row: int, col: int) -> None:
        T[row] /= T[row, col]
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T[...] -= np.outer(colvals, T[row])
        basis[row] = col

    def run_phase(cost: np.ndarray, forbidden: np.ndarray) -> str:
        """Dantzig rule with smallest-index tie-breaks; permanent switch to
        Bland's rule after a long degenerate stall.  Deterministic, and the
        Bland tail guarantees termination."""
        nonlocal iterations
        zrow = np.zeros(total + 1)
        zrow[:total] = cost
        for i in range(m):
            if cost[basis[i]] != 0.0:
                zrow -= cost[basis[i]] * T[i]
        in_basis = np.zeros(total, dtype=bool)
        in_basis[basis] = True
        bland = False
        stall = 0
        last_obj = zrow[total]
        while True:
            if iterations >= max_iter:
                return "iteration-limit"
            eligible = (zrow[:total] < -tol) & ~forbidden & ~in_basis
            js = np.flatnonzero(eligible)
            if js.size == 0:
                run_phase.zrow = zrow
                return "optimal"
            if bland:
                entering = int(js[0])
            else:
                reduced = zrow[js]
                entering = int(js[int(np.argmin(reduced))])
            colv = T[:, entering]
            ok = colv > tol
            if not ok.any():
                return "unbounded"
            ratios = np.where(ok, T[:, total] / np.where(ok, colv, 1.0), np.inf)
            best = ratios.min()
            candidates = np.flatnonzero(ratios <= best + 1e-15)
            leave = int(min(candidates, key=lambda i: basis[i]))
            iterations += 1
            in_basis[basis[leave]] = False
            in_basis[entering] = True
            pivot(leave, entering)
            zrow -= zrow[entering] * T[leave]
            if not bland:
                if zrow[total] > last_obj - 1e-12:
                    stall += 1
                    if stall > 1000:
                        bland = True
                else:
                    stall = 0
                last_obj = zrow[total]

    art_mask = np.zeros(total, dtype=bool)
    art_mask[n + m1 + m2:] = True
    if n_art:
        cost1 = np.zeros(total)
        cost1[n + m1 + m2:] = 1.0
        status = run_phase(cost1, forbidden=np.zeros(total, dtype=bool))
        if status != "optimal":
            return SimplexResult(status, None, None, iterations)
        if -run_phase.zrow[total] > 1e-7:
            return SimplexResult("infeasible", None, None, iterations)
        # drive leftover artificials out of the basis where possible
        for i in range(m):
            if basis[i] in art_set and T[i, total] <= 1e-9:
                for j in range(n + m1 + m2):
                    if abs(T[i, j]) > tol:
                        pivot(i, j)
                        break

    cost2 = np.zeros(total)
    cost2[:n] = c
    status = run_phase(cost2, forbidden=art_mask)
    x = np.zeros(total)
    for i in range(m):
        x[basis[i]] = T[i, total]
    if status != "optimal":
        return SimplexResult(status, x[:n] if status == "iteration-limit" else None,
                             None, iterations)
    return SimplexResult("optimal", x[:n], float(c @ x[:n]), iterations)


def _round_simplex_vector(values: dict[El, float], limit: int) -> dict[El, Fraction]:
    rounded = {z: Fraction(max(0.0, v)).limit_denominator(limit)
               for z, v in values.items()}
    total = sum(rounded.values(), Fraction(0))
    if total == 0:
        keys = sorted(values, key=str)
        return {keys[0]: Fraction(1)}
    return {z: v / total for z, v in rounded.items() if v > 0}


def lp_optimal_witness(fragment: Fragment, R: int, C: int, *,
                       tol: float = 1e-9, max_vars: int = 20_000,
                       denominator_limit: int = 10 ** 6
                       ) -> tuple[float, Witness]:
    """Minimise the witness defect on a fragment by linear programming.

    Returns (float optimum, exact witness with its true achieved eps).
    """
    interior = interior_vertices(fragment, C, R)
    if not interior:
        raise ValueError("no interior vertex at this radius")
    supports: dict[El, list[El]] = {}
    for x in interior:
        ball, exact = fragment.ball(x, C)
        assert exact
        supports[x] = ball

    var: dict[tuple, int] = {}

    def vid(key: tuple) -> int:
        if key not in var:
            var[key] = len(var)
        return var[key]

    t_col = vid(("t",))
    for x in interior:
        for z in supports[x]:
            vid(("xi", x, z))
    pairs: list[tuple[El, El]] = []
    for i in range(len(interior)):
        for j in range(i + 1, len(interior)):
            if fragment.distance_at_most(interior[i], interior[j], R):
                pairs.append((interior[i], interior[j]))
    for p, (x, y) in enumerate(pairs):
        for z in dict.fromkeys(supports[x] + supports[y]):
            vid(("u", p, z))
    nvars = len(var)
    if nvars > max_vars:
        raise BudgetExceededError(f"LP has {nvars} variables (cap {max_vars})")

    rows_ub: list[tuple[list[tuple[int, float]], float]] = []
    rows_eq: list[tuple[list[tuple[int, float]], float]] = []
    for x in interior:
        rows_eq.append(([(var[("xi", x, z)], 1.0) for z in supports[x]], 1.0))
    for p, (x, y) in enumerate(pairs):
        sx, sy = set(supports[x]), set(supports[y])
        usum = []
        for z in dict.fromkeys(supports[x] + supports[y]):
            u = var[("u", p, z)]
            usum.append((u, 1.0))
            diff = []
            if z in sx:
                diff.append((var[("xi", x, z)], 1.0))
            if z in sy:
                diff.append((var[("xi", y, z)], -1.0))
            rows_ub.append((diff + [(u, -1.0)], 0.0))
            rows_ub.append(([(col, -coef) for col, coef in diff] + [(u, -1.0)], 0.0))
        rows_ub.append((usum + [(t_col, -1.0)], 0.0))

    A_ub = np.zeros((len(rows_ub), nvars))
    b_ub = np.zeros(len(rows_ub))
    for i, (entries, rhs) in enumerate(rows_ub):
        for col, coef in entries:
            A_ub[i, col] += coef
        b_ub[i] = rhs
    A_eq = np.zeros((len(rows_eq), nvars))
    b_eq = np.zeros(len(rows_eq))
    for i, (entries, rhs) in enumerate(rows_eq):
        for col, coef in entries:
            A_eq[i, col] += coef
        b_eq[i] = rhs
    cost = np.zeros(nvars)
    cost[t_col] = 1.0

    res = simplex_min(cost, A_ub, b_ub, A_eq, b_eq, tol=tol)
    if res.status != "optimal":
        raise RuntimeError(f"simplex failed: {res.status}")

    vectors: dict[El, list[tuple[El, Fraction]]] = {}
    for x in interior:
        vals = {z: float(res.x[var[("xi", x, z)]]) for z in supports[x]}
        exact_vec = _round_simplex_vector(vals, denominator_limit)
        vectors[x] = sorted(exact_vec.items(), key=lambda kv: fragment.index[kv[0]])
    witness = Witness(R, Fraction(2), C, vectors, interior)
    witness.eps = achieved_eps(fragment, witness)
    return res.objective, witness
