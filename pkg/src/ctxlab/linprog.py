"""Self-contained linear programming with exact and floating lanes.

The exact lane is a dense two-phase primal simplex over rationals with
Bland's smallest-index rule, so it never cycles and is deterministic:
identical inputs produce identical primal vectors.  It returns verified
certificates: an optimal basis dual, a Farkas vector, or an improving
ray.  The floating lane wraps HiGHS and is the fast path for batch
work; the exact lane stays the arbiter.

Conventions (minimization; maximization is handled by negation):

    min c.x   s.t.  A x = b,  G x <= h,  x_j >= 0 for nonneg j

* optimal certificate (y, u): u <= 0, A'y + G'u <= c on nonneg vars,
  = c on free vars, and b.y + h.u equals the optimal value;
* Farkas certificate (y, u): u <= 0, A'y + G'u <= 0 on nonneg vars,
  = 0 on free vars, and b.y + h.u > 0;
* unbounded ray r: A r = 0, G r <= 0, r >= 0 on nonneg vars, c.r < 0.

For sense="max" the same tuples are reported with signs flipped so that
u >= 0 and the dual value matches the maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import exactla
from .errors import StructuralError
from .rational import Q, ZERO, as_rational, to_float

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"

MIN = "min"
MAX = "max"


@dataclass(frozen=True)
class LinearProgram:
    n_vars: int
    objective: tuple
    sense: str
    eq_matrix: tuple = ()
    eq_rhs: tuple = ()
    ineq_matrix: tuple = ()
    ineq_rhs: tuple = ()
    nonneg: tuple = ()  # per-variable lower bound: True -> 0, False -> free


@dataclass(frozen=True)
class LpOutcome:
    status: str
    primal: tuple | None = None
    objective_value: object = None
    dual_eq: tuple | None = None
    dual_ineq: tuple | None = None
    ray: tuple | None = None


def linear_program(
    objective,
    sense: str = MIN,
    eq=None,
    eq_rhs=None,
    ineq=None,
    ineq_rhs=None,
    nonneg=None,
) -> LinearProgram:
    obj = tuple(as_rational(c) for c in objective)
    n = len(obj)
    if sense not in (MIN, MAX):
        raise StructuralError(f"unknown sense {sense!r}")
    eq_m = tuple(tuple(as_rational(a) for a in row) for row in (eq or ()))
    eq_b = tuple(as_rational(v) for v in (eq_rhs or ()))
    in_m = tuple(tuple(as_rational(a) for a in row) for row in (ineq or ()))
    in_b = tuple(as_rational(v) for v in (ineq_rhs or ()))
    if len(eq_m) != len(eq_b) or len(in_m) != len(in_b):
        raise StructuralError("matrix/rhs row counts differ")
    for row in eq_m + in_m:
        if len(row) != n:
            raise StructuralError("constraint row length differs from n_vars")
    if nonneg is None:
        nn = (True,) * n
    else:
        nn = tuple(bool(x) for x in nonneg)
        if len(nn) != n:
            raise StructuralError("nonneg flag length differs from n_vars")
    return LinearProgram(n, obj, sense, eq_m, eq_b, in_m, in_b, nn)


# ---------------------------------------------------------------------------
# Exact two-phase simplex
# ---------------------------------------------------------------------------


class _Tableau:
    """Dense simplex tableau over rationals.

    Columns: structural (variable copies and slacks) then artificials,
    rhs kept in a separate vector.  `cost` is the reduced-cost row.
    """

    def __init__(self, rows, rhs, n_struct):
        self.rows = rows
        self.rhs = rhs
        self.n_struct = n_struct
        self.basis: list[int] = []
        self.cost: list = []
        self.cost_rhs = ZERO

    def pivot(self, r: int, c: int) -> None:
        rows, rhs = self.rows, self.rhs
        prow = rows[r]
        inv = 1 / prow[c]
        if inv != 1:
            rows[r] = prow = [x * inv for x in prow]
            rhs[r] = rhs[r] * inv
        prhs = rhs[r]
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][c]
            if f:
                rows[i] = [a - f * p if p else a for a, p in zip(rows[i], prow)]
                rhs[i] = rhs[i] - f * prhs
        f = self.cost[c]
        if f:
            self.cost = [a - f * p if p else a for a, p in zip(self.cost, prow)]
            self.cost_rhs = self.cost_rhs - f * prhs
        self.basis[r] = c

    def run_bland(self, allowed_max: int):
        """Minimize until optimal or unbounded; entering index < allowed_max."""
        rows, rhs = self.rows, self.rhs
        while True:
            enter = -1
            cost = self.cost
            for j in range(allowed_max):
                if cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL, -1
            leave = -1
            best = None
            for i in range(len(rows)):
                a = rows[i][enter]
                if a > 0:
                    ratio = rhs[i] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[i] < self.basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                return UNBOUNDED, enter
            self.pivot(leave, enter)


def _standard_form(lp: LinearProgram):
    """Equality system with nonneg vars: returns (rows, rhs, col_map, sigma).

    col_map entries: ("v", var, sign) for variable copies, ("s", row)
    for slacks of inequality rows.  sigma records row flips applied to
    make the rhs nonnegative.
    """
    col_map: list[tuple] = []
    for v in range(lp.n_vars):
        col_map.append(("v", v, 1))
        if not lp.nonneg[v]:
            col_map.append(("v", v, -1))
    n_ineq = len(lp.ineq_matrix)
    for r in range(n_ineq):
        col_map.append(("s", r))
    n_struct = len(col_map)

    rows = []
    rhs = []
    sigma = []
    all_rows = list(lp.eq_matrix) + list(lp.ineq_matrix)
    all_rhs = list(lp.eq_rhs) + list(lp.ineq_rhs)
    n_eq = len(lp.eq_matrix)
    for ridx, (orig, b) in enumerate(zip(all_rows, all_rhs)):
        flip = -1 if b < 0 else 1
        row = [ZERO] * n_struct
        c = 0
        for v in range(lp.n_vars):
            a = orig[v]
            row[c] = a * flip if a else ZERO
            c += 1
            if not lp.nonneg[v]:
                row[c] = -a * flip if a else ZERO
                c += 1
        if ridx >= n_eq:
            row[c + (ridx - n_eq)] = Q(flip)
        rows.append(row)
        rhs.append(b * flip)
        sigma.append(flip)
    return rows, rhs, col_map, sigma, n_struct


def _dual_from_basis(lp, tab, kept, col_map, sigma, cost_std, flipped_cols):
    """Solve y'B = c_B on the kept rows of the flipped system."""
    m = len(tab.rows)
    if m == 0:
        return [ZERO] * (len(lp.eq_matrix) + len(lp.ineq_matrix))
    bt = [[flipped_cols[tab.basis[i]][r] for i in range(m)] for r in range(m)]
    # solve y' bt_rows: y solves B^T y = c_B
    bT = [[bt[r][i] for r in range(m)] for i in range(m)]
    y = exactla.solve_square(bT, [cost_std[tab.basis[i]] for i in range(m)])
    if y is None:  # basis matrices are nonsingular by construction
        raise StructuralError("singular basis while extracting duals")
    full = [ZERO] * (len(lp.eq_matrix) + len(lp.ineq_matrix))
    for pos, row_idx in enumerate(kept):
        full[row_idx] = y[pos] * sigma[row_idx]
    return full


def solve_exact(lp: LinearProgram) -> LpOutcome:
    """Exact optimum or certificate; deterministic (Bland pivoting)."""
    minimizing = lp.sense == MIN
    obj = lp.objective if minimizing else tuple(-c for c in lp.objective)

    rows, rhs, col_map, sigma, n_struct = _standard_form(lp)
    m = len(rows)
    n_eq = len(lp.eq_matrix)

    # Flipped-system columns, reused for dual extraction.
    flipped_cols = [[rows[i][j] for i in range(m)] for j in range(n_struct)]

    # Phase 1: artificial variables, minimize their sum.
    tab = _Tableau([list(r) + [Q(1) if i == k else ZERO for k in range(m)]
                    for i, r in enumerate(rows)], list(rhs), n_struct)
    tab.basis = [n_struct + i for i in range(m)]
    cost = [ZERO] * (n_struct + m)
    for j in range(n_struct):
        s = ZERO
        for i in range(m):
            if tab.rows[i][j]:
                s += tab.rows[i][j]
        cost[j] = -s
    tab.cost = cost
    tab.cost_rhs = -sum(tab.rhs, ZERO)
    status, _ = tab.run_bland(n_struct)
    if status != OPTIMAL:  # the artificial sum is bounded below by zero
        raise StructuralError("phase-1 simplex reported an unbounded objective")
    phase1_value = -tab.cost_rhs
    if phase1_value > 0:
        cost_p1 = [ZERO] * n_struct + [Q(1)] * m

        # artificial column j is e_j in the flipped system
        def col_of(idx):
            if idx < n_struct:
                return flipped_cols[idx]
            j = idx - n_struct
            return [Q(1) if i == j else ZERO for i in range(m)]

        bT = [[col_of(tab.basis[i])[r] for i in range(m)] for r in range(m)]
        bTT = [[bT[r][i] for r in range(m)] for i in range(m)]
        y = exactla.solve_square(bTT, [cost_p1[tab.basis[i]] for i in range(m)])
        if y is None:
            raise StructuralError("singular phase-1 basis")
        full = [y[i] * sigma[i] for i in range(m)]
        return LpOutcome(
            status=INFEASIBLE,
            dual_eq=tuple(full[:n_eq]),
            dual_ineq=tuple(full[n_eq:]),
        )

    # Drive artificials out of the basis; drop redundant rows.
    drop: list[int] = []
    for i in range(m):
        if tab.basis[i] >= n_struct:
            pivot_col = -1
            for j in range(n_struct):
                if tab.rows[i][j] != 0:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                tab.pivot(i, pivot_col)
            else:
                drop.append(i)
    kept = [i for i in range(m) if i not in drop]
    if drop:
        tab.rows = [tab.rows[i] for i in kept]
        tab.rhs = [tab.rhs[i] for i in kept]
        tab.basis = [tab.basis[i] for i in kept]
    # strip artificial columns entirely
    tab.rows = [r[:n_struct] for r in tab.rows]
    kept_flipped_cols = [[flipped_cols[j][i] for i in kept] for j in range(n_struct)]

    # Phase 2.
    cost_std = [ZERO] * n_struct
    for j, tag in enumerate(col_map):
        if tag[0] == "v":
            _, v, sgn = tag
            cost_std[j] = obj[v] * sgn if obj[v] else ZERO
    cost = list(cost_std)
    cost_rhs = ZERO
    for i, bj in enumerate(tab.basis):
        cb = cost_std[bj]
        if cb:
            cost = [a - cb * p if p else a for a, p in zip(cost, tab.rows[i])]
            cost_rhs = cost_rhs - cb * tab.rhs[i]
    tab.cost = cost
    tab.cost_rhs = cost_rhs
    status, enter = tab.run_bland(n_struct)

    if status == UNBOUNDED:
        d_std = [ZERO] * n_struct
        d_std[enter] = Q(1)
        for i, bj in enumerate(tab.basis):
            if tab.rows[i][enter]:
                d_std[bj] = -tab.rows[i][enter]
        ray = [ZERO] * lp.n_vars
        for j, tag in enumerate(col_map):
            if tag[0] == "v" and d_std[j]:
                _, v, sgn = tag
                ray[v] += d_std[j] * sgn
        return LpOutcome(status=UNBOUNDED, ray=tuple(ray))

    x = [ZERO] * lp.n_vars
    for i, bj in enumerate(tab.basis):
        tag = col_map[bj]
        if tag[0] == "v" and tab.rhs[i]:
            _, v, sgn = tag
            x[v] += tab.rhs[i] * sgn
    value = exactla.dot(lp.objective, x)

    mrows = len(tab.rows)
    dual = _dual_from_basis(lp, tab, kept, col_map, sigma, cost_std, kept_flipped_cols) \
        if mrows else [ZERO] * (n_eq + len(lp.ineq_matrix))
    if not minimizing:
        dual = [-y for y in dual]
    return LpOutcome(
        status=OPTIMAL,
        primal=tuple(x),
        objective_value=value,
        dual_eq=tuple(dual[:n_eq]),
        dual_ineq=tuple(dual[n_eq:]),
    )


# ---------------------------------------------------------------------------
# Certificate verification (exact)
# ---------------------------------------------------------------------------


def verify_optimal(lp: LinearProgram, out: LpOutcome) -> bool:
    if out.status != OPTIMAL or out.primal is None:
        return False
    x = out.primal
    for row, b in zip(lp.eq_matrix, lp.eq_rhs):
        if exactla.dot(row, x) != b:
            return False
    for row, h in zip(lp.ineq_matrix, lp.ineq_rhs):
        if exactla.dot(row, x) > h:
            return False
    for v in range(lp.n_vars):
        if lp.nonneg[v] and x[v] < 0:
            return False
    if exactla.dot(lp.objective, x) != out.objective_value:
        return False
    y, u = out.dual_eq, out.dual_ineq
    if y is None or u is None:
        return False
    sign = 1 if lp.sense == MIN else -1
    if any(sign * ui > 0 for ui in u):
        return False
    for v in range(lp.n_vars):
        w = ZERO
        for row, yi in zip(lp.eq_matrix, y):
            if yi and row[v]:
                w += yi * row[v]
        for row, ui in zip(lp.ineq_matrix, u):
            if ui and row[v]:
                w += ui * row[v]
        c = lp.objective[v]
        if lp.nonneg[v]:
            if sign * (c - w) < 0:
                return False
        elif w != c:
            return False
    dual_value = exactla.dot(lp.eq_rhs, y) + exactla.dot(lp.ineq_rhs, u)
    return dual_value == out.objective_value


def verify_farkas(lp: LinearProgram, out: LpOutcome) -> bool:
    y, u = out.dual_eq, out.dual_ineq
    if out.status != INFEASIBLE or y is None or u is None:
        return False
    if any(ui > 0 for ui in u):
        return False
    for v in range(lp.n_vars):
        w = ZERO
        for row, yi in zip(lp.eq_matrix, y):
            if yi and row[v]:
                w += yi * row[v]
        for row, ui in zip(lp.ineq_matrix, u):
            if ui and row[v]:
                w += ui * row[v]
        if lp.nonneg[v]:
            if w > 0:
                return False
        elif w != 0:
            return False
    return exactla.dot(lp.eq_rhs, y) + exactla.dot(lp.ineq_rhs, u) > 0


def verify_ray(lp: LinearProgram, out: LpOutcome) -> bool:
    r = out.ray
    if out.status != UNBOUNDED or r is None:
        return False
    for row in lp.eq_matrix:
        if exactla.dot(row, r) != 0:
            return False
    for row in lp.ineq_matrix:
        if exactla.dot(row, r) > 0:
            return False
    for v in range(lp.n_vars):
        if lp.nonneg[v] and r[v] < 0:
            return False
    gain = exactla.dot(lp.objective, r)
    return gain < 0 if lp.sense == MIN else gain > 0


def verify_outcome(lp: LinearProgram, out: LpOutcome) -> bool:
    if out.status == OPTIMAL:
        return verify_optimal(lp, out)
    if out.status == INFEASIBLE:
        return verify_farkas(lp, out)
    if out.status == UNBOUNDED:
        return verify_ray(lp, out)
    return False


# ---------------------------------------------------------------------------
# Floating lane (HiGHS) with residual checking
# ---------------------------------------------------------------------------

FLOAT_TOL = 1e-9


def solve_float(lp: LinearProgram, tol: float = FLOAT_TOL) -> LpOutcome:
    from scipy.optimize import linprog as scipy_linprog

    minimizing = lp.sense == MIN
    c = np.array([to_float(v) for v in lp.objective])
    A = _np_matrix(lp.eq_matrix, lp.n_vars)
    b = np.array([to_float(v) for v in lp.eq_rhs]) if lp.eq_rhs else None
    G = _np_matrix(lp.ineq_matrix, lp.n_vars)
    h = np.array([to_float(v) for v in lp.ineq_rhs]) if lp.ineq_rhs else None
    bounds = [(0, None) if f else (None, None) for f in lp.nonneg]
    res = scipy_linprog(
        c if minimizing else -c,
        A_ub=G, b_ub=h, A_eq=A, b_eq=b,
        bounds=bounds, method="highs",
    )
    if res.status == 2:
        return LpOutcome(status=INFEASIBLE)
    if res.status == 3:
        return LpOutcome(status=UNBOUNDED)
    if res.status != 0:
        return LpOutcome(status=NUMERICAL_FAILURE)

    x = np.asarray(res.x, dtype=float)
    if _residual(lp, x, A, b, G, h) > tol:
        x = _refine(lp, x, A, b, G, h)
        if _residual(lp, x, A, b, G, h) > tol:
            return LpOutcome(status=NUMERICAL_FAILURE)
    value = float(c @ x)
    y = tuple(float(v) for v in res.eqlin.marginals) if b is not None else ()
    u = tuple(float(v) for v in res.ineqlin.marginals) if h is not None else ()
    if not minimizing:
        y = tuple(-v for v in y)
        u = tuple(-v for v in u)
    return LpOutcome(
        status=OPTIMAL,
        primal=tuple(float(v) for v in x),
        objective_value=value,
        dual_eq=y,
        dual_ineq=u,
    )


def _np_matrix(rows, n):
    if not rows:
        return None
    return np.array([[to_float(a) for a in row] for row in rows])


def _residual(lp, x, A, b, G, h) -> float:
    worst = 0.0
    if A is not None:
        worst = max(worst, float(np.max(np.abs(A @ x - b))))
    if G is not None:
        worst = max(worst, float(np.max(np.maximum(G @ x - h, 0.0))))
    for v in range(lp.n_vars):
        if lp.nonneg[v]:
            worst = max(worst, max(0.0, -float(x[v])))
    return worst


def _refine(lp, x, A, b, G, h):
    """One least-squares correction on the active rows."""
    rows = []
    rhs = []
    if A is not None:
        rows.append(A)
        rhs.append(b - A @ x)
    if G is not None:
        slack = h - G @ x
        active = slack < 1e-7
        if np.any(active):
            rows.append(G[active])
            rhs.append(slack[active])
    for v in range(lp.n_vars):
        if lp.nonneg[v] and x[v] < 1e-7:
            e = np.zeros(lp.n_vars)
            e[v] = 1.0
            rows.append(e[None, :])
            rhs.append(np.array([-x[v]]))
    if not rows:
        return x
    M = np.vstack(rows)
    r = np.concatenate(rhs)
    delta, *_ = np.linalg.lstsq(M, r, rcond=None)
    return x + delta


def solve(lp: LinearProgram, mode: str = "exact") -> LpOutcome:
    if mode == "exact":
        return solve_exact(lp)
    if mode == "float":
        return solve_float(lp)
    raise StructuralError(f"unknown arithmetic mode {mode!r}")
