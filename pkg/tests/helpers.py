"""Shared test utilities: relabeling, independent recomputations, the
parity-sourced operation builder, and the hand-checkable LP battery
used by both the unit and acceptance suites."""

from __future__ import annotations

import random

from ctxlab import (
    Behavior,
    FreeOperation,
    MeasEquivalence,
    PrepEquivalence,
    Q,
    Scenario,
    linear_program,
    scenario,
    solve_exact,
    validate_freeop,
)
from ctxlab.instances import pom_scenario
from ctxlab.model import event_index
from ctxlab.sampling import rand_column_stochastic

ZERO = Q(0)
ONE = Q(1)


def pom_sourced_op(seed: int):
    """Operation whose source is the parity scenario: permutation
    preprocessing keeps the preparation equivalence liftable, while the
    measurement side is unconstrained."""
    rng = random.Random(seed)
    src = pom_scenario()
    perm = list(range(4))
    rng.shuffle(perm)
    q_P = tuple(
        tuple(ONE if i == perm[it] else ZERO for it in range(4)) for i in range(4)
    )
    eq = src.prep_equivalences[0]
    tgt_alpha = tuple(eq.alpha[perm[it]] for it in range(4))
    tgt_beta = tuple(eq.beta[perm[it]] for it in range(4))
    Jt = rng.randint(1, 2)
    Kt = rng.randint(2, 3)
    q_M = rand_column_stochastic(rng, 2, Jt)
    q_O = tuple(rand_column_stochastic(rng, Kt, 2) for _ in range(Jt))
    tgt = scenario(4, Jt, Kt, [PrepEquivalence(tgt_alpha, tgt_beta)], [])
    op = FreeOperation(src, tgt, q_P, q_M, q_O)
    assert validate_freeop(op).ok
    return op, src, tgt


def relabel(s: Scenario, b: Behavior, perm_i, perm_j, perm_k):
    """Relabel preparations/measurements/outcomes together with the
    equivalence coefficients; membership must be invariant."""
    I, J, K = s.preparations, s.measurements, s.outcomes
    preps = []
    for eq in s.prep_equivalences:
        alpha = [ZERO] * I
        beta = [ZERO] * I
        for i in range(I):
            alpha[perm_i[i]] = eq.alpha[i]
            beta[perm_i[i]] = eq.beta[i]
        preps.append(PrepEquivalence(tuple(alpha), tuple(beta)))
    meas = []
    for eq in s.meas_equivalences:
        alpha = [ZERO] * (J * K)
        beta = [ZERO] * (J * K)
        for j in range(J):
            for k in range(K):
                old = event_index(j, k, K)
                new = event_index(perm_j[j], perm_k[k], K)
                alpha[new] = eq.alpha[old]
                beta[new] = eq.beta[old]
        meas.append(MeasEquivalence(tuple(alpha), tuple(beta)))
    s2 = Scenario(I, J, K, tuple(preps), tuple(meas))
    table = [[[ZERO] * K for _ in range(J)] for _ in range(I)]
    for i in range(I):
        for j in range(J):
            for k in range(K):
                table[perm_i[i]][perm_j[j]][perm_k[k]] = b.p[i][j][k]
    b2 = Behavior(s2, tuple(tuple(tuple(row) for row in rows) for rows in table))
    return s2, b2


def hull_l1_distance(hull, b: Behavior):
    """Independent recomputation of the l1 contextuality distance in
    hull coordinates: epigraph LP over mixtures of extreme behaviors."""
    extremes = hull.extreme_behaviors
    T = len(extremes)
    s = b.scenario
    I, J, K = s.preparations, s.measurements, s.outcomes
    n_e = I * J * K
    n = T + n_e + 1
    t_col = T + n_e

    flat = lambda beh: [x for rows in beh.p for row in rows for x in row]
    cols = [flat(e) for e in extremes]
    target = flat(b)

    eq_rows = [[ONE] * T + [ZERO] * (n_e + 1)]
    eq_rhs = [ONE]
    ineq_rows, ineq_rhs = [], []
    for r in range(n_e):
        row = [-cols[t][r] for t in range(T)] + [ZERO] * (n_e + 1)
        row[T + r] = -ONE
        ineq_rows.append(row)
        ineq_rhs.append(-target[r])
        row = [cols[t][r] for t in range(T)] + [ZERO] * (n_e + 1)
        row[T + r] = -ONE
        ineq_rows.append(row)
        ineq_rhs.append(target[r])
    for i in range(I):
        for j in range(J):
            row = [ZERO] * n
            for k in range(K):
                row[T + (i * J + j) * K + k] = ONE
            row[t_col] = -ONE
            ineq_rows.append(row)
            ineq_rhs.append(ZERO)
    objective = [ZERO] * n
    objective[t_col] = ONE
    lp = linear_program(objective, sense="min", eq=eq_rows, eq_rhs=eq_rhs,
                        ineq=ineq_rows, ineq_rhs=ineq_rhs)
    out = solve_exact(lp)
    assert out.status == "optimal"
    return out.objective_value


def lp_battery():
    """Twenty hand-checkable programs: (name, lp, status, value)."""
    L = linear_program
    battery = [
        ("max_box", L([1], sense="max", ineq=[[1]], ineq_rhs=[1]), "optimal", Q(1)),
        ("empty_interval", L([0], ineq=[[-1], [1]], ineq_rhs=[-1, 0]), "infeasible", None),
        ("ray_up", L([1], sense="max"), "unbounded", None),
        ("min_at_zero", L([1]), "optimal", Q(0)),
        ("redundant_eq", L([1, 0], eq=[[1, 1], [1, 1]], eq_rhs=[1, 1]), "optimal", Q(0)),
        ("two_ineq_max", L([2, 3], sense="max", ineq=[[1, 1], [1, -1]], ineq_rhs=[4, 2]),
         "optimal", Q(12)),
        ("fractional_vertex", L([-1, -1], ineq=[[1, 2], [3, 1]], ineq_rhs=[4, 6]),
         "optimal", Q(-14, 5)),
        ("eq_plus_slack", L([0, 1], sense="max", eq=[[1, 1]], eq_rhs=[2], ineq=[[1, 0]],
           ineq_rhs=[1]), "optimal", Q(2)),
        ("free_floor", L([1], ineq=[[-1]], ineq_rhs=[5], nonneg=[False]), "optimal", Q(-5)),
        ("free_fall", L([1], nonneg=[False]), "unbounded", None),
        ("clashing_eqs", L([0, 0], eq=[[1, 1], [1, 1]], eq_rhs=[1, 2]), "infeasible", None),
        ("feasibility_simplex", L([0, 0], eq=[[1, 1]], eq_rhs=[1]), "optimal", Q(0)),
        ("klee_minty_3", L([100, 10, 1], sense="max",
           ineq=[[1, 0, 0], [20, 1, 0], [200, 20, 1]], ineq_rhs=[1, 100, 10000]),
         "optimal", Q(10000)),
        ("degenerate_corner", L([1, 1], sense="max",
           ineq=[[1, 0], [0, 1], [1, 1]], ineq_rhs=[1, 1, 2]), "optimal", Q(2)),
        ("pinned_point", L([5, -3], eq=[[1, 1], [1, -1]], eq_rhs=[2, 0]), "optimal", Q(2)),
        ("rational_objective", L([Q(1, 3), Q(1, 7)], sense="max", ineq=[[1, 1]],
           ineq_rhs=[1]), "optimal", Q(1, 3)),
        ("eq_vs_ineq_clash", L([0], eq=[[1]], eq_rhs=[3], ineq=[[1]], ineq_rhs=[2]),
         "infeasible", None),
        ("negative_rhs_flip", L([1], ineq=[[-1], [1]], ineq_rhs=[-2, 5]), "optimal", Q(2)),
        ("tied_optima", L([1, 1], sense="max", ineq=[[1, 1]], ineq_rhs=[1]),
         "optimal", Q(1)),
        ("simplex_min", L([3, 1, 4, 1, 5], eq=[[1, 1, 1, 1, 1]], eq_rhs=[1]),
         "optimal", Q(1)),
    ]
    assert len(battery) == 20
    return battery
