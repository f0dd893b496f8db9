"""Seeded random generation of scenarios and behaviors.

Everything draws small integers from random.Random, so outputs are
exact rationals and reproducible per seed.  Random behaviors come from
exact LPs with random objectives: each solve lands on a vertex of the
requested polytope, and mixtures of a few vertices cover the interior.
"""

from __future__ import annotations

import random

from .errors import InvalidInputError
from .linprog import linear_program, solve_exact
from .membership import NCModel, model_image
from .model import (
    Behavior,
    MeasEquivalence,
    PrepEquivalence,
    Scenario,
    event_index,
    scenario,
    uniform_behavior,
)
from .polytope import VertexSet
from .rational import ONE, Q, ZERO


def rand_prob_vector(rng: random.Random, n: int, granularity: int = 9):
    while True:
        weights = [rng.randint(0, granularity) for _ in range(n)]
        total = sum(weights)
        if total:
            return tuple(Q(w, total) for w in weights)


def rand_distinct_pair(rng: random.Random, n: int, tries: int = 100):
    for _ in range(tries):
        a = rand_prob_vector(rng, n)
        b = rand_prob_vector(rng, n)
        if a != b:
            return a, b
    raise InvalidInputError(f"could not draw distinct vectors of length {n}")


def rand_column_stochastic(rng: random.Random, n_out: int, n_in: int):
    """Matrix[out][in], every input column a distribution over outputs."""
    cols = [rand_prob_vector(rng, n_out) for _ in range(n_in)]
    return tuple(tuple(cols[c][r] for c in range(n_in)) for r in range(n_out))


def random_scenario(
    rng: random.Random, I: int, J: int, K: int, n_prep_eq: int = 0, n_meas_eq: int = 0
) -> Scenario:
    if n_prep_eq and I < 2:
        raise InvalidInputError("preparation equivalences need at least 2 preparations")
    preps = []
    for _ in range(n_prep_eq):
        a, b = rand_distinct_pair(rng, I)
        preps.append(PrepEquivalence(a, b))
    meas = []
    for _ in range(n_meas_eq):
        a, b = rand_distinct_pair(rng, J * K)
        meas.append(MeasEquivalence(a, b))
    return scenario(I, J, K, preps, meas)


def _behavior_system(s: Scenario):
    I, J, K = s.preparations, s.measurements, s.outcomes
    n = I * J * K
    flat = lambda i, j, k: (i * J + j) * K + k
    rows, rhs = [], []
    for i in range(I):
        for j in range(J):
            row = [ZERO] * n
            for k in range(K):
                row[flat(i, j, k)] = ONE
            rows.append(row)
            rhs.append(ONE)
    for eq in s.prep_equivalences:
        diff = [eq.alpha[i] - eq.beta[i] for i in range(I)]
        for j in range(J):
            for k in range(K):
                row = [ZERO] * n
                for i in range(I):
                    if diff[i]:
                        row[flat(i, j, k)] = diff[i]
                rows.append(row)
                rhs.append(ZERO)
    for eq in s.meas_equivalences:
        for i in range(I):
            row = [ZERO] * n
            for j in range(J):
                for k in range(K):
                    d = eq.alpha[event_index(j, k, K)] - eq.beta[event_index(j, k, K)]
                    if d:
                        row[flat(i, j, k)] = d
            rows.append(row)
            rhs.append(ZERO)
    return rows, rhs


def _random_vertex(rng: random.Random, rows, rhs, n: int):
    objective = [Q(rng.randint(-20, 20)) for _ in range(n)]
    lp = linear_program(objective, sense="min", eq=rows, eq_rhs=rhs)
    out = solve_exact(lp)
    if out.status != "optimal":
        raise InvalidInputError(f"random vertex draw failed: {out.status}")
    return out.primal


def random_behavior(rng: random.Random, s: Scenario, n_mix: int | None = None) -> Behavior:
    """Random valid behavior: a mixture of a few vertices of the behavior
    polytope, occasionally stirred with the uniform behavior."""
    I, J, K = s.preparations, s.measurements, s.outcomes
    n = I * J * K
    rows, rhs = _behavior_system(s)
    if n_mix is None:
        n_mix = rng.randint(1, 3)
    points = [_random_vertex(rng, rows, rhs, n) for _ in range(n_mix)]
    if rng.random() < 0.3:
        u = uniform_behavior(s)
        points.append(
            tuple(u.p[i][j][k] for i in range(I) for j in range(J) for k in range(K))
        )
    weights = rand_prob_vector(rng, len(points))
    flat = [ZERO] * n
    for w, pt in zip(weights, points):
        if w:
            flat = [acc + w * x for acc, x in zip(flat, pt)]
    table = tuple(
        tuple(tuple(flat[(i * J + j) * K + k] for k in range(K)) for j in range(J))
        for i in range(I)
    )
    return Behavior(s, table)


def random_nc_behavior(
    rng: random.Random, s: Scenario, v: VertexSet, n_mix: int | None = None
) -> Behavior:
    """Random noncontextual behavior: image of a random mixture of
    model-weight polytope vertices."""
    I = s.preparations
    V = len(v.vertices)
    n = I * V
    rows, rhs = [], []
    for i in range(I):
        row = [ZERO] * n
        for kap in range(V):
            row[i * V + kap] = ONE
        rows.append(row)
        rhs.append(ONE)
    for eq in s.prep_equivalences:
        diff = [eq.alpha[i] - eq.beta[i] for i in range(I)]
        for kap in range(V):
            row = [ZERO] * n
            for i in range(I):
                if diff[i]:
                    row[i * V + kap] = diff[i]
            rows.append(row)
            rhs.append(ZERO)
    if n_mix is None:
        n_mix = rng.randint(1, 3)
    points = [_random_vertex(rng, rows, rhs, n) for _ in range(n_mix)]
    weights = rand_prob_vector(rng, len(points))
    mixed = [ZERO] * n
    for w, pt in zip(weights, points):
        if w:
            mixed = [acc + w * x for acc, x in zip(mixed, pt)]
    model = NCModel(
        tuple(tuple(mixed[i * V + kap] for kap in range(V)) for i in range(I))
    )
    return model_image(s, v, model)
