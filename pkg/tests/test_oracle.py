import random

import pytest

from ctxlab import (
    Behavior,
    Q,
    check_membership,
    enumerate_nc_hull,
    enumerate_vertices,
    oracle_membership,
    oracle_robustness,
    robustness,
    scenario,
    uniform_behavior,
    verify_model,
)
from ctxlab.errors import StructuralError
from ctxlab.instances import pom_behavior, pom_scenario, pom_success_quantum
from ctxlab.sampling import random_behavior, random_scenario


def test_tiny_hull_sizes():
    s = scenario(1, 1, 2)
    assert len(enumerate_nc_hull(s, enumerate_vertices(s))) == 2
    s = scenario(2, 1, 2)
    assert len(enumerate_nc_hull(s, enumerate_vertices(s))) == 4


def test_hull_excludes_pom_quantum_behavior():
    s = pom_scenario()
    v = enumerate_vertices(s)
    h = enumerate_nc_hull(s, v)
    assert not oracle_membership(h, pom_behavior(pom_success_quantum()))


def test_hull_members_and_midpoints_are_members():
    s = scenario(2, 2, 2)
    v = enumerate_vertices(s)
    h = enumerate_nc_hull(s, v)
    e0, e1 = h.extreme_behaviors[0], h.extreme_behaviors[1]
    assert oracle_membership(h, e0)
    mid = Behavior(s, tuple(
        tuple(tuple((e0.p[i][j][k] + e1.p[i][j][k]) / 2 for k in range(2))
              for j in range(2))
        for i in range(2)
    ))
    assert oracle_membership(h, mid)


def test_extreme_behaviors_round_trip_through_membership():
    s = pom_scenario()
    v = enumerate_vertices(s)
    h = enumerate_nc_hull(s, v)
    for e in h.extreme_behaviors[:6]:
        res = check_membership(s, e, v)
        assert res.noncontextual
        assert verify_model(s, e, v, res.model)


def test_oracle_robustness_trivial_zeroes():
    s = pom_scenario()
    v = enumerate_vertices(s)
    assert oracle_robustness(s, uniform_behavior(s), v) == 0
    h = enumerate_nc_hull(s, v)
    assert oracle_robustness(s, h.extreme_behaviors[0], v) == 0


def test_oracle_robustness_matches_direct_lp():
    s = pom_scenario()
    v = enumerate_vertices(s)
    b = pom_behavior(pom_success_quantum())
    eps = Q(1, 10**9)
    assert abs(oracle_robustness(s, b, v, eps) - robustness(s, b, v).value) <= eps


def test_membership_agreement_on_random_scenarios():
    total = agree = 0
    for seed in range(10):
        rng = random.Random(seed)
        I, J = rng.randint(1, 3), rng.randint(1, 2)
        s = random_scenario(rng, I, J, 2,
                            n_prep_eq=rng.randint(0, 1) if I >= 2 else 0,
                            n_meas_eq=rng.randint(0, 1))
        v = enumerate_vertices(s)
        h = enumerate_nc_hull(s, v)
        for t in range(5):
            b = random_behavior(random.Random(seed * 31 + t), s)
            total += 1
            agree += oracle_membership(h, b) == check_membership(s, b, v).noncontextual
    assert agree == total


def test_hull_fingerprint_mismatch_rejected():
    s1, s2 = scenario(1, 1, 2), scenario(2, 1, 2)
    h1 = enumerate_nc_hull(s1, enumerate_vertices(s1))
    with pytest.raises(StructuralError):
        oracle_membership(h1, uniform_behavior(s2))


def test_hull_enumeration_respects_budget():
    from ctxlab import BudgetExceededError

    s = pom_scenario()
    v = enumerate_vertices(s)
    with pytest.raises(BudgetExceededError):
        enumerate_nc_hull(s, v, budget=10)
