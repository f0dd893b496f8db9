import random

import pytest
from hypothesis import given, settings, strategies as st

from ctxlab.errors import StructuralError
from ctxlab.linprog import (
    linear_program,
    solve_exact,
    solve_float,
    verify_farkas,
    verify_outcome,
    verify_ray,
)
from ctxlab.rational import Q, to_float

from helpers import lp_battery


@pytest.mark.parametrize("name,lp,status,value", lp_battery(), ids=lambda x: x if isinstance(x, str) else "")
def test_battery_exact(name, lp, status, value):
    out = solve_exact(lp)
    assert out.status == status, name
    if value is not None:
        assert out.objective_value == value, name
    assert verify_outcome(lp, out), name


@pytest.mark.parametrize("name,lp,status,value", lp_battery(), ids=lambda x: x if isinstance(x, str) else "")
def test_battery_float_agrees(name, lp, status, value):
    out = solve_float(lp)
    assert out.status == status, name
    if value is not None:
        assert abs(out.objective_value - to_float(value)) <= 1e-9, name


def test_exact_is_pivot_deterministic():
    lp = linear_program([1, 1], sense="max", ineq=[[1, 1]], ineq_rhs=[1])
    a = solve_exact(lp)
    b = solve_exact(lp)
    assert a.primal == b.primal
    assert a.dual_ineq == b.dual_ineq


def test_strong_duality_exact():
    lp = linear_program([-1, -1], ineq=[[1, 2], [3, 1]], ineq_rhs=[4, 6])
    out = solve_exact(lp)
    dual_value = sum(u * h for u, h in zip(out.dual_ineq, lp.ineq_rhs))
    assert dual_value == out.objective_value


def test_farkas_certificate_composes_contradiction():
    lp = linear_program([0, 0], eq=[[1, 1], [1, 1]], eq_rhs=[1, 2])
    out = solve_exact(lp)
    assert out.status == "infeasible"
    assert verify_farkas(lp, out)
    # the verifier must reject a corrupted certificate
    from ctxlab.linprog import LpOutcome

    bad = LpOutcome(status="infeasible", dual_eq=(Q(0), Q(0)), dual_ineq=())
    assert not verify_farkas(lp, bad)


def test_ray_verifies():
    lp = linear_program([1, 2], sense="max", ineq=[[1, 0]], ineq_rhs=[3])
    out = solve_exact(lp)
    assert out.status == "unbounded"
    assert verify_ray(lp, out)


def test_shape_mismatch_raises():
    with pytest.raises(StructuralError):
        linear_program([1, 2], eq=[[1]], eq_rhs=[1])
    with pytest.raises(StructuralError):
        linear_program([1], eq=[[1]], eq_rhs=[1, 2])


def _random_lp(rng: random.Random):
    n = rng.randint(1, 4)
    n_eq = rng.randint(0, 2)
    n_in = rng.randint(0, 3)
    mk_row = lambda: [Q(rng.randint(-3, 3)) for _ in range(n)]
    return linear_program(
        mk_row(),
        sense=rng.choice(["min", "max"]),
        eq=[mk_row() for _ in range(n_eq)],
        eq_rhs=[Q(rng.randint(-3, 3)) for _ in range(n_eq)],
        ineq=[mk_row() for _ in range(n_in)],
        ineq_rhs=[Q(rng.randint(-3, 3)) for _ in range(n_in)],
        nonneg=[rng.random() < 0.8 for _ in range(n)],
    )


def test_random_lps_verify_and_match_float():
    rng = random.Random(2024)
    statuses = {"optimal": 0, "infeasible": 0, "unbounded": 0}
    for _ in range(120):
        lp = _random_lp(rng)
        out = solve_exact(lp)
        assert verify_outcome(lp, out)
        statuses[out.status] += 1
        fl = solve_float(lp)
        if fl.status == "numerical_failure":
            continue
        assert fl.status == out.status
        if out.status == "optimal":
            assert abs(fl.objective_value - to_float(out.objective_value)) <= 1e-9
    # the generator must actually exercise all three outcomes
    assert all(statuses[k] > 0 for k in statuses)


def test_highly_degenerate_lps_terminate_and_verify():
    # many hyperplanes through the same vertex: textbook cycling bait
    rng = random.Random(99)
    for _ in range(40):
        n = rng.randint(2, 4)
        m = rng.randint(3, 6)
        G = [[Q(rng.randint(-2, 2)) for _ in range(n)] for _ in range(m)]
        h = [Q(0)] * m  # every constraint active at the origin
        c = [Q(rng.randint(-2, 2)) for _ in range(n)]
        lp = linear_program(c, sense="min", ineq=G, ineq_rhs=h)
        out = solve_exact(lp)
        assert out.status in ("optimal", "unbounded")
        assert verify_outcome(lp, out)


def test_corrupted_certificates_are_rejected():
    rng = random.Random(7)
    checked = 0
    for _ in range(60):
        lp = _random_lp(rng)
        out = solve_exact(lp)
        if out.status != "optimal" or not lp.eq_matrix and not lp.ineq_matrix:
            continue
        from dataclasses import replace

        if lp.ineq_matrix and out.dual_ineq:
            bad = replace(out, dual_ineq=tuple(
                u + Q(1, 3) for u in out.dual_ineq
            ))
            assert not verify_outcome(lp, bad)
            checked += 1
        bad_val = replace(out, objective_value=out.objective_value + Q(1, 7))
        assert not verify_outcome(lp, bad_val)
    assert checked > 5


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_weak_duality_holds_on_random_feasible_lps(data):
    n = data.draw(st.integers(1, 3))
    m = data.draw(st.integers(1, 3))
    entries = st.integers(-2, 2)
    G = [[Q(data.draw(entries)) for _ in range(n)] for _ in range(m)]
    h = [Q(data.draw(st.integers(0, 3))) for _ in range(m)]  # x=0 feasible
    c = [Q(data.draw(entries)) for _ in range(n)]
    lp = linear_program(c, sense="min", ineq=G, ineq_rhs=h)
    out = solve_exact(lp)
    assert out.status in ("optimal", "unbounded")
    assert verify_outcome(lp, out)
    if out.status == "optimal":
        dual_value = sum(u * hh for u, hh in zip(out.dual_ineq, h))
        assert dual_value == out.objective_value
