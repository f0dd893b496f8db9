import json
import math
import pathlib
import random

import pytest

from ctxlab import (
    Behavior,
    Q,
    apply_freeop,
    check_membership,
    contextual_fraction,
    enumerate_nc_hull,
    enumerate_vertices,
    kl_contextuality,
    l1_behavior_distance,
    l1_contextuality_distance,
    oracle_contextual_fraction,
    oracle_robustness,
    robustness,
    robustness_ref,
    scenario,
    uniform_behavior,
    uniform_l1_distance,
    validate_behavior,
    verify_model,
)
from ctxlab.errors import InvalidInputError, StructuralError
from ctxlab.freeops import sample_random_freeop
from ctxlab.instances import pom_behavior, pom_scenario, pom_success_quantum
from ctxlab.rational import parse_rational
from ctxlab.sampling import random_behavior, random_nc_behavior

from helpers import hull_l1_distance, pom_sourced_op, relabel

DATA = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="module")
def pom():
    s = pom_scenario()
    v = enumerate_vertices(s)
    return s, v, pom_behavior(pom_success_quantum())


# ---------------------------------------------------------------------------
# Contextual fraction
# ---------------------------------------------------------------------------


def test_cf_zero_for_noncontextual(pom):
    s, v, _ = pom
    rng = random.Random(3)
    for b in (uniform_behavior(s), random_nc_behavior(rng, s, v)):
        assert contextual_fraction(s, b, v).value == 0


def test_cf_zero_without_equivalences():
    s = scenario(3, 2, 2)
    v = enumerate_vertices(s)
    for t in range(4):
        b = random_behavior(random.Random(t), s)
        assert contextual_fraction(s, b, v).value == 0


def test_cf_pom_positive_and_matches_hull_recomputation(pom):
    s, v, b = pom
    report = contextual_fraction(s, b, v)
    assert report.value > 0
    h = enumerate_nc_hull(s, v)
    assert oracle_contextual_fraction(h, b) == report.value
    frozen = parse_rational(json.loads((DATA / "pom_cf.json").read_text())["cf"])
    assert report.value == frozen


def test_cf_witness_reconstructs_decomposition(pom):
    s, v, b = pom
    report = contextual_fraction(s, b, v)
    lam = report.witness["lambda"]
    nc_part = report.witness["nc_part"]
    residual = report.witness["residual"]
    assert verify_model(s, nc_part, v, report.witness["nc_model"])
    assert validate_behavior(s, residual).ok
    for i in range(4):
        for j in range(2):
            for k in range(2):
                assert b.p[i][j][k] == lam * nc_part.p[i][j][k] + (1 - lam) * residual.p[i][j][k]


def test_cf_value_in_unit_interval(pom):
    s, v, b = pom
    for beh in (b, uniform_behavior(s)):
        val = contextual_fraction(s, beh, v).value
        assert 0 <= val <= 1


# ---------------------------------------------------------------------------
# Robustness
# ---------------------------------------------------------------------------


def test_robustness_zero_for_noncontextual(pom):
    s, v, _ = pom
    assert robustness(s, uniform_behavior(s), v).value == 0


def test_robustness_bounded_by_one(pom):
    s, v, b = pom
    val = robustness(s, b, v).value
    assert 0 < val <= 1


def test_robustness_matches_bisection_oracle(pom):
    s, v, b = pom
    direct = robustness(s, b, v).value
    oracle = oracle_robustness(s, b, v, Q(1, 10**9))
    assert abs(oracle - direct) <= Q(1, 10**9)


def test_robustness_witness_mixture_verifies(pom):
    s, v, b = pom
    report = robustness(s, b, v)
    lam = report.witness["lambda"]
    mixture = report.witness["mixture"]
    noise = report.witness["noise_part"]
    assert verify_model(s, mixture, v, report.witness["mixture_model"])
    for i in range(4):
        for j in range(2):
            for k in range(2):
                assert mixture.p[i][j][k] == lam * noise.p[i][j][k] + (1 - lam) * b.p[i][j][k]


def test_robustness_ref_trivial_cases(pom):
    s, v, b = pom
    u = uniform_behavior(s)
    assert robustness_ref(s, u, u, v).value == 0
    rng = random.Random(8)
    nc = random_nc_behavior(rng, s, v)
    assert robustness_ref(s, nc, u, v).value == 0


def test_robustness_ref_dominates_robustness(pom):
    s, v, b = pom
    r_free = robustness(s, b, v).value
    r_ref = robustness_ref(s, b, uniform_behavior(s), v).value
    assert r_ref >= r_free


def test_robustness_ref_rejects_contextual_reference(pom):
    s, v, b = pom
    with pytest.raises(InvalidInputError):
        robustness_ref(s, uniform_behavior(s), b, v)


# ---------------------------------------------------------------------------
# l1 distances
# ---------------------------------------------------------------------------


def test_l1_behavior_distance_examples():
    s = scenario(1, 1, 2)
    b1 = Behavior(s, (((Q(1), Q(0)),),))
    b2 = Behavior(s, (((Q(0), Q(1)),),))
    assert l1_behavior_distance(b1, b1) == 0
    assert l1_behavior_distance(b1, b2) == 2
    b3 = Behavior(s, (((Q(3, 4), Q(1, 4)),),))
    b4 = Behavior(s, (((Q(1, 2), Q(1, 2)),),))
    assert l1_behavior_distance(b3, b4) == Q(1, 2)
    with pytest.raises(StructuralError):
        l1_behavior_distance(b1, uniform_behavior(scenario(1, 1, 3)))


def test_l1_distance_zero_for_noncontextual(pom):
    s, v, _ = pom
    assert l1_contextuality_distance(s, uniform_behavior(s), v).value == 0


def test_l1_distance_bounded_by_distance_to_uniform(pom):
    s, v, b = pom
    val = l1_contextuality_distance(s, b, v).value
    assert val <= l1_behavior_distance(b, uniform_behavior(s))


def test_l1_distance_matches_hull_recomputation(pom):
    s, v, b = pom
    val = l1_contextuality_distance(s, b, v).value
    h = enumerate_nc_hull(s, v)
    assert abs(val - hull_l1_distance(h, b)) <= Q(1, 10**9)


def test_l1_witness_is_noncontextual_at_stated_distance(pom):
    s, v, b = pom
    report = l1_contextuality_distance(s, b, v)
    closest = report.witness["closest"]
    assert verify_model(s, closest, v, report.witness["closest_model"])
    assert l1_behavior_distance(b, closest) == report.value


def test_uniform_l1_zero_for_noncontextual(pom):
    s, v, _ = pom
    assert uniform_l1_distance(s, uniform_behavior(s), v).value == 0


def test_uniform_l1_below_max_form(pom):
    # the summed form evaluated at the max-form optimum is at most
    # I*J times the max form, so 2*Du <= D1
    s, v, b = pom
    du = uniform_l1_distance(s, b, v).value
    d1 = l1_contextuality_distance(s, b, v).value
    assert 2 * du <= d1


def test_uniform_l1_stable_under_preparation_relabeling(pom):
    s, v, b = pom
    base = uniform_l1_distance(s, b, v).value
    s2, b2 = relabel(s, b, [3, 1, 0, 2], [0, 1], [0, 1])
    v2 = enumerate_vertices(s2)
    assert uniform_l1_distance(s2, b2, v2).value == base


# ---------------------------------------------------------------------------
# Relative entropy
# ---------------------------------------------------------------------------


def test_kl_noncontextual_below_tolerance(pom):
    s, v, _ = pom
    report = kl_contextuality(s, uniform_behavior(s), v, tol=1e-6)
    assert report.value <= 1e-5
    rng = random.Random(12)
    report = kl_contextuality(s, random_nc_behavior(rng, s, v), v, tol=1e-6)
    assert report.value <= 1e-5


def test_kl_deterministic_rows_bounded_by_log2():
    # uniform candidate gives log K - H(p) = log 2 per deterministic row
    s = scenario(2, 2, 2)
    v = enumerate_vertices(s)
    b = Behavior(s, (((Q(1), Q(0)), (Q(0), Q(1))), ((Q(1), Q(0)), (Q(1), Q(0)))))
    report = kl_contextuality(s, b, v, tol=1e-6)
    assert report.value <= math.log(2) + 1e-9


def test_kl_pom_positive_and_monotone_under_free_operations(pom):
    s, v, b = pom
    base = kl_contextuality(s, b, v, tol=2e-5)
    assert base.value > 1e-3
    assert base.gap <= 2e-5
    for seed in range(20):
        op, src, tgt = pom_sourced_op(seed + 300)
        tb = apply_freeop(op, b)
        vt = enumerate_vertices(tgt)
        after = kl_contextuality(tgt, tb, vt, tol=2e-5)
        assert after.value <= base.value + 1e-4, f"kl grew under op {seed}"


def test_kl_trace_is_non_increasing(pom):
    s, v, b = pom
    report = kl_contextuality(s, b, v, tol=1e-4)
    trace = report.witness["trace"]
    assert all(a >= c for a, c in zip(trace, trace[1:]))


def test_kl_rejects_bad_tolerance(pom):
    s, v, b = pom
    with pytest.raises(InvalidInputError):
        kl_contextuality(s, b, v, tol=0.0)


@pytest.mark.parametrize("q", [Q(4, 5), Q(17, 20), Q(9, 10), Q(1)])
def test_pom_family_closed_forms(q):
    # Independent analytic oracle: above the 3/4 threshold the optimal
    # decompositions interpolate along the success-probability axis, so
    # every LP measure has a closed form in q.  Derivation sketch: the
    # success-s family is noncontextual exactly for s in [1/4, 3/4];
    # CF splits q = lam*(3/4) + (1-lam)*1, robustness mixes toward the
    # anti-decoder at s = 1/4, and both distances shave each row down
    # to the s = 3/4 table.
    s = pom_scenario()
    v = enumerate_vertices(s)
    b = pom_behavior(q)
    assert contextual_fraction(s, b, v).value == 4 * q - 3
    assert robustness(s, b, v).value == (4 * q - 3) / (4 * q - 1)
    assert l1_contextuality_distance(s, b, v).value == 2 * q - Q(3, 2)
    assert uniform_l1_distance(s, b, v).value == q - Q(3, 4)


def test_kl_pom_sandwich():
    # Pinsker gives max-row KL >= (l1 row distance)^2 / 2 against any
    # candidate, so the exact l1 distance bounds KL from below; the
    # success-3/4 table bounds it from above.
    q = Q(17, 20)
    s = pom_scenario()
    v = enumerate_vertices(s)
    b = pom_behavior(q)
    report = kl_contextuality(s, b, v, tol=1e-5)
    d1 = float((2 * q - Q(3, 2)).numerator) / float((2 * q - Q(3, 2)).denominator)
    lower = d1 * d1 / 2
    qf = 0.85
    upper = qf * math.log(qf / 0.75) + (1 - qf) * math.log((1 - qf) / 0.25)
    assert lower <= report.value + report.gap
    assert report.value <= upper + 1e-9


def test_float_mode_tracks_exact_values(pom):
    s, v, b = pom
    for fn in (contextual_fraction, robustness, l1_contextuality_distance,
               uniform_l1_distance):
        exact = fn(s, b, v, mode="exact").value
        approx = fn(s, b, v, mode="float").value
        assert abs(approx - float(exact.numerator) / float(exact.denominator)) <= 1e-8


# ---------------------------------------------------------------------------
# Cross-measure consistency
# ---------------------------------------------------------------------------


def test_faithfulness_agreement_on_random_behaviors(pom):
    s, v, _ = pom
    seen_contextual = seen_nc = False
    for t in range(10):
        b = random_behavior(random.Random(t + 50), s, n_mix=1 + t % 2)
        nc = check_membership(s, b, v).noncontextual
        cf = contextual_fraction(s, b, v).value
        d1 = l1_contextuality_distance(s, b, v).value
        assert (cf == 0) == nc
        assert (d1 == 0) == nc
        seen_contextual |= not nc
        seen_nc |= nc
    assert seen_contextual and seen_nc
