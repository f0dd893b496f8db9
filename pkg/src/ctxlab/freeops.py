"""Free operations: stochastic pre-processing of preparations and
measurements plus per-measurement post-processing of outcomes.

An operation maps behaviors of its source scenario to behaviors of its
target scenario:

    p~(kt|jt,it) = sum_{k,j,i} q_O^{jt}(kt|k) p(k|j,i) q_P(i|it) q_M(j|jt)

Matrix layout: q_P[i][it], q_M[j][jt], q_O[jt][kt][k]; every input
column is a probability distribution over outputs.

Operations are scenario-typed.  Each target equivalence must induce the
matching source equivalence through the maps: for preparations

    alpha_i = sum_it alpha~_it q_P(i|it)

and for measurement events

    a_(k|j) = sum_{jt,kt} alpha~_(kt|jt) q_O^{jt}(kt|k) q_M(j|jt)

with a and b rescaled by their common mass before comparison.  This
bookkeeping is exactly what makes noncontextuality preservation a
theorem rather than an accident, so validation enforces it exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (
    CompositionError,
    InvalidInputError,
    RejectionBudgetError,
    StructuralError,
)
from .model import (
    Behavior,
    MeasEquivalence,
    PrepEquivalence,
    Scenario,
    ValidationReport,
    behavior,
    event_index,
    scenario,
    validate_behavior,
    validate_scenario,
)
from .rational import ONE, Q, ZERO
from .sampling import rand_column_stochastic, rand_prob_vector


@dataclass(frozen=True)
class FreeOperation:
    source: Scenario
    target: Scenario
    q_P: tuple  # I x It
    q_M: tuple  # J x Jt
    q_O: tuple  # Jt matrices, each Kt x K


# ---------------------------------------------------------------------------
# Equivalence lifting (target -> source)
# ---------------------------------------------------------------------------


def _lift_prep_vector(q_P, vec, I: int, It: int):
    return tuple(
        sum((vec[it] * q_P[i][it] for it in range(It) if vec[it]), ZERO)
        for i in range(I)
    )


def _lift_meas_vector(q_M, q_O, vec, dims):
    J, K, Jt, Kt = dims
    out = []
    for j in range(J):
        for k in range(K):
            acc = ZERO
            for jt in range(Jt):
                w = q_M[j][jt]
                if not w:
                    continue
                inner = ZERO
                for kt in range(Kt):
                    c = vec[event_index(jt, kt, Kt)]
                    if c:
                        inner += c * q_O[jt][kt][k]
                if inner:
                    acc += w * inner
            out.append(acc)
    return tuple(out)


def lift_equivalences(q_P, q_M, q_O, target_prep_eqs, target_meas_eqs, dims):
    """Source equivalences induced by target ones through the maps.

    dims = (I, J, K, It, Jt, Kt).  Preparation lifts are automatically
    probability vectors.  Measurement lifts are rescaled to unit mass;
    zero or unequal masses and trivial lifts are rejected.
    """
    I, J, K, It, Jt, Kt = dims
    preps = []
    for eq in target_prep_eqs:
        alpha = _lift_prep_vector(q_P, eq.alpha, I, It)
        beta = _lift_prep_vector(q_P, eq.beta, I, It)
        if alpha == beta:
            raise InvalidInputError("lifted preparation equivalence is trivial")
        preps.append(PrepEquivalence(alpha, beta))
    meas = []
    for eq in target_meas_eqs:
        a = _lift_meas_vector(q_M, q_O, eq.alpha, (J, K, Jt, Kt))
        b = _lift_meas_vector(q_M, q_O, eq.beta, (J, K, Jt, Kt))
        mass_a = sum(a, ZERO)
        mass_b = sum(b, ZERO)
        if mass_a == 0 or mass_b == 0:
            raise InvalidInputError("lifted measurement equivalence has zero mass")
        if mass_a != mass_b:
            raise InvalidInputError("lifted measurement equivalence has unequal masses")
        a = tuple(x / mass_a for x in a)
        b = tuple(x / mass_b for x in b)
        if a == b:
            raise InvalidInputError("lifted measurement equivalence is trivial")
        meas.append(MeasEquivalence(a, b))
    return tuple(preps), tuple(meas)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _column_stochastic_violations(name: str, matrix, n_out: int, n_in: int):
    bad = []
    if len(matrix) != n_out or any(len(row) != n_in for row in matrix):
        return [f"{name}: wrong shape"]
    for c in range(n_in):
        col = [matrix[r][c] for r in range(n_out)]
        if any(x < 0 for x in col):
            bad.append(f"{name}: negative entry in column {c}")
        if sum(col, ZERO) != ONE:
            bad.append(f"{name}: column {c} does not sum to 1")
    return bad


def validate_freeop(t: FreeOperation) -> ValidationReport:
    """Stochasticity plus exact equivalence-lifting bookkeeping."""
    bad: list[str] = []
    for s in (t.source, t.target):
        rep = validate_scenario(s)
        bad.extend(rep.violations)
    I, J, K = t.source.preparations, t.source.measurements, t.source.outcomes
    It, Jt, Kt = t.target.preparations, t.target.measurements, t.target.outcomes
    bad.extend(_column_stochastic_violations("q_P", t.q_P, I, It))
    bad.extend(_column_stochastic_violations("q_M", t.q_M, J, Jt))
    if len(t.q_O) != Jt:
        bad.append("q_O: expected one outcome map per target measurement")
    else:
        for jt in range(Jt):
            bad.extend(_column_stochastic_violations(f"q_O[{jt}]", t.q_O[jt], Kt, K))
    if bad:
        return ValidationReport(tuple(bad))

    if len(t.source.prep_equivalences) != len(t.target.prep_equivalences):
        bad.append("equivalence lift mismatch: preparation equivalence counts differ")
    else:
        for idx, eq in enumerate(t.target.prep_equivalences):
            alpha = _lift_prep_vector(t.q_P, eq.alpha, I, It)
            beta = _lift_prep_vector(t.q_P, eq.beta, I, It)
            src = t.source.prep_equivalences[idx]
            if (alpha, beta) != (src.alpha, src.beta):
                bad.append(f"equivalence lift mismatch: preparation equivalence {idx}")
    if len(t.source.meas_equivalences) != len(t.target.meas_equivalences):
        bad.append("equivalence lift mismatch: measurement equivalence counts differ")
    else:
        for idx, eq in enumerate(t.target.meas_equivalences):
            a = _lift_meas_vector(t.q_M, t.q_O, eq.alpha, (J, K, Jt, Kt))
            b = _lift_meas_vector(t.q_M, t.q_O, eq.beta, (J, K, Jt, Kt))
            mass_a = sum(a, ZERO)
            mass_b = sum(b, ZERO)
            if mass_a == 0 or mass_b == 0 or mass_a != mass_b:
                bad.append(
                    f"equivalence lift mismatch: measurement equivalence {idx} mass"
                )
                continue
            a = tuple(x / mass_a for x in a)
            b = tuple(x / mass_b for x in b)
            src = t.source.meas_equivalences[idx]
            if (a, b) != (src.alpha, src.beta):
                bad.append(f"equivalence lift mismatch: measurement equivalence {idx}")
    return ValidationReport(tuple(bad))


def identity_freeop(s: Scenario) -> FreeOperation:
    I, J, K = s.preparations, s.measurements, s.outcomes
    eye = lambda n: tuple(tuple(ONE if r == c else ZERO for c in range(n)) for r in range(n))
    return FreeOperation(s, s, eye(I), eye(J), tuple(eye(K) for _ in range(J)))


# ---------------------------------------------------------------------------
# Application and composition
# ---------------------------------------------------------------------------


def apply_freeop(t: FreeOperation, b: Behavior) -> Behavior:
    rep = validate_freeop(t)
    if not rep.ok:
        raise InvalidInputError("; ".join(rep.violations))
    rep_b = validate_behavior(t.source, b)
    if not rep_b.ok:
        raise InvalidInputError("; ".join(rep_b.violations))
    I, J, K = t.source.preparations, t.source.measurements, t.source.outcomes
    It, Jt, Kt = t.target.preparations, t.target.measurements, t.target.outcomes

    # contract outcomes first, then measurements, then preparations
    mid = [[[None] * K for _ in range(Jt)] for _ in range(I)]
    for i in range(I):
        for jt in range(Jt):
            for k in range(K):
                acc = ZERO
                for j in range(J):
                    w = t.q_M[j][jt]
                    if w and b.p[i][j][k]:
                        acc += w * b.p[i][j][k]
                mid[i][jt][k] = acc
    table = []
    for it in range(It):
        per_j = []
        for jt in range(Jt):
            row = []
            for kt in range(Kt):
                acc = ZERO
                for i in range(I):
                    wp = t.q_P[i][it]
                    if not wp:
                        continue
                    inner = ZERO
                    for k in range(K):
                        wo = t.q_O[jt][kt][k]
                        if wo and mid[i][jt][k]:
                            inner += wo * mid[i][jt][k]
                    if inner:
                        acc += wp * inner
                row.append(acc)
            per_j.append(tuple(row))
        table.append(tuple(per_j))
    return behavior(t.target, table)


def _mat_mul(a, b):
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    out = []
    for r in range(rows):
        row = []
        for c in range(cols):
            acc = ZERO
            for m in range(inner):
                if a[r][m] and b[m][c]:
                    acc += a[r][m] * b[m][c]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def compose_freeops(t2: FreeOperation, t1: FreeOperation) -> FreeOperation:
    """Chained operation acting like t1 followed by t2.

    The outcome maps compose along the measurement routing of t2:
    q_O^(jhat) = sum_jt q_M2(jt|jhat) q_O2^(jhat) q_O1^(jt).  When the
    intermediate routing correlates measurement choice with outcome
    processing, no single operation reproduces the chain; that case is
    detected exactly and rejected.
    """
    if t1.target.fingerprint() != t2.source.fingerprint():
        raise StructuralError("operations do not chain: t1.target != t2.source")
    I, J, K = t1.source.preparations, t1.source.measurements, t1.source.outcomes
    Jm, Km = t1.target.measurements, t1.target.outcomes
    Jh, Kh = t2.target.measurements, t2.target.outcomes

    q_P = _mat_mul(t1.q_P, t2.q_P)
    q_M = _mat_mul(t1.q_M, t2.q_M)
    q_O = []
    for jh in range(Jh):
        acc = [[ZERO] * K for _ in range(Kh)]
        for jt in range(Jm):
            w = t2.q_M[jt][jh]
            if not w:
                continue
            prod = _mat_mul(t2.q_O[jh], t1.q_O[jt])
            for kh in range(Kh):
                for k in range(K):
                    if prod[kh][k]:
                        acc[kh][k] += w * prod[kh][k]
        q_O.append(tuple(tuple(row) for row in acc))
    q_O = tuple(q_O)

    # Exact factorization check: the chained (outcome, measurement)
    # coupling must be the product of the composed maps.
    for jh in range(Jh):
        for j in range(J):
            for kh in range(Kh):
                for k in range(K):
                    chained = ZERO
                    for jt in range(Jm):
                        w = t2.q_M[jt][jh] * t1.q_M[j][jt]
                        if not w:
                            continue
                        inner = ZERO
                        for kt in range(Km):
                            if t2.q_O[jh][kh][kt] and t1.q_O[jt][kt][k]:
                                inner += t2.q_O[jh][kh][kt] * t1.q_O[jt][kt][k]
                        if inner:
                            chained += w * inner
                    if chained != q_M[j][jh] * q_O[jh][kh][k]:
                        raise CompositionError(
                            "chained operation is not expressible as a single "
                            "free operation (measurement routing correlates "
                            "with outcome processing)"
                        )

    composed = FreeOperation(t1.source, t2.target, q_P, q_M, q_O)
    rep = validate_freeop(composed)
    if not rep.ok:
        raise CompositionError("; ".join(rep.violations))
    return composed


# ---------------------------------------------------------------------------
# Seeded sampling
# ---------------------------------------------------------------------------


def _meas_equivalence_for_maps(rng, q_M, q_O, J, K, Jt, Kt, tries=60):
    """Target event mixtures whose lifts carry equal mass.

    The lifted mass of a target event mixture v is v . rho with
    rho[(kt|jt)] = sum_k q_O^(jt)(kt|k); the pair is built directly on
    that constraint and then stirred with a shared random vector.
    """
    n = Jt * Kt
    rho = [
        sum((q_O[jt][kt][k] for k in range(K)), ZERO)
        for jt in range(Jt)
        for kt in range(Kt)
    ]
    for _ in range(tries):
        order = sorted(range(n), key=lambda e: rho[e])
        lo, hi = order[0], order[-1]
        base = None
        if rho[lo] == rho[hi]:
            e1, e2 = rng.sample(range(n), 2)
            alpha0 = tuple(ONE if e == e1 else ZERO for e in range(n))
            beta0 = tuple(ONE if e == e2 else ZERO for e in range(n))
            base = (alpha0, beta0)
        elif n > 2:
            # point mass on a middle event vs the matching lo/hi blend;
            # with only two events of unequal mass no nontrivial pair exists
            e_mid = rng.choice(order[1:-1])
            x = (rho[e_mid] - rho[lo]) / (rho[hi] - rho[lo])
            alpha0 = tuple(ONE if e == e_mid else ZERO for e in range(n))
            beta0 = tuple(
                x if e == hi else (1 - x) if e == lo else ZERO for e in range(n)
            )
            base = (alpha0, beta0)
        if base is None:
            continue
        alpha0, beta0 = base
        w = Q(rng.randint(0, 3), 8)
        if w:
            noise = rand_prob_vector(rng, n)
            alpha = tuple((1 - w) * a + w * g for a, g in zip(alpha0, noise))
            beta = tuple((1 - w) * bb + w * g for bb, g in zip(beta0, noise))
        else:
            alpha, beta = alpha0, beta0
        if alpha != beta:
            return alpha, beta
    return None


def _rand_equal_rowsum_stochastic(rng, n_out: int, n_in: int, moves: int = 12):
    """Column-stochastic matrix whose rows all sum to n_in/n_out.

    Start from the flat matrix and apply mass-preserving 2x2 swaps; both
    row and column sums are invariant, so measurement-equivalence lifts
    through this map keep their mass.
    """
    mat = [[Q(1, n_out) for _ in range(n_in)] for _ in range(n_out)]
    if n_out >= 2 and n_in >= 2:
        for _ in range(moves):
            r1, r2 = rng.sample(range(n_out), 2)
            c1, c2 = rng.sample(range(n_in), 2)
            cap = min(mat[r1][c2], mat[r2][c1])
            if cap == 0:
                continue
            eps = cap * Q(rng.randint(0, 4), 4)
            if eps == 0:
                continue
            mat[r1][c1] += eps
            mat[r2][c2] += eps
            mat[r1][c2] -= eps
            mat[r2][c1] -= eps
    return tuple(tuple(row) for row in mat)


def sample_random_freeop(
    target_dims,
    seed: int,
    source_dims=None,
    n_prep_eq: int | None = None,
    n_meas_eq: int | None = None,
    max_tries: int = 500,
):
    """Seeded draw of a valid operation plus its scenarios.

    Target equivalences are drawn first; the source scenario is then
    induced through the maps, so validation passes by construction.
    Deterministic per seed.
    """
    rng = random.Random(seed)
    It, Jt, Kt = target_dims
    if source_dims is None:
        source_dims = (rng.randint(1, 4), rng.randint(1, 3), rng.randint(2, 3))
    I, J, K = source_dims
    if n_prep_eq is None:
        n_prep_eq = rng.randint(0, 2) if min(I, It) >= 2 else 0
    if n_meas_eq is None:
        n_meas_eq = rng.randint(0, 1)
    if n_prep_eq and min(I, It) < 2:
        raise InvalidInputError("preparation equivalences need I >= 2 on both sides")

    for _ in range(max_tries):
        q_P = rand_column_stochastic(rng, I, It)
        q_M = rand_column_stochastic(rng, J, Jt)
        q_O = tuple(rand_column_stochastic(rng, Kt, K) for _ in range(Jt))

        try:
            target_preps = []
            for _ in range(n_prep_eq):
                while True:
                    a = rand_prob_vector(rng, It)
                    b = rand_prob_vector(rng, It)
                    if a != b:
                        target_preps.append(PrepEquivalence(a, b))
                        break
            target_meas = []
            ok = True
            for _ in range(n_meas_eq):
                pair = _meas_equivalence_for_maps(rng, q_M, q_O, J, K, Jt, Kt)
                if pair is None:
                    ok = False
                    break
                target_meas.append(MeasEquivalence(*pair))
            if not ok:
                continue
            src_preps, src_meas = lift_equivalences(
                q_P, q_M, q_O, target_preps, target_meas, (I, J, K, It, Jt, Kt)
            )
            src = scenario(I, J, K, src_preps, src_meas)
            tgt = scenario(It, Jt, Kt, target_preps, target_meas)
        except InvalidInputError:
            continue
        op = FreeOperation(src, tgt, q_P, q_M, q_O)
        if validate_freeop(op).ok:
            return op, src, tgt
    raise RejectionBudgetError(
        f"no valid operation found in {max_tries} attempts for dims {target_dims}"
    )


def sample_composable_pair(
    source_dims,
    mid_dims,
    target_dims,
    seed: int,
    n_prep_eq: int = 1,
    n_meas_eq: int = 0,
    structure: str | None = None,
    max_tries: int = 500,
):
    """Seeded pair (t1, t2) with t1.target == t2.source that composes
    into a single free operation.

    A chain factorizes exactly when either the first stage applies the
    same outcome map to every intermediate measurement
    ("shared_outcome") or the second stage routes each target
    measurement to a single intermediate one ("deterministic_routing");
    the generator draws within these two families.  When measurement
    equivalences are requested, the first-stage outcome maps keep equal
    row sums so the equivalence masses survive the second lift.
    """
    rng = random.Random(seed)
    if structure is None:
        structure = rng.choice(["shared_outcome", "deterministic_routing"])
    if structure not in ("shared_outcome", "deterministic_routing"):
        raise InvalidInputError(f"unknown pair structure {structure!r}")
    I, J, K = source_dims
    Im, Jm, Km = mid_dims
    Ih, Jh, Kh = target_dims
    if n_prep_eq and min(I, Im, Ih) < 2:
        raise InvalidInputError("preparation equivalences need I >= 2 throughout")

    for _ in range(max_tries):
        # second stage: mid -> target
        q_P2 = rand_column_stochastic(rng, Im, Ih)
        if structure == "deterministic_routing":
            cols = [rng.randrange(Jm) for _ in range(Jh)]
            q_M2 = tuple(
                tuple(ONE if cols[c] == r else ZERO for c in range(Jh))
                for r in range(Jm)
            )
        else:
            q_M2 = rand_column_stochastic(rng, Jm, Jh)
        q_O2 = tuple(rand_column_stochastic(rng, Kh, Km) for _ in range(Jh))

        # first stage maps: source -> mid
        q_P1 = rand_column_stochastic(rng, I, Im)
        q_M1 = rand_column_stochastic(rng, J, Jm)
        if structure == "shared_outcome":
            one = (
                _rand_equal_rowsum_stochastic(rng, Km, K)
                if n_meas_eq
                else rand_column_stochastic(rng, Km, K)
            )
            q_O1 = tuple(one for _ in range(Jm))
        else:
            maker = (
                (lambda: _rand_equal_rowsum_stochastic(rng, Km, K))
                if n_meas_eq
                else (lambda: rand_column_stochastic(rng, Km, K))
            )
            q_O1 = tuple(maker() for _ in range(Jm))

        try:
            target_preps = []
            for _ in range(n_prep_eq):
                a, b = None, None
                while a is None or a == b:
                    a = rand_prob_vector(rng, Ih)
                    b = rand_prob_vector(rng, Ih)
                target_preps.append(PrepEquivalence(a, b))
            target_meas = []
            ok = True
            for _ in range(n_meas_eq):
                pair = _meas_equivalence_for_maps(rng, q_M2, q_O2, Jm, Km, Jh, Kh)
                if pair is None:
                    ok = False
                    break
                target_meas.append(MeasEquivalence(*pair))
            if not ok:
                continue
            mid_preps, mid_meas = lift_equivalences(
                q_P2, q_M2, q_O2, target_preps, target_meas, (Im, Jm, Km, Ih, Jh, Kh)
            )
            mid = scenario(Im, Jm, Km, mid_preps, mid_meas)
            tgt = scenario(Ih, Jh, Kh, target_preps, target_meas)
            src_preps, src_meas = lift_equivalences(
                q_P1, q_M1, q_O1, mid_preps, mid_meas, (I, J, K, Im, Jm, Km)
            )
            src = scenario(I, J, K, src_preps, src_meas)
        except InvalidInputError:
            continue
        t1 = FreeOperation(src, mid, q_P1, q_M1, q_O1)
        t2 = FreeOperation(mid, tgt, q_P2, q_M2, q_O2)
        if validate_freeop(t1).ok and validate_freeop(t2).ok:
            return t1, t2
    raise RejectionBudgetError(
        f"no composable pair found in {max_tries} attempts (structure={structure})"
    )
