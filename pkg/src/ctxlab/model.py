"""Scenarios, behaviors and operational equivalences.

A scenario fixes the number of preparations I, measurements J and
outcomes K, together with two families of operational equivalences:
convex mixtures of preparations that produce identical statistics, and
convex mixtures of measurement events that do.  A behavior is the table
p(k|j,i) of outcome probabilities.  Everything is exact-rational and
immutable; operations are pure functions.

Measurement events are flattened j-major: event (k|j) lives at index
j*K + k in every event-indexed vector.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import InvalidInputError, StructuralError
from .rational import ONE, Q, ZERO, as_rational, format_rational


def event_index(j: int, k: int, K: int) -> int:
    return j * K + k


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:  # truthy == valid, mirrors `if report:` guards
        return self.ok


@dataclass(frozen=True)
class PrepEquivalence:
    """Mixture coefficients alpha, beta over preparations with equal statistics."""

    alpha: tuple
    beta: tuple


@dataclass(frozen=True)
class MeasEquivalence:
    """Mixture coefficients over measurement events, flattened j-major."""

    alpha: tuple
    beta: tuple


def _canonical_pair(alpha, beta, what: str):
    a = tuple(as_rational(x) for x in alpha)
    b = tuple(as_rational(x) for x in beta)
    if any(x < 0 for x in a) or any(x < 0 for x in b):
        raise InvalidInputError(f"{what}: negative coefficient")
    mass_a = sum(a, ZERO)
    mass_b = sum(b, ZERO)
    if mass_a == 0 or mass_b == 0:
        raise InvalidInputError(f"{what}: zero total mass")
    if mass_a != mass_b:
        raise InvalidInputError(
            f"{what}: unequal total mass {format_rational(mass_a)} vs "
            f"{format_rational(mass_b)}"
        )
    a = tuple(x / mass_a for x in a)
    b = tuple(x / mass_b for x in b)
    if a == b:
        raise InvalidInputError(f"{what}: trivial equivalence (alpha == beta)")
    return a, b


def prep_equivalence(alpha, beta) -> PrepEquivalence:
    """Canonicalize to unit mass; rejects unequal-mass or trivial pairs."""
    a, b = _canonical_pair(alpha, beta, "preparation equivalence")
    return PrepEquivalence(a, b)


def meas_equivalence(alpha, beta) -> MeasEquivalence:
    a, b = _canonical_pair(alpha, beta, "measurement equivalence")
    return MeasEquivalence(a, b)


@dataclass(frozen=True)
class Scenario:
    preparations: int
    measurements: int
    outcomes: int
    prep_equivalences: tuple = ()
    meas_equivalences: tuple = ()

    @property
    def n_events(self) -> int:
        return self.measurements * self.outcomes

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.preparations}|{self.measurements}|{self.outcomes}".encode())
        for eq in self.prep_equivalences:
            h.update(b"P" + _vec_bytes(eq.alpha) + b";" + _vec_bytes(eq.beta))
        for eq in self.meas_equivalences:
            h.update(b"M" + _vec_bytes(eq.alpha) + b";" + _vec_bytes(eq.beta))
        return h.hexdigest()


def _vec_bytes(vec) -> bytes:
    return ",".join(format_rational(x) for x in vec).encode()


def scenario(I: int, J: int, K: int, prep_equivalences=(), meas_equivalences=()) -> Scenario:
    s = Scenario(I, J, K, tuple(prep_equivalences), tuple(meas_equivalences))
    report = validate_scenario(s)
    if not report.ok:
        raise InvalidInputError("; ".join(report.violations))
    return s


def validate_scenario(s: Scenario) -> ValidationReport:
    """Every violated invariant gets one line; an empty report means valid."""
    bad: list[str] = []
    if s.preparations < 1 or s.measurements < 1 or s.outcomes < 1:
        bad.append("dimensions must all be at least 1")
    for label, eqs, dim in (
        ("prep", s.prep_equivalences, s.preparations),
        ("meas", s.meas_equivalences, s.n_events),
    ):
        for idx, eq in enumerate(eqs):
            name = f"{label} equivalence {idx}"
            if len(eq.alpha) != dim or len(eq.beta) != dim:
                bad.append(f"{name}: wrong dimension")
                continue
            if any(x < 0 for x in eq.alpha) or any(x < 0 for x in eq.beta):
                bad.append(f"{name}: negative coefficient")
            mass_a = sum(eq.alpha, ZERO)
            mass_b = sum(eq.beta, ZERO)
            if mass_a != mass_b:
                bad.append(f"{name}: unequal equivalence mass")
            elif mass_a != ONE:
                bad.append(f"{name}: mass not canonicalized to 1")
            if eq.alpha == eq.beta:
                bad.append(f"{name}: trivial equivalence")
    return ValidationReport(tuple(bad))


@dataclass(frozen=True)
class Behavior:
    """The table p[i][j][k] of outcome probabilities, tied to its scenario."""

    scenario: Scenario
    p: tuple  # p[i][j][k], exact rationals

    def row(self, i: int, j: int):
        return self.p[i][j]


def behavior(scn: Scenario, table) -> Behavior:
    I, J, K = scn.preparations, scn.measurements, scn.outcomes
    if len(table) != I:
        raise StructuralError(f"expected {I} preparations, got {len(table)}")
    rows = []
    for i in range(I):
        if len(table[i]) != J:
            raise StructuralError(f"preparation {i}: expected {J} measurements")
        per_j = []
        for j in range(J):
            if len(table[i][j]) != K:
                raise StructuralError(f"entry ({i},{j}): expected {K} outcomes")
            per_j.append(tuple(as_rational(x) for x in table[i][j]))
        rows.append(tuple(per_j))
    b = Behavior(scn, tuple(rows))
    report = validate_behavior(scn, b)
    if not report.ok:
        raise InvalidInputError("; ".join(report.violations))
    return b


def validate_behavior(s: Scenario, b: Behavior) -> ValidationReport:
    I, J, K = s.preparations, s.measurements, s.outcomes
    if len(b.p) != I or any(len(b.p[i]) != J for i in range(I)) or any(
        len(b.p[i][j]) != K for i in range(I) for j in range(J)
    ):
        raise StructuralError("behavior dimensions do not match scenario")
    bad: list[str] = []
    for i in range(I):
        for j in range(J):
            row = b.p[i][j]
            if any(x < 0 for x in row):
                bad.append(f"negative probability at (i={i}, j={j})")
            if sum(row, ZERO) != ONE:
                bad.append(f"row not normalized at (i={i}, j={j})")
    for sidx, eq in enumerate(s.prep_equivalences):
        for j in range(J):
            for k in range(K):
                lhs = sum((eq.alpha[i] - eq.beta[i]) * b.p[i][j][k] for i in range(I))
                if lhs != 0:
                    bad.append(f"prep equivalence {sidx} broken at (j={j}, k={k})")
    for ridx, eq in enumerate(s.meas_equivalences):
        for i in range(I):
            lhs = ZERO
            for j in range(J):
                for k in range(K):
                    e = event_index(j, k, K)
                    lhs += (eq.alpha[e] - eq.beta[e]) * b.p[i][j][k]
            if lhs != 0:
                bad.append(f"meas equivalence {ridx} broken at i={i}")
    return ValidationReport(tuple(bad))


def uniform_behavior(s: Scenario) -> Behavior:
    """p = 1/K everywhere; valid in every scenario."""
    u = Q(1, s.outcomes)
    row = (u,) * s.outcomes
    per_i = tuple((row,) * s.measurements for _ in range(s.preparations))
    return Behavior(s, per_i)


def behaviors_equal(b1: Behavior, b2: Behavior) -> bool:
    return b1.p == b2.p


# ---------------------------------------------------------------------------
# Juxtaposition (independent parallel composition)
# ---------------------------------------------------------------------------


def juxtapose(s1: Scenario, b1: Behavior, s2: Scenario, b2: Behavior):
    """Product scenario and product behavior.

    Indices flatten row-major with the first factor most significant:
    i = i1*I2 + i2, j = j1*J2 + j2, k = k1*K2 + k2.  Each factor
    equivalence is lifted once per fixed index of the other factor.
    """
    for s, b in ((s1, b1), (s2, b2)):
        rep = validate_behavior(s, b)
        if not rep.ok:
            raise InvalidInputError("; ".join(rep.violations))
    I1, J1, K1 = s1.preparations, s1.measurements, s1.outcomes
    I2, J2, K2 = s2.preparations, s2.measurements, s2.outcomes
    I, J, K = I1 * I2, J1 * J2, K1 * K2

    prep_eqs = []
    for eq in s1.prep_equivalences:
        for i2 in range(I2):
            alpha = [ZERO] * I
            beta = [ZERO] * I
            for i1 in range(I1):
                alpha[i1 * I2 + i2] = eq.alpha[i1]
                beta[i1 * I2 + i2] = eq.beta[i1]
            prep_eqs.append(PrepEquivalence(tuple(alpha), tuple(beta)))
    for eq in s2.prep_equivalences:
        for i1 in range(I1):
            alpha = [ZERO] * I
            beta = [ZERO] * I
            for i2 in range(I2):
                alpha[i1 * I2 + i2] = eq.alpha[i2]
                beta[i1 * I2 + i2] = eq.beta[i2]
            prep_eqs.append(PrepEquivalence(tuple(alpha), tuple(beta)))

    meas_eqs = []
    for eq in s1.meas_equivalences:
        for j2 in range(J2):
            for k2 in range(K2):
                alpha = [ZERO] * (J * K)
                beta = [ZERO] * (J * K)
                for j1 in range(J1):
                    for k1 in range(K1):
                        e1 = event_index(j1, k1, K1)
                        e = event_index(j1 * J2 + j2, k1 * K2 + k2, K)
                        alpha[e] = eq.alpha[e1]
                        beta[e] = eq.beta[e1]
                meas_eqs.append(MeasEquivalence(tuple(alpha), tuple(beta)))
    for eq in s2.meas_equivalences:
        for j1 in range(J1):
            for k1 in range(K1):
                alpha = [ZERO] * (J * K)
                beta = [ZERO] * (J * K)
                for j2 in range(J2):
                    for k2 in range(K2):
                        e2 = event_index(j2, k2, K2)
                        e = event_index(j1 * J2 + j2, k1 * K2 + k2, K)
                        alpha[e] = eq.alpha[e2]
                        beta[e] = eq.beta[e2]
                meas_eqs.append(MeasEquivalence(tuple(alpha), tuple(beta)))

    product = Scenario(I, J, K, tuple(prep_eqs), tuple(meas_eqs))

    table = []
    for i1 in range(I1):
        for i2 in range(I2):
            per_j = []
            for j1 in range(J1):
                for j2 in range(J2):
                    row = []
                    for k1 in range(K1):
                        for k2 in range(K2):
                            row.append(b1.p[i1][j1][k1] * b2.p[i2][j2][k2])
                    per_j.append(tuple(row))
            table.append(tuple(per_j))
    return product, Behavior(product, tuple(table))
