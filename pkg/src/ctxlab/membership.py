"""Membership of a behavior in the noncontextual set NC(S).

A behavior is noncontextual exactly when weights mu[i][kappa] over the
assignment-polytope vertices exist with

    mu[i][kappa] >= 0,
    sum_kappa mu[i][kappa] = 1                       for every i,
    sum_i (alpha_i^s - beta_i^s) mu[i][kappa] = 0    for every s, kappa,
    sum_kappa xi[kappa][(j,k)] mu[i][kappa] = p(k|j,i) for all (i,j,k).

The feasibility LP is solved with a zero objective in exact mode, so
the model or the Farkas witness is exact and can be treated as ground
truth.  Witness rows follow the order: normalization rows by i, then
preparation-equivalence rows by (s, kappa), then reproduction rows by
(i, j, k) row-major.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError, StructuralError
from .linprog import LinearProgram, LpOutcome, linear_program, solve, verify_farkas
from .model import Behavior, Scenario, event_index, validate_behavior
from .polytope import VertexSet
from .rational import ONE, ZERO


@dataclass(frozen=True)
class NCModel:
    mu: tuple  # mu[i][kappa]


@dataclass(frozen=True)
class MembershipResult:
    noncontextual: bool
    model: NCModel | None = None
    witness: tuple | None = None  # Farkas multipliers over the LP rows


def _require_fresh(s: Scenario, v: VertexSet) -> None:
    if v.fingerprint != s.fingerprint():
        raise StructuralError("vertex set was enumerated for a different scenario")


def membership_lp(s: Scenario, b: Behavior, v: VertexSet) -> LinearProgram:
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    n = I * V
    rows = []
    rhs = []
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
    for i in range(I):
        for j in range(J):
            for k in range(K):
                e = event_index(j, k, K)
                row = [ZERO] * n
                for kap in range(V):
                    xi = v.vertices[kap].xi[e]
                    if xi:
                        row[i * V + kap] = xi
                rows.append(row)
                rhs.append(b.p[i][j][k])
    return linear_program([ZERO] * n, sense="min", eq=rows, eq_rhs=rhs)


def check_membership(
    s: Scenario, b: Behavior, v: VertexSet, mode: str = "exact"
) -> MembershipResult:
    """Constructive noncontextual model, or a Farkas witness of contextuality."""
    _require_fresh(s, v)
    report = validate_behavior(s, b)
    if not report.ok:
        raise InvalidInputError("; ".join(report.violations))
    lp = membership_lp(s, b, v)
    out = solve(lp, mode)
    if out.status == "optimal":
        if mode != "exact":  # float lane answers the question, no certificate
            return MembershipResult(noncontextual=True)
        V = len(v.vertices)
        mu = tuple(
            tuple(out.primal[i * V + kap] for kap in range(V))
            for i in range(s.preparations)
        )
        return MembershipResult(noncontextual=True, model=NCModel(mu))
    if out.status == "infeasible":
        if mode != "exact":
            return MembershipResult(noncontextual=False)
        return MembershipResult(noncontextual=False, witness=out.dual_eq)
    raise StructuralError(f"membership LP ended with status {out.status}")


def model_image(s: Scenario, v: VertexSet, m: NCModel) -> Behavior:
    """Behavior reproduced by a model: p(k|j,i) = sum_kappa xi mu."""
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    table = []
    for i in range(I):
        per_j = []
        for j in range(J):
            row = []
            for k in range(K):
                e = event_index(j, k, K)
                acc = ZERO
                for kap in range(V):
                    xi = v.vertices[kap].xi[e]
                    w = m.mu[i][kap]
                    if xi and w:
                        acc += xi * w
                row.append(acc)
            per_j.append(tuple(row))
        table.append(tuple(per_j))
    return Behavior(s, tuple(table))


def verify_model(s: Scenario, b: Behavior, v: VertexSet, m: NCModel) -> bool:
    """Exact check of all four model invariant families."""
    _require_fresh(s, v)
    I = s.preparations
    V = len(v.vertices)
    if len(m.mu) != I or any(len(m.mu[i]) != V for i in range(I)):
        return False
    for i in range(I):
        if any(w < 0 for w in m.mu[i]):
            return False
        if sum(m.mu[i], ZERO) != ONE:
            return False
    for eq in s.prep_equivalences:
        for kap in range(V):
            acc = ZERO
            for i in range(I):
                acc += (eq.alpha[i] - eq.beta[i]) * m.mu[i][kap]
            if acc != 0:
                return False
    return model_image(s, v, m).p == b.p


def verify_witness(s: Scenario, b: Behavior, v: VertexSet, witness) -> bool:
    """Exact Farkas verification of a contextuality witness."""
    lp = membership_lp(s, b, v)
    out = LpOutcome(status="infeasible", dual_eq=tuple(witness), dual_ineq=())
    return verify_farkas(lp, out)
