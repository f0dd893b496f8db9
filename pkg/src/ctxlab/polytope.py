"""Extremal points of the noncontextual measurement-assignment polytope.

The polytope lives in R^(J*K) with coordinates indexed j-major by
measurement event:

    xi >= 0,   sum_k xi[j*K+k] = 1 for each j,
    sum_events (alpha^r - beta^r) . xi = 0 for each measurement
    equivalence r.

Vertices are found by enumerating basic feasible solutions of the
equality system over exact rationals: every subset of rank-many
independent columns yields at most one candidate, nonnegative
candidates are kept, duplicates (degenerate vertices) collapse to one.
No epsilon appears anywhere in this module.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

from . import exactla
from .errors import BudgetExceededError, InvalidInputError, StructuralError
from .model import Scenario, ValidationReport, event_index, validate_scenario
from .rational import Q, ZERO

DEFAULT_BASIS_BUDGET = 10**7
_BUDGET_ENV = "CTXLAB_BASIS_BUDGET"


def basis_budget() -> int:
    raw = os.environ.get(_BUDGET_ENV)
    if raw is None:
        return DEFAULT_BASIS_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise StructuralError(f"{_BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise StructuralError(f"{_BUDGET_ENV} must be positive")
    return value


@dataclass(frozen=True)
class AssignmentVertex:
    xi: tuple  # length J*K, entry at j*K+k is the response probability of (k|j)


@dataclass(frozen=True)
class VertexSet:
    vertices: tuple  # AssignmentVertex, lexicographically sorted, no duplicates
    fingerprint: str

    def __len__(self) -> int:
        return len(self.vertices)


def enumerate_polytope_vertices(matrix, rhs, budget: int | None = None, workers: int = 1):
    """All vertices of {x >= 0 : matrix x = rhs}, assumed bounded.

    Returns a lexicographically sorted, duplicate-free list of rational
    tuples.  Raises BudgetExceededError before touching more bases than
    the budget allows; never truncates silently.
    """
    if budget is None:
        budget = basis_budget()
    n = len(matrix[0]) if matrix else 0
    reduced, red_rhs, pivots, consistent = exactla.row_reduce(matrix, rhs)
    if not consistent:
        return []
    r = len(reduced)
    if r == 0:
        # only x = rhs-free system: the origin when rhs consistent, but a
        # nonempty bounded polytope with no equalities must be {0}
        return [tuple([ZERO] * n)] if n else []
    n_bases = comb(n, r)
    if n_bases > budget:
        raise BudgetExceededError(
            f"{n_bases} candidate bases exceed the budget of {budget}"
        )

    cols = [[reduced[i][j] for i in range(r)] for j in range(n)]

    def scan(chunk):
        found = {}
        for basis in chunk:
            sub = [[cols[j][i] for j in basis] for i in range(r)]
            sol = exactla.solve_square(sub, red_rhs)
            if sol is None or any(v < 0 for v in sol):
                continue
            x = [ZERO] * n
            for pos, j in enumerate(basis):
                x[j] = sol[pos]
            found[tuple(x)] = True
        return found

    all_bases = combinations(range(n), r)
    if workers <= 1:
        merged = scan(all_bases)
    else:
        chunks = []
        while True:
            chunk = list(islice(all_bases, 2048))
            if not chunk:
                break
            chunks.append(chunk)
        merged = {}
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(scan, chunks):
                merged.update(part)
    return sorted(merged)


def _assignment_system(s: Scenario):
    J, K = s.measurements, s.outcomes
    n = J * K
    matrix = []
    rhs = []
    for j in range(J):
        row = [ZERO] * n
        for k in range(K):
            row[event_index(j, k, K)] = Q(1)
        matrix.append(row)
        rhs.append(Q(1))
    for eq in s.meas_equivalences:
        matrix.append([eq.alpha[e] - eq.beta[e] for e in range(n)])
        rhs.append(ZERO)
    return matrix, rhs


def enumerate_vertices(s: Scenario, budget: int | None = None, workers: int = 1) -> VertexSet:
    """Complete vertex list of the measurement-assignment polytope.

    The constraints do not involve the ontic state, so one enumeration
    per scenario serves every membership and quantifier call.
    """
    report: ValidationReport = validate_scenario(s)
    if not report.ok:
        raise InvalidInputError("; ".join(report.violations))
    matrix, rhs = _assignment_system(s)
    points = enumerate_polytope_vertices(matrix, rhs, budget=budget, workers=workers)
    _check_vertexhood(matrix, points)
    return VertexSet(
        vertices=tuple(AssignmentVertex(tuple(p)) for p in points),
        fingerprint=s.fingerprint(),
    )


def _check_vertexhood(matrix, points) -> None:
    """Active-set rank test: equalities plus tight bounds span R^n."""
    if not points:
        return
    n = len(points[0])
    for p in points:
        active = [list(row) for row in matrix]
        for j in range(n):
            if p[j] == 0:
                unit = [ZERO] * n
                unit[j] = Q(1)
                active.append(unit)
        if exactla.rank(active) != n:
            raise StructuralError("enumerated point is not a vertex")


def vertex_count_bound(s: Scenario) -> int:
    """Binomial basis-count budget C(J*K, rank of the equality system)."""
    report = validate_scenario(s)
    if not report.ok:
        raise InvalidInputError("; ".join(report.violations))
    matrix, _ = _assignment_system(s)
    return comb(s.measurements * s.outcomes, exactla.rank(matrix))
