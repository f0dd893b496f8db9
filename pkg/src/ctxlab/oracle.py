"""Independent brute-force path for cross-checking the main pipeline.

Instead of the model-weight feasibility LP, this module enumerates the
extreme points of the full noncontextual behavior polytope (the images
of the model-weight polytope's vertices) and answers membership as an
exact convex-combination problem over that hull.  Robustness is
re-derived by bisection over the mixing weight.  A bug now has to
happen twice, in two different formulations, to go unnoticed.

Desk-scale only by design: the hull blows up quickly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError, StructuralError
from .linprog import linear_program, solve_exact
from .membership import NCModel, model_image, _require_fresh
from .model import Behavior, Scenario, validate_behavior
from .polytope import VertexSet, enumerate_polytope_vertices
from .rational import ONE, Q, ZERO


@dataclass(frozen=True)
class NCBehaviorHull:
    extreme_behaviors: tuple  # Behavior, lexicographically sorted by table
    fingerprint: str

    def __len__(self) -> int:
        return len(self.extreme_behaviors)


def enumerate_nc_hull(s: Scenario, v: VertexSet, budget: int | None = None) -> NCBehaviorHull:
    """Vertices of the model-weight polytope mapped to behaviors."""
    _require_fresh(s, v)
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
    points = enumerate_polytope_vertices(rows, rhs, budget=budget)
    seen = {}
    for pt in points:
        model = NCModel(tuple(tuple(pt[i * V + kap] for kap in range(V)) for i in range(I)))
        img = model_image(s, v, model)
        seen[img.p] = img
    ordered = tuple(seen[key] for key in sorted(seen))
    return NCBehaviorHull(ordered, s.fingerprint())


def _flat(b: Behavior):
    return [x for rows in b.p for row in rows for x in row]


def oracle_membership(h: NCBehaviorHull, b: Behavior) -> bool:
    """Is b an exact convex combination of the extreme behaviors?"""
    if h.fingerprint != b.scenario.fingerprint():
        raise StructuralError("hull was enumerated for a different scenario")
    T = len(h.extreme_behaviors)
    target = _flat(b)
    n_rows = len(target)
    rows = [[ONE] * T]
    rhs = [ONE]
    columns = [_flat(e) for e in h.extreme_behaviors]
    for r in range(n_rows):
        rows.append([columns[t][r] for t in range(T)])
        rhs.append(target[r])
    lp = linear_program([ZERO] * T, sense="min", eq=rows, eq_rhs=rhs)
    return solve_exact(lp).status == "optimal"


def oracle_contextual_fraction(h: NCBehaviorHull, b: Behavior):
    """Hull-form contextual fraction: the largest hull mass fitting
    under b entrywise."""
    if h.fingerprint != b.scenario.fingerprint():
        raise StructuralError("hull was enumerated for a different scenario")
    T = len(h.extreme_behaviors)
    target = _flat(b)
    columns = [_flat(e) for e in h.extreme_behaviors]
    ineq = [[columns[t][r] for t in range(T)] for r in range(len(target))]
    lp = linear_program(
        [ONE] * T, sense="max", ineq=ineq, ineq_rhs=target,
    )
    out = solve_exact(lp)
    if out.status != "optimal":
        raise StructuralError(f"hull contextual-fraction LP: {out.status}")
    return 1 - out.objective_value


def _mixture_feasible(h: NCBehaviorHull, b: Behavior, lam) -> bool:
    """Can lam * (hull point) + (1 - lam) * b land back in the hull?"""
    T = len(h.extreme_behaviors)
    target = _flat(b)
    columns = [_flat(e) for e in h.extreme_behaviors]
    n = 2 * T
    rows = [[ONE] * T + [ZERO] * T, [ZERO] * T + [ONE] * T]
    rhs = [Q(lam), ONE]
    for r in range(len(target)):
        rows.append(
            [columns[t][r] for t in range(T)] + [-columns[t][r] for t in range(T)]
        )
        rhs.append(-(1 - Q(lam)) * target[r])
    lp = linear_program([ZERO] * n, sense="min", eq=rows, eq_rhs=rhs)
    return solve_exact(lp).status == "optimal"


def oracle_robustness(s: Scenario, b: Behavior, v: VertexSet, eps=Q(1, 10**9)):
    """Bisection over the mixing weight; each step one exact hull LP.

    Returns the feasible upper end of the final bracket, so the result
    sits within eps above the true minimum.
    """
    if Q(eps) <= 0:
        raise InvalidInputError("eps must be positive")
    _require_fresh(s, v)
    rep = validate_behavior(s, b)
    if not rep.ok:
        raise InvalidInputError("; ".join(rep.violations))
    h = enumerate_nc_hull(s, v)
    if oracle_membership(h, b):
        return ZERO
    lo, hi = ZERO, ONE  # hi = 1 always lands on the hull point itself
    eps = Q(eps)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if _mixture_feasible(h, b, mid):
            hi = mid
        else:
            lo = mid
    return hi
