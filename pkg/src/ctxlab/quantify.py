"""Contextuality quantifiers: contextual fraction, robustness measures,
l1 and uniform-l1 distances, and the relative entropy of contextuality.

Every LP-based measure is a single exact linear program over the model
weights mu[i][kappa]; the bilinear robustness definition is linearized
by the substitution sigma = lambda * mu.  The relative entropy is convex
but not linear, so it is minimized by Frank-Wolfe on a log-sum-exp
smoothing of the max with a certified optimality gap; the reported value
is always evaluated with the true max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, StructuralError
from .linprog import linear_program, solve, solve_exact
from .membership import _require_fresh, check_membership, model_image, NCModel
from .model import Behavior, Scenario, event_index, validate_behavior
from .polytope import VertexSet
from .rational import ONE, Q, ZERO, rational_from_float_exact, to_float

CF = "cf"
ROBUSTNESS = "robustness"
ROBUSTNESS_REF = "robustness_ref"
L1_DISTANCE = "l1_distance"
UNIFORM_L1 = "uniform_l1"
RELATIVE_ENTROPY = "relative_entropy"


@dataclass(frozen=True)
class QuantifierReport:
    measure: str
    value: object  # rational for LP measures, float for relative entropy
    gap: float | None = None
    status: str = "ok"  # "ok" | "undefined" | "iteration_cap"
    witness: dict = field(default_factory=dict)


def _checked(s: Scenario, b: Behavior, v: VertexSet) -> None:
    _require_fresh(s, v)
    report = validate_behavior(s, b)
    if not report.ok:
        raise InvalidInputError("; ".join(report.violations))


def _mu_polytope_rows(s: Scenario, v: VertexSet, offset: int, n: int):
    """Normalization and preparation-equivalence rows for weights at
    columns offset..offset+I*V-1 of an n-column system."""
    I = s.preparations
    V = len(v.vertices)
    rows, rhs = [], []
    for i in range(I):
        row = [ZERO] * n
        for kap in range(V):
            row[offset + i * V + kap] = ONE
        rows.append(row)
        rhs.append(ONE)
    for eq in s.prep_equivalences:
        diff = [eq.alpha[i] - eq.beta[i] for i in range(I)]
        for kap in range(V):
            row = [ZERO] * n
            for i in range(I):
                if diff[i]:
                    row[offset + i * V + kap] = diff[i]
            rows.append(row)
            rhs.append(ZERO)
    return rows, rhs


def _image_rows(s: Scenario, v: VertexSet, offset: int, n: int, sign=ONE):
    """Per-(i,j,k) rows of sign * sum_kappa xi[kappa] mu[i][kappa]."""
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    out = []
    for i in range(I):
        for j in range(J):
            for k in range(K):
                e = event_index(j, k, K)
                row = [ZERO] * n
                for kap in range(V):
                    xi = v.vertices[kap].xi[e]
                    if xi:
                        row[offset + i * V + kap] = sign * xi
                out.append(row)
    return out


def _weights_to_model(primal, I: int, V: int, offset: int = 0) -> NCModel:
    return NCModel(
        tuple(tuple(primal[offset + i * V + kap] for kap in range(V)) for i in range(I))
    )


def _scale_model(m: NCModel, factor) -> NCModel:
    return NCModel(tuple(tuple(w * factor for w in row) for row in m.mu))


# ---------------------------------------------------------------------------
# Contextual fraction
# ---------------------------------------------------------------------------


def contextual_fraction(
    s: Scenario, b: Behavior, v: VertexSet, mode: str = "exact"
) -> QuantifierReport:
    """1 minus the largest noncontextual weight in a convex split of b.

    Variables sigma[i][kappa] >= 0 and the shared weight lam:
    sum_kappa sigma[i] = lam for every i, preparation rows hold per
    kappa, and the sigma image stays below b entrywise.  The residual
    part then remains a valid behavior by linearity.
    """
    _checked(s, b, v)
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    n = I * V + 1
    lam_col = I * V

    eq_rows, eq_rhs = [], []
    for i in range(I):
        row = [ZERO] * n
        for kap in range(V):
            row[i * V + kap] = ONE
        row[lam_col] = -ONE
        eq_rows.append(row)
        eq_rhs.append(ZERO)
    prep_rows, prep_rhs = _mu_polytope_rows(s, v, 0, n)
    eq_rows.extend(prep_rows[I:])  # skip its normalization rows
    eq_rhs.extend(prep_rhs[I:])

    ineq_rows = _image_rows(s, v, 0, n)
    ineq_rhs = [b.p[i][j][k] for i in range(I) for j in range(J) for k in range(K)]

    objective = [ZERO] * n
    objective[lam_col] = ONE
    lp = linear_program(
        objective, sense="max",
        eq=eq_rows, eq_rhs=eq_rhs, ineq=ineq_rows, ineq_rhs=ineq_rhs,
    )
    out = solve(lp, mode)
    if out.status != "optimal":
        raise StructuralError(f"contextual-fraction LP ended with {out.status}")
    lam = out.primal[lam_col]
    value = 1 - lam
    if mode != "exact":
        return QuantifierReport(CF, value, witness={"lambda": lam})

    witness: dict = {"lambda": lam}
    if lam > 0:
        sigma = _weights_to_model(out.primal, I, V)
        nc_model = _scale_model(sigma, 1 / lam)
        nc_part = model_image(s, v, nc_model)
        witness["nc_model"] = nc_model
        witness["nc_part"] = nc_part
        if lam < 1:
            inv = 1 / (1 - lam)
            table = tuple(
                tuple(
                    tuple(
                        (b.p[i][j][k] - lam * nc_part.p[i][j][k]) * inv
                        for k in range(K)
                    )
                    for j in range(J)
                )
                for i in range(I)
            )
            witness["residual"] = Behavior(s, table)
        else:
            witness["residual"] = b
    else:
        witness["residual"] = b
    return QuantifierReport(CF, value, witness=witness)


# ---------------------------------------------------------------------------
# Robustness measures
# ---------------------------------------------------------------------------


def robustness(
    s: Scenario, b: Behavior, v: VertexSet, mode: str = "exact"
) -> QuantifierReport:
    """Least noncontextual-noise weight lam with
    lam * B_nc + (1 - lam) * b noncontextual.

    sigma = lam * (model of B_nc) and nu models the mixture:
    image(nu) - image(sigma) = (1 - lam) * b, one exact LP.
    """
    _checked(s, b, v)
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    blk = I * V
    n = 2 * blk + 1
    lam_col = 2 * blk

    eq_rows, eq_rhs = [], []
    for i in range(I):  # sigma mass = lam
        row = [ZERO] * n
        for kap in range(V):
            row[i * V + kap] = ONE
        row[lam_col] = -ONE
        eq_rows.append(row)
        eq_rhs.append(ZERO)
    sig_prep, sig_rhs = _mu_polytope_rows(s, v, 0, n)
    eq_rows.extend(sig_prep[I:])
    eq_rhs.extend(sig_rhs[I:])
    nu_rows, nu_rhs = _mu_polytope_rows(s, v, blk, n)
    eq_rows.extend(nu_rows)
    eq_rhs.extend(nu_rhs)

    nu_img = _image_rows(s, v, blk, n)
    sig_img = _image_rows(s, v, 0, n, sign=-ONE)
    idx = 0
    for i in range(I):
        for j in range(J):
            for k in range(K):
                row = [a + c for a, c in zip(nu_img[idx], sig_img[idx])]
                row[lam_col] = b.p[i][j][k]
                eq_rows.append(row)
                eq_rhs.append(b.p[i][j][k])
                idx += 1

    objective = [ZERO] * n
    objective[lam_col] = ONE
    lp = linear_program(objective, sense="min", eq=eq_rows, eq_rhs=eq_rhs)
    out = solve(lp, mode)
    if out.status != "optimal":
        raise StructuralError(f"robustness LP ended with {out.status}")
    lam = out.primal[lam_col]
    if mode != "exact":
        return QuantifierReport(ROBUSTNESS, lam, witness={"lambda": lam})

    witness: dict = {"lambda": lam}
    mix_model = _weights_to_model(out.primal, I, V, offset=blk)
    witness["mixture_model"] = mix_model
    witness["mixture"] = model_image(s, v, mix_model)
    if lam > 0:
        noise_model = _scale_model(_weights_to_model(out.primal, I, V), 1 / lam)
        witness["noise_model"] = noise_model
        witness["noise_part"] = model_image(s, v, noise_model)
    return QuantifierReport(ROBUSTNESS, lam, witness=witness)


def robustness_ref(
    s: Scenario, b: Behavior, b_ref: Behavior, v: VertexSet, mode: str = "exact"
) -> QuantifierReport:
    """Least lam with lam * b_ref + (1 - lam) * b noncontextual, for a
    fixed noncontextual reference."""
    _checked(s, b, v)
    ref_report = validate_behavior(s, b_ref)
    if not ref_report.ok:
        raise InvalidInputError("; ".join(ref_report.violations))
    if not check_membership(s, b_ref, v).noncontextual:
        raise InvalidInputError("reference behavior is contextual")

    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    blk = I * V
    n = blk + 1
    lam_col = blk

    eq_rows, eq_rhs = _mu_polytope_rows(s, v, 0, n)
    img = _image_rows(s, v, 0, n)
    idx = 0
    for i in range(I):
        for j in range(J):
            for k in range(K):
                row = img[idx]
                row[lam_col] = b.p[i][j][k] - b_ref.p[i][j][k]
                eq_rows.append(row)
                eq_rhs.append(b.p[i][j][k])
                idx += 1
    ineq_rows = [[ZERO] * n]
    ineq_rows[0][lam_col] = ONE
    ineq_rhs = [ONE]

    objective = [ZERO] * n
    objective[lam_col] = ONE
    lp = linear_program(
        objective, sense="min",
        eq=eq_rows, eq_rhs=eq_rhs, ineq=ineq_rows, ineq_rhs=ineq_rhs,
    )
    out = solve(lp, mode)
    if out.status == "infeasible":
        return QuantifierReport(ROBUSTNESS_REF, None, status="undefined")
    if out.status != "optimal":
        raise StructuralError(f"reference-robustness LP ended with {out.status}")
    lam = out.primal[lam_col]
    if mode != "exact":
        return QuantifierReport(ROBUSTNESS_REF, lam, witness={"lambda": lam})
    mix_model = _weights_to_model(out.primal, I, V)
    return QuantifierReport(
        ROBUSTNESS_REF,
        lam,
        witness={
            "lambda": lam,
            "mixture_model": mix_model,
            "mixture": model_image(s, v, mix_model),
        },
    )


# ---------------------------------------------------------------------------
# Distance measures
# ---------------------------------------------------------------------------


def l1_behavior_distance(b1: Behavior, b2: Behavior):
    """max over (i,j) of sum_k |p1 - p2| (exact)."""
    s1, s2 = b1.scenario, b2.scenario
    if (s1.preparations, s1.measurements, s1.outcomes) != (
        s2.preparations, s2.measurements, s2.outcomes,
    ):
        raise StructuralError("behaviors have different shapes")
    worst = ZERO
    for rows1, rows2 in zip(b1.p, b2.p):
        for row1, row2 in zip(rows1, rows2):
            total = sum((abs(a - c) for a, c in zip(row1, row2)), ZERO)
            if total > worst:
                worst = total
    return worst


def _distance_lp(s: Scenario, b: Behavior, v: VertexSet, uniform: bool):
    """Shared epigraph construction for the two l1-based distances."""
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    blk = I * V
    n_e = I * J * K
    n = blk + n_e + (0 if uniform else 1)
    t_col = blk + n_e

    eq_rows, eq_rhs = _mu_polytope_rows(s, v, 0, n)

    ineq_rows, ineq_rhs = [], []
    img = _image_rows(s, v, 0, n)
    idx = 0
    for i in range(I):
        for j in range(J):
            for k in range(K):
                e_col = blk + idx
                # p - image(mu) <= e
                row = [-a for a in img[idx]]
                row[e_col] = -ONE
                ineq_rows.append(row)
                ineq_rhs.append(-b.p[i][j][k])
                # image(mu) - p <= e
                row = list(img[idx])
                row[e_col] = -ONE
                ineq_rows.append(row)
                ineq_rhs.append(b.p[i][j][k])
                idx += 1
    if not uniform:
        for i in range(I):
            for j in range(J):
                row = [ZERO] * n
                for k in range(K):
                    row[blk + (i * J + j) * K + k] = ONE
                row[t_col] = -ONE
                ineq_rows.append(row)
                ineq_rhs.append(ZERO)

    objective = [ZERO] * n
    if uniform:
        w = Q(1, 2 * I * J)
        for idx in range(n_e):
            objective[blk + idx] = w
    else:
        objective[t_col] = ONE
    return linear_program(
        objective, sense="min",
        eq=eq_rows, eq_rhs=eq_rhs, ineq=ineq_rows, ineq_rhs=ineq_rhs,
    )


def l1_contextuality_distance(
    s: Scenario, b: Behavior, v: VertexSet, mode: str = "exact"
) -> QuantifierReport:
    """min over noncontextual b' of max_(i,j) sum_k |p - p'|."""
    _checked(s, b, v)
    lp = _distance_lp(s, b, v, uniform=False)
    out = solve(lp, mode)
    if out.status != "optimal":
        raise StructuralError(f"l1-distance LP ended with {out.status}")
    if mode != "exact":
        return QuantifierReport(L1_DISTANCE, out.objective_value)
    I, V = s.preparations, len(v.vertices)
    closest_model = _weights_to_model(out.primal, I, V)
    return QuantifierReport(
        L1_DISTANCE,
        out.objective_value,
        witness={
            "closest_model": closest_model,
            "closest": model_image(s, v, closest_model),
        },
    )


def uniform_l1_distance(
    s: Scenario, b: Behavior, v: VertexSet, mode: str = "exact"
) -> QuantifierReport:
    """Average form: min over noncontextual b' of
    sum_(i,j,k) |p - p'| / (2 I J).  Faithful and subadditive, but not a
    monotone under the full operation class."""
    _checked(s, b, v)
    lp = _distance_lp(s, b, v, uniform=True)
    out = solve(lp, mode)
    if out.status != "optimal":
        raise StructuralError(f"uniform-l1 LP ended with {out.status}")
    if mode != "exact":
        return QuantifierReport(UNIFORM_L1, out.objective_value)
    I, V = s.preparations, len(v.vertices)
    closest_model = _weights_to_model(out.primal, I, V)
    return QuantifierReport(
        UNIFORM_L1,
        out.objective_value,
        witness={
            "closest_model": closest_model,
            "closest": model_image(s, v, closest_model),
        },
    )


# ---------------------------------------------------------------------------
# Relative entropy of contextuality (Frank-Wolfe upper bound)
# ---------------------------------------------------------------------------


def kl_contextuality(
    s: Scenario,
    b: Behavior,
    v: VertexSet,
    tol: float = 1e-6,
    iteration_cap: int = 5000,
) -> QuantifierReport:
    """Upper bound on min over noncontextual b' of
    max_(i,j) sum_k p log(p/p'), with a certified optimality gap.

    Pairwise Frank-Wolfe over the model-weight polytope on a
    log-sum-exp smoothing of the max; the temperature starts at 1.0 and
    halves every 50 iterations; the linear-minimization oracle is the
    exact LP.  Interior (uniform-weight) initialization keeps p'
    positive wherever the noncontextual set allows.  The convention
    0*log(0/q) = 0 applies; p > 0 against p' = 0 diverges.

    The certified gap combines the smoothed Frank-Wolfe bound
    (plus the tau*log(IJ) smoothing overhead) with the trivial bound
    from nonnegativity of the minimum; the reported value is the true
    max at the best iterate and the running upper bound never
    increases.
    """
    if tol <= 0:
        raise InvalidInputError("tolerance must be positive")
    _checked(s, b, v)
    I, J, K = s.preparations, s.measurements, s.outcomes
    V = len(v.vertices)
    n = I * V
    n_terms = I * J

    poly_rows, poly_rhs = _mu_polytope_rows(s, v, 0, n)
    xi = np.array([[to_float(x) for x in vert.xi] for vert in v.vertices])  # (V, J*K)
    p = np.array([[[to_float(b.p[i][j][k]) for k in range(K)] for j in range(J)]
                  for i in range(I)])
    p_mask = p > 0.0
    p_pos = np.where(p_mask, p, 1.0)
    log_p = np.log(p_pos)

    def images(x: np.ndarray) -> np.ndarray:
        return (x.reshape(I, V) @ xi).reshape(I, J, K)

    def term_values(q: np.ndarray) -> np.ndarray:
        ok = q > 0.0
        safe_q = np.where(ok, q, 1.0)
        contrib = np.where(p_mask, p * (log_p - np.log(safe_q)), 0.0)
        vals = contrib.sum(axis=2)
        vals[(p_mask & ~ok).any(axis=2)] = math.inf
        return vals

    def smooth_of(vals: np.ndarray, tau: float) -> float:
        top = float(np.max(vals))
        if math.isinf(top):
            return math.inf
        return top + tau * math.log(float(np.sum(np.exp((vals - top) / tau))))

    def grad_smooth(q: np.ndarray, tau: float) -> np.ndarray:
        vals = term_values(q)
        top = float(np.max(vals))
        w = np.exp((vals - top) / tau)
        w /= np.sum(w)
        resid = np.where(p_mask, -p / np.where(q > 0.0, q, 1.0), 0.0)
        resid *= w[:, :, None]
        return (resid.reshape(I, J * K) @ xi.T).reshape(n)

    def lmo(c: np.ndarray):
        obj = [rational_from_float_exact(float(ci)) for ci in c]
        lp = linear_program(obj, sense="min", eq=poly_rows, eq_rhs=poly_rhs)
        out = solve_exact(lp)
        if out.status != "optimal":
            raise StructuralError(f"linear-minimization oracle: {out.status}")
        vec = np.array([to_float(x) for x in out.primal])
        return tuple(out.primal), vec

    def segment_search(q_from: np.ndarray, q_step: np.ndarray, hi: float, tau: float) -> float:
        """Golden-section on gamma -> f_tau(q_from + gamma*q_step), gamma in [0, hi]."""
        phi = lambda g: smooth_of(term_values(q_from + g * q_step), tau)
        invphi = (math.sqrt(5) - 1) / 2
        a, bb = 0.0, hi
        c1 = bb - invphi * (bb - a)
        c2 = a + invphi * (bb - a)
        f1, f2 = phi(c1), phi(c2)
        for _ in range(45):
            if f1 <= f2:
                bb, c2, f2 = c2, c1, f1
                c1 = bb - invphi * (bb - a)
                f1 = phi(c1)
            else:
                a, c1, f1 = c1, c2, f2
                c2 = a + invphi * (bb - a)
                f2 = phi(c2)
        g = (a + bb) / 2
        return g if phi(g) < phi(0.0) else 0.0

    # Atoms: the uniform interior start plus every vertex the oracle
    # returns; the iterate stays an explicit convex combination.
    x0 = np.concatenate([np.full(V, 1.0 / V) for _ in range(I)])
    atoms: dict = {"interior": (x0, images(x0))}
    weights: dict = {"interior": 1.0}

    x = x0.copy()
    qx = images(x)
    best_val = float(np.max(term_values(qx)))
    if math.isinf(best_val):
        return QuantifierReport(RELATIVE_ENTROPY, math.inf, gap=math.inf,
                                status="undefined")
    best_weights = x.copy()
    best_gap = best_val  # the entropy minimum is nonnegative
    trace = [best_val]
    iterations = 0
    log_terms = math.log(n_terms) if n_terms > 1 else 0.0

    for t in range(iteration_cap):
        iterations = t + 1
        tau = 0.5 ** (t // 50)
        g = grad_smooth(qx, tau)
        fw_key, fw_vec = lmo(g)
        if fw_key not in atoms:
            atoms[fw_key] = (fw_vec, images(fw_vec))
        smoothed_gap = float(g @ (x - atoms[fw_key][0])) + tau * log_terms

        val = float(np.max(term_values(qx)))
        if val < best_val:
            best_val = val
            best_weights = x.copy()
        best_gap = min(best_gap, best_val, max(smoothed_gap, 0.0))
        trace.append(best_val)
        if best_gap <= tol:
            break

        away_key = max(
            (k for k in weights if weights[k] > 0.0),
            key=lambda k: float(g @ atoms[k][0]),
        )
        fw_atom, fw_img = atoms[fw_key]
        away_atom, away_img = atoms[away_key]
        hi = weights[away_key]
        if away_key == fw_key or hi <= 0.0:
            continue
        gamma = segment_search(qx, fw_img - away_img, hi, tau)
        if gamma <= 0.0:
            continue
        weights[away_key] -= gamma
        weights[fw_key] = weights.get(fw_key, 0.0) + gamma
        if weights[away_key] <= 1e-15:
            del weights[away_key]
        x = x + gamma * (fw_atom - away_atom)
        qx = qx + gamma * (fw_img - away_img)
        if t % 128 == 127:  # resync against float drift
            x = sum((w * atoms[k][0] for k, w in weights.items()), np.zeros(n))
            qx = images(x)

    status = "ok" if best_gap <= tol else "iteration_cap"
    return QuantifierReport(
        RELATIVE_ENTROPY,
        best_val,
        gap=best_gap,
        status=status,
        witness={
            "closest": images(best_weights).tolist(),
            "weights": best_weights.tolist(),
            "trace": trace,
            "iterations": iterations,
        },
    )
