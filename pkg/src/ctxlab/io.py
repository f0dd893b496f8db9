"""JSON interchange for scenarios, behaviors, operations and reports.

Rationals serialize as strings ("0", "1/2", "-3/7") so exact values
survive round-trips bit-exactly.  On input, numbers may be JSON
integers, decimal literals, or "num/den" strings; decimal literals are
parsed exactly from their text, never through binary floats.
Measurement-equivalence coefficients use sparse [k, j, coeff] triples.
"""

from __future__ import annotations

import json

from .errors import InvalidInputError
from .freeops import FreeOperation
from .membership import MembershipResult, NCModel
from .model import (
    Behavior,
    MeasEquivalence,
    PrepEquivalence,
    Scenario,
    event_index,
    scenario,
)
from .polytope import VertexSet
from .quantify import QuantifierReport
from .rational import ZERO, as_rational, format_rational, is_rational, parse_rational


def loads_exact(text: str):
    """json.loads with exact decimal parsing of float literals."""
    return json.loads(text, parse_float=parse_rational)


def _num(x):
    try:
        return as_rational(x)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad number {x!r}: {exc}") from exc


def _num_str(q) -> str:
    return format_rational(q)


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------


def scenario_to_obj(s: Scenario) -> dict:
    K = s.outcomes
    meas = []
    for eq in s.meas_equivalences:
        meas.append(
            {
                "alpha": [
                    [k, j, _num_str(eq.alpha[event_index(j, k, K)])]
                    for j in range(s.measurements)
                    for k in range(K)
                    if eq.alpha[event_index(j, k, K)] != 0
                ],
                "beta": [
                    [k, j, _num_str(eq.beta[event_index(j, k, K)])]
                    for j in range(s.measurements)
                    for k in range(K)
                    if eq.beta[event_index(j, k, K)] != 0
                ],
            }
        )
    return {
        "preparations": s.preparations,
        "measurements": s.measurements,
        "outcomes": s.outcomes,
        "prep_equivalences": [
            {
                "alpha": [_num_str(x) for x in eq.alpha],
                "beta": [_num_str(x) for x in eq.beta],
            }
            for eq in s.prep_equivalences
        ],
        "meas_equivalences": meas,
    }


def _event_vector(entries, J: int, K: int, what: str):
    vec = [ZERO] * (J * K)
    for item in entries:
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise InvalidInputError(f"{what}: expected [k, j, coeff] triples")
        k, j, coeff = item
        if not isinstance(k, int) or not isinstance(j, int):
            raise InvalidInputError(f"{what}: event indices must be integers")
        if not (0 <= k < K and 0 <= j < J):
            raise InvalidInputError(f"{what}: event ({k}|{j}) out of range")
        vec[event_index(j, k, K)] = vec[event_index(j, k, K)] + _num(coeff)
    return tuple(vec)


def scenario_from_obj(obj) -> Scenario:
    if not isinstance(obj, dict):
        raise InvalidInputError("scenario: expected a JSON object")
    try:
        I = int(obj["preparations"])
        J = int(obj["measurements"])
        K = int(obj["outcomes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"scenario: bad dimensions ({exc})") from exc
    preps = []
    for eq in obj.get("prep_equivalences", []):
        alpha = tuple(_num(x) for x in eq["alpha"])
        beta = tuple(_num(x) for x in eq["beta"])
        preps.append(PrepEquivalence(alpha, beta))
    meas = []
    for eq in obj.get("meas_equivalences", []):
        alpha = _event_vector(eq["alpha"], J, K, "meas equivalence alpha")
        beta = _event_vector(eq["beta"], J, K, "meas equivalence beta")
        meas.append(MeasEquivalence(alpha, beta))
    return scenario(I, J, K, preps, meas)


# ---------------------------------------------------------------------------
# Behavior
# ---------------------------------------------------------------------------


def behavior_to_obj(b: Behavior) -> dict:
    return {
        "p": [[[_num_str(x) for x in row] for row in rows] for rows in b.p]
    }


def behavior_from_obj(obj, s: Scenario) -> Behavior:
    if not isinstance(obj, dict) or "p" not in obj:
        raise InvalidInputError('behavior: expected an object with a "p" table')
    from .model import behavior as make_behavior

    return make_behavior(s, obj["p"])


# ---------------------------------------------------------------------------
# Free operations
# ---------------------------------------------------------------------------


def freeop_to_obj(t: FreeOperation) -> dict:
    fmt_matrix = lambda m: [[_num_str(x) for x in row] for row in m]
    return {
        "source": scenario_to_obj(t.source),
        "target": scenario_to_obj(t.target),
        "q_P": fmt_matrix(t.q_P),
        "q_M": fmt_matrix(t.q_M),
        "q_O": [fmt_matrix(m) for m in t.q_O],
    }


def freeop_from_obj(obj) -> FreeOperation:
    if not isinstance(obj, dict):
        raise InvalidInputError("operation: expected a JSON object")
    try:
        src = scenario_from_obj(obj["source"])
        tgt = scenario_from_obj(obj["target"])
        q_P = tuple(tuple(_num(x) for x in row) for row in obj["q_P"])
        q_M = tuple(tuple(_num(x) for x in row) for row in obj["q_M"])
        q_O = tuple(
            tuple(tuple(_num(x) for x in row) for row in mat) for mat in obj["q_O"]
        )
    except KeyError as exc:
        raise InvalidInputError(f"operation: missing field {exc}") from exc
    return FreeOperation(src, tgt, q_P, q_M, q_O)


# ---------------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------------


def vertexset_to_obj(v: VertexSet) -> dict:
    return {
        "fingerprint": v.fingerprint,
        "vertices": [[_num_str(x) for x in av.xi] for av in v.vertices],
    }


def model_to_obj(m: NCModel) -> dict:
    return {"mu": [[_num_str(x) for x in row] for row in m.mu]}


def membership_to_obj(r: MembershipResult) -> dict:
    obj: dict = {"noncontextual": r.noncontextual}
    if r.model is not None:
        obj["model"] = model_to_obj(r.model)
    if r.witness is not None:
        obj["witness"] = [_num_str(x) for x in r.witness]
    return obj


def report_to_obj(r: QuantifierReport) -> dict:
    obj: dict = {"measure": r.measure, "status": r.status}
    if r.value is None:
        obj["value"] = None
    elif is_rational(r.value):
        obj["value"] = _num_str(r.value)
    else:
        obj["value"] = float(r.value)
    if r.gap is not None:
        obj["gap"] = float(r.gap)
    witness = {}
    for key, val in r.witness.items():
        if key == "trace":
            witness["iterations"] = len(val) - 1
        elif isinstance(val, Behavior):
            witness[key] = behavior_to_obj(val)
        elif isinstance(val, NCModel):
            witness[key] = model_to_obj(val)
        elif is_rational(val):
            witness[key] = _num_str(val)
        elif isinstance(val, (int, float, str, list)):
            witness[key] = val
    if witness:
        obj["witness"] = witness
    return obj


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
