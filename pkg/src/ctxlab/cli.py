"""Command-line front end.

Every invocation writes one JSON document (JSON lines for batch mode)
to stdout or --output.  Exit codes: 0 success, 1 invalid input, 2
computation failure (budget or convergence).  Output files are written
only after the whole payload is assembled, so failures leave nothing
behind.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import io as ctxio
from .errors import (
    BudgetExceededError,
    CompositionError,
    CtxlabError,
    InvalidInputError,
    RejectionBudgetError,
    StructuralError,
)
from .freeops import apply_freeop, sample_random_freeop
from .membership import check_membership
from .model import juxtapose
from .oracle import enumerate_nc_hull, oracle_membership, oracle_robustness
from .polytope import enumerate_vertices
from .quantify import (
    contextual_fraction,
    kl_contextuality,
    l1_contextuality_distance,
    robustness,
    robustness_ref,
    uniform_l1_distance,
)
from .rational import format_rational
from .sampling import random_behavior, random_nc_behavior, random_scenario

_MEASURES = ("cf", "rob", "rob-ref", "l1", "uniform-l1", "kl")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxlab",
        description="Noncontextuality membership and contextuality monotones "
        "for prepare-and-measure statistics.",
    )
    parser.add_argument("--output", help="write the JSON document here instead of stdout")
    parser.add_argument(
        "--mode", choices=("exact", "float"), default="exact",
        help="arithmetic mode for LP-based commands (default: exact)",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("vertices", help="enumerate assignment-polytope vertices")
    p.add_argument("scenario")

    p = sub.add_parser("check", help="decide noncontextuality of a behavior")
    p.add_argument("scenario")
    p.add_argument("behavior")

    p = sub.add_parser("quantify", help="compute a contextuality measure")
    p.add_argument("--measure", choices=_MEASURES, required=True)
    p.add_argument("--ref", help="reference behavior file (rob-ref)")
    p.add_argument("--tol", type=float, default=1e-6, help="gap tolerance for kl")
    p.add_argument("scenario")
    p.add_argument("behavior")

    p = sub.add_parser("apply", help="apply a free operation to a behavior")
    p.add_argument("operation")
    p.add_argument("behavior")

    p = sub.add_parser("tensor", help="juxtapose two behaviors")
    p.add_argument("scenario1")
    p.add_argument("behavior1")
    p.add_argument("scenario2")
    p.add_argument("behavior2")

    p = sub.add_parser("random-behavior", help="seeded random behavior")
    p.add_argument("--dims", required=True, help="I,J,K")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--prep-eqs", type=int, default=0)
    p.add_argument("--meas-eqs", type=int, default=0)
    p.add_argument("--nc", action="store_true", help="sample inside the noncontextual set")

    p = sub.add_parser("random-freeop", help="seeded random free operation")
    p.add_argument("--dims", required=True, help="target I,J,K")
    p.add_argument("--source-dims", help="source I,J,K (default: drawn from the seed)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--prep-eqs", type=int, default=None)
    p.add_argument("--meas-eqs", type=int, default=None)

    p = sub.add_parser("batch", help="evaluate a manifest of (scenario, behavior, measures)")
    p.add_argument("manifest")

    # test tooling: hull-based recomputation path
    p = sub.add_parser("oracle")
    oracle_sub = p.add_subparsers(dest="oracle_command", required=True)
    po = oracle_sub.add_parser("check")
    po.add_argument("scenario")
    po.add_argument("behavior")
    po = oracle_sub.add_parser("rob")
    po.add_argument("scenario")
    po.add_argument("behavior")
    po.add_argument("--eps", default="1e-9")
    return parser


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return ctxio.loads_exact(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _load_scenario(path: str):
    return ctxio.scenario_from_obj(_read_json(path))


def _load_behavior(path: str, s):
    return ctxio.behavior_from_obj(_read_json(path), s)


def _parse_dims(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise InvalidInputError(f"dims must be I,J,K, got {text!r}")
    try:
        return tuple(int(x) for x in parts)
    except ValueError as exc:
        raise InvalidInputError(f"dims must be integers: {text!r}") from exc


def _emit(payload: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _cmd_vertices(args) -> dict:
    s = _load_scenario(args.scenario)
    return ctxio.vertexset_to_obj(enumerate_vertices(s))


def _cmd_check(args) -> dict:
    s = _load_scenario(args.scenario)
    b = _load_behavior(args.behavior, s)
    v = enumerate_vertices(s)
    return ctxio.membership_to_obj(check_membership(s, b, v, mode=args.mode))


def _cmd_quantify(args) -> dict:
    s = _load_scenario(args.scenario)
    b = _load_behavior(args.behavior, s)
    v = enumerate_vertices(s)
    measure = args.measure
    if measure == "cf":
        report = contextual_fraction(s, b, v, mode=args.mode)
    elif measure == "rob":
        report = robustness(s, b, v, mode=args.mode)
    elif measure == "rob-ref":
        if not args.ref:
            raise InvalidInputError("--measure=rob-ref requires --ref=FILE")
        b_ref = _load_behavior(args.ref, s)
        report = robustness_ref(s, b, b_ref, v, mode=args.mode)
    elif measure == "l1":
        report = l1_contextuality_distance(s, b, v, mode=args.mode)
    elif measure == "uniform-l1":
        report = uniform_l1_distance(s, b, v, mode=args.mode)
    else:
        if args.tol <= 0:
            raise InvalidInputError("--tol must be positive")
        report = kl_contextuality(s, b, v, tol=args.tol)
        if report.status == "iteration_cap":
            # emit the honest report, then fail the invocation
            raise _Unconverged(ctxio.report_to_obj(report))
    return ctxio.report_to_obj(report)


class _Unconverged(Exception):
    def __init__(self, payload_obj):
        self.payload_obj = payload_obj


def _cmd_apply(args) -> dict:
    op = ctxio.freeop_from_obj(_read_json(args.operation))
    b = _load_behavior(args.behavior, op.source)
    return ctxio.behavior_to_obj(apply_freeop(op, b))


def _cmd_tensor(args) -> dict:
    s1 = _load_scenario(args.scenario1)
    b1 = _load_behavior(args.behavior1, s1)
    s2 = _load_scenario(args.scenario2)
    b2 = _load_behavior(args.behavior2, s2)
    s, b = juxtapose(s1, b1, s2, b2)
    return {"scenario": ctxio.scenario_to_obj(s), "behavior": ctxio.behavior_to_obj(b)}


def _cmd_random_behavior(args) -> dict:
    I, J, K = _parse_dims(args.dims)
    rng = random.Random(args.seed)
    s = random_scenario(rng, I, J, K, n_prep_eq=args.prep_eqs, n_meas_eq=args.meas_eqs)
    if args.nc:
        v = enumerate_vertices(s)
        b = random_nc_behavior(rng, s, v)
    else:
        b = random_behavior(rng, s)
    return {"scenario": ctxio.scenario_to_obj(s), "behavior": ctxio.behavior_to_obj(b)}


def _cmd_random_freeop(args) -> dict:
    dims = _parse_dims(args.dims)
    source_dims = _parse_dims(args.source_dims) if args.source_dims else None
    op, _, _ = sample_random_freeop(
        dims, args.seed, source_dims=source_dims,
        n_prep_eq=args.prep_eqs, n_meas_eq=args.meas_eqs,
    )
    return ctxio.freeop_to_obj(op)


def _cmd_oracle(args) -> dict:
    s = _load_scenario(args.scenario)
    b = _load_behavior(args.behavior, s)
    v = enumerate_vertices(s)
    if args.oracle_command == "check":
        h = enumerate_nc_hull(s, v)
        return {"noncontextual": oracle_membership(h, b)}
    from .rational import parse_rational

    value = oracle_robustness(s, b, v, parse_rational(args.eps))
    return {"measure": "rob", "value": format_rational(value)}


def _run_batch(args, mode: str, output: str | None) -> int:
    manifest = _read_json(args.manifest)
    if not isinstance(manifest, list):
        raise InvalidInputError("manifest must be a JSON list of entries")
    lines = []
    failures = 0
    for idx, entry in enumerate(manifest):
        record: dict = {"index": idx}
        try:
            s = ctxio.scenario_from_obj(_read_json(entry["scenario"]))
            b = ctxio.behavior_from_obj(_read_json(entry["behavior"]), s)
            v = enumerate_vertices(s)
            results = {}
            for measure in entry.get("measures", ["cf"]):
                if measure == "cf":
                    results[measure] = ctxio.report_to_obj(contextual_fraction(s, b, v, mode=mode))
                elif measure == "rob":
                    results[measure] = ctxio.report_to_obj(robustness(s, b, v, mode=mode))
                elif measure == "l1":
                    results[measure] = ctxio.report_to_obj(l1_contextuality_distance(s, b, v, mode=mode))
                elif measure == "uniform-l1":
                    results[measure] = ctxio.report_to_obj(uniform_l1_distance(s, b, v, mode=mode))
                elif measure == "kl":
                    results[measure] = ctxio.report_to_obj(kl_contextuality(s, b, v, tol=float(entry.get("tol", 1e-6))))
                elif measure == "check":
                    results[measure] = ctxio.membership_to_obj(check_membership(s, b, v, mode=mode))
                else:
                    raise InvalidInputError(f"unknown measure {measure!r}")
            record["results"] = results
        except (CtxlabError, KeyError, TypeError) as exc:
            record["error"] = str(exc) or type(exc).__name__
            failures += 1
        lines.append(json.dumps(record, sort_keys=False))
    payload = "".join(line + "\n" for line in lines)
    _emit(payload, output)
    if manifest and failures == len(manifest):
        return 2
    return 0


_COMMANDS = {
    "vertices": _cmd_vertices,
    "check": _cmd_check,
    "quantify": _cmd_quantify,
    "apply": _cmd_apply,
    "tensor": _cmd_tensor,
    "random-behavior": _cmd_random_behavior,
    "random-freeop": _cmd_random_freeop,
    "oracle": _cmd_oracle,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        if args.command == "batch":
            return _run_batch(args, args.mode, args.output)
        obj = _COMMANDS[args.command](args)
        _emit(ctxio.dumps(obj), args.output)
        return 0
    except _Unconverged as exc:
        _emit(ctxio.dumps(exc.payload_obj), args.output)
        print("kl solver did not reach the requested gap", file=sys.stderr)
        return 2
    except (BudgetExceededError, RejectionBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidInputError, StructuralError, CompositionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
