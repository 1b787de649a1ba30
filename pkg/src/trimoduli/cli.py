"""Command-line interface tying the pipeline together.

Every command prints one JSON report to stdout (floats with 17 significant
digits, complex values as [re, im] pairs) and diagnostics to stderr.
Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 internal
verification mismatch.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__, concomitants, form_problem, reflection_group, slocc_normalize
from .qutrit_state import StateIOError, random_state, read_state, write_state

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_VERIFICATION = 3


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, str):
        import json as _json
        return _json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, complex):
        return f"[{value.real:.17g}, {value.imag:.17g}]"
    if isinstance(value, dict):
        inner = ", ".join(f"{_fmt(str(k))}: {_fmt(v)}" for k, v in value.items())
        return "{" + inner + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def emit_report(command: str, payload: dict) -> None:
    report = {"command": command, "version": __version__}
    report.update(payload)
    sys.stdout.write(_fmt(report) + "\n")


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _invariants_payload(inv: concomitants.InvariantSet) -> dict:
    return {"I6": inv.i6, "I9": inv.i9, "I12": inv.i12,
            "I18": inv.i18, "Delta": inv.delta}


def cmd_invariants(args) -> int:
    s = read_state(args.path)
    inv = concomitants.invariants(s)
    payload = _invariants_payload(inv)
    semistable, witness = concomitants.is_semistable(s)
    payload["semistable"] = semistable
    payload["witness"] = witness
    if semistable:
        payload["projective"] = list(concomitants.projective_point(s))
    else:
        payload["projective"] = None
    emit_report("invariants", payload)
    return EXIT_OK


def cmd_classify(args) -> int:
    s = read_state(args.path)
    inv = concomitants.invariants(s)
    oc = form_problem.classify(form_problem.FormProblemInput(
        inv.i6, inv.i12, inv.i18, i9=inv.i9))
    emit_report("classify", _orbit_class_payload(inv.i6, inv.i12, inv.i18, oc))
    return EXIT_OK


def _orbit_class_payload(a, b, c, oc: form_problem.OrbitClass) -> dict:
    return {
        "a": complex(a), "b": complex(b), "c": complex(c), "i9": oc.i9_used,
        "D": oc.d_discriminant, "delta": oc.delta,
        "count": oc.count, "polytope_label": oc.polytope_label,
        "stabilizer_label": oc.stabilizer_label,
        "stabilizer_order": oc.stabilizer_order,
        "case_tree_prediction": oc.case_tree_prediction,
        "case_tree_agrees": oc.case_tree_agrees,
    }


def cmd_normal_form(args) -> int:
    s = read_state(args.path)
    inv = concomitants.invariants(s)
    limit, trace = slocc_normalize.normalize_slocc(s, tol=args.tol, max_iter=args.max_iter)
    payload = {
        "status": trace.status,
        "steps": len(trace.steps) - 1,
        "initial_norm_sq": trace.steps[0].norm_sq,
        "final_norm_sq": trace.steps[-1].norm_sq,
        "final_max_rel_deviation": trace.steps[-1].max_rel_deviation,
        "input_invariants": _invariants_payload(inv),
    }
    if trace.status != slocc_normalize.CONVERGED:
        payload["limit_invariants"] = _invariants_payload(concomitants.invariants(limit))
        payload["verdict"] = None
        emit_report("normal-form", payload)
        return EXIT_NUMERICAL if trace.status == slocc_normalize.MAX_ITERATIONS else EXIT_OK
    sol = form_problem.solve(form_problem.FormProblemInput(
        inv.i6, inv.i12, inv.i18, i9=inv.i9))
    report = slocc_normalize.verify_vinberg(limit, sol)
    payload["limit_invariants"] = _invariants_payload(concomitants.invariants(limit))
    payload["candidate_count"] = sol.filtered_count
    payload["candidates_sample"] = [list(t) for t in sol.triples[:args.max_candidates]]
    payload["verdict"] = report
    emit_report("normal-form", payload)
    return EXIT_OK if report["ok"] else EXIT_VERIFICATION


def cmd_solve(args) -> int:
    inp = form_problem.FormProblemInput(args.a, args.b, args.c, i9=args.i9)
    oc = form_problem.classify(inp)
    sol = form_problem.solve(form_problem.FormProblemInput(
        args.a, args.b, args.c, i9=oc.i9_used))
    payload = _orbit_class_payload(args.a, args.b, args.c, oc)
    payload["raw_count"] = sol.raw_count
    if args.full:
        payload["triples"] = [list(t) for t in sol.triples]
    else:
        payload["triples_sample"] = [list(t) for t in sol.triples[:5]]
    emit_report("solve", payload)
    return EXIT_OK


def cmd_orbit(args) -> int:
    group = reflection_group.group_k()
    triple = (args.u, args.v, args.w)
    points = reflection_group.orbit(group, triple, mode="float")
    stab = reflection_group.stabilizer(group, triple)
    label = reflection_group.stabilizer_type(stab)
    if len(points) * stab.order != group.order:
        raise RuntimeError(
            f"orbit-stabilizer mismatch: {len(points)} * {stab.order} != {group.order}")
    payload = {
        "orbit_size": len(points),
        "stabilizer_order": stab.order,
        "stabilizer_label": label,
    }
    if args.full:
        payload["points"] = [list(p) for p in points]
    emit_report("orbit", payload)
    return EXIT_OK


def cmd_group_verify(args) -> int:
    k = reflection_group.group_k()
    h = reflection_group.group_h()
    residuals = reflection_group.verify_invariance(k)
    unitary = all(g.is_unitary() for g in k.elements)
    payload = {
        "K_order": k.order,
        "H_order": h.order,
        "K_unitary": unitary,
        "invariance_residuals": residuals,
    }
    emit_report("group-verify", payload)
    ok = (k.order == 648 and h.order == 1296 and unitary
          and all(r == 0 for entry in residuals.values() for r in entry.values()))
    return EXIT_OK if ok else EXIT_VERIFICATION


def cmd_syzygies(args) -> int:
    s = random_state(args.seed)
    results = concomitants.syzygy_residuals(s, seed=args.seed + 1)
    payload = {
        "seed": args.seed,
        "residuals": {name: res for name, res in results},
        "max_residual": max(res for _, res in results),
    }
    emit_report("syzygies", payload)
    return EXIT_OK if payload["max_residual"] < 1e-9 else EXIT_VERIFICATION


def cmd_random(args) -> int:
    s = random_state(args.seed)
    write_state(args.out, s)
    emit_report("random", {"seed": args.seed, "out": str(args.out),
                           "norm_sq": s.norm_sq})
    return EXIT_OK


def cmd_emit_points(args) -> int:
    points = form_problem.emit_configuration(args.case, path=args.out)
    emit_report("emit-points", {"case": args.case, "out": str(args.out),
                                "count": len(points)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trimoduli",
        description="Invariants, normal forms and the form problem for three-qutrit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("invariants", help="fundamental invariants of a state file")
    p.add_argument("path")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("classify", help="solution stratum of a state file")
    p.add_argument("path")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("normal-form", help="run the filtering iteration and verify")
    p.add_argument("path")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--max-candidates", type=int, default=5)
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("solve", help="solve the form problem for (a, b, c [, i9])")
    p.add_argument("--a", type=_parse_complex, required=True)
    p.add_argument("--b", type=_parse_complex, required=True)
    p.add_argument("--c", type=_parse_complex, required=True)
    p.add_argument("--i9", type=_parse_complex, default=None)
    p.add_argument("--full", action="store_true", help="print the full triple list")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("orbit", help="symmetry-group orbit and stabilizer of a triple")
    p.add_argument("--u", type=_parse_complex, required=True)
    p.add_argument("--v", type=_parse_complex, required=True)
    p.add_argument("--w", type=_parse_complex, required=True)
    p.add_argument("--full", action="store_true", help="print all orbit points")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("group-verify", help="group orders and exact invariance checks")
    p.set_defaults(func=cmd_group_verify)

    p = sub.add_parser("syzygies", help="evaluate the twelve syzygies on a seeded state")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_syzygies)

    p = sub.add_parser("random", help="write a seeded random state file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("out")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("emit-points", help="write a polytope point configuration as CSV")
    p.add_argument("--case", required=True, choices=sorted(form_problem.CANONICAL_CASES))
    p.add_argument("out")
    p.set_defaults(func=cmd_emit_points)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StateIOError, form_problem.FormProblemError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (slocc_normalize.ConditioningError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RuntimeError as exc:
        print(f"verification mismatch: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
