"""``ugkit`` command line: parse, dispatch to the library, print a canonical JSON report."""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Sequence

from .branching import (
    DiscreteBranchingSystem,
    IntervalBranchingSystem,
    assemble_F,
    bs_from_doc,
    build_discrete_bs_from_peeling,
    build_no_exit_degenerate_bs,
    build_standard_interval_bs,
    validate_bs,
)
from .core import GraphError, g0_membership, validate_ultragraph, vertex_names
from .ideals import hs_closure, is_essential, is_hereditary_saturated, uniqueness_report
from .intervals import UnboundedSupport
from .paths_cycles import condition_l, cycle_exits, enumerate_simple_cycles
from .permutative import peel_sequence, permutativity_condition
from .representation import DEFAULT_TOL, SupportError, faithfulness_witness, pf_direct, pf_via_rep, verify_ck_relations
from .stepfunction import StepFunction

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


class _Inputs:
    def __init__(self):
        self.digests: dict[str, str] = {}

    def load(self, path: str):
        try:
            raw = Path(path).read_bytes()
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from None
        self.digests[path] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _names(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in _names(text)]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _graph(inputs: _Inputs, path: str):
    return validate_ultragraph(inputs.load(path))


def _vertices(g, text: str):
    return frozenset(g.vertex(n) for n in _names(text))


# -- commands -------------------------------------------------------------
# each returns (ok: bool, result: dict)


def cmd_validate(args, inputs):
    g = _graph(inputs, args.graph)
    return True, {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "tail": None if g.tail is None else {"prefix": g.tail.prefix, "start": g.tail.start},
    }


def cmd_g0(args, inputs):
    g = _graph(inputs, args.graph)
    target = g.parse_set(args.set)
    d = g0_membership(g, target)
    return d.member, {
        "target": str(target),
        "member": d.member,
        "witness": None if d.witness is None else {"expression": str(d.witness), **d.witness.to_doc()},
    }


def cmd_cycles(args, inputs):
    g = _graph(inputs, args.graph)
    return True, {
        "cycles": [{"path": list(c.path), "exits": [x.to_doc() for x in cycle_exits(g, c)]}
                   for c in enumerate_simple_cycles(g)]
    }


def cmd_condition_l(args, inputs):
    g = _graph(inputs, args.graph)
    cl = condition_l(g)
    return cl.holds, cl.to_doc()


def cmd_closure(args, inputs):
    g = _graph(inputs, args.graph)
    W = hs_closure(g, _vertices(g, args.vertices))
    return True, {"seed": vertex_names(_vertices(g, args.vertices)), "closure": W.to_doc()}


def cmd_essential(args, inputs):
    g = _graph(inputs, args.graph)
    W = _vertices(g, args.vertices)
    ess = is_essential(g, W)
    return ess.essential, {"W": vertex_names(W), **ess.to_doc(), "hs": is_hereditary_saturated(g, W).to_doc()}


def cmd_uniqueness(args, inputs):
    g = _graph(inputs, args.graph)
    rep = uniqueness_report(g)
    return rep.disjoint and rep.essential, rep.to_doc()


def cmd_branching(args, inputs):
    g = _graph(inputs, args.graph)
    if args.discrete and args.degenerate_cycle:
        raise UsageError("--discrete and --degenerate-cycle are mutually exclusive")
    if args.discrete:
        bs = build_discrete_bs_from_peeling(g)
    elif args.degenerate_cycle:
        bs = build_no_exit_degenerate_bs(g, _names(args.degenerate_cycle))
    else:
        bs = build_standard_interval_bs(g)
    report = validate_bs(bs)
    doc = bs.to_doc()
    if args.out:
        Path(args.out).write_text(canonical_json(doc) + "\n", encoding="utf-8")
    return report.passed, {"kind": bs.kind, "validation": report.to_doc(), "out": args.out,
                           "system": None if args.out else doc}


def _bs(inputs, path):
    return bs_from_doc(inputs.load(path))


def cmd_ck_check(args, inputs):
    bs = _bs(inputs, args.bs)
    rep = verify_ck_relations(bs, tol=args.tol)
    return rep.passed, rep.to_doc()


def cmd_pf(args, inputs):
    bs = _bs(inputs, args.bs)
    if not isinstance(bs, IntervalBranchingSystem):
        raise UsageError("pf needs an interval branching system")
    phi = StepFunction.from_doc(inputs.load(args.fn))
    via = pf_via_rep(bs, phi, args.mode)
    result = {"mode": args.mode, "pf": via.to_doc()}
    ok = True
    if args.compare:
        direct = pf_direct(assemble_F(bs), phi.square() if args.mode == "squared" else phi)
        gap = (via - direct).l1()
        result.update({"direct": direct.to_doc(), "max_l1_gap": gap})
        ok = gap < args.tol
    return ok, result


def cmd_faithful(args, inputs):
    bs = _bs(inputs, args.bs)
    if not isinstance(bs, DiscreteBranchingSystem):
        raise UsageError("faithful needs a discrete branching system")
    res = faithfulness_witness(bs, _names(args.cycle), _ints(args.fset))
    return res.witness is not None, res.to_doc()


def cmd_peel(args, inputs):
    g = _graph(inputs, args.graph)
    return True, peel_sequence(g).to_doc()


def cmd_permutative(args, inputs):
    g = _graph(inputs, args.graph)
    p = permutativity_condition(g)
    return p.holds, p.to_doc()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ugkit", description="Ultragraph combinatorics and branching-system checks.")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_cmd(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("graph", help="graph document (JSON)")
        sp.set_defaults(handler=fn)
        return sp

    graph_cmd("validate", cmd_validate, "check a graph document")
    graph_cmd("g0", cmd_g0, "decide membership in the generalized-vertex lattice").add_argument(
        "--set", required=True, help="vertex set literal, e.g. v1,w2+tail:3")
    graph_cmd("cycles", cmd_cycles, "list simple cycles and their exits")
    graph_cmd("condition-l", cmd_condition_l, "check that every cycle has an exit")
    graph_cmd("closure", cmd_closure, "hereditary saturated closure").add_argument("--vertices", required=True)
    graph_cmd("essential", cmd_essential, "essentiality of a vertex set").add_argument("--vertices", required=True)
    graph_cmd("uniqueness", cmd_uniqueness, "uniqueness decomposition and obligations")
    sp = graph_cmd("branching", cmd_branching, "build and validate a branching system")
    sp.add_argument("--out", help="write the system document here")
    sp.add_argument("--degenerate-cycle", help="edge list of a cycle without exits")
    sp.add_argument("--discrete", action="store_true", help="synthesize a system on the positive integers")
    graph_cmd("peel", cmd_peel, "peeling sequence")
    graph_cmd("permutative", cmd_permutative, "permutativity criterion")

    sp = sub.add_parser("ck-check", help="verify the Cuntz-Krieger relations on a branching system")
    sp.add_argument("bs")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.set_defaults(handler=cmd_ck_check)

    sp = sub.add_parser("pf", help="transfer operator through the representation")
    sp.add_argument("bs")
    sp.add_argument("--fn", required=True, help="step-function document")
    sp.add_argument("--compare", action="store_true", help="also compute it directly and report the L1 gap")
    sp.add_argument("--mode", choices=("squared", "general"), default="squared")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.set_defaults(handler=cmd_pf)

    sp = sub.add_parser("faithful", help="look for a point moved by every listed power of a cycle map")
    sp.add_argument("bs")
    sp.add_argument("--cycle", required=True)
    sp.add_argument("--fset", required=True)
    sp.set_defaults(handler=cmd_faithful)
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code, {}
    inputs = _Inputs()
    report = {"command": args.command, "inputs": inputs.digests}
    try:
        ok, result = args.handler(args, inputs)
    except (UsageError, GraphError, SupportError, UnboundedSupport, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        report.update({"status": "error", "error": f"{type(exc).__name__}: {msg}", "result": None})
        return EXIT_USAGE, report
    report.update({"status": "ok" if ok else "fail", "result": result})
    return (EXIT_OK if ok else EXIT_FAIL), report


def main(argv: Sequence[str] | None = None) -> int:
    code, report = run(argv)
    if report:
        sys.stdout.write(canonical_json(report) + "\n")
        if report.get("status") == "error":
            print(report["error"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
