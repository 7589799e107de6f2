"""Command line front end for the rewrite engine, family checks, and tools.

One executable with subcommands: the constraint rewrites (``re``, ``rere``,
``speedup``), the zero-round solvability and relaxation queries, the problem
family generator and its lemma verifications, the ruling set simulator, the
bound calculators, and the local exploration service.

Exit codes: 0 on success (for verification commands: the property holds),
1 when a domain error occurs or a verified property fails to hold, 2 on
usage errors.  ``--json`` switches commands to machine-readable output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .core import (
    DEFAULT_DERIVED_CAP,
    DomainError,
    MAX_ALPHABET,
    Problem,
    expand_constraint,
    parse_problem,
    problem_to_json,
    serialize_problem,
)
from .roundelim import (
    DEFAULT_BUDGET,
    check_zero_round_reduction,
    re,
    rere,
    speedup,
    zero_round_solvable,
)
from . import family as fam
from . import bounds as bnd
from . import simulator as sim


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from exc


def _load_problem(path: str) -> Problem:
    return parse_problem(_read_text(path))


def _emit(args: argparse.Namespace, text: str, payload: dict) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# ---------------------------------------------------------------------------
# rewrite commands


def _cmd_rewrite(args: argparse.Namespace) -> int:
    problem = _load_problem(args.file)
    op = {"re": re, "rere": rere, "speedup": speedup}[args.command]
    result = op(problem, args.budget, max_labels=args.max_labels)
    text = serialize_problem(result.problem)
    _emit(args, text, problem_to_json(result.problem))
    return 0


def _cmd_zero_round(args: argparse.Namespace) -> int:
    problem = _load_problem(args.file)
    zr = zero_round_solvable(problem)
    if zr.solvable:
        names = zr.witness_names(problem)
        text = "zero-round solvable: yes\nwitness: " + " ".join(names)
        payload = {"solvable": True, "witness": list(names)}
    else:
        text = "zero-round solvable: no"
        payload = {"solvable": False, "witness": None}
    _emit(args, text, payload)
    return 0


def _cmd_relax_check(args: argparse.Namespace) -> int:
    src = _load_problem(args.from_file)
    dst = _load_problem(args.to_file)
    if src.alphabet != dst.alphabet:
        raise DomainError("the two problems must share an alphabet")
    if src.delta != dst.delta:
        raise DomainError("the two problems must share delta")
    missing_nodes = sorted(expand_constraint(src.nodes)
                           - expand_constraint(dst.nodes))
    missing_edges = sorted(expand_constraint(src.edges)
                           - expand_constraint(dst.edges))
    ok = not missing_nodes and not missing_edges

    def show(cfg: tuple[int, ...]) -> str:
        return " ".join(src.alphabet[i] for i in cfg)

    if ok:
        text = "relaxation holds: every allowed labeling stays allowed"
    else:
        lines = ["relaxation fails"]
        for cfg in missing_nodes[:10]:
            lines.append(f"  node configuration lost: {show(cfg)}")
        for cfg in missing_edges[:10]:
            lines.append(f"  edge configuration lost: {show(cfg)}")
        more = len(missing_nodes) + len(missing_edges) - 20
        if more > 0:
            lines.append(f"  ... and {more} more")
        text = "\n".join(lines)
    payload = {
        "ok": ok,
        "missing_node_configs": [show(c) for c in missing_nodes],
        "missing_edge_configs": [show(c) for c in missing_edges],
    }
    _emit(args, text, payload)
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# family commands


def _parse_vector(text: Optional[str], beta: int) -> tuple[int, ...]:
    if text is None:
        return (1,) + (0,) * beta
    try:
        v = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise DomainError(f"bad color count vector {text!r}") from None
    return v


def _family_params(args: argparse.Namespace) -> fam.FamilyParams:
    return fam.FamilyParams(args.delta, args.beta,
                            _parse_vector(args.v, args.beta), args.x)


def _cmd_family_gen(args: argparse.Namespace) -> int:
    problem = fam.make_family_problem(_family_params(args))
    _emit(args, serialize_problem(problem), problem_to_json(problem))
    return 0


def _grid_instances(args: argparse.Namespace):
    deltas = [args.delta] if args.delta is not None else [3, 4, 5, 6]
    betas = [args.beta] if args.beta != 0 else [1, 2]
    for delta in deltas:
        for beta in betas:
            for v in fam.grid_vectors(beta, 3):
                for x in (0, 1):
                    yield fam.FamilyParams(delta, beta, v, x)


def _verify_edge(params: fam.FamilyParams, budget: Optional[int]) -> list[str]:
    problem = fam.make_family_problem(params)
    fam.family_edge_diagram(params, problem)
    result = (re(problem, max_labels=MAX_ALPHABET) if budget is None
              else re(problem, budget, max_labels=MAX_ALPHABET))
    got = fam.re_edge_as_mask_pairs(result)
    want = fam.predicted_re_edge(params, problem)
    if got != want:
        return [f"{params}: edge constraint deviates from the closed form "
                f"({len(got - want)} extra, {len(want - got)} missing)"]
    return []


def _verify_node(params: fam.FamilyParams, budget: Optional[int]) -> list[str]:
    problem = fam.make_family_problem(params)
    result = (re(problem, max_labels=MAX_ALPHABET) if budget is None
              else re(problem, budget, max_labels=MAX_ALPHABET))
    bad = []
    got = fam.re_node_as_mask_configs(result)
    want = fam.predicted_re_node(params, problem)
    if got != want:
        bad.append(f"{params}: node constraint deviates from the closed form "
                   f"({len(got - want)} extra, {len(want - got)} missing)")
    mism = fam.re_node_strength_mismatches(params, result)
    if mism:
        bad.append(f"{params}: strength deviates from provenance inclusion "
                   f"at {len(mism)} label pairs")
    return bad


def _verify_z(params: fam.FamilyParams, budget: Optional[int]) -> list[str]:
    report = fam.verify_relaxation_to_Z(params, budget=budget)
    if not report.ok:
        return [f"{params}: {len(report.unmatched)} configurations unmatched"]
    return []


def _verify_reduction(params: fam.FamilyParams,
                      budget: Optional[int]) -> list[str]:
    bad = []
    result = fam.family_speedup(params, budget)
    m = fam.speedup_map(params, "lower", result)
    rep = check_zero_round_reduction(m.from_problem, m.to_problem,
                                     m.node_map, m.label_map)
    if not rep.ok:
        bad.append(f"{params} lower path: {rep.summary()}")
    if params.x == 0 and params.v[0] >= 1:
        m = fam.speedup_map(params, "upper", result)
        rep = check_zero_round_reduction(m.from_problem, m.to_problem,
                                         m.node_map, m.label_map)
        if not rep.ok:
            bad.append(f"{params} upper path: {rep.summary()}")
    return bad


def _cmd_family_verify(args: argparse.Namespace) -> int:
    budget = args.budget
    lemma = args.lemma

    if lemma == "binomial":
        limit = 10
        v = [1] + [0] * limit
        for j in range(limit + 1):
            for k in range(limit + 1):
                if fam.binom_color(j, k) != v[k]:
                    print(f"binomial law fails at j={j}, k={k}")
                    return 1
            v = list(fam.prefix_sum(v))
        text = f"binomial law holds for all j, k up to {limit}"
        _emit(args, text, {"ok": True, "limit": limit})
        return 0

    if lemma == "sequence":
        if args.delta is None:
            raise DomainError("--lemma sequence needs --delta")
        beta = args.beta if args.beta != 0 else 1
        seq = fam.lower_bound_sequence(args.delta, beta,
                                       check_zero_round=args.check_zero_round)
        lines = [f"chain of {seq.t + 1} members at delta={seq.delta}, "
                 f"beta={seq.beta}:"]
        for j, p in enumerate(seq.steps):
            lines.append(f"  step {j}: size {p.size}, x {p.x}")
        lines.append("growth invariant holds at every step")
        if args.check_zero_round:
            lines.append(f"members 0..{seq.t - 1} are not zero-round solvable")
        payload = {"delta": seq.delta, "beta": seq.beta, "t": seq.t,
                   "steps": [{"v": list(p.v), "x": p.x} for p in seq.steps]}
        _emit(args, "\n".join(lines), payload)
        return 0

    checker = {"edge": _verify_edge, "node": _verify_node,
               "z": _verify_z, "reduction": _verify_reduction}[lemma]
    precondition = {
        "edge": lambda p: True,
        "node": lambda p: p.x + 2 <= p.delta,
        "z": lambda p: p.size * (p.x + 1) + 1 <= p.delta,
        "reduction": lambda p: p.size * (p.x + 1) + 1 <= p.delta,
    }[lemma]

    if args.grid:
        failures: list[str] = []
        count = 0
        for params in _grid_instances(args):
            if not precondition(params):
                continue
            failures.extend(checker(params, budget))
            count += 1
        if failures:
            print("\n".join(failures))
            return 1
        text = f"lemma {lemma}: {count} grid instances verified"
        _emit(args, text, {"ok": True, "lemma": lemma, "instances": count})
        return 0

    if args.delta is None:
        raise DomainError("need --delta (or --grid)")
    beta = args.beta if args.beta != 0 else 1
    params = fam.FamilyParams(args.delta, beta,
                              _parse_vector(args.v, beta), args.x)
    if not precondition(params):
        raise DomainError(f"lemma {lemma} does not apply to {params}")
    if lemma == "z":
        report = fam.verify_relaxation_to_Z(params, budget=budget)
        if report.ok:
            text = f"all {len(report.matched)} configurations matched"
            _emit(args, text, {"ok": True, "matched": len(report.matched)})
            return 0
        print(f"{len(report.unmatched)} configurations unmatched")
        return 1
    failures = checker(params, budget)
    if failures:
        print("\n".join(failures))
        return 1
    text = f"lemma {lemma} verified on {params}"
    _emit(args, text, {"ok": True, "lemma": lemma})
    return 0


# ---------------------------------------------------------------------------
# simulate


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.graph_file is not None:
        g = sim.parse_port_graph(_read_text(args.graph_file))
    elif args.graph == "tree":
        if args.delta is None or args.depth is None:
            raise DomainError("tree graphs need --delta and --depth")
        g = sim.gen_regular_tree(args.delta, args.depth)
    elif args.graph == "regular":
        if args.delta is None or args.n is None:
            raise DomainError("regular graphs need --delta and --n")
        g = sim.gen_random_regular(args.delta, args.n, args.seed)
    elif args.graph == "cycle":
        if args.n is None:
            raise DomainError("cycle graphs need --n")
        g = sim.gen_cycle(args.n)
    else:
        raise DomainError("pick a graph source with --graph or --graph-file")

    if args.graph_out is not None:
        with open(args.graph_out, "w", encoding="utf-8") as fh:
            fh.write(sim.serialize_port_graph(g))

    coloring = sim.greedy_coloring(g, args.seed)
    result = sim.run_ruling_set_algorithm(g, coloring, args.beta)
    report = sim.check_ruling_set(g, result.ruling_set, args.beta)

    validated = None
    if args.validate_steps:
        maxdeg = max(g.degrees)
        if not g.is_regular(maxdeg):
            raise DomainError("per-round validation needs a regular graph")
        for j, states in enumerate(result.trace):
            vj = result.chain[result.rounds - j]
            member = fam.make_family_problem(
                fam.FamilyParams(max(2, maxdeg), args.beta, vj, 0))
            lab = sim.states_to_labeling(member, g, states)
            step = sim.validate_labeling(member, g, lab)
            if not step.ok:
                print(f"round {j}: {step.summary()}")
                return 1
        validated = len(result.trace)

    if args.trace_out is not None:
        with open(args.trace_out, "w", encoding="utf-8") as fh:
            json.dump(_trace_json(result), fh, indent=2)
            fh.write("\n")

    lines = [
        f"graph: {g.n} nodes",
        f"colors: {max(coloring, default=0)}",
        f"rounds: {result.rounds}",
        f"ruling set size: {len(result.ruling_set)}",
        "violations: none" if report.ok else "violations: " + report.summary(),
    ]
    if validated is not None:
        lines.append(f"validated: all {validated} round labelings")
    payload = {
        "nodes": g.n,
        "colors": max(coloring, default=0),
        "rounds": result.rounds,
        "ruling_set": sorted(result.ruling_set),
        "ok": report.ok,
        "violations": None if report.ok else report.summary(),
    }
    _emit(args, "\n".join(lines), payload)
    return 0 if report.ok else 1


def _trace_json(result: sim.RunResult) -> dict:
    rounds = []
    for states in result.trace:
        rounds.append([
            {"kind": "colored", "color": list(s.color)} if s.kind == "colored"
            else {"kind": "pointer", "group": s.group, "port": s.port}
            for s in states])
    return {"rounds": result.rounds,
            "chain": [list(v) for v in result.chain],
            "trace": rounds}


# ---------------------------------------------------------------------------
# bounds


def _int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise DomainError(f"bad integer list for {flag}: {text!r}") from None


def _table(rows: list[list[str]], header: list[str], csv: bool) -> str:
    if csv:
        lines = [",".join(header)]
        lines.extend(",".join(row) for row in rows)
        return "\n".join(lines)
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _cmd_bounds(args: argparse.Namespace) -> int:
    which = args.which
    if which in ("det", "rand"):
        deltas = _int_list(args.delta or "16", "--delta")
        betas = _int_list(args.beta_list or "1", "--beta")
        calc = bnd.det_lower_bound if which == "det" else bnd.rand_lower_bound
        rows = []
        for d in deltas:
            for b in betas:
                q = bnd.BoundQuery(d, b, args.log2n, args.K, args.log2p)
                est = calc(q)
                rows.append([str(d), str(b), f"{est.rounds:.4f}",
                             "yes" if est.valid else "no"])
        print(_table(rows, ["delta", "beta", "rounds", "valid"], args.csv))
        return 0
    if which == "upper":
        betas = _int_list(args.beta_list or "1", "--beta")
        cs = _int_list(args.colors, "--colors")
        rows = [[str(b), str(c), str(bnd.upper_bound_rounds(b, c))]
                for b in betas for c in cs]
        print(_table(rows, ["beta", "colors", "rounds"], args.csv))
        return 0
    # which == "prob"
    deltas = _int_list(args.delta or "3", "--delta")
    steps = _int_list(args.steps, "--steps")
    rows = []
    for d in deltas:
        for j in steps:
            q = bnd.BoundQuery(d, 1, 1.0, args.K, args.log2p)
            val = bnd.failure_after_j_steps(q, j)
            rows.append([str(d), str(j), f"{val:.6g}",
                         "yes" if val >= 0 else "no",
                         f"{bnd.zero_round_failure_floor(d):.6g}",
                         str(bnd.too_fast_failure_floor(d, args.t))])
    print(_table(rows, ["delta", "j", "log2_failure", "vacuous",
                        "zero_round_floor", f"too_fast_log2(t={args.t})"],
                 args.csv))
    return 0


# ---------------------------------------------------------------------------
# serve


def _cmd_serve(args: argparse.Namespace) -> int:
    from . import service
    service.serve(args.port, args.state_dir)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_rewrite(sub: argparse._SubParsersAction, name: str, help_text: str) -> None:
    p = sub.add_parser(name, help=help_text)
    p.add_argument("file", help="problem file ('-' for stdin)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="work budget for the enumeration")
    p.add_argument("--max-labels", type=int, default=DEFAULT_DERIVED_CAP,
                   help="cap on the derived alphabet size")
    p.set_defaults(handler=_cmd_rewrite)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relim",
        description="Rewrite, verify, and simulate locally checkable labeling problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_rewrite(sub, "re", "one universal edge rewrite")
    _add_rewrite(sub, "rere", "one existential node rewrite")
    _add_rewrite(sub, "speedup", "edge rewrite followed by node rewrite")

    p = sub.add_parser("zero-round", help="can the problem be solved with no communication")
    p.add_argument("file", help="problem file ('-' for stdin)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_zero_round)

    p = sub.add_parser("relax-check", help="is the second problem a relaxation of the first")
    p.add_argument("from_file", help="problem whose labelings must stay allowed")
    p.add_argument("to_file", help="candidate relaxation")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_relax_check)

    p = sub.add_parser("family", help="the ruling set problem family")
    fsub = p.add_subparsers(dest="family_command", required=True)

    g = fsub.add_parser("gen", help="generate one family member")
    g.add_argument("--delta", type=int, required=True)
    g.add_argument("--beta", type=int, default=1)
    g.add_argument("--v", help="comma-separated color counts per group (default 1,0,..)")
    g.add_argument("--x", type=int, default=0)
    g.add_argument("--json", action="store_true")
    g.set_defaults(handler=_cmd_family_gen)

    v = fsub.add_parser("verify", help="verify one of the structure lemmas")
    v.add_argument("--lemma", required=True,
                   choices=["edge", "node", "z", "reduction", "binomial", "sequence"])
    v.add_argument("--delta", type=int)
    v.add_argument("--beta", type=int, default=0,
                   help="group count; when omitted the grid runs 1 and 2, "
                        "single instances use 1")
    v.add_argument("--v", help="comma-separated color counts per group")
    v.add_argument("--x", type=int, default=0)
    v.add_argument("--grid", action="store_true",
                   help="run the whole default verification grid")
    v.add_argument("--budget", type=int, help="work budget per instance")
    v.add_argument("--check-zero-round", action="store_true",
                   help="for --lemma sequence: also check members by construction")
    v.add_argument("--json", action="store_true")
    v.set_defaults(handler=_cmd_family_verify)

    p = sub.add_parser("simulate", help="run the ruling set algorithm on a graph")
    p.add_argument("--graph", choices=["tree", "regular", "cycle"])
    p.add_argument("--graph-file", help="read the graph from an edge list file")
    p.add_argument("--graph-out", help="write the graph as an edge list file")
    p.add_argument("--delta", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--validate-steps", action="store_true",
                   help="validate every intermediate labeling (regular graphs)")
    p.add_argument("--trace-out", help="write the per-round trace as JSON")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("bounds", help="closed-form bound calculators")
    p.add_argument("--which", required=True, choices=["det", "rand", "upper", "prob"])
    p.add_argument("--delta", help="comma-separated degrees")
    p.add_argument("--beta", dest="beta_list", help="comma-separated widths")
    p.add_argument("--log2n", type=float, default=64.0,
                   help="log2 of the node count")
    p.add_argument("--colors", default="6",
                   help="comma-separated color counts (for --which upper)")
    p.add_argument("--steps", default="0,1,2",
                   help="comma-separated unwinding step counts (for --which prob)")
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--log2p", type=float, default=0.0,
                   help="log2 of the input failure probability")
    p.add_argument("--t", type=int, default=0,
                   help="round count for the too-fast floor column")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("serve", help="serve the exploration session API")
    p.add_argument("--port", type=int, default=8351)
    p.add_argument("--state-dir", required=True,
                   help="directory for persisted session logs")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
