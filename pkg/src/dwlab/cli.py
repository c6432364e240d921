"""Command-line front end: generation, solving, validation, reduction,
measurement and interactive play, with machine-readable JSON output.

Exit codes: 0 success, 1 negative verification (a check ran and said no),
2 usage/input error, 3 resource budget exceeded.  Errors go to stderr with
stable prefixes; identical configurations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import decomp as decomp_mod
from . import game, gadgets, logic, measures
from .errors import BudgetExceeded, DwlabError, InputError
from .graph import DiGraph, decode, encode, iter_bits, set_of

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _emit(args, obj, text_lines):
    if args.format == "json":
        sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
    else:
        for line in text_lines:
            sys.stdout.write(line + "\n")


def _read_graph(path) -> DiGraph:
    with open(path, "rb") as fh:
        return decode(fh.read())


def _graph_obj(g: DiGraph) -> dict:
    return json.loads(encode(g).decode())


def _write_output(path, data: bytes):
    if path == "-" or path is None:
        sys.stdout.buffer.write(data)
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def cmd_gen(args) -> int:
    if args.family == "gnst":
        gg = gadgets.gen_gnst(args.n, gadgets.SizeProfile.parse(args.s),
                              gadgets.SizeProfile.parse(args.t))
        g = gg.graph
        obj = {"graph": _graph_obj(g)}
        lines = [f"G_{args.n}({args.s},{args.t}): {g.n} vertices, {g.num_edges()} edges"]
        if args.summary:
            obj["summary"] = gg.summary()
            for row in gg.summary():
                lines.append("  " + " ".join(f"{k}={v}" for k, v in row.items() if v is not None))
    elif args.family == "upclosure":
        g = gadgets.gen_upclosure_tree(args.n)
        obj = {"graph": _graph_obj(g)}
        lines = [f"upclosure tree height {args.n}: {g.n} vertices"]
    else:
        g = gadgets.gen_sibling_tree(args.n)
        obj = {"graph": _graph_obj(g)}
        lines = [f"sibling tree n={args.n}: {g.n} vertices"]
    if args.output:
        _write_output(args.output, encode(g, args.graph_format))
        lines.append(f"wrote {args.output}")
        if args.format == "text":
            _emit(args, obj, lines)
        else:
            _emit(args, obj, lines)
        return EXIT_OK
    _emit(args, obj, lines)
    return EXIT_OK


def cmd_solve(args) -> int:
    g = _read_graph(args.graph)
    res = game.solve(g, args.k, mode=args.mode, pruned=not args.unpruned,
                     budget=args.budget, extract_strategy=args.emit_strategy is not None)
    obj = {
        "winner": res.winner,
        "k": args.k,
        "mode": args.mode,
        "positions": res.n_positions,
        "moves": res.n_moves,
    }
    lines = [f"{res.winner} win the {args.k}-cop game ({res.n_positions} positions explored)"]
    if args.emit_strategy is not None and res.strategy is not None:
        data = json.dumps(res.strategy.to_json(), sort_keys=True).encode()
        _write_output(args.emit_strategy, data)
        if args.emit_strategy != "-":
            lines.append(f"strategy written to {args.emit_strategy}")
    _emit(args, obj, lines)
    return EXIT_OK


def cmd_width(args) -> int:
    g = _read_graph(args.graph)
    w = game.dag_width(g, args.max, budget=args.budget)
    obj = {"width": w, "exceeds_k_max": w is None, "k_max": args.max}
    lines = [f"width {w}" if w is not None else f"exceeds k_max {args.max}"]
    _emit(args, obj, lines)
    return EXIT_OK


def cmd_validate_decomp(args) -> int:
    g = _read_graph(args.graph)
    with open(args.decomposition, "rb") as fh:
        dec = decomp_mod.DagDecomposition.from_json(fh.read())
    verdict = decomp_mod.validate(g, dec)
    obj = {
        "ok": bool(verdict),
        "axiom": None if verdict else verdict.axiom,
        "witness": None if verdict else list(verdict.witness),
        "width": dec.width(),
        "size": dec.size(),
    }
    lines = ["Ok" if verdict else f"Violation({verdict.axiom}): {verdict.message}"]
    _emit(args, obj, lines)
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_validate_ddecomp(args) -> int:
    g = _read_graph(args.graph)
    with open(args.decomposition, "rb") as fh:
        dec = measures.DDecomposition.from_json(fh.read())
    verdict = measures.validate_d_decomposition(g, dec)
    obj = {
        "ok": bool(verdict),
        "condition": None if verdict else verdict.condition,
        "witness": None if verdict else list(verdict.witness),
        "width": dec.width(),
    }
    lines = ["Ok" if verdict else f"Violation({verdict.condition}): {verdict.message}"]
    _emit(args, obj, lines)
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_strategy_to_decomp(args) -> int:
    g = _read_graph(args.graph)
    with open(args.strategy, "rb") as fh:
        strat = game.StrategyTable.from_json("cops", json.loads(fh.read().decode()), g.n)
    dec = decomp_mod.decomposition_from_strategy(g, strat, args.k)
    obj = {
        "decomposition": json.loads(dec.to_json().decode()),
        "width": dec.width(),
        "size": dec.size(),
    }
    if args.output:
        _write_output(args.output, dec.to_json())
    _emit(args, obj, [f"decomposition: width {dec.width()}, size {dec.size()}"])
    return EXIT_OK


def cmd_decomp_to_strategy(args) -> int:
    g = _read_graph(args.graph)
    with open(args.decomposition, "rb") as fh:
        dec = decomp_mod.DagDecomposition.from_json(fh.read())
    strat = decomp_mod.strategy_from_decomposition(g, dec)
    obj = {"strategy": strat.to_json(), "cops": dec.width()}
    if args.output:
        _write_output(args.output, json.dumps(strat.to_json(), sort_keys=True).encode())
    _emit(args, obj, [f"bag-walk strategy over {len(strat)} positions, {dec.width()} cops"])
    return EXIT_OK


def cmd_count_positions(args) -> int:
    g = _read_graph(args.graph)
    with open(args.strategy, "rb") as fh:
        strat = game.StrategyTable.from_json("cops", json.loads(fh.read().decode()), g.n)
    count = game.count_consistent_positions(g, strat, args.k, budget=args.budget)
    obj = {"count": count}
    _emit(args, obj, [f"{count} consistent positions"])
    return EXIT_OK


def cmd_kelly(args) -> int:
    g = _read_graph(args.graph)
    kw, order = measures.kelly_width(g)
    obj = {"kelly_width": kw, "order": order.to_json()}
    _emit(args, obj, [f"kelly width {kw} (order: {' '.join(g.names[v] for v in order.order)})"])
    return EXIT_OK


def _read_qbf(path) -> logic.QbfFormula:
    with open(path, "rb") as fh:
        data = fh.read()
    if path.endswith(".cnf") or path.endswith(".dimacs"):
        cnf = logic.parse_dimacs(data)
        prefix = tuple(("forall", i) for i in range(1, cnf.num_vars + 1))
        return logic.QbfFormula(prefix, cnf)
    return logic.parse_qdimacs(data)


def cmd_reduce(args) -> int:
    qbf = _read_qbf(args.formula)
    gg = logic.build_s_phi(qbf)
    obj = {
        "graph": _graph_obj(gg.graph),
        "k_star": logic.predicted_cops(qbf),
        "num_vars": qbf.r,
    }
    if args.emit_graph:
        _write_output(args.emit_graph, encode(gg.graph))
    _emit(args, obj, [
        f"reduction graph: {gg.n} vertices, threshold k*={obj['k_star']}"
    ])
    return EXIT_OK


def cmd_qbf_eval(args) -> int:
    qbf = _read_qbf(args.formula)
    value = logic.qbf_eval(qbf)
    obj = {"truth": value.truth}
    _emit(args, obj, [f"{'true' if value.truth else 'false'}"])
    return EXIT_OK


def cmd_verify_reduction(args) -> int:
    qbf = _read_qbf(args.formula)
    gg = logic.build_s_phi(qbf)
    report = logic.verify_reduction(qbf, budget=args.budget, graph=gg)
    if args.emit_graph:
        _write_output(args.emit_graph, encode(gg.graph))
    obj = report.to_json()
    _emit(args, obj, [report.text()])
    if not report.verified:
        return EXIT_BUDGET
    return EXIT_OK if report.agrees else EXIT_NEGATIVE


def cmd_play(args) -> int:
    g = _read_graph(args.graph)
    rec = game.interactive_play(g, args.k, args.side, budget=args.budget)
    obj = rec.to_json()
    if args.format == "json":
        _emit(args, obj, [])
    else:
        sys.stdout.write(rec.transcript(g) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dwlab", description=__doc__)
    p.add_argument("--format", choices=["json", "text"], default="text",
                   help="output format (json is schema-stable)")
    p.add_argument("--budget", type=int, default=game.DEFAULT_BUDGET,
                   help="position budget for exact searches")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized corpora (recorded in output ordering)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a gadget or fixture graph")
    g.add_argument("family", choices=["gnst", "upclosure", "sibling"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--s", default="const:2", help="size profile (const:<c>|floor_log|div_log)")
    g.add_argument("--t", default="const:2")
    g.add_argument("--summary", action="store_true", help="print the level table")
    g.add_argument("--output", help="write the graph to this path")
    g.add_argument("--graph-format", choices=["json", "dot", "edgelist"], default="json")
    g.set_defaults(fn=cmd_gen)

    s = sub.add_parser("solve", help="solve the k-cop game exactly")
    s.add_argument("graph")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--mode", choices=["monotone", "raw"], default="monotone")
    s.add_argument("--unpruned", action="store_true", help="disable cop-move pruning")
    s.add_argument("--emit-strategy", help="write the winner's strategy JSON here ('-' = stdout)")
    s.set_defaults(fn=cmd_solve)

    w = sub.add_parser("width", help="exact DAG-width up to a cap")
    w.add_argument("graph")
    w.add_argument("--max", type=int, required=True)
    w.set_defaults(fn=cmd_width)

    v = sub.add_parser("validate-decomp", help="check the four decomposition axioms")
    v.add_argument("graph")
    v.add_argument("decomposition")
    v.set_defaults(fn=cmd_validate_decomp)

    v2 = sub.add_parser("validate-ddecomp", help="check a D-decomposition")
    v2.add_argument("graph")
    v2.add_argument("decomposition")
    v2.set_defaults(fn=cmd_validate_ddecomp)

    s2d = sub.add_parser("strategy-to-decomp", help="decomposition from a winning strategy")
    s2d.add_argument("graph")
    s2d.add_argument("strategy")
    s2d.add_argument("--k", type=int, required=True)
    s2d.add_argument("--output")
    s2d.set_defaults(fn=cmd_strategy_to_decomp)

    d2s = sub.add_parser("decomp-to-strategy", help="bag-walk strategy from a decomposition")
    d2s.add_argument("graph")
    d2s.add_argument("decomposition")
    d2s.add_argument("--output")
    d2s.set_defaults(fn=cmd_decomp_to_strategy)

    cp = sub.add_parser("count-positions", help="positions consistent with a strategy")
    cp.add_argument("graph")
    cp.add_argument("strategy")
    cp.add_argument("--k", type=int, required=True)
    cp.set_defaults(fn=cmd_count_positions)

    kw = sub.add_parser("kelly", help="exact Kelly-width")
    kw.add_argument("graph")
    kw.set_defaults(fn=cmd_kelly)

    rd = sub.add_parser("reduce", help="build the reduction graph of a QBF")
    rd.add_argument("formula", help="QDIMACS file (.cnf/.dimacs files are universally closed)")
    rd.add_argument("--emit-graph", help="write the reduction graph JSON here")
    rd.set_defaults(fn=cmd_reduce)

    qe = sub.add_parser("qbf-eval", help="evaluate a QBF by the model-checking game")
    qe.add_argument("formula")
    qe.set_defaults(fn=cmd_qbf_eval)

    vr = sub.add_parser("verify-reduction", help="check threshold against formula truth")
    vr.add_argument("formula")
    vr.add_argument("--emit-graph")
    vr.set_defaults(fn=cmd_verify_reduction)

    pl = sub.add_parser("play", help="interactive play against the machine")
    pl.add_argument("graph")
    pl.add_argument("--k", type=int, required=True)
    pl.add_argument("--side", choices=["cops", "robber"], default="robber",
                    help="the side the human controls")
    pl.set_defaults(fn=cmd_play)
    return p


def main(argv=None) -> int:
    threads = os.environ.get("DWLAB_THREADS")
    if threads is not None:
        try:
            if int(threads) < 1:
                print("error: DWLAB_THREADS must be a positive integer", file=sys.stderr)
                return EXIT_USAGE
        except ValueError:
            print("error: DWLAB_THREADS must be a positive integer", file=sys.stderr)
            return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except BudgetExceeded as e:
        print(f"budget: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DwlabError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
