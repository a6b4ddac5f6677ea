"""Command-line front end: build, lay out, embed, verify and simulate wire codes."""

import argparse
import json
import os
import sys

from .codes import CodeError, load_code
from .graphs import EmbeddingError, GraphFormatError, embed_on_graph, expansion_lower_bound, load_graph
from .layout import RoutingError, layout_2d, layout_Dd
from .pauli import PauliParseError, parse_pauli
from .syndrome import ScheduleError, build_schedule, simulate_extraction
from .verify import verify_all
from .wire import build_wire_code

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_ROUTING = 0, 1, 2, 3


class InputError(Exception):
    pass


def _emit(doc, out):
    text = json.dumps(doc, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _info(msg):
    print(msg, file=sys.stderr)


def _target(args, code):
    """Placed code for ``--dim``/``--graph``, else the bare wire code."""
    if args.graph is not None and args.dim is not None:
        raise InputError("give at most one of --dim and --graph")
    if args.graph is not None:
        graph = load_graph(args.graph)
        return embed_on_graph(code, graph, seed=args.seed, reduce=not args.no_reduce, allow_stacking=args.stacking)
    if args.dim is not None:
        if args.dim < 2:
            raise InputError("--dim must be at least 2")
        if args.dim == 2:
            return layout_2d(code)
        return layout_Dd(code, D=args.dim, seed=args.seed, retries=args.retries)
    return build_wire_code(code, reduce=not args.no_reduce)


def cmd_build(args):
    code = load_code(args.code)
    wire = build_wire_code(code, reduce=not args.no_reduce)
    _emit(wire.to_dict(), args.out)
    d = verify_all(code, wire, args.wmax)
    _info(
        f"[[{wire.n},{d.k_wire},>={d.target}]] from [[{code.n},{d.k_in}]]: "
        f"{code.m} checks, max weight {d.max_weight}, max degree {d.max_degree}, "
        f"recovery {'ok' if d.recovery_ok else 'FAIL'}"
    )
    return EXIT_OK


def cmd_layout(args):
    code = load_code(args.code)
    if args.dim is None:
        raise InputError("layout needs --dim")
    args.graph = None
    placed = _target(args, code)
    _emit(placed.to_dict(), args.out)
    if args.out:
        with open(os.path.splitext(args.out)[0] + ".dot", "w") as fh:
            fh.write(placed.to_dot())
    meta = placed.meta
    extra = f", height ratio {meta['c_D']:.2f}" if "c_D" in meta else ""
    _info(f"placed {placed.wire.n} qubits in {args.dim}D, max stacking {placed.max_stacking()}{extra}")
    return EXIT_OK


def cmd_embed(args):
    code = load_code(args.code)
    if args.graph is None:
        raise InputError("embed needs --graph")
    graph = load_graph(args.graph)
    placed = embed_on_graph(code, graph, seed=args.seed, reduce=not args.no_reduce, allow_stacking=args.stacking)
    _emit(placed.to_dict(), args.out)
    if args.out:
        with open(os.path.splitext(args.out)[0] + ".plan.json", "w") as fh:
            fh.write(placed.plan.to_json(sort_keys=True) + "\n")
    _info(
        f"embedded {placed.wire.n} qubits on {graph.n} vertices: congestion {placed.meta['congestion']}, "
        f"expansion >= {expansion_lower_bound(graph):.4f}"
    )
    return EXIT_OK


def cmd_verify(args):
    code = load_code(args.code)
    report = verify_all(code, _target(args, code), args.wmax)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json(sort_keys=True) + "\n")
    print(report.table())
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_schedule(args):
    code = load_code(args.code)
    sched = build_schedule(build_wire_code(code))
    _emit(sched.to_dict(), args.out)
    _info(f"{sched.n_rounds} rounds, phase-1 depth {max(r.depth for r in sched.rounds)}")
    return EXIT_OK


def cmd_simulate(args):
    code = load_code(args.code)
    wire = build_wire_code(code)
    text = args.error if args.error is not None else "I" * code.n
    error = parse_pauli(text)
    if error.n != code.n:
        raise InputError(f"error has length {error.n}, code has {code.n} qubits")
    report = simulate_extraction(wire, build_schedule(wire), error, seed=args.seed, passes=args.passes)
    _emit(report.to_dict(), args.out)
    _info("syndrome " + "".join(map(str, report.syndrome)))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="wirecodes", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("code", help="code file: one Pauli string per line")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=func)
        return sp

    def targets(sp):
        sp.add_argument("--dim", type=int, help="lay out on a D-dimensional grid")
        sp.add_argument("--graph", help="edge-list file to embed on")
        sp.add_argument("--retries", type=int, default=8)
        sp.add_argument("--no-reduce", action="store_true", help="skip weight reduction before embedding")
        sp.add_argument("--stacking", action="store_true", help="allow several inputs on one graph vertex")

    sp = add("build", cmd_build, "write the wire code as JSON")
    sp.add_argument("--no-reduce", action="store_true")
    sp.add_argument("--wmax", type=int, default=3)
    sp = add("layout", cmd_layout, "place the wire code on a grid (JSON + DOT)")
    targets(sp)
    sp = add("embed", cmd_embed, "embed the wire code on a graph")
    targets(sp)
    sp = add("verify", cmd_verify, "run the full property report")
    targets(sp)
    sp.add_argument("--wmax", type=int, default=3)
    add("schedule", cmd_schedule, "syndrome-extraction schedule as JSON")
    sp = add("simulate", cmd_simulate, "simulate syndrome extraction for a data error")
    sp.add_argument("--error", help="Pauli string on the data qubits (default: identity)")
    sp.add_argument("--passes", type=int, default=1)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RoutingError as exc:
        _info(f"routing failed: {exc}")
        return EXIT_ROUTING
    except (
        InputError,
        CodeError,
        GraphFormatError,
        PauliParseError,
        EmbeddingError,
        ScheduleError,
        OSError,
    ) as exc:
        _info(f"error: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
