"""Command-line interface: ``sloccgraph <command> ...``.

Machine-readable output (JSON or JSON lines, stable key order) goes to stdout or
``--out``; a short human summary goes to stderr.  Exit codes: 0 Equivalent,
1 NotEquivalent, 2 Inconclusive, 3 usage/input error, 4 rejected certificate.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .conditions import scan
from .errors import SloccGraphError
from .formats import (
    dumps, load_record, load_slocc, load_state, read_text, slocc_to_record, state_to_record,
)
from .genstab import general_stabilizer_element, projector_stabilizer_element
from .graphs import Graph, parse_graph
from .pauli import bits_from_str
from .solver import INCONCLUSIVE, SolveConfig, solve, verify_certificate
from .state import apply_slocc, build_graph_state, random_slocc, state_dense_limit

EXIT_ERROR = 3
EXIT_REJECTED = 4
GENSTAB_DENSE_LIMIT = 8


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 3 so they cannot be mistaken for an Inconclusive verdict."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _max_support(text: str) -> int | None:
    if text == "auto":
        return None
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("max-support must be 'auto' or a non-negative integer")
    return value


def _load_graph(path: str) -> Graph:
    return parse_graph(read_text(path))


def _emit(lines: list[str], out: str | None) -> None:
    text = "".join(line + "\n" for line in lines)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _parse_index(text: str, n: int) -> int:
    if len(text) != n or set(text) - {"0", "1"}:
        raise ValueError(f"index must be a bitstring of length {n} (site 0 first), got {text!r}")
    return bits_from_str(text)


# -- commands ------------------------------------------------------------------------

def cmd_graphstate(args) -> int:
    g = _load_graph(args.graph)
    psi = build_graph_state(g, limit=args.dense_limit)
    _emit([dumps(state_to_record(psi))], args.out)
    _note(f"graph state on {g.n} qubits, {len(g.edges())} edges")
    return 0


def cmd_conditions(args) -> int:
    g = _load_graph(args.graph)
    max_support = g.n if args.max_support is None else min(args.max_support, g.n)
    groups = scan(g, max_support)
    lines = [dumps(grp.to_record()) for grp in groups
             if args.category is None or grp.category == args.category]
    _emit(lines, args.out)
    _note(f"{len(lines)} groups emitted ({sum(len(grp.conditions) for grp in groups)} conditions scanned)")
    return 0


def cmd_test(args) -> int:
    g = _load_graph(args.graph)
    psi = load_state(args.state)
    if psi.n > args.dense_limit:
        raise SloccGraphError(f"{psi.n} qubits exceed the dense limit {args.dense_limit}")
    if args.verify_only:
        record = load_record(args.verify_only, "certificate")
        verdict = verify_certificate(psi, g, record, args.tol)
        rejected = verdict.outcome == INCONCLUSIVE and record.get("outcome") != INCONCLUSIVE
        _emit([dumps(verdict.to_record())], args.out)
        _note(f"certificate {'rejected' if rejected else 'reproduces ' + verdict.outcome}")
        return EXIT_REJECTED if rejected else verdict.exit_code
    cfg = SolveConfig(tol=args.tol, multistart=args.multistart, seed=args.seed, max_support=args.max_support)
    verdict = solve(psi, g, cfg)
    _emit([dumps(verdict.to_record())], args.out)
    detail = ""
    if verdict.verification_residual is not None:
        detail = f", verification residual {verdict.verification_residual:.2e}"
    elif verdict.witness is not None:
        detail = f", witness {verdict.witness.kind}"
    _note(f"{verdict.outcome} (stage {verdict.stage}{detail})")
    return verdict.exit_code


def cmd_random_slocc(args) -> int:
    g = _load_graph(args.graph)
    rng = np.random.default_rng(args.seed)
    s = random_slocc(rng, g.n)
    psi = apply_slocc(s, build_graph_state(g, limit=args.dense_limit))
    state_line, slocc_line = dumps(state_to_record(psi)), dumps(slocc_to_record(s))
    if args.out is None or args.out == "-":
        _emit([state_line, slocc_line], None)
    else:
        _emit([state_line], f"{args.out}.state.json")
        _emit([slocc_line], f"{args.out}.slocc.json")
    _note(f"random SLOCC image on {g.n} qubits (seed {args.seed}), det S = {s.det:.6g}")
    return 0


def cmd_genstab(args) -> int:
    g = _load_graph(args.graph)
    limit = args.dense_limit
    i = _parse_index(args.index, g.n)
    if args.slocc is None:
        op = projector_stabilizer_element(g, i, limit=limit)
    else:
        s = load_slocc(args.slocc)
        op = general_stabilizer_element(g, s, i, limit=limit)
    record = {"index": args.index, **op.to_record()}
    _emit([dumps(record)], args.out)
    _note(f"element {args.index}: {op.label}, residual {op.residual:.2e}" if op.residual is not None
          else f"element {args.index}: {op.label}")
    return 0


def cmd_apply(args) -> int:
    psi = load_state(args.state)
    s = load_slocc(args.slocc)
    out = apply_slocc(s, psi)
    _emit([dumps(state_to_record(out))], args.out)
    _note(f"applied {s.n}-site operator")
    return 0


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    default_dense = state_dense_limit()
    p = _Parser(prog="sloccgraph", description="SLOCC equivalence of pure states to graph states.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, dense_default: int) -> None:
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--dense-limit", type=_positive_int, default=dense_default,
                        help=f"maximum qubits for dense computations (default {dense_default})")

    sp = sub.add_parser("graphstate", help="write the graph state of a graph")
    sp.add_argument("graph", help="graph file (JSON edge list or graph6; '-' for stdin)")
    common(sp, default_dense)
    sp.set_defaults(func=cmd_graphstate)

    sp = sub.add_parser("conditions", help="list condition groups as JSON lines")
    sp.add_argument("graph")
    sp.add_argument("--max-support", type=_max_support, default=None, help="largest support size (default: n)")
    sp.add_argument("--category", choices=("I", "II", "III"), help="only emit groups of this category")
    common(sp, default_dense)
    sp.set_defaults(func=cmd_conditions)

    sp = sub.add_parser("test", help="decide whether a state is an SLOCC image of a graph state")
    sp.add_argument("state")
    sp.add_argument("graph")
    sp.add_argument("--tol", type=_positive_float, default=1e-9)
    sp.add_argument("--seed", type=_seed, default=0)
    sp.add_argument("--multistart", type=_positive_int, default=32)
    sp.add_argument("--max-support", type=_max_support, default=None, help="'auto' (default) or an integer")
    sp.add_argument("--verify-only", metavar="CERTIFICATE", help="re-check an emitted verdict instead of solving")
    common(sp, default_dense)
    sp.set_defaults(func=cmd_test)

    sp = sub.add_parser("random-slocc", help="sample a random SLOCC image of a graph state")
    sp.add_argument("graph")
    sp.add_argument("--seed", type=_seed, default=0)
    sp.add_argument("--out", help="prefix for PREFIX.state.json and PREFIX.slocc.json (default: two lines on stdout)")
    sp.add_argument("--dense-limit", type=_positive_int, default=default_dense)
    sp.set_defaults(func=cmd_random_slocc)

    sp = sub.add_parser("genstab", help="separable (generalized) stabilizer element")
    sp.add_argument("graph")
    sp.add_argument("slocc", nargs="?", help="optional SLOCC file; conjugates the element")
    sp.add_argument("--index", required=True, help="selector bitstring, site 0 first")
    common(sp, GENSTAB_DENSE_LIMIT)
    sp.set_defaults(func=cmd_genstab)

    sp = sub.add_parser("apply", help="apply a SLOCC operator to a state")
    sp.add_argument("state")
    sp.add_argument("slocc")
    common(sp, default_dense)
    sp.set_defaults(func=cmd_apply)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SloccGraphError, ValueError, OSError) as exc:
        _note(f"sloccgraph {args.command}: error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
