"""Command-line front end: run, verify, oblivcheck, bench.

Exit codes: 0 ok, 1 result mismatch or obliviousness violation, 2 parse
error, 3 validation error, 4 internal fault, 5 size mismatch.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import bench
from .abb import BlackBox, Op
from .errors import ParseError, ValidationError, PreconditionError
from .graph import build_edgelist, merge_party_inputs, read_graph, read_parties, symmetrize
from .kshell import kshell_oblivious, kshell_oracle
from .mpcsim import ADDITIVE, IDEAL_HOST, run_protocol
from .omem import backend_name
from .pagerank import (LITERAL, MODES, STANDARD, pagerank_oblivious, pagerank_oracle_list,
                       pagerank_oracle_matrix)
from .tracecheck import Trace, compare_traces, size_params

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_INTERNAL = 4
EXIT_SIZE = 5

PAGERANK_TOL = 1e-5


class CLIError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _parse_s(text):
    try:
        s = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < s < 1:
        raise argparse.ArgumentTypeError("s must lie in (0, 1)")
    return s


def _load_graph(path, algo, sym):
    n, edges = read_graph(path)
    if algo == "kshell" and sym:
        edges = symmetrize(edges)
    return build_edgelist(n, edges)


def _load_parties(directory, algo, sym):
    parts, n = read_parties(directory)
    if algo == "kshell" and sym:
        for p in parts:
            p.edges = symmetrize(p.edges)
    return parts, n


def _params(args):
    p = {"backend": backend_name(args.backend), "seed": args.seed}
    if args.algo == "pagerank":
        p.update(mode=args.mode, l=args.l, s=str(args.s))
    if getattr(args, "parties", None):
        p["mpc"] = args.mpc
    return p


def _counters(box, transcript=None):
    out = {
        "primitives": {op.name.lower(): box.counts[op] for op in Op if box.counts[op]},
        "events": box.n_events,
        "oram_units": sum(a.charged_units for a in box.arrays),
        "oram_accesses": box.counts[Op.ORAM_READ] + box.counts[Op.ORAM_WRITE],
        "sort_gates": box.counts[Op.SORT_CE],
        "cost": box.cost(),
    }
    if transcript is not None:
        out["transcript"] = transcript.totals()
    return out


def _execute(args, graph_path=None):
    """Run the chosen program; returns (EdgeList, results, Trace, counters)."""
    if getattr(args, "parties", None):
        parts, n = _load_parties(args.parties, args.algo, args.symmetrize)
        graph = merge_party_inputs(parts, n)
        results, transcript = run_protocol(
            parts, args.algo, args.mpc, n=n, oram=args.backend, mode=args.mode,
            l=args.l, s=args.s, seed=args.seed, record=True)
        box = transcript.box
        counters = _counters(box, transcript)
    else:
        path = graph_path or args.graph
        if path is None:
            raise CLIError(EXIT_PARSE, "a graph file or --parties DIR is required")
        graph = _load_graph(path, args.algo, args.symmetrize)
        box = BlackBox(record=True)
        if args.algo == "kshell":
            results = kshell_oblivious(graph, backend=args.backend, box=box)
        else:
            results = pagerank_oblivious(graph, args.l, args.s, args.mode,
                                         backend=args.backend, box=box)
        counters = _counters(box)
    sizes = size_params(args.algo, graph, l=args.l if args.algo == "pagerank" else None)
    return graph, results, Trace(box.events, sizes, box.marks), counters


def _document(args, graph, results, trace, counters):
    if args.algo == "pagerank":
        values = [float(x) for x in results]
    else:
        values = list(results)
    return {
        "algorithm": args.algo,
        "n": graph.n,
        "m": graph.m,
        "params": _params(args),
        "results": values,
        "counters": counters,
        "trace_digest": trace.digest,
    }


def _expected(args, graph):
    adj = graph.adjacency()
    if args.algo == "kshell":
        return kshell_oracle(graph.n, adj)
    oracle = args.oracle or ("matrix" if args.mode == STANDARD else "list")
    run = pagerank_oracle_matrix if oracle == "matrix" else pagerank_oracle_list
    return [float(x) for x in run(graph.n, adj, args.l, float(args.s))]


def _diff(args, got, want):
    """Per-node mismatch lines; empty when the results agree."""
    lines = []
    for node, (g, w) in enumerate(zip(got, want), 1):
        if args.algo == "kshell":
            bad = g != w
        else:
            bad = abs(float(g) - w) > PAGERANK_TOL
        if bad:
            lines.append(f"node {node}: got {float(g) if args.algo == 'pagerank' else g}, "
                         f"expected {w}")
    return lines


def _emit_json(doc, out_path):
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_run(args):
    graph, results, trace, counters = _execute(args)
    if args.trace_out:
        trace.dump(args.trace_out)
        trace.dump_digest(args.trace_out + ".sha256")
    doc = _document(args, graph, results, trace, counters)
    code = EXIT_OK
    if args.verify:
        lines = _diff(args, results, _expected(args, graph))
        doc["verified"] = not lines
        if lines:
            sys.stderr.write("result mismatch:\n" + "".join(f"  {x}\n" for x in lines))
            code = EXIT_MISMATCH
    _emit_json(doc, args.output)
    return code


def cmd_verify(args):
    args.verify = True
    return cmd_run(args)


def cmd_oblivcheck(args):
    args.parties = None
    ga, _, ta, _ = _execute(args, args.graph_a)
    gb, _, tb, _ = _execute(args, args.graph_b)
    verdict = compare_traces(ta, tb)
    if verdict.status == "size_mismatch":
        sa, sb = verdict.sizes
        print(f"size mismatch: {args.graph_a} has {sa}, {args.graph_b} has {sb}")
        return EXIT_SIZE
    if verdict.status == "violation":
        print(f"violation: traces diverge at event {verdict.index}")
        print(f"  {verdict.detail}")
        return EXIT_MISMATCH
    print(f"oblivious: {len(ta)} events, digest {ta.digest}")
    return EXIT_OK


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args):
    sizes = args.sizes or ([256, 512, 1024, 2048] if args.algo == "kshell" else [32, 64, 128, 256])
    measured, terms = [], []
    for n in sizes:
        m = args.density * n
        if args.algo == "kshell":
            measured.append(bench.measure_kshell(n, m, args.backend, args.seed))
            terms.append(bench.kshell_terms(n, m))
        else:
            measured.append(bench.measure_pagerank(n, m, args.l, args.mode, args.backend, args.seed))
            terms.append(bench.pagerank_terms(n, m, args.l))
    if len(sizes) == 1:
        print("n,m,cost")
        print(f"{sizes[0]},{args.density * sizes[0]},{measured[0]}")
        return EXIT_OK
    f = bench.fit(measured, terms)
    print("n,m,cost,model,ratio")
    for n, y, p, r in zip(sizes, measured, f.predicted, f.ratios):
        print(f"{n},{args.density * n},{y},{p:.1f},{r:.4f}")
    print("constants: " + ", ".join(f"{c:.6g}" for c in f.constants))
    ok = f.worst_ratio <= 2
    print(f"worst ratio {f.worst_ratio:.4f} ({'within' if ok else 'outside'} a factor of 2)")
    return EXIT_OK if ok else EXIT_MISMATCH


def _common(p, bench_defaults=False):
    p.add_argument("--algo", choices=["kshell", "pagerank"], required=True)
    p.add_argument("--mode", choices=MODES, default=LITERAL, help="pagerank update rule")
    p.add_argument("--backend", choices=["linear", "circuit-cost"],
                   default="circuit-cost" if bench_defaults else "linear",
                   help="oblivious memory backend")
    p.add_argument("--l", type=_positive, default=10 if bench_defaults else 30, help="pagerank sweeps")
    p.add_argument("--s", type=_parse_s, default=Fraction(85, 100), help="damping factor")
    p.add_argument("--seed", type=int, default=0)


def _graph_opts(p):
    p.add_argument("--symmetrize", action="store_true",
                   help="add reverse edges before running kshell")


def build_parser():
    parser = argparse.ArgumentParser(prog="oblivgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, fn, help_ in [("run", cmd_run, "run a protocol and print the result document"),
                            ("verify", cmd_verify, "run and compare against the clear oracle")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("graph", nargs="?", help="graph file")
        _common(p)
        _graph_opts(p)
        p.add_argument("--parties", metavar="DIR", help="directory of party input files")
        p.add_argument("--mpc", choices=[IDEAL_HOST, ADDITIVE], default=IDEAL_HOST,
                       help="MPC backend for --parties runs")
        p.add_argument("--trace-out", metavar="PATH", help="write the binary trace dump here")
        p.add_argument("--oracle", choices=["matrix", "list"],
                       help="pagerank oracle to verify against (default follows --mode)")
        p.add_argument("-o", "--output", metavar="PATH", help="write JSON here instead of stdout")
        if name == "run":
            p.add_argument("--verify", action="store_true", help="also check against the oracle")
        p.set_defaults(func=fn)

    p = sub.add_parser("oblivcheck", help="certify that two equal-size inputs give one trace")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    _common(p)
    _graph_opts(p)
    p.set_defaults(func=cmd_oblivcheck)

    p = sub.add_parser("bench", help="measure charged cost and fit the complexity form")
    _common(p, bench_defaults=True)
    p.add_argument("--sizes", type=_int_list, help="comma-separated node counts")
    p.add_argument("--density", type=int, default=4, help="edges per node")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, PreconditionError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # anything else is our bug or a backend fault
        print(f"internal fault: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
