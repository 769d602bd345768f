"""Command-line surface: spectral-gap and error sweeps emitted as CSV, the
twelve-cell censoring report, pigment trajectories, graph gaps, and the
randomized counterexample search.

All commands are deterministic given --seed; floats are printed with 12
significant digits; every CSV starts with a schema comment line.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import arch as arch_mod
from . import graphs as graphs_mod
from . import pigment as pigment_mod
from .arch import Architecture, build_named, builder_names, censor, cyclic_shift
from .channel import BudgetError, EngineError, mult_error
from .search import SearchConfig, scan, violations_jsonl
from .table1 import format_report, run_table1
from .transfer import SolverError, circuit_spectrum


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_range(text: str) -> range:
    """'3:14' -> range(3, 15); '5' -> range(5, 6)."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return range(int(lo), int(hi) + 1)
    v = int(text)
    return range(v, v + 1)


def _load_arch(args) -> Architecture:
    if args.arch:
        with open(args.arch, "r", encoding="utf-8") as fh:
            a = arch_mod.parse(fh.read())
    elif args.builder:
        params = {"N": args.N, "q": args.q}
        if args.builder == "brickwork3":
            params = {"Q1": args.Q1, "Q2": args.Q2, "Q3": args.Q3}
        a = build_named(args.builder, params)
    else:
        raise SystemExit("need --arch FILE or --builder NAME")
    if args.d is not None:
        a = a.with_repeat(max(args.d, 1))
    return a


def _emit(args, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_gap(args) -> int:
    lines = [
        "# momentgap gap v1: subleading eigenvalue and gap of the string-basis"
        " transfer product",
        "builder,N,q,d,lambda_abs,gap,singular,unit_multiplicity",
    ]

    def row(name, a, d):
        res = circuit_spectrum(a, periods=d, want_singular=not args.no_singular)
        s = "" if res.singular_subleading is None else _fmt(res.singular_subleading)
        lines.append(
            f"{name},{a.n},{a.site_dims[0]},{d},{_fmt(abs(res.subleading))},"
            f"{_fmt(res.gap)},{s},{res.unit_multiplicity}"
        )

    if args.n_range:
        for n in _parse_range(args.n_range):
            for name in ("hide_seek_C", "hide_seek_Cprime"):
                row(name, build_named(name, {"N": n, "q": args.q}), args.d or 1)
    else:
        a = _load_arch(args)
        row(args.builder or args.arch, a, args.d or a.repeat)
    _emit(args, lines)
    return 0


def cmd_multerr(args) -> int:
    lines = [
        "# momentgap multerr v1: exact multiplicative error vs Haar;"
        " variant=interior compares hide_seek_C against hide_seek_Cprime,"
        " variant=boundary a cyclic-shifted period against its last-gate"
        " deletion",
        "variant,circuit,N,d,eps_m,branch_plus,branch_minus,leakage",
    ]
    d_values = list(_parse_range(args.d_range)) if args.d_range else [args.d or 1]
    n_values = list(_parse_range(args.n_range)) if args.n_range else [args.N or 5]

    if args.arch or (args.builder and args.builder != "hide_seek_C"):
        a = _load_arch(args)
        for d in d_values:
            r = mult_error(a, d, budget_bytes=args.budget_bytes)
            lines.append(
                f"custom,{args.builder or args.arch},{a.n},{d},{_fmt(r.eps_m)},"
                f"{_fmt(r.branch_plus)},{_fmt(r.branch_minus)},"
                f"{_fmt(r.support_leakage)}"
            )
        _emit(args, lines)
        return 0

    for n in n_values:
        pairs = []
        if args.variant in ("interior", "both"):
            pairs.append(("interior", "full", arch_mod.hide_seek_C(n)))
            pairs.append(("interior", "censored", arch_mod.hide_seek_Cprime(n)))
        if args.variant in ("boundary", "both"):
            shifted = cyclic_shift(arch_mod.hide_seek_C(n), 2)
            pairs.append(("boundary", "full", shifted))
            pairs.append(("boundary", "censored",
                          censor(shifted, {len(shifted.gates) - 1})))
        for d in d_values:
            for variant, which, a in pairs:
                r = mult_error(a, d, budget_bytes=args.budget_bytes)
                lines.append(
                    f"{variant},{which},{n},{d},{_fmt(r.eps_m)},"
                    f"{_fmt(r.branch_plus)},{_fmt(r.branch_minus)},"
                    f"{_fmt(r.support_leakage)}"
                )
    _emit(args, lines)
    return 0


def cmd_table1(args) -> int:
    cells = run_table1(trials=args.trials, seed=args.seed)
    report = format_report(cells)
    _emit(args, report.splitlines())
    return 0 if all(c.ok for c in cells) else 1


def cmd_pigment(args) -> int:
    a = _load_arch(args)
    start = [Fraction(0)] * a.n
    start[args.start_site] = Fraction(1)
    states = pigment_mod.trajectory(a, start)
    lines = [
        "# momentgap pigment v1: per-gate pigment amounts, gate 0 row is the"
        " initial state",
        "step,site,amount_fraction,amount_float",
    ]
    for step, state in enumerate(states):
        for site, amount in enumerate(state.amounts):
            lines.append(f"{step},{site},{amount},{_fmt(float(amount))}")
    _emit(args, lines)
    return 0


def cmd_graphgap(args) -> int:
    lines = [
        "# momentgap graphgap v1: gap_raw = 1 - |subleading|, gap_normalized ="
        " |E| * gap_raw",
        "graph,n,k,edges,gap_raw,gap_normalized",
    ]

    def row(name, graph, k=""):
        res = graphs_mod.graph_gap(graph, args.q)
        e = len(graph.edges)
        lines.append(
            f"{name},{graph.n},{k},{e},{_fmt(res.gap)},{_fmt(e * res.gap)}"
        )

    if args.graph:
        with open(args.graph, "r", encoding="utf-8") as fh:
            row("file", graphs_mod.parse(fh.read()))
    else:
        n = args.lollipop or args.path or 10
        row("path", graphs_mod.path(n))
        if args.lollipop:
            ks = _parse_range(args.k_sweep) if args.k_sweep else range(3, 8)
            for k in ks:
                row("lollipop", graphs_mod.lollipop(n, k), k)
    _emit(args, lines)
    return 0


def cmd_search(args) -> int:
    cfg = SearchConfig(
        n_sites=args.N,
        max_gates=args.max_gates,
        metric=args.metric,
        deletion_scope=args.scope,
        seed=args.seed,
        samples=args.samples,
    )
    found = scan(cfg)
    header = (
        f"# momentgap search v1: {len(found)} violations; metric={args.metric}"
        f" scope={args.scope} seed={args.seed} samples={args.samples}"
    )
    _emit(args, [header] + ([violations_jsonl(found)] if found else []))
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p, with_builder=True):
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-bytes", type=int, default=8 * 1024**3,
                   help="refuse computations whose working set exceeds this")
    if with_builder:
        p.add_argument("--builder", choices=builder_names())
        p.add_argument("--arch", help="architecture JSON file")
        p.add_argument("--N", type=int, default=5)
        p.add_argument("--q", type=int, default=2)
        p.add_argument("--Q1", type=int, default=2)
        p.add_argument("--Q2", type=int, default=2)
        p.add_argument("--Q3", type=int, default=2)
        p.add_argument("--d", type=int, default=None, help="periods")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="momentgap",
        description="Spectral gaps and design errors of random-circuit"
        " second-moment operators",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gap", help="subleading eigenvalue, gap, singular value")
    _add_common(p)
    p.add_argument("--n-range", help="sweep N over LO:HI for both hide_seek"
                   " builders (fig1b data)")
    p.add_argument("--no-singular", action="store_true")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("multerr", help="exact multiplicative error sweeps")
    _add_common(p)
    p.add_argument("--d-range", help="sweep periods over LO:HI (fig3 data)")
    p.add_argument("--n-range", help="sweep sites over LO:HI at fixed d (fig1c data)")
    p.add_argument("--variant", choices=("interior", "boundary", "both"),
                   default="interior",
                   help="which censoring experiment to sweep")
    p.set_defaults(func=cmd_multerr)

    p = sub.add_parser("table1", help="twelve-cell censoring report")
    _add_common(p, with_builder=False)
    p.add_argument("--trials", type=int, default=60)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("pigment", help="pigment-mixing trajectory CSV")
    _add_common(p)
    p.add_argument("--start-site", type=int, default=0)
    p.set_defaults(func=cmd_pigment)

    p = sub.add_parser("graphgap", help="graph-ensemble spectral gaps")
    _add_common(p, with_builder=False)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--path", type=int, help="path graph size")
    p.add_argument("--lollipop", type=int, help="lollipop graph size")
    p.add_argument("--k-sweep", help="clique sizes LO:HI (default 3:7)")
    p.add_argument("--graph", help="graph JSON file")
    p.set_defaults(func=cmd_graphgap)

    p = sub.add_parser("search", help="randomized censoring-violation search")
    _add_common(p, with_builder=False)
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--max-gates", type=int, default=6)
    p.add_argument("--metric", choices=("eigen_gap", "singular_gap", "mult_error"),
                   default="eigen_gap")
    p.add_argument("--scope", choices=("any_gate", "interior_only", "last_gate"),
                   default="last_gate")
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_search)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (arch_mod.ArchitectureError, EngineError, BudgetError,
            SolverError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
