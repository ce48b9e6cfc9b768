"""Command-line front-end.

Subcommands: ``gen`` synthesizes rate tables, ``solve`` builds and solves
the loop-search QUBO, ``bench`` runs the solver-comparison harness,
``timing`` evaluates the annealer access-time model, and ``oracle`` runs
the direct cycle search.  Exit codes: 0 success, 1 usage or parameter
error, 2 I/O failure, 3 solver finished but its best sample violates the
loop constraints.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .bench import (
    BenchReport,
    QpuTimingModel,
    emit_report,
    qpu_access_time,
    run_batches,
)
from .errors import ArbQuboError
from .model import (
    HamiltonianWeights,
    ProblemShape,
    build_qubo,
    canonical_rotation,
    decode,
    default_weights,
    model_to_json,
    profitability,
)
from .oracle import best_cycle_bruteforce, has_arbitrage_bellman_ford
from .qubo import sampleset_to_json
from .rates import (
    dump_rates_csv,
    generate_consistent,
    load_rates,
    plant_cycle,
    to_log_weights,
)
from .solvers import SamplerParams, sample_sa, sample_tabu, solve_exact

PROFIT_DISPLAY_TOL = 1e-9

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip() != ""]


def _read_rates(path: str):
    fmt = "json" if path.endswith(".json") else "csv"
    with open(path, "rb") as fh:
        return load_rates(fh, fmt)


def build_parser() -> _Parser:
    parser = _Parser(prog="arbqubo", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a synthetic rate table")
    gen.add_argument("--n", type=int, default=5, help="number of currencies")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument(
        "--plant",
        type=_int_list,
        default=None,
        help="comma-separated currency indices of a cycle to boost, e.g. 0,1,2",
    )
    gen.add_argument(
        "--strength",
        type=float,
        default=1.05,
        help="profit factor planted on the cycle (must exceed 1)",
    )
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="build the QUBO and run one solver")
    solve.add_argument("--rates", required=True, help="rate table (.csv or .json)")
    solve.add_argument("--loop-length", type=int, default=4)
    solve.add_argument(
        "--solver", choices=["exact", "sa", "tabu"], default="exact"
    )
    solve.add_argument("--reads", type=int, default=500)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--sweeps", type=int, default=1000)
    solve.add_argument("--weight-rate", type=float, default=1.0)
    solve.add_argument("--weight-one-hot", type=float, default=None)
    solve.add_argument("--weight-endpoint", type=float, default=None)
    solve.add_argument("--weight-consecutive", type=float, default=None)
    solve.add_argument("--weight-fill", type=float, default=None)
    solve.add_argument("--out", default=None, help="write the sample set as JSON")
    solve.add_argument(
        "--model-out", default=None, help="write the model description as JSON"
    )
    solve.set_defaults(func=cmd_solve)

    bench = sub.add_parser("bench", help="batch solver comparison")
    bench.add_argument("--rates", required=True)
    bench.add_argument("--loop-length", type=int, default=4)
    bench.add_argument(
        "--solvers", default="sa,tabu", help="comma-separated subset of sa,tabu"
    )
    bench.add_argument("--reads", type=_int_list, default=[50, 500])
    bench.add_argument("--batches", type=int, default=2)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--sweeps", type=int, default=1000)
    bench.add_argument("--out", required=True, help="report output path")
    bench.add_argument("--format", choices=["csv", "json"], default="csv")
    bench.set_defaults(func=cmd_bench)

    timing = sub.add_parser("timing", help="evaluate the access-time model")
    timing.add_argument("--programming", type=float, required=True)
    timing.add_argument("--anneal", type=float, default=50.0)
    timing.add_argument("--readout", type=float, required=True)
    timing.add_argument("--delay", type=float, default=20.0)
    timing.add_argument("--reads", type=_int_list, default=[1, 10, 100, 500])
    timing.add_argument("--include-overhead", action="store_true")
    timing.add_argument("--overhead", type=float, default=20000.0)
    timing.set_defaults(func=cmd_timing)

    oracle = sub.add_parser("oracle", help="direct cycle search, no QUBO")
    oracle.add_argument("--rates", required=True)
    oracle.add_argument("--max-len", type=int, default=4)
    oracle.set_defaults(func=cmd_oracle)

    return parser


def cmd_gen(args) -> int:
    rates = generate_consistent(args.n, args.seed)
    if args.plant is not None:
        rates = plant_cycle(rates, args.plant, args.strength)
    payload = dump_rates_csv(rates)
    with open(args.out, "wb") as fh:
        fh.write(payload)
    print(f"wrote {args.out}: {rates.n} currencies")
    return EXIT_OK


def _resolve_weights(args, w, shape) -> HamiltonianWeights:
    weights = default_weights(w, shape, rate=args.weight_rate)
    overrides = {}
    if args.weight_one_hot is not None:
        overrides["one_hot"] = args.weight_one_hot
    if args.weight_endpoint is not None:
        overrides["endpoint"] = args.weight_endpoint
    if args.weight_consecutive is not None:
        overrides["consecutive"] = args.weight_consecutive
    if args.weight_fill is not None:
        overrides["fill"] = args.weight_fill
    return replace(weights, **overrides) if overrides else weights


def cmd_solve(args) -> int:
    rates = _read_rates(args.rates)
    shape = ProblemShape(rates.n, args.loop_length)
    w = to_log_weights(rates)
    weights = _resolve_weights(args, w, shape)
    q = build_qubo(w, shape, weights)

    if args.solver == "exact":
        result = solve_exact(q)
    else:
        params = SamplerParams(
            num_reads=args.reads, seed=args.seed, sweeps_per_read=args.sweeps
        )
        result = sample_sa(q, params) if args.solver == "sa" else sample_tabu(q, params)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(sampleset_to_json(result))
    if args.model_out:
        with open(args.model_out, "w", encoding="utf-8") as fh:
            fh.write(model_to_json(shape, weights, rates.labels))

    best = result.best()
    decoded = decode(best.bits, shape)
    print(f"solver: {result.solver_name}")
    print(f"best energy: {best.energy!r}")
    if not decoded.feasible:
        print("best sample is infeasible:")
        for violation in decoded.violations:
            where = "" if violation.position is None else f" at position {violation.position}"
            print(f"  {violation.kind}{where}")
        return EXIT_INFEASIBLE

    profit = profitability(decoded, rates)
    loop = canonical_rotation(decoded.loop)
    names = " -> ".join(rates.labels[c] for c in loop)
    print(f"best loop: {names}")
    print(f"profitability: {profit:.5f}")
    if profit <= 1.0 + PROFIT_DISPLAY_TOL:
        print("no profitable loop")
    return EXIT_OK


def cmd_bench(args) -> int:
    rates = _read_rates(args.rates)
    shape = ProblemShape(rates.n, args.loop_length)
    w = to_log_weights(rates)
    q = build_qubo(w, shape, default_weights(w, shape))
    name_map = {"sa": "simulated_annealing", "tabu": "tabu"}
    solvers = []
    for token in args.solvers.split(","):
        token = token.strip()
        if token not in name_map:
            raise ArbQuboError(f"unknown solver {token!r}; expected sa or tabu")
        solvers.append(name_map[token])

    combined = BenchReport()
    for solver in solvers:
        for reads in args.reads:
            params = SamplerParams(
                num_reads=reads, seed=args.seed, sweeps_per_read=args.sweeps
            )
            report = run_batches(solver, q, params, args.batches)
            combined.rows.extend(report.rows)

    with open(args.out, "wb") as fh:
        fh.write(emit_report(combined, args.format))
    print(f"wrote {args.out}: {len(combined.rows)} rows")
    for agg in combined.aggregate():
        mean_first = agg["mean_first_optimum_read"]
        first_text = "n/a" if mean_first is None else f"{mean_first:.2f}"
        print(
            f"{agg['solver']} reads={agg['num_reads']}: "
            f"mean time {agg['mean_total_time_us']:.0f} us, "
            f"mean first-optimum read {first_text} "
            f"({agg['hits']}/{agg['batches']} batches reached optimum)"
        )
    return EXIT_OK


def cmd_timing(args) -> int:
    model = QpuTimingModel(
        t_programming=args.programming,
        t_anneal=args.anneal,
        t_readout=args.readout,
        t_delay=args.delay,
        overhead_delta=args.overhead,
    )
    print("num_reads,access_time_us")
    for reads in args.reads:
        total = qpu_access_time(model, reads, include_overhead=args.include_overhead)
        text = str(int(total)) if total == int(total) else repr(total)
        print(f"{reads},{text}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    rates = _read_rates(args.rates)
    result = best_cycle_bruteforce(rates, args.max_len)
    names = " -> ".join(rates.labels[c] for c in result.best_cycle)
    print(f"best cycle: {names}")
    print(f"profitability: {result.best_profit:.5f}")
    print(f"arbitrage: {'yes' if result.has_arbitrage else 'no'}")
    screen = has_arbitrage_bellman_ford(to_log_weights(rates))
    print(f"negative-cycle screen (bellman-ford): {'yes' if screen else 'no'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except ArbQuboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
