"""Solver comparison harness: reads-to-optimum, batch timing, and the
annealer access-time cost model.

The cost model decomposes total processor occupancy into a one-time
programming cost, an optional fixed initialization overhead, and a
per-sample cost (anneal + readout + post-read delay) that scales linearly
with the number of reads.  Batch runs record, per execution, how long the
solver took and the first read at which it produced the known optimum.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import ParamError, WrongOrdering
from .qubo import QuboMatrix, SampleSet
from .solvers import (
    EXACT_SOLVER_NAME,
    SA_SOLVER_NAME,
    TABU_SOLVER_NAME,
    SamplerParams,
    ground_state,
    sample_sa,
    sample_tabu,
)

#: Worst-case initialization overhead in microseconds (vendor-quoted range
#: tops out around 20 ms).
DEFAULT_OVERHEAD_US = 20000.0

ENERGY_TOL = 1e-9

SOLVER_REGISTRY: dict[str, Callable[[QuboMatrix, SamplerParams], SampleSet]] = {
    SA_SOLVER_NAME: sample_sa,
    TABU_SOLVER_NAME: sample_tabu,
}

REPORT_COLUMNS = [
    "solver",
    "num_reads",
    "batch",
    "total_time_us",
    "first_optimum_read",
    "best_energy",
    "optimal_energy",
]

TIMING_LOG_COLUMNS = ["system", "num_reads", "batch", "qpu_access_time_us"]


@dataclass(frozen=True)
class QpuTimingModel:
    """Access-time decomposition parameters, all in microseconds.

    ``t_programming`` is paid once per problem submission,
    ``overhead_delta`` is a fixed low-level initialization cost that the
    vendor excludes from reported access times, and the three per-sample
    fields are paid once per read.
    """

    t_programming: float
    t_anneal: float
    t_readout: float
    t_delay: float
    overhead_delta: float = DEFAULT_OVERHEAD_US

    def __post_init__(self) -> None:
        for name in ("t_programming", "t_anneal", "t_readout", "t_delay", "overhead_delta"):
            if getattr(self, name) < 0:
                raise ParamError(f"{name} must be non-negative, got {getattr(self, name)}")


def qpu_access_time(
    m: QpuTimingModel, num_reads: int, include_overhead: bool = False
) -> float:
    """Modeled processor time for ``num_reads`` samples, in microseconds.

    programming + reads * (anneal + readout + delay), plus the fixed
    overhead when ``include_overhead``.
    """
    if num_reads < 1:
        raise ParamError(f"num_reads must be >= 1, got {num_reads}")
    total = m.t_programming + num_reads * (m.t_anneal + m.t_readout + m.t_delay)
    if include_overhead:
        total += m.overhead_delta
    return total


def first_optimum_read(
    s: SampleSet, optimal_energy: float, tol: float = ENERGY_TOL
) -> int | None:
    """Smallest read index whose energy reaches the optimum within ``tol``.

    Only meaningful on production-ordered sets; exact-solver output is
    energy-sorted and rejected.
    """
    if s.solver_name == EXACT_SOLVER_NAME:
        raise WrongOrdering(
            "exact-solver SampleSets are energy-sorted, not production-ordered"
        )
    for sample in s.samples:
        if sample.energy <= optimal_energy + tol:
            return sample.read_index
    return None


@dataclass(frozen=True)
class BenchRow:
    solver: str
    num_reads: int
    batch: int
    total_time_us: float
    first_optimum_read: int | None
    best_energy: float
    optimal_energy: float


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)

    def aggregate(self) -> list[dict]:
        """Arithmetic means per (solver, num_reads), in row-insertion order.

        ``mean_first_optimum_read`` averages only the batches that reached
        the optimum; ``hits`` counts how many did.
        """
        groups: dict[tuple[str, int], list[BenchRow]] = {}
        for row in self.rows:
            groups.setdefault((row.solver, row.num_reads), []).append(row)
        out = []
        for (solver, num_reads), rows in groups.items():
            hits = [r.first_optimum_read for r in rows if r.first_optimum_read is not None]
            out.append(
                {
                    "solver": solver,
                    "num_reads": num_reads,
                    "batches": len(rows),
                    "mean_total_time_us": sum(r.total_time_us for r in rows) / len(rows),
                    "mean_first_optimum_read": (sum(hits) / len(hits)) if hits else None,
                    "hits": len(hits),
                }
            )
        return out


def run_batches(
    solver: str | Callable[[QuboMatrix, SamplerParams], SampleSet],
    q: QuboMatrix,
    params: SamplerParams,
    batches: int,
    tol: float = ENERGY_TOL,
) -> BenchReport:
    """Run a sampler ``batches`` times and record time and reads-to-optimum.

    The optimum is established once by exact enumeration.  Batch ``b``
    reseeds the sampler with ``params.seed + b`` so batches differ but the
    whole report stays reproducible.  ``solver`` is a registry name
    ("simulated_annealing" or "tabu") or any callable with the sampler
    signature.
    """
    if isinstance(solver, str):
        if solver not in SOLVER_REGISTRY:
            raise ParamError(
                f"unknown solver {solver!r}; expected one of {sorted(SOLVER_REGISTRY)}"
            )
        solver_fn = SOLVER_REGISTRY[solver]
        solver_label = solver
    else:
        solver_fn = solver
        solver_label = getattr(solver, "__name__", "custom")
    if batches < 1:
        raise ParamError(f"batches must be >= 1, got {batches}")

    _, optimal_energy = ground_state(q)
    report = BenchReport()
    for batch in range(1, batches + 1):
        batch_params = replace(params, seed=params.seed + batch)
        result = solver_fn(q, batch_params)
        best = result.best()
        report.rows.append(
            BenchRow(
                solver=solver_label,
                num_reads=params.num_reads,
                batch=batch,
                total_time_us=float(result.timing.get("wall_time_us", 0.0)),
                first_optimum_read=first_optimum_read(result, optimal_energy, tol),
                best_energy=best.energy,
                optimal_energy=optimal_energy,
            )
        )
    return report


# -- report serialization -----------------------------------------------------


def _format_number(value: float) -> str:
    """Integers print without a decimal point so ingested integer data
    round-trips byte-exactly."""
    if value == int(value) and math.isfinite(value):
        return str(int(value))
    return repr(value)


def emit_report(r: BenchReport, fmt: str = "csv") -> bytes:
    """Serialize a report with a stable column order."""
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for row in r.rows:
            writer.writerow(
                [
                    row.solver,
                    row.num_reads,
                    row.batch,
                    _format_number(row.total_time_us),
                    "" if row.first_optimum_read is None else row.first_optimum_read,
                    _format_number(row.best_energy),
                    _format_number(row.optimal_energy),
                ]
            )
        return out.getvalue().encode("utf-8")
    if fmt == "json":
        obj = [
            {
                "solver": row.solver,
                "num_reads": row.num_reads,
                "batch": row.batch,
                "total_time_us": row.total_time_us,
                "first_optimum_read": row.first_optimum_read,
                "best_energy": row.best_energy,
                "optimal_energy": row.optimal_energy,
            }
            for row in r.rows
        ]
        return (json.dumps(obj, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format: {fmt!r}")


def load_report(data: bytes, fmt: str = "csv") -> BenchReport:
    if fmt == "csv":
        reader = csv.reader(io.StringIO(data.decode("utf-8")))
        header = next(reader, None)
        if header != REPORT_COLUMNS:
            raise ValueError(f"unexpected report header: {header}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            rows.append(
                BenchRow(
                    solver=rec[0],
                    num_reads=int(rec[1]),
                    batch=int(rec[2]),
                    total_time_us=float(rec[3]),
                    first_optimum_read=None if rec[4] == "" else int(rec[4]),
                    best_energy=float(rec[5]),
                    optimal_energy=float(rec[6]),
                )
            )
        return BenchReport(rows=rows)
    if fmt == "json":
        obj = json.loads(data.decode("utf-8"))
        return BenchReport(
            rows=[
                BenchRow(
                    solver=rec["solver"],
                    num_reads=int(rec["num_reads"]),
                    batch=int(rec["batch"]),
                    total_time_us=float(rec["total_time_us"]),
                    first_optimum_read=(
                        None
                        if rec["first_optimum_read"] is None
                        else int(rec["first_optimum_read"])
                    ),
                    best_energy=float(rec["best_energy"]),
                    optimal_energy=float(rec["optimal_energy"]),
                )
                for rec in obj
            ]
        )
    raise ValueError(f"unknown report format: {fmt!r}")


# -- external timing logs -------------------------------------------------------


@dataclass(frozen=True)
class TimingLogRow:
    system: str
    num_reads: int
    batch: int
    qpu_access_time_us: float


def load_timing_log(data: bytes) -> list[TimingLogRow]:
    """Parse an external access-time log: system, num_reads, batch, time."""
    reader = csv.reader(io.StringIO(data.decode("utf-8")))
    header = next(reader, None)
    if header != TIMING_LOG_COLUMNS:
        raise ValueError(f"unexpected timing log header: {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        rows.append(
            TimingLogRow(
                system=rec[0],
                num_reads=int(rec[1]),
                batch=int(rec[2]),
                qpu_access_time_us=float(rec[3]),
            )
        )
    return rows


def timing_log_means(rows: list[TimingLogRow]) -> list[tuple[str, int, int, float]]:
    """Arithmetic mean access time per (system, num_reads, batch)."""
    groups: dict[tuple[str, int, int], list[float]] = {}
    order: list[tuple[str, int, int]] = []
    for row in rows:
        key = (row.system, row.num_reads, row.batch)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row.qpu_access_time_us)
    return [
        (key[0], key[1], key[2], sum(groups[key]) / len(groups[key]))
        for key in order
    ]


def emit_timing_means(rows: list[TimingLogRow]) -> bytes:
    """Re-emit per-group mean access times; integral means print as integers."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["system", "num_reads", "batch", "mean_qpu_access_time_us"])
    for system, num_reads, batch, mean in timing_log_means(rows):
        writer.writerow([system, num_reads, batch, _format_number(mean)])
    return out.getvalue().encode("utf-8")
