"""Benchmark sweeps against the oracle, written as CSV with rationals as strings."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InstanceTooLarge
from .generate import generate
from .instance import as_fraction, format_fraction
from .oracle import MAX_ITEMS, MAX_PERIODS, brute_force
from .runner import parse_epsilon, run_algorithm

COLUMNS = ["instance_id", "family", "n", "T", "seed", "algorithm", "epsilon",
           "profit", "oracle_profit", "ratio", "wall_ms", "certified"]
FLOAT_COLUMNS = ["profit_float", "ratio_float"]


@dataclass(frozen=True)
class RunRecord:
    instance_id: str
    family: str
    n: int
    T: int
    seed: int
    algorithm: str
    epsilon: Fraction | None
    profit: Fraction
    oracle_profit: Fraction | None
    ratio: Fraction | None
    wall_ms: int
    certified: bool

    def sort_key(self) -> tuple:
        return (self.instance_id, self.algorithm, self.epsilon is not None, self.epsilon or 0)


@dataclass(frozen=True)
class SummaryRow:
    stat: str  # "min" or "mean"
    algorithm: str
    epsilon: Fraction | None
    ratio: Fraction


@dataclass(frozen=True)
class BenchTask:
    family: str
    n: int
    T: int
    seed: int
    algorithms: tuple[tuple[str, Fraction | None], ...]
    budget_ms: int | None


def instance_id(family: str, n: int, T: int, seed: int) -> str:
    return f"{family}/n{n}/T{T}/s{seed}"


def _opt(value) -> str:
    return "" if value is None else format_fraction(value)


def _unopt(text: str) -> Fraction | None:
    return None if text == "" else as_fraction(text)


def run_task(task: BenchTask) -> list[RunRecord]:
    inst = generate(task.seed, task.family, task.n, task.T)
    oracle = None
    if task.n <= MAX_ITEMS and task.T <= MAX_PERIODS:
        try:
            oracle = brute_force(inst).opt_profit
        except InstanceTooLarge:
            oracle = None
    out = []
    for algorithm, eps in task.algorithms:
        run = run_algorithm(inst, algorithm, eps, task.budget_ms)
        ratio = run.profit / oracle if oracle else None
        out.append(RunRecord(instance_id(task.family, task.n, task.T, task.seed), task.family,
                             task.n, task.T, task.seed, algorithm, eps, run.profit, oracle,
                             ratio, run.wall_ms, run.certified))
    return out


def plan(families, sizes, epsilons, seeds: int, algorithms, budget_ms: int | None = None) -> list[BenchTask]:
    """Expand the sweep; exact runs once per instance regardless of epsilon."""
    pairs: list[tuple[str, Fraction | None]] = []
    for alg in algorithms:
        if alg == "exact":
            pairs.append((alg, None))
        else:
            pairs.extend((alg, parse_epsilon(alg, e)) for e in epsilons)
    return [BenchTask(f, n, T, s, tuple(pairs), budget_ms)
            for f in families for n, T in sizes for s in range(seeds)]


def run_bench(tasks: list[BenchTask], jobs: int = 1) -> list[RunRecord]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(run_task, tasks))
    else:
        batches = [run_task(t) for t in tasks]
    return sorted((r for b in batches for r in b), key=RunRecord.sort_key)


def summarize(records: list[RunRecord]) -> list[SummaryRow]:
    groups: dict[tuple, list[Fraction]] = {}
    for r in records:
        if r.ratio is not None:
            groups.setdefault((r.algorithm, r.epsilon is not None, r.epsilon or 0, r.epsilon), []).append(r.ratio)
    out = []
    for (alg, _, _, eps), ratios in sorted(groups.items(), key=lambda kv: kv[0][:3]):
        out.append(SummaryRow("min", alg, eps, min(ratios)))
        out.append(SummaryRow("mean", alg, eps, sum(ratios, Fraction(0)) / len(ratios)))
    return out


def write_csv(records: list[RunRecord], out, *, float_view: bool = False,
              summaries: list[SummaryRow] | None = None) -> None:
    """Write data rows followed by the min/mean ratio summary rows."""
    if summaries is None:
        summaries = summarize(records) if records else []
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(COLUMNS + (FLOAT_COLUMNS if float_view else []))
    for r in records:
        row = [r.instance_id, r.family, r.n, r.T, r.seed, r.algorithm, _opt(r.epsilon),
               format_fraction(r.profit), _opt(r.oracle_profit), _opt(r.ratio), r.wall_ms,
               "true" if r.certified else "false"]
        if float_view:
            row += [f"{float(r.profit):.6g}", "" if r.ratio is None else f"{float(r.ratio):.6g}"]
        writer.writerow(row)
    for s in summaries:
        row = [f"summary:{s.stat}", "", "", "", "", s.algorithm, _opt(s.epsilon),
               "", "", format_fraction(s.ratio), "", ""]
        if float_view:
            row += ["", f"{float(s.ratio):.6g}"]
        writer.writerow(row)


def read_csv(source) -> tuple[list[RunRecord], list[SummaryRow]]:
    if isinstance(source, (str, Path)):
        source = io.StringIO(Path(source).read_text())
    records, summaries = [], []
    for row in csv.DictReader(source):
        if row["instance_id"].startswith("summary:"):
            summaries.append(SummaryRow(row["instance_id"].split(":", 1)[1], row["algorithm"],
                                        _unopt(row["epsilon"]), as_fraction(row["ratio"])))
            continue
        records.append(RunRecord(
            row["instance_id"], row["family"], int(row["n"]), int(row["T"]), int(row["seed"]),
            row["algorithm"], _unopt(row["epsilon"]), as_fraction(row["profit"]),
            _unopt(row["oracle_profit"]), _unopt(row["ratio"]), int(row["wall_ms"]),
            row["certified"] == "true"))
    return records, summaries
