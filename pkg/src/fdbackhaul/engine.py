"""Trial execution, seeded Monte Carlo sweeps, aggregation and CSV output.

A trial runs one scheduler on one scenario and replays the resulting
schedule slot by slot to obtain per-flow frame throughput and the
completed-flow count. Sweeps derive one seed per (axis point, trial) with
a documented splitmix64 chain and feed the identical scenario to every
scheduler, so comparisons are paired; the results table is assembled in
deterministic order regardless of the worker count.
"""
from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigurationError
from .phy import link_budget
from .scenario import GenParams, Scenario, generate, validate
from .schedulers import SCHEDULERS, Schedule

__all__ = [
    "TrialMetrics",
    "SweepSpec",
    "SweepRow",
    "AggregateRow",
    "run_trial",
    "run_sweep",
    "aggregate",
    "derive_seed",
    "write_results_csv",
    "write_aggregate_csv",
    "RESULTS_HEADER",
    "AGGREGATE_HEADER",
]

RESULTS_HEADER = ["scheduler", "axis", "axis_value", "trial", "seed", "completed", "throughput_gbps"]
AGGREGATE_HEADER = [
    "scheduler",
    "axis_value",
    "mean_completed",
    "std_completed",
    "mean_throughput_gbps",
    "std_throughput_gbps",
]


@dataclass(frozen=True)
class TrialMetrics:
    """Outcome of one (scheduler, scenario) pair."""

    completed_count: int
    system_throughput: float
    per_flow_throughput: tuple[float, ...]
    per_flow_completed: tuple[bool, ...]


@dataclass(frozen=True)
class SweepSpec:
    """One experiment axis swept over seeded trials."""

    axis: str  # num_flows | beta_magnitude | sigma_magnitude
    axis_values: tuple
    trials: int
    base: GenParams = field(default_factory=GenParams)


@dataclass(frozen=True)
class SweepRow:
    scheduler: str
    axis: str
    axis_value: object
    trial: int
    seed: int
    completed: int
    throughput_gbps: float


@dataclass(frozen=True)
class AggregateRow:
    scheduler: str
    axis_value: object
    mean_completed: float
    std_completed: float
    mean_throughput_gbps: float
    std_throughput_gbps: float


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, axis_index: int, trial: int) -> int:
    """Stable per-trial seed: chained splitmix64 over (master, axis, trial)."""
    s = _splitmix64(master_seed & _MASK64)
    s = _splitmix64(s ^ (axis_index & _MASK64))
    s = _splitmix64(s ^ (trial & _MASK64))
    return s


def metrics_from_schedule(schedule: Schedule, scenario: Scenario) -> TrialMetrics:
    """Replay a schedule slot by slot and compute the trial metrics."""
    lb = link_budget(scenario)
    t = scenario.timing
    bits = np.zeros(lb.num_flows)
    dt = t.slot_duration_s
    for i in range(schedule.num_slots):
        bits += lb.rates_for(schedule.active_in_slot(i)) * dt
    throughput = bits / t.frame_duration_s
    done = throughput >= lb.qos
    return TrialMetrics(
        completed_count=int(done.sum()),
        system_throughput=float(throughput.sum()),
        per_flow_throughput=tuple(float(x) for x in throughput),
        per_flow_completed=tuple(bool(x) for x in done),
    )


def run_trial(scenario: Scenario, scheduler: str) -> TrialMetrics:
    """Run one scheduler on one scenario."""
    if scheduler not in SCHEDULERS:
        raise ConfigurationError(
            f"unknown scheduler {scheduler!r}; valid: {', '.join(SCHEDULERS)}"
        )
    problems = validate(scenario)
    if problems:
        raise ConfigurationError(f"invalid scenario: {problems}")
    schedule = SCHEDULERS[scheduler](scenario)
    return metrics_from_schedule(schedule, scenario)


def _sweep_point(args) -> list[tuple]:
    axis_idx, trial, seed, params, scheduler_names = args
    scenario = generate(seed, params)
    out = []
    for name in scheduler_names:
        m = run_trial(scenario, name)
        out.append((axis_idx, trial, name, seed, m.completed_count, m.system_throughput))
    return out


def run_sweep(
    spec: SweepSpec,
    schedulers: Sequence[str],
    master_seed: int,
    workers: int | None = None,
    progress: Callable[[str], None] | None = None,
) -> list[SweepRow]:
    """Run every scheduler over every (axis value, trial) scenario.

    The scenario for trial t at axis index a is generated from
    derive_seed(master_seed, a, t) and shared by all schedulers. The
    contention-threshold axis does not participate in generation, so that
    sweep reuses one scenario sample per trial (axis index 0 for every
    value): the threshold effect is isolated and graph-free baselines
    stay exactly flat. Rows come back ordered by (axis index, trial,
    scheduler position) whatever the worker count.
    """
    if spec.trials < 1 or not spec.axis_values:
        raise ConfigurationError("sweep needs at least one trial and one axis value")
    if not schedulers:
        raise ConfigurationError("no schedulers selected")
    for name in schedulers:
        if name not in SCHEDULERS:
            raise ConfigurationError(f"unknown scheduler {name!r}")
    tasks = []
    for axis_idx, value in enumerate(spec.axis_values):
        params = spec.base.with_axis(spec.axis, value)
        seed_axis = 0 if spec.axis == "sigma_magnitude" else axis_idx
        for trial in range(spec.trials):
            seed = derive_seed(master_seed, seed_axis, trial)
            tasks.append((axis_idx, trial, seed, params, tuple(schedulers)))

    results: dict[tuple[int, int], list[tuple]] = {}

    def note(task) -> None:
        done = task[1] + 1
        if progress is not None and (done % 25 == 0 or done == spec.trials):
            progress(f"{spec.axis}={spec.axis_values[task[0]]}: trial {done}/{spec.trials}")

    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outs = pool.map(_sweep_point, tasks, chunksize=4)
            for task, out in zip(tasks, outs):
                results[(task[0], task[1])] = out
                note(task)
    else:
        for task in tasks:
            results[(task[0], task[1])] = _sweep_point(task)
            note(task)

    rows: list[SweepRow] = []
    for axis_idx, value in enumerate(spec.axis_values):
        for trial in range(spec.trials):
            for axis_i, tr, name, seed, completed, throughput in results[(axis_idx, trial)]:
                rows.append(
                    SweepRow(
                        scheduler=name,
                        axis=spec.axis,
                        axis_value=value,
                        trial=tr,
                        seed=seed,
                        completed=completed,
                        throughput_gbps=throughput / 1e9,
                    )
                )
    return rows


def aggregate(rows: Iterable[SweepRow]) -> list[AggregateRow]:
    """Mean and sample standard deviation of the two metrics per
    (scheduler, axis value) group, in first-seen order. Groups with a
    single row report a zero deviation."""
    groups: dict[tuple, list[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.scheduler, row.axis_value), []).append(row)
    out = []
    for (scheduler, value), grp in groups.items():
        completed = [r.completed for r in grp]
        thr = [r.throughput_gbps for r in grp]
        out.append(
            AggregateRow(
                scheduler=scheduler,
                axis_value=value,
                mean_completed=statistics.mean(completed),
                std_completed=statistics.stdev(completed) if len(grp) > 1 else 0.0,
                mean_throughput_gbps=statistics.mean(thr),
                std_throughput_gbps=statistics.stdev(thr) if len(grp) > 1 else 0.0,
            )
        )
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results_csv(rows: Sequence[SweepRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(RESULTS_HEADER)
        for r in rows:
            w.writerow(
                [r.scheduler, r.axis, _fmt(r.axis_value), r.trial, r.seed, r.completed, _fmt(r.throughput_gbps)]
            )


def write_aggregate_csv(rows: Sequence[AggregateRow], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(AGGREGATE_HEADER)
        for r in rows:
            w.writerow(
                [
                    r.scheduler,
                    _fmt(r.axis_value),
                    _fmt(float(r.mean_completed)),
                    _fmt(float(r.std_completed)),
                    _fmt(float(r.mean_throughput_gbps)),
                    _fmt(float(r.std_throughput_gbps)),
                ]
            )
