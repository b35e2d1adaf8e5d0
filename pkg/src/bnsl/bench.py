"""Benchmark protocols: order sensitivity and parallel scaling.

The order experiment samples seeded datasets from a reference network,
learns the skeleton with and without start-set backtracking on the original
and on the column-reversed data, and reports the Hamming distance between
the two skeletons plus the test counts. The scaling experiment times
skeleton learning across worker counts and normalises against the
single-worker baseline.
"""

from __future__ import annotations

import csv
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data import Dataset, reverse_columns
from .formats import load_dataset, load_network
from .graph import hamming_skeleton
from .network import DiscreteBn, nparams, sample
from .parallel import ParallelExecutor, normalized_running_time
from .structure import ALGORITHMS, GlobalLearnConfig, learn_skeleton

ORDER_MODES = ("none", "start-set")
DEFAULT_RATIOS = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class OrderExperimentSpec:
    """Order-sensitivity protocol over one reference network."""

    network: str | Path | DiscreteBn
    algorithms: tuple[str, ...] = ALGORITHMS
    ratios: tuple[float, ...] = DEFAULT_RATIOS
    repetitions: int = 20
    alpha: float = 0.01
    seed: int = 0
    test: str = "mi"
    label: str | None = None

    def validate(self) -> None:
        if any(r <= 0 for r in self.ratios):
            raise ValueError("ratios must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm: {a!r}")


@dataclass(frozen=True)
class ScalingExperimentSpec:
    """Parallel-scaling protocol over one dataset."""

    data: str | Path | Dataset | None = None
    network: str | Path | DiscreteBn | None = None
    n: int | None = None
    algorithm: str = "si-hiton-pc"
    workers: tuple[int, ...] = (1, 2, 3, 4, 6, 8)
    repetitions: int = 10
    alpha: float = 0.01
    test: str | None = None
    schedule: str = "static"
    seed: int = 0
    compare_backtracking: bool = True

    def validate(self) -> None:
        if len(set(self.workers)) != len(self.workers):
            raise ValueError("worker counts must be distinct")
        if any(k < 1 for k in self.workers):
            raise ValueError("worker counts must be at least 1")
        if 1 not in self.workers:
            raise ValueError("the single-worker baseline must be included")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm: {self.algorithm!r}")
        if self.data is None and (self.network is None or self.n is None):
            raise ValueError("either a dataset or a network plus sample size is required")


def _dataset_seed(seed: int, *key: int) -> int:
    """Deterministic per-cell seed derived with numpy's SeedSequence."""
    return int(np.random.SeedSequence((seed, *key)).generate_state(1, np.uint64)[0])


def run_order_experiment(spec: OrderExperimentSpec) -> list[dict]:
    """Rows: one per (algorithm, ratio, repetition, mode).

    Each repetition samples a fresh dataset, learns the skeleton on the
    original and on the column-reversed data in the given mode, and records
    the Hamming distance between the two skeletons and both test counts.
    """
    spec.validate()
    bn = spec.network if isinstance(spec.network, DiscreteBn) else load_network(spec.network)
    label = spec.label or (str(spec.network) if not isinstance(spec.network, DiscreteBn) else "network")
    p = nparams(bn)
    truth = bn.dag if spec.test == "oracle" else None
    rows = []
    for alg_idx, algorithm in enumerate(spec.algorithms):
        for ratio_idx, ratio in enumerate(spec.ratios):
            n = round(ratio * p)
            if n < 1:
                raise ValueError(f"ratio {ratio} gives an empty sample (p = {p})")
            for rep in range(spec.repetitions):
                data = sample(bn, n, _dataset_seed(spec.seed, alg_idx, ratio_idx, rep))
                rdata = reverse_columns(data)
                for mode in ORDER_MODES:
                    cfg = GlobalLearnConfig(
                        algorithm=algorithm,
                        test=spec.test,
                        alpha=spec.alpha,
                        backtracking=mode,
                        workers=1,
                    )
                    ex_orig = ParallelExecutor(1)
                    skel, _ = learn_skeleton(data, cfg, ex_orig, truth=truth)
                    ex_rev = ParallelExecutor(1)
                    rskel, _ = learn_skeleton(rdata, cfg, ex_rev, truth=truth)
                    rows.append(
                        {
                            "network": label,
                            "algorithm": algorithm,
                            "ratio": ratio,
                            "n": n,
                            "rep": rep,
                            "mode": mode,
                            "hamming": hamming_skeleton(skel, rskel),
                            "tests_orig": ex_orig.total_tests(),
                            "tests_rev": ex_rev.total_tests(),
                        }
                    )
    return rows


def run_scaling_experiment(spec: ScalingExperimentSpec) -> list[dict]:
    """Rows: one per (workers, repetition) plus, optionally, the start-set
    single-worker comparison; each carries per-group mean/median seconds and
    the normalised ratio and overhead against the k = 1 baseline."""
    spec.validate()
    if spec.data is not None:
        data = spec.data if isinstance(spec.data, Dataset) else load_dataset(spec.data)
    else:
        bn = spec.network if isinstance(spec.network, DiscreteBn) else load_network(spec.network)
        data = sample(bn, spec.n, _dataset_seed(spec.seed))
    test = spec.test or ("mi" if data.is_discrete else "cor")

    raw: list[dict] = []

    def one_run(workers: int, mode: str) -> dict:
        cfg = GlobalLearnConfig(
            algorithm=spec.algorithm,
            test=test,
            alpha=spec.alpha,
            backtracking=mode,
            workers=workers,
            schedule=spec.schedule,
        )
        executor = ParallelExecutor(workers, spec.schedule)
        start = time.perf_counter()
        learn_skeleton(data, cfg, executor)
        seconds = time.perf_counter() - start
        per_worker = _per_worker_totals(executor)
        return {
            "algorithm": spec.algorithm,
            "mode": mode,
            "workers": workers,
            "seconds": seconds,
            "total_tests": executor.total_tests(),
            "per_worker_tests": "|".join(str(c) for c in per_worker),
        }

    for workers in sorted(spec.workers):
        for rep in range(spec.repetitions):
            row = one_run(workers, "none")
            row["rep"] = rep
            raw.append(row)
    if spec.compare_backtracking:
        for rep in range(spec.repetitions):
            row = one_run(1, "start-set")
            row["rep"] = rep
            raw.append(row)

    by_group: dict[tuple[str, int], list[float]] = {}
    for row in raw:
        by_group.setdefault((row["mode"], row["workers"]), []).append(row["seconds"])
    means = {g: statistics.fmean(v) for g, v in by_group.items()}
    medians = {g: statistics.median(v) for g, v in by_group.items()}
    points = normalized_running_time({k: means[(m, k)] for m, k in means if m == "none"})
    baseline = means[("none", 1)]
    for row in raw:
        group = (row["mode"], row["workers"])
        row["mean_seconds"] = means[group]
        row["median_seconds"] = medians[group]
        if row["mode"] == "none":
            pt = points[row["workers"]]
            row["ratio"] = pt.ratio
            row["overhead"] = pt.overhead
        else:
            row["ratio"] = means[group] / baseline
            row["overhead"] = ""
    return raw


def _per_worker_totals(executor: ParallelExecutor) -> list[int]:
    totals: dict[int, int] = {}
    for phase in executor.telemetry:
        for report in phase.reports:
            totals[report.worker] = totals.get(report.worker, 0) + report.test_count
    return [totals[w] for w in sorted(totals)]


def write_csv(rows: list[dict], path: str | Path) -> None:
    """Write experiment rows with a stable column order."""
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def read_csv(path: str | Path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
