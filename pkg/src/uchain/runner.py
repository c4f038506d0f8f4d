"""Batch execution of scenario replicates and summary aggregation.

Replicates are independent worlds with their own random streams; they can run
in parallel processes without affecting determinism. Aggregation is
single-threaded.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, expand_batch
from .engine import World, write_log_csv
from .metrics import Metrics


@dataclasses.dataclass
class RunRecord:
    environment: str
    variant: str
    replicate: int
    seed: int
    metrics: Metrics
    log_name: str


def _run_one(cfg: ScenarioConfig, replicate: int, out_dir: str | None):
    seed = cfg.seed + replicate
    world = World(cfg, seed)
    metrics = world.run()
    log_name = f"{cfg.name}_{cfg.environment}_{cfg.variant}_rep{replicate:03d}.csv"
    if out_dir is not None:
        write_log_csv(world, Path(out_dir) / log_name)
    return RunRecord(cfg.environment, cfg.variant, replicate, seed, metrics,
                     log_name)


def run_batch(
    cfg: ScenarioConfig, out_dir: str | Path | None = None, jobs: int = 1
) -> list[RunRecord]:
    """Run every (environment, variant, replicate) combination of a config."""
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    tasks = [
        (sub, rep)
        for sub in expand_batch(cfg)
        for rep in range(cfg.replicates)
    ]
    out_s = str(out_dir) if out_dir is not None else None
    if jobs <= 1:
        return [_run_one(sub, rep, out_s) for sub, rep in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(_run_one, sub, rep, out_s) for sub, rep in tasks]
        return [f.result() for f in futs]


def _median_iqr(values: list[float]) -> str:
    if not values:
        return "n/a"
    v = np.asarray(values)
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return f"{med:.2f} [{q1:.2f}, {q3:.2f}]"


def summarize(records: list[RunRecord]) -> str:
    """Per (environment, variant) table: convergence and variance statistics."""
    groups: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.environment, r.variant), []).append(r)
    lines = [
        f"{'environment':<14} {'variant':<8} {'runs':>4} {'conv':>5} "
        f"{'conv_time_s med [IQR]':>24} {'pos_var_m2 med [IQR]':>24} {'faults':>6}"
    ]
    for (env, var), recs in sorted(groups.items()):
        times = [r.metrics.convergence_time_s for r in recs
                 if r.metrics.convergence_time_s is not None]
        variances = [r.metrics.position_variance for r in recs
                     if r.metrics.position_variance is not None]
        n_faults = sum(len(r.metrics.faults) for r in recs)
        lines.append(
            f"{env:<14} {var:<8} {len(recs):>4} {len(times):>5} "
            f"{_median_iqr(times):>24} {_median_iqr(variances):>24} {n_faults:>6}"
        )
    fault_lines = [
        f"  run {r.log_name}: tick {t}: {msg}"
        for r in records for t, msg in r.metrics.faults
    ]
    if fault_lines:
        lines.append("faults:")
        lines.extend(fault_lines)
    return "\n".join(lines) + "\n"


def write_artifacts(records: list[RunRecord], out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.txt").write_text(summarize(records))
    seeds = "".join(
        f"{r.environment},{r.variant},{r.replicate},{r.seed}\n" for r in records
    )
    (out / "seeds.csv").write_text("environment,variant,replicate,seed\n" + seeds)
