"""Seeded Monte Carlo batches of engine runs."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .. import engine
from ..graph import SimilarityGraph
from .instances import BanditInstance


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("GRUB_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


@dataclass
class BatchResult:
    traces: list
    seeds: list[int]
    mean_active: np.ndarray
    quantiles: dict[float, np.ndarray]

    @property
    def winners(self) -> list[int]:
        return [t.winner for t in self.traces]

    @property
    def capped(self) -> list[int]:
        return [i for i, t in enumerate(self.traces) if t.terminated_by == engine.CAP]


def aggregate(traces, quantile_levels=(0.1, 0.5, 0.9)):
    """Per-step mean and quantiles of active-set size.

    Runs that finished early are padded with their final active count.
    """
    horizon = max(len(t.steps) for t in traces)
    curves = np.empty((len(traces), horizon))
    for r, t in enumerate(traces):
        c = t.active_counts().astype(float)
        curves[r, : c.size] = c
        curves[r, c.size :] = c[-1]
    mean = curves.mean(axis=0)
    qs = {q: np.quantile(curves, q, axis=0) for q in quantile_levels}
    return mean, qs


def _one(args):
    instance, g, config = args
    return engine.run(instance, g, config)[1]


def run_batch(
    instance: BanditInstance,
    g: SimilarityGraph,
    config,
    n_runs: int,
    workers: int | None = None,
) -> BatchResult:
    """Run the engine ``n_runs`` times with seeds ``seed + 0 .. seed + n_runs - 1``."""
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    configs = [replace(config, seed=config.seed + r) for r in range(n_runs)]
    jobs = [(instance, g, c) for c in configs]
    w = min(worker_count(workers), n_runs)
    if w == 1:
        traces = [_one(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=w) as pool:
            traces = list(pool.map(_one, jobs))
    mean, qs = aggregate(traces)
    return BatchResult(traces, [c.seed for c in configs], mean, qs)
