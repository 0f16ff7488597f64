"""Synthetic graphs, smooth mean vectors and Gaussian rewards."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..graph import SimilarityGraph, smoothness

GRAPH_KINDS = ("complete_clusters", "sbm", "barabasi_albert", "star", "line")

# purpose tags for independent random streams of one run
STREAM_GRAPH = 0
STREAM_MEANS = 1
STREAM_REWARDS = 2


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for the stream ``(seed, *key)``.

    Streams with different keys are statistically independent, so e.g. the
    reward stream of run 3 does not depend on which policy run 3 uses.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, key)])))


@dataclass(frozen=True)
class GraphSpec:
    kind: str
    clusters: int = 1
    cluster_size: int = 1
    p: float = 1.0
    q: float = 0.0
    attach: int = 1
    n: int | None = None
    isolated_optimal: bool = False

    def __post_init__(self):
        if self.kind not in GRAPH_KINDS:
            raise ValueError(f"unknown graph kind {self.kind!r}")
        if self.clusters < 1 or self.cluster_size < 1:
            raise ValueError("clusters and cluster_size must be positive")
        if not 0 <= self.q <= self.p <= 1:
            raise ValueError(f"need 0 <= q <= p <= 1, got p={self.p}, q={self.q}")
        if self.kind == "barabasi_albert":
            if self.n is None or self.attach < 1 or self.n <= self.attach:
                raise ValueError("barabasi_albert needs n > attach >= 1")
        if self.kind in ("star", "line") and (self.n is None or self.n < 1):
            raise ValueError(f"{self.kind} needs n >= 1")


@dataclass
class BanditInstance:
    mu: np.ndarray
    sigma: float
    epsilon_certificate: float = 0.0

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @classmethod
    def certified(cls, mu, sigma: float, g: SimilarityGraph) -> "BanditInstance":
        mu = np.asarray(mu, dtype=float)
        return cls(mu, sigma, math.sqrt(smoothness(mu, g.laplacian)))

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self.mu))


def _offset_clusters(spec: GraphSpec) -> tuple[list[list[int]], int]:
    start = 1 if spec.isolated_optimal else 0
    blocks = [
        list(range(start + c * spec.cluster_size, start + (c + 1) * spec.cluster_size))
        for c in range(spec.clusters)
    ]
    return blocks, start + spec.clusters * spec.cluster_size


def _barabasi_albert(n: int, m: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    # complete core on m nodes, then degree-proportional attachment without multi-edges
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    degree = np.zeros(n)
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
    for new in range(m, n):
        weights = degree[:new].copy()
        if weights.sum() == 0:
            weights[:] = 1.0
        targets = rng.choice(new, size=m, replace=False, p=weights / weights.sum())
        for t in sorted(targets.tolist()):
            edges.append((t, new))
            degree[t] += 1
            degree[new] += 1
    return edges


def generate_graph(spec: GraphSpec, seed: int = 0) -> SimilarityGraph:
    rng = rng_stream(seed, STREAM_GRAPH)
    if spec.kind in ("complete_clusters", "sbm"):
        blocks, n = _offset_clusters(spec)
        label = np.full(n, -1)
        for c, block in enumerate(blocks):
            label[block] = c
        A = np.zeros((n, n))
        iu, ju = np.triu_indices(n, k=1)
        same = (label[iu] == label[ju]) & (label[iu] >= 0)
        cross = (label[iu] != label[ju]) & (label[iu] >= 0) & (label[ju] >= 0)
        if spec.kind == "complete_clusters":
            on = same
        else:
            draws = rng.random(iu.size)
            on = (same & (draws < spec.p)) | (cross & (draws < spec.q))
        A[iu[on], ju[on]] = 1.0
        return SimilarityGraph(A + A.T)
    n = spec.n
    if spec.kind == "barabasi_albert":
        return SimilarityGraph.from_edges(n, _barabasi_albert(n, spec.attach, rng))
    if spec.kind == "star":
        return SimilarityGraph.from_edges(n, [(0, v) for v in range(1, n)])
    return SimilarityGraph.from_edges(n, [(v, v + 1) for v in range(n - 1)])


def generate_means(
    g: SimilarityGraph,
    target_epsilon: float,
    cluster_levels,
    seed: int = 0,
    spread: float = 1.0,
) -> np.ndarray:
    """Per-component base levels plus a perturbation scaled to be eps-smooth.

    ``cluster_levels`` holds one base mean per connected component (in
    component order). The perturbation is uniform in ``[0, spread)`` and is
    rescaled by ``min(1, eps / ||p||_G)``; constants on components add
    nothing to the seminorm, so the result satisfies ``||mu||_G <= eps``.
    """
    levels = np.asarray(cluster_levels, dtype=float)
    if levels.shape != (g.k,):
        raise ValueError(f"expected {g.k} cluster levels, got {levels.shape}")
    if target_epsilon < 0:
        raise ValueError("target_epsilon must be nonnegative")
    rng = rng_stream(seed, STREAM_MEANS)
    base = levels[g.component_index()]
    perturb = rng.random(g.n) * spread
    norm = math.sqrt(smoothness(perturb, g.laplacian))
    scale = 1.0 if norm <= target_epsilon else target_epsilon / norm
    return base + scale * perturb


def sample_reward(instance: BanditInstance, arm: int, rng: np.random.Generator) -> float:
    return float(instance.mu[arm] + instance.sigma * rng.standard_normal())


def write_means(mu, path) -> None:
    Path(path).write_text("".join(f"{float(m):.17g}\n" for m in np.asarray(mu)))


def read_means(path) -> np.ndarray:
    text = Path(path).read_text().split()
    try:
        return np.array([float(tok) for tok in text])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


@dataclass
class InstanceManifest:
    graph_spec: dict | None
    graph_seed: int | None
    means_seed: int | None
    target_epsilon: float | None
    epsilon_certificate: float
    sigma: float
    extra: dict = field(default_factory=dict)

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "InstanceManifest":
        return cls(**json.loads(Path(path).read_text()))
