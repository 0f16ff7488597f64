"""Weighted similarity graphs over arm indices.

A graph is stored as a dense symmetric adjacency matrix. The combinatorial
Laplacian ``L = D - A`` and the connected-component partition are computed
once at construction and shared read-only afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

EIG_TOL = 1e-9


class InvalidGraphError(ValueError):
    pass


class IncompatibleGraphsError(ValueError):
    """Raised when two Laplacians do not share a null space."""


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def _partition(adjacency: np.ndarray) -> tuple[tuple[int, ...], ...]:
    n = adjacency.shape[0]
    uf = UnionFind(n)
    rows, cols = np.nonzero(np.triu(adjacency, k=1) > 0)
    for u, v in zip(rows.tolist(), cols.tolist()):
        uf.union(u, v)
    groups: dict[int, list[int]] = {}
    for node in range(n):
        groups.setdefault(uf.find(node), []).append(node)
    # members are appended in ascending order, so sorting on the first
    # member orders parts by smallest element
    return tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))


@dataclass(frozen=True, eq=False)
class SimilarityGraph:
    adjacency: np.ndarray
    components: tuple[tuple[int, ...], ...] = field(init=False)
    laplacian: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A = np.array(self.adjacency, dtype=float, copy=True)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise InvalidGraphError(f"adjacency must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise InvalidGraphError("adjacency has non-finite entries")
        if np.any(A < 0):
            raise InvalidGraphError("negative edge weight")
        if not np.array_equal(A, A.T):
            raise InvalidGraphError("adjacency is not symmetric")
        if np.any(np.diag(A) != 0):
            raise InvalidGraphError("self-loops are not allowed")
        A.setflags(write=False)
        L = np.diag(A.sum(axis=1)) - A
        L.setflags(write=False)
        object.__setattr__(self, "adjacency", A)
        object.__setattr__(self, "laplacian", L)
        object.__setattr__(self, "components", _partition(A))

    @classmethod
    def from_edges(cls, n: int, edges) -> "SimilarityGraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples; each edge listed once."""
        if n < 1:
            raise InvalidGraphError("graph needs at least one node")
        A = np.zeros((n, n))
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            w = float(edge[2]) if len(edge) > 2 else 1.0
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidGraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise InvalidGraphError(f"self-loop at node {u}")
            if w < 0:
                raise InvalidGraphError(f"negative edge weight {w} on ({u}, {v})")
            if A[u, v] != 0:
                raise InvalidGraphError(f"duplicate edge ({u}, {v})")
            A[u, v] = A[v, u] = w
        return cls(A)

    @classmethod
    def empty(cls, n: int) -> "SimilarityGraph":
        return cls(np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def k(self) -> int:
        return len(self.components)

    def component_index(self) -> np.ndarray:
        """Array mapping each node to the position of its component."""
        idx = np.empty(self.n, dtype=int)
        for c, members in enumerate(self.components):
            idx[list(members)] = c
        return idx

    def component_of(self, node: int) -> tuple[int, ...]:
        for members in self.components:
            if node in members:
                return members
        raise IndexError(node)

    def is_isolated(self, node: int) -> bool:
        return not np.any(self.adjacency[node] > 0)

    def edges(self) -> list[tuple[int, int, float]]:
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return [(u, v, float(self.adjacency[u, v])) for u, v in zip(rows.tolist(), cols.tolist())]


def build_laplacian(g: SimilarityGraph) -> np.ndarray:
    return g.laplacian


def connected_components(g: SimilarityGraph) -> tuple[tuple[int, ...], ...]:
    return g.components


def components_from_laplacian(L: np.ndarray) -> tuple[tuple[int, ...], ...]:
    A = -np.array(L, dtype=float)
    np.fill_diagonal(A, 0.0)
    return _partition(A)


def smoothness(mu, L) -> float:
    """Quadratic form <mu, L mu>; mu is eps-smooth iff sqrt of this is <= eps."""
    mu = np.asarray(mu, dtype=float)
    L = np.asarray(L, dtype=float)
    if mu.ndim != 1 or L.shape != (mu.size, mu.size):
        raise ValueError(f"dimension mismatch: mu has {mu.shape}, L has {L.shape}")
    return max(float(mu @ L @ mu), 0.0)


def _range_basis(L: np.ndarray, tol: float) -> tuple[np.ndarray, np.ndarray]:
    w, U = np.linalg.eigh(L)
    scale = max(1.0, float(np.abs(w).max(initial=0.0)))
    keep = w > tol * scale
    return U[:, keep], U[:, ~keep]


def gamma_closeness(L_D, L_H, tol: float = EIG_TOL) -> float:
    """Smallest gamma with (1-g) y'L_D y <= y'L_H y <= (1+g) y'L_D y.

    Only defined when both Laplacians have the same null space; otherwise
    ``IncompatibleGraphsError`` is raised.
    """
    L_D = np.asarray(L_D, dtype=float)
    L_H = np.asarray(L_H, dtype=float)
    if L_D.shape != L_H.shape:
        raise ValueError(f"size mismatch: {L_D.shape} vs {L_H.shape}")
    range_D, null_D = _range_basis(L_D, tol)
    range_H, _ = _range_basis(L_H, tol)
    scale = max(1.0, float(np.abs(L_H).max(initial=0.0)))
    if range_D.shape[1] != range_H.shape[1] or (
        null_D.size and np.abs(L_H @ null_D).max() > tol * scale * L_D.shape[0]
    ):
        raise IncompatibleGraphsError("Laplacians have different null spaces")
    if range_D.shape[1] == 0:
        return 0.0
    A = range_D.T @ L_H @ range_D
    B = range_D.T @ L_D @ range_D
    ratios = scipy.linalg.eigh((A + A.T) / 2, (B + B.T) / 2, eigvals_only=True)
    return float(max(ratios.max() - 1.0, 1.0 - ratios.min(), 0.0))


def load_edge_list(path) -> SimilarityGraph:
    """Read the ``n <N>`` header plus ``u v w`` lines format."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidGraphError(f"{path}: empty graph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "n":
        raise InvalidGraphError(f"{path}: first line must be 'n <N>'")
    try:
        n = int(head[1])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise InvalidGraphError(f"{path}: bad edge line {ln!r}")
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
            if w <= 0:
                raise InvalidGraphError(f"{path}: edge weight must be positive in {ln!r}")
            if u > v:
                u, v = v, u
            edges.append((u, v, w))
    except ValueError as exc:
        if isinstance(exc, InvalidGraphError):
            raise
        raise InvalidGraphError(f"{path}: {exc}") from exc
    return SimilarityGraph.from_edges(n, edges)


def write_edge_list(g: SimilarityGraph, path) -> None:
    out = [f"n {g.n}"]
    out += [f"{u} {v} {w:.9g}" for u, v, w in g.edges()]
    Path(path).write_text("\n".join(out) + "\n")
