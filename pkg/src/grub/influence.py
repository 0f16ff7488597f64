"""Minimum influence factors of nodes in a similarity graph.

For a node ``i`` in component ``C``, ``K(i)`` is the unique PSD matrix on
``C`` with zero ``i``-th row and column satisfying
``1 e_i^T + rho K(i) L_C = I``. It equals ``(e_i e_i^T + rho L_C)^{-1} - 1 1^T``,
and in fact ``(T e_i e_i^T + rho L_C)^{-1} - (1/T) 1 1^T`` for any ``T > 0``.

The minimum influence factor of ``j`` is ``min_{i in C_j, i != j} 1 / K(i)_jj``
(zero for isolated nodes).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import SimilarityGraph


class NoKMatrixError(ValueError):
    """K(i) is undefined for isolated nodes."""


class DegenerateInfluenceError(ArithmeticError):
    pass


def _component_laplacian(g: SimilarityGraph, members) -> np.ndarray:
    idx = np.asarray(members)
    return g.laplacian[np.ix_(idx, idx)]


def k_matrix(g: SimilarityGraph, i: int, rho: float = 1.0) -> tuple[np.ndarray, tuple[int, ...]]:
    """Return ``(K, members)``; ``K`` is indexed in the order of ``members``."""
    members = g.component_of(i)
    if len(members) == 1:
        raise NoKMatrixError(f"node {i} is isolated")
    L_C = _component_laplacian(g, members)
    pos = members.index(i)
    M = rho * L_C
    M[pos, pos] += 1.0
    K = np.linalg.inv(M) - 1.0
    return (K + K.T) / 2, members


def _component_factors(g: SimilarityGraph, members, rho: float) -> tuple[np.ndarray, dict[int, np.ndarray]]:
    m = len(members)
    L_C = rho * _component_laplacian(g, members)
    # kdiag[a, b] = K(members[a])_{bb}
    kdiag = np.empty((m, m))
    Ks = {}
    for a, node in enumerate(members):
        M = L_C.copy()
        M[a, a] += 1.0
        K = np.linalg.inv(M) - 1.0
        K = (K + K.T) / 2
        Ks[node] = K
        kdiag[a] = np.diag(K)
    factors = np.empty(m)
    for b in range(m):
        vals = np.delete(kdiag[:, b], b)
        # K_jj = 0 would mean infinite influence; such candidates are skipped
        pos = vals[vals > 0]
        if pos.size == 0:
            raise DegenerateInfluenceError(f"node {members[b]}: every K(i)_jj vanished")
        factors[b] = 1.0 / pos.max()
    return factors, Ks


@dataclass
class InfluenceTable:
    factors: np.ndarray
    rho: float
    k_matrices: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __getitem__(self, j: int) -> float:
        return float(self.factors[j])


def influence_table(g: SimilarityGraph, rho: float = 1.0) -> InfluenceTable:
    factors = np.zeros(g.n)
    Ks: dict[int, np.ndarray] = {}
    for members in g.components:
        if len(members) == 1:
            continue
        f, comp_Ks = _component_factors(g, members, rho)
        factors[list(members)] = f
        Ks.update(comp_Ks)
    return InfluenceTable(factors=factors, rho=rho, k_matrices=Ks)


def influence_factor(g: SimilarityGraph, j: int, rho: float = 1.0) -> float:
    members = g.component_of(j)
    if len(members) == 1:
        return 0.0
    f, _ = _component_factors(g, members, rho)
    return float(f[members.index(j)])


def diag_upper_bound(t_i: int, T: int, J: float) -> float:
    """Upper bound on ``[V^{-1}]_ii`` from the pull counts of ``i``'s component.

    ``t_i`` is the number of pulls of ``i`` and ``T`` the total number of pulls
    inside its component. For an unsampled arm the bound is ``1/J + 1/T``.
    For a sampled arm the pulls are split into ``t_i`` own pulls and
    ``T - t_i`` pulls elsewhere, giving
    ``max{1/(t_i + J/2), 1/(t_i + (T - t_i)/2)}``.
    """
    if T < 1 or t_i < 0 or t_i > T:
        raise ValueError(f"need 0 <= t_i <= T and T >= 1, got t_i={t_i}, T={T}")
    if t_i == 0:
        if not J > 0:
            raise ValueError("an unsampled arm needs a positive influence factor")
        return 1.0 / J + 1.0 / T
    others = T - t_i
    return max(1.0 / (t_i + J / 2.0), 1.0 / (t_i + others / 2.0))
