"""Laplacian-regularized mean estimation and confidence widths.

The design matrix after T pulls is ``V = diag(counts) + rho * L``. Its
inverse is kept up to date with Sherman-Morrison downdates once every
connected component has been sampled, and recomputed from scratch every
``refresh_every`` pulls to keep rounding error bounded.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import SimilarityGraph, components_from_laplacian

REFRESH_EVERY = 512


class SingularDesignError(RuntimeError):
    """Some connected component has not been sampled yet, so V is singular."""


@dataclass(frozen=True)
class ConfidenceParams:
    sigma: float
    delta: float
    epsilon: float
    n: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")

    def beta(self, t, rho: float):
        """2 sigma sqrt(14 log(2 n (t+1)^2 / delta)) + rho eps, vectorized over t."""
        t = np.asarray(t, dtype=float)
        radical = 14.0 * np.log(2.0 * self.n * (t + 1.0) ** 2 / self.delta)
        out = 2.0 * self.sigma * np.sqrt(radical) + rho * self.epsilon
        return float(out) if out.ndim == 0 else out


class DesignState:
    """Mutable per-run estimator state. One writer per run."""

    def __init__(self, L, rho: float, refresh_every: int = REFRESH_EVERY):
        if not rho > 0:
            raise ValueError(f"rho must be positive, got {rho}")
        self.L = np.array(L, dtype=float)
        n = self.L.shape[0]
        self.rho = float(rho)
        self.refresh_every = refresh_every
        self.components = components_from_laplacian(self.L)
        self._comp_of = np.empty(n, dtype=int)
        for c, members in enumerate(self.components):
            self._comp_of[list(members)] = c
        self._comp_pulls = np.zeros(len(self.components), dtype=int)
        self.counts = np.zeros(n, dtype=int)
        self.V = self.rho * self.L
        self.Vinv: np.ndarray | None = None
        self.x = np.zeros(n)
        self.updates_since_refresh = 0

    @property
    def n(self) -> int:
        return self.counts.size

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def identifiable(self) -> bool:
        return bool(np.all(self._comp_pulls > 0))

    def refresh(self) -> None:
        self.Vinv = np.linalg.inv(self.V)
        self.Vinv = (self.Vinv + self.Vinv.T) / 2
        self.updates_since_refresh = 0

    def record(self, arm: int, reward: float) -> "DesignState":
        if not 0 <= arm < self.n:
            raise IndexError(f"arm {arm} out of range for n={self.n}")
        self.counts[arm] += 1
        self._comp_pulls[self._comp_of[arm]] += 1
        self.V[arm, arm] += 1.0
        self.x[arm] += reward
        if self.Vinv is None:
            if self.identifiable:
                self.refresh()
            return self
        self.updates_since_refresh += 1
        if self.updates_since_refresh >= self.refresh_every:
            self.refresh()
        else:
            col = self.Vinv[:, arm].copy()
            self.Vinv -= np.outer(col, col) / (1.0 + col[arm])
        return self

    def require_inverse(self) -> np.ndarray:
        if self.Vinv is None:
            raise SingularDesignError(
                "design matrix is singular: sample at least one arm in every connected component"
            )
        return self.Vinv


def init_design(L, rho: float, refresh_every: int = REFRESH_EVERY) -> DesignState:
    return DesignState(L, rho, refresh_every)


def is_identifiable(state: DesignState, g: SimilarityGraph | None = None) -> bool:
    if g is None:
        return state.identifiable
    return all(state.counts[list(members)].sum() > 0 for members in g.components)


def record_pull(state: DesignState, arm: int, reward: float) -> DesignState:
    return state.record(arm, reward)


def mean_estimate(state: DesignState) -> np.ndarray:
    return state.require_inverse() @ state.x


def confidence_widths(state: DesignState, params: ConfidenceParams) -> np.ndarray:
    Vinv = state.require_inverse()
    diag = np.clip(np.diag(Vinv), 0.0, None)
    return params.beta(state.counts, state.rho) * np.sqrt(diag)


def confidence_width(state: DesignState, params: ConfidenceParams, arm: int) -> float:
    Vinv = state.require_inverse()
    v = max(float(Vinv[arm, arm]), 0.0)
    return params.beta(int(state.counts[arm]), state.rho) * math.sqrt(v)
