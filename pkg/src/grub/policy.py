"""Arm-selection rules for the elimination loop.

Score-based rules read the maintained inverse ``Vinv`` and use rank-one
identities for the effect of one more pull of arm ``i`` (``v = Vinv[i, i]``):

* own variance after the pull: ``v / (1 + v)``
* trace decrement: ``||Vinv e_i||^2 / (1 + v)``
* determinant ratio: ``1 + v``

Ties are broken by the lowest arm index. Scores within ``TIE_RTOL`` of the
best are treated as ties so that rules which agree mathematically also
agree numerically.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

from .estimator import DesignState

TIE_RTOL = 1e-12


class PolicyKind(str, Enum):
    CYCLIC = "cyclic"
    VALKO = "valko"
    MAXDIFF = "maxdiff"
    MINTRACE = "mintrace"
    MINDET = "mindet"
    JVMO = "jvmo"

    @classmethod
    def parse(cls, name) -> "PolicyKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown policy {name!r}; choose from {choices}") from None


def cyclic_order(components) -> list[int]:
    """Interleave components: first member of each, then second of each, ..."""
    order = []
    depth = max((len(c) for c in components), default=0)
    for d in range(depth):
        order.extend(c[d] for c in components if d < len(c))
    return order


def _pick(arms: np.ndarray, scores: np.ndarray, maximize: bool) -> int:
    s = scores if maximize else -scores
    best = s.max()
    tied = s >= best - TIE_RTOL * max(abs(best), 1.0)
    return int(arms[tied].min())


def _scores(kind: PolicyKind, Vinv: np.ndarray, arms: np.ndarray):
    v = np.diag(Vinv)[arms]
    if kind is PolicyKind.VALKO:
        return v, True
    if kind is PolicyKind.MINDET:
        return np.log1p(v), True
    if kind is PolicyKind.MAXDIFF:
        return v * v / (1.0 + v), True
    if kind is PolicyKind.MINTRACE:
        cols = Vinv[:, arms]
        dec = np.einsum("ij,ij->j", cols, cols) / (1.0 + v)
        return np.trace(Vinv) - dec, False
    if kind is PolicyKind.JVMO:
        rows = Vinv[arms, :]
        return np.einsum("ij,ij->i", rows, rows) / (1.0 + v), True
    raise ValueError(kind)


def next_arm(kind, state: DesignState, active, components=None) -> int:
    kind = PolicyKind.parse(kind)
    arms = np.array(sorted(active), dtype=int)
    if arms.size == 0:
        raise ValueError("active set is empty")
    if kind is PolicyKind.CYCLIC:
        comps = state.components if components is None else components
        counts = state.counts
        low = counts[arms].min()
        active_set = set(arms.tolist())
        for arm in cyclic_order(comps):
            if arm in active_set and counts[arm] == low:
                return arm
        raise AssertionError("cyclic order does not cover the active set")
    Vinv = state.require_inverse()
    scores, maximize = _scores(kind, Vinv, arms)
    return _pick(arms, scores, maximize)
