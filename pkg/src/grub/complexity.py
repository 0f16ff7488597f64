"""Competitive-arm classification and sample-complexity bounds for GRUB.

All logarithms are natural. Per-arm highly-competitive terms are floored at
zero after subtracting the influence offset.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import IncompatibleGraphsError, SimilarityGraph, gamma_closeness
from .influence import InfluenceTable, influence_table

LEADING_CONSTANT = 112.0


class MultipleOptimaError(ValueError):
    pass


class NotGammaCloseError(ValueError):
    def __init__(self, measured, requested):
        self.measured = measured
        self.requested = requested
        shown = "incompatible null spaces" if measured is None else f"measured gamma {measured:.6g}"
        super().__init__(f"candidate graph is not {requested}-close ({shown})")


@dataclass
class CompetitiveSplit:
    H: frozenset
    W: frozenset
    N: frozenset
    gaps: np.ndarray
    best: int
    h_threshold: np.ndarray = field(repr=False, default=None)
    n_threshold: np.ndarray = field(repr=False, default=None)

    def label(self, j: int) -> str:
        if j in self.N:
            return "N"
        if j in self.H:
            return "H"
        return "W"


@dataclass
class ComplexityReport:
    T: float
    h_terms: dict[int, float]
    w_terms: dict[int, float]
    k: int
    split: CompetitiveSplit
    gamma: float = 0.0
    zeta: float | None = None

    @property
    def h_sum(self) -> float:
        return float(sum(self.h_terms.values()))

    @property
    def w_sum(self) -> float:
        return float(sum(self.w_terms.values()))


def _gaps(mu) -> tuple[np.ndarray, int]:
    mu = np.asarray(mu, dtype=float)
    best = int(np.argmax(mu))
    gaps = mu[best] - mu
    if np.count_nonzero(gaps == 0) > 1:
        raise MultipleOptimaError("mean vector has multiple optimal arms")
    return gaps, best


def _safe_log(x: float) -> float:
    # a negative log would put a negative number under the square root
    return max(math.log(x), 0.0)


def classify_arms(
    mu,
    g: SimilarityGraph,
    influence: InfluenceTable,
    rho: float,
    epsilon: float,
    delta: float,
    sigma: float = 1.0,
    gamma: float = 0.0,
) -> CompetitiveSplit:
    """Split arms into highly (H), weakly (W) and non-competitive (N).

    Membership in N takes precedence over H. Isolated arms have infinite
    thresholds and therefore always land in H.
    """
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not 0 <= gamma < 1:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    gaps, best = _gaps(mu)
    bias = rho * epsilon
    h_thr = np.full(g.n, np.inf)
    n_thr = np.full(g.n, np.inf)
    for members in g.components:
        size = len(members)
        for j in members:
            J = influence[j]
            if J <= 0:
                continue
            width_h = 2 * sigma * math.sqrt(14 * _safe_log(2 * J * J * size / delta)) + bias
            width_n = 2 * sigma * math.sqrt(14 * _safe_log(2 * size / delta)) + bias
            h_thr[j] = 2 * math.sqrt(2 / ((1 - gamma) * J)) * width_h
            n_thr[j] = 2 * math.sqrt(1 / (1 - gamma) + 2 / ((1 - gamma) * J)) * width_n
    in_n = gaps >= n_thr
    in_h = (gaps <= h_thr) & ~in_n
    in_h[best] = True
    in_n[best] = False
    H = frozenset(np.flatnonzero(in_h).tolist())
    N = frozenset(np.flatnonzero(in_n).tolist())
    W = frozenset(range(g.n)) - H - N
    return CompetitiveSplit(H, W, N, gaps, best, h_thr, n_thr)


def _h_term(gap, J, n, sigma, delta, rho, epsilon, denom_sq, shrink, leading, log_constant):
    c = leading * sigma**2
    c_log = log_constant * sigma**2
    inner = c_log * math.sqrt(2) * math.sqrt(n) / (shrink * math.sqrt(delta) * gap**2)
    return max((c * math.log(inner) + rho * epsilon / 2) / (shrink * denom_sq) - J / 2, 0.0)


def _evaluate(split, g, influence, sigma, delta, rho, epsilon, zeta, gamma, leading, log_constant):
    n = g.n
    h_terms = {}
    for j in sorted(split.H):
        if j == split.best:
            continue
        gap = split.gaps[j]
        if gap <= 0:
            raise MultipleOptimaError(f"arm {j} ties the best arm")
        denom_sq = gap**2 if zeta is None else max(gap**2, zeta**2)
        h_terms[j] = _h_term(gap, influence[j], n, sigma, delta, rho, epsilon, denom_sq, 1 - gamma, leading, log_constant)
    w_terms = {}
    for c, members in enumerate(g.components):
        weak = [j for j in members if j in split.W]
        if weak:
            w_terms[c] = float(max(max(influence[j] for j in weak), len(weak)))
    T = sum(h_terms.values()) + sum(w_terms.values()) + g.k
    return ComplexityReport(float(T), h_terms, w_terms, g.k, split, gamma=gamma, zeta=zeta)


def sample_complexity(
    split: CompetitiveSplit,
    g: SimilarityGraph,
    influence: InfluenceTable,
    sigma: float,
    delta: float,
    rho: float,
    epsilon: float,
    leading: float = LEADING_CONSTANT,
    log_constant: float | None = None,
) -> ComplexityReport:
    """Upper bound on GRUB's number of rounds (holds with probability 1 - delta)."""
    lc = leading if log_constant is None else log_constant
    return _evaluate(split, g, influence, sigma, delta, rho, epsilon, None, 0.0, leading, lc)


def zeta_complexity(
    split, g, influence, sigma, delta, rho, epsilon, zeta,
    leading: float = LEADING_CONSTANT, log_constant: float | None = None,
) -> ComplexityReport:
    """Bound for zeta-GRUB: each H prefactor uses 1/max(gap^2, zeta^2)."""
    if not zeta > 0:
        raise ValueError(f"zeta must be positive, got {zeta}")
    lc = leading if log_constant is None else log_constant
    return _evaluate(split, g, influence, sigma, delta, rho, epsilon, zeta, 0.0, leading, lc)


def gamma_complexity(
    candidates,
    g: SimilarityGraph,
    mu,
    sigma: float,
    delta: float,
    rho: float,
    epsilon: float,
    leading: float = LEADING_CONSTANT,
    log_constant: float | None = None,
):
    """Minimum of the gamma-close bound over explicit ``(H, gamma)`` candidates.

    Every candidate is checked against ``g`` first. Returns
    ``(report, index)`` of the best candidate.
    """
    lc = leading if log_constant is None else log_constant
    best = None
    for idx, (H, gamma) in enumerate(candidates):
        try:
            measured = gamma_closeness(g.laplacian, H.laplacian)
        except IncompatibleGraphsError:
            raise NotGammaCloseError(None, gamma) from None
        if measured > gamma + 1e-12:
            raise NotGammaCloseError(measured, gamma)
        table = influence_table(H, rho)
        split = classify_arms(mu, H, table, rho, epsilon, delta, sigma, gamma=gamma)
        report = _evaluate(split, H, table, sigma, delta, rho, epsilon, None, gamma, leading, lc)
        if best is None or report.T < best[0].T:
            best = (report, idx)
    if best is None:
        raise ValueError("no candidate graphs given")
    return best


def no_graph_term(gap, n, sigma, delta, leading=LEADING_CONSTANT, log_constant=None) -> float:
    """Samples needed to eliminate one arm without side information."""
    lc = leading if log_constant is None else log_constant
    return _h_term(gap, 0.0, n, sigma, delta, 0.0, 0.0, gap**2, 1.0, leading, lc)


@dataclass
class ImprovementRatios:
    n_ratio: float
    w_ratio: float
    w_bound: float
    h_ratios: dict[int, float]
    net_positive: dict[int, bool]


def improvement_ratio(split, g, influence, sigma, delta, rho, epsilon, leading=LEADING_CONSTANT):
    """Graph-free over graph-aware sample counts per arm class.

    * N: ``|N| / k(G)``
    * W: graph-free samples for W arms over the graph-aware W term, together
      with ``max_j (J_j / 2) log(J_j / delta)`` as the order bound
    * H: per-arm ratio of graph-free to graph-aware terms, and whether
      ``rho * eps < J_j * gap_j^2``
    """
    n = g.n
    n_ratio = len(split.N) / g.k
    weak = [j for j in split.W]
    if weak:
        free = sum(no_graph_term(split.gaps[j], n, sigma, delta, leading) for j in weak)
        aware = _evaluate(split, g, influence, sigma, delta, rho, epsilon, None, 0.0, leading, leading).w_sum
        w_ratio = free / aware
        w_bound = max((influence[j] / 2) * _safe_log(influence[j] / delta) for j in weak)
    else:
        w_ratio = w_bound = float("nan")
    h_ratios, flags = {}, {}
    for j in sorted(split.H):
        if j == split.best:
            continue
        gap = split.gaps[j]
        free = no_graph_term(gap, n, sigma, delta, leading)
        aware = _h_term(gap, influence[j], n, sigma, delta, rho, epsilon, gap**2, 1.0, leading, leading)
        h_ratios[j] = free / aware if aware > 0 else float("inf")
        flags[j] = bool(rho * epsilon < influence[j] * gap**2)
    return ImprovementRatios(n_ratio, w_ratio, w_bound, h_ratios, flags)
