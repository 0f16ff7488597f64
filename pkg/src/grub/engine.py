"""GRUB and zeta-GRUB elimination loops."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .estimator import ConfidenceParams, DesignState, confidence_widths, init_design, mean_estimate
from .graph import SimilarityGraph
from .policy import PolicyKind, next_arm
from .simgen.instances import STREAM_REWARDS, BanditInstance, rng_stream, sample_reward

SINGLETON = "singleton"
ZETA = "zeta"
CAP = "cap"


@dataclass(frozen=True)
class RunConfig:
    params: ConfidenceParams
    rho: float = 1.0
    zeta: float | None = None
    policy: PolicyKind = PolicyKind.CYCLIC
    max_steps: int | None = None
    seed: int = 0
    run: int = 0

    def __post_init__(self):
        object.__setattr__(self, "policy", PolicyKind.parse(self.policy))
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.zeta is not None and self.zeta < 0:
            raise ValueError(f"zeta must be nonnegative, got {self.zeta}")
        if self.max_steps is not None and self.max_steps < self.params.n:
            raise ValueError(f"max_steps must be at least n={self.params.n}")

    @property
    def step_cap(self) -> int:
        return self.max_steps if self.max_steps is not None else 50 * self.params.n


@dataclass
class StepRecord:
    step: int
    arm: int
    reward: float
    active_count: int
    eliminated: tuple[int, ...] = ()


@dataclass
class RunTrace:
    steps: list[StepRecord] = field(default_factory=list)
    winner: int = -1
    total_pulls: int = 0
    terminated_by: str = ""
    final_active: tuple[int, ...] = ()

    def active_counts(self) -> np.ndarray:
        return np.array([s.active_count for s in self.steps], dtype=int)


def cluster_init(state: DesignState, g: SimilarityGraph, pull, trace: RunTrace | None = None) -> DesignState:
    """Pull the lowest-index arm of every connected component once."""
    for members in g.components:
        arm = members[0]
        reward = pull(arm)
        state.record(arm, reward)
        if trace is not None:
            trace.steps.append(StepRecord(state.total, arm, reward, g.n))
    return state


def eliminate_from(active, mu_hat, widths) -> list[int]:
    """Elimination rule on explicit per-arm estimates and widths (indexed by arm)."""
    arms = np.array(sorted(active), dtype=int)
    mu = np.asarray(mu_hat, dtype=float)[arms]
    width = np.asarray(widths, dtype=float)[arms]
    a = int(np.argmax(mu - width))  # first maximum, i.e. lowest index among ties
    keep = (mu[a] - mu) <= width[a] + width
    keep[a] = True
    return arms[keep].tolist()


def eliminate(active, state: DesignState, params: ConfidenceParams) -> list[int]:
    """Keep arms whose estimate is within the two-sided width sum of the best lower bound."""
    return eliminate_from(active, mean_estimate(state), confidence_widths(state, params))


def _run(instance: BanditInstance, g: SimilarityGraph, config: RunConfig, zeta: float | None):
    if instance.n != g.n or config.params.n != g.n:
        raise ValueError("instance, graph and params disagree on the number of arms")
    rng = rng_stream(config.seed, config.run, STREAM_REWARDS)
    params = config.params

    def pull(arm):
        return sample_reward(instance, arm, rng)

    state = init_design(g.laplacian, config.rho)
    trace = RunTrace()
    cluster_init(state, g, pull, trace)
    # the design became identifiable on the last init pull, so eliminate right away
    active = eliminate(range(g.n), state, params)
    last = trace.steps[-1]
    last.active_count = len(active)
    last.eliminated = tuple(sorted(set(range(g.n)) - set(active)))
    cap = config.step_cap
    outcome = SINGLETON
    while len(active) > 1:
        if zeta is not None and zeta > 0:
            widths = confidence_widths(state, params)[active]
            if np.all(2.0 * widths <= zeta):
                outcome = ZETA
                break
        if state.total >= cap:
            outcome = CAP
            break
        arm = next_arm(config.policy, state, active, g.components)
        reward = pull(arm)
        state.record(arm, reward)
        survivors = eliminate(active, state, params)
        gone = tuple(sorted(set(active) - set(survivors)))
        active = survivors
        trace.steps.append(StepRecord(state.total, arm, reward, len(active), gone))
    if len(active) == 1:
        winner = active[0]
    else:
        mu_hat = mean_estimate(state)
        winner = active[int(np.argmax(mu_hat[active]))]
    trace.winner = winner
    trace.total_pulls = state.total
    trace.terminated_by = outcome
    trace.final_active = tuple(active)
    return winner, trace


def grub_run(instance: BanditInstance, g: SimilarityGraph, config: RunConfig):
    """Exact best-arm identification. Returns ``(winner, trace)``."""
    return _run(instance, g, config, None)


def zeta_grub_run(instance: BanditInstance, g: SimilarityGraph, config: RunConfig, zeta: float | None = None):
    """Stop once every surviving arm has doubled width at most zeta; return the best estimate."""
    z = config.zeta if zeta is None else zeta
    if z is None:
        raise ValueError("zeta_grub_run needs a zeta")
    if z < 0:
        raise ValueError("zeta must be nonnegative")
    return _run(instance, g, config, z)


def run(instance: BanditInstance, g: SimilarityGraph, config: RunConfig):
    if config.zeta is None:
        return grub_run(instance, g, config)
    return zeta_grub_run(instance, g, config)
