"""Population-based training with fixed memory.

A population of ``k`` strategies starts as the ``k`` weakest by mean
payoff. Each step an oracle proposes a strategy outside the population
that improves on it, and the new strategy replaces the oldest member
(or a seeded random one). Oracles are pessimistic: among all qualifying
strategies they return the one with the lowest mean payoff over the whole
strategy set, ties going to the lowest index.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from spinning_top import rng
from spinning_top.games.normal_form import RandomGoSSpec, random_gos_components, random_gos_payoff
from spinning_top.nash import NashClustering, nash_clustering

CONVERGED, NO_CANDIDATE, STEP_CAP = "converged", "no_candidate", "step_cap"


def _pessimistic(P, qualifies: np.ndarray, strength=None):
    idx = np.flatnonzero(qualifies)
    if idx.size == 0:
        return None
    strength = (P.mean(axis=1) if strength is None else np.asarray(strength))[idx]
    return int(idx[np.argmin(strength)])  # argmin keeps the lowest index on ties


def oracle_beat_average(P, population, strength=None) -> int | None:
    """Weakest strategy whose summed payoff against the population is positive."""
    P = np.asarray(P)
    pop = np.asarray(list(population), dtype=int)
    ok = P[:, pop].sum(axis=1) > 0
    ok[pop] = False
    return _pessimistic(P, ok, strength)


def oracle_beat_all(P, population, strength=None) -> int | None:
    """Weakest strategy beating every population member."""
    P = np.asarray(P)
    pop = np.asarray(list(population), dtype=int)
    ok = np.all(P[:, pop] > 0, axis=1)
    ok[pop] = False
    return _pessimistic(P, ok, strength)


ORACLES: dict[str, Callable] = {"beat_average": oracle_beat_average, "beat_all": oracle_beat_all}


@dataclass
class StepRecord:
    population: list[int]
    mean_strength: float
    candidate: int | None
    converged: bool


@dataclass
class Trajectory:
    records: list[StepRecord]
    terminal_status: str
    pop_size: int
    seed: int
    final_population: list[int]
    final_strength: float

    @property
    def steps(self) -> int:
        """Number of replacements performed."""
        return sum(1 for r in self.records if r.candidate is not None)

    def to_dict(self) -> dict:
        return {
            "pop_size": self.pop_size,
            "seed": self.seed,
            "terminal_status": self.terminal_status,
            "final_population": self.final_population,
            "final_strength": self.final_strength,
            "records": [{"population": r.population, "mean_strength": r.mean_strength,
                         "candidate": r.candidate, "converged": r.converged} for r in self.records],
        }


def weakest(P, k: int) -> list[int]:
    strength = np.asarray(P).mean(axis=1)
    return [int(i) for i in np.argsort(strength, kind="stable")[:k]]


def run_training(P, pop_size: int, oracle="beat_average", step_cap: int | None = None,
                 seed: int = 0, clustering: NashClustering | None = None,
                 replacement: str = "oldest") -> Trajectory:
    """Fixed-memory training loop.

    The run is ``converged`` when the oracle finds nothing and the
    population holds at least one strategy of the top Nash cluster,
    ``no_candidate`` when the oracle finds nothing otherwise, and
    ``step_cap`` when the cap is reached first. ``step_cap`` defaults to ten
    times the number of strategies.
    """
    P = np.asarray(P, dtype=float)
    n = len(P)
    if not 1 <= pop_size <= n:
        raise ValueError(f"population size {pop_size} outside [1, {n}]")
    if replacement not in ("oldest", "random"):
        raise ValueError("replacement must be 'oldest' or 'random'")
    pick = ORACLES[oracle] if isinstance(oracle, str) else oracle  # (P, population, strength)
    cap = 10 * n if step_cap is None else step_cap
    if clustering is None:
        clustering = nash_clustering(P)
    top = set(clustering.clusters[0].members.tolist())
    strength = P.mean(axis=1)
    g = rng.stream(seed, 7)

    members = deque(weakest(P, pop_size))
    records = []
    status = STEP_CAP
    while len(records) < cap:
        pop = list(members)
        cand = pick(P, pop, strength)
        if cand is None:
            status = CONVERGED if top.intersection(pop) else NO_CANDIDATE
            records.append(StepRecord(pop, float(strength[pop].mean()), None, status == CONVERGED))
            break
        records.append(StepRecord(pop, float(strength[pop].mean()), cand, False))
        if replacement == "oldest":
            members.popleft()
        else:
            del members[int(g.integers(len(members)))]
        members.append(cand)
    final = list(members)
    return Trajectory(records, status, pop_size, seed, final, float(strength[final].mean()))


def non_improving_runs(traj: Trajectory, level) -> list[int]:
    """Lengths of maximal runs of steps without transitive improvement.

    A step improves transitively when the new strategy sits on a strictly
    better ``level`` (smaller is better) than every current member.
    """
    level = np.asarray(level)
    runs, cur = [], 0
    for r in traj.records:
        if r.candidate is None:
            continue
        if level[r.candidate] < level[r.population].min():
            runs.append(cur)
            cur = 0
        else:
            cur += 1
    runs.append(cur)
    return runs


@dataclass
class SweepRow:
    size: int
    seed: int
    steps: int
    terminal_status: str
    final_mean_strength: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    trajectories: list[Trajectory] = field(repr=False)

    def convergence_fraction(self) -> dict[int, float]:
        out = {}
        for size in sorted({r.size for r in self.rows}):
            cell = [r for r in self.rows if r.size == size]
            out[size] = sum(r.terminal_status == CONVERGED for r in cell) / len(cell)
        return out

    def to_csv(self) -> str:
        lines = ["size,seed,steps,terminal_status,final_mean_strength"]
        lines += [f"{r.size},{r.seed},{r.steps},{r.terminal_status},{r.final_mean_strength!r}"
                  for r in self.rows]
        return "\n".join(lines) + "\n"


def population_sweep(P, sizes, oracle="beat_average", step_cap: int | None = None,
                     seeds=(0,), replacement: str = "oldest") -> SweepResult:
    """Run training for every ``(size, seed)`` cell.

    With oldest-first replacement the loop is deterministic, so seeds only
    matter when ``replacement="random"``.
    """
    P = np.asarray(P, dtype=float)
    sizes = [int(s) for s in sizes]
    if any(s > len(P) or s < 1 for s in sizes):
        raise ValueError(f"population sizes must lie in [1, {len(P)}]")
    clustering = nash_clustering(P)
    rows, trajs = [], []
    for size in sizes:
        for seed in seeds:
            t = run_training(P, size, oracle, step_cap, seed, clustering, replacement)
            trajs.append(t)
            rows.append(SweepRow(size, seed, t.steps, t.terminal_status, t.final_strength))
    return SweepResult(rows, trajs)


# --------------------------------------------------------------------------
# random Games of Skill under a uniform improvement oracle
# --------------------------------------------------------------------------


@dataclass
class DriftStats:
    m: int
    increments: np.ndarray
    stalled_trials: int

    @property
    def mean(self) -> float:
        return float(self.increments.mean()) if self.increments.size else float("nan")

    @property
    def variance(self) -> float:
        return float(self.increments.var(ddof=1)) if self.increments.size > 1 else float("nan")


def drift_from_components(W, S, m: int, steps: int, g: np.random.Generator):
    """One trial; returns the per-step changes of the mean skill and a stall flag."""
    P = random_gos_payoff(W, S)
    n = len(S)
    pop = list(g.choice(n, size=m, replace=False))
    incs = []
    for _ in range(steps):
        beats = np.all(P[:, pop] > 0, axis=1)
        beats[pop] = False
        cands = np.flatnonzero(beats)
        if cands.size == 0:
            return np.array(incs), True
        new = int(cands[g.integers(cands.size)])
        slot = int(g.integers(m))
        incs.append((S[new] - S[pop[slot]]) / m)
        pop[slot] = new
    return np.array(incs), False


def random_gos_drift(spec: RandomGoSSpec, m: int, steps: int, trials: int, seed: int) -> DriftStats:
    """Mean-skill increments of uniform-improvement training, pooled over trials.

    Each trial draws a fresh game from ``spec`` (its seed is offset by the
    trial index) and a uniformly random initial population of size ``m``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > spec.n:
        raise ValueError("population larger than the strategy set")
    pooled, stalled = [], 0
    for t in range(trials):
        W, S = random_gos_components(RandomGoSSpec(spec.n, spec.sigma_w, spec.sigma_s,
                                                   rng.digest((spec.seed, t)) & 0xFFFFFFFFFFFF))
        incs, stall = drift_from_components(W, S, m, steps, rng.stream(seed, m, t))
        pooled.append(incs)
        stalled += stall
    return DriftStats(m, np.concatenate(pooled) if pooled else np.array([]), stalled)
