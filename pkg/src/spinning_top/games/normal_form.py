"""Synthetic symmetric zero-sum games in normal form.

Generators return :class:`NormalFormGame` objects whose ``payoff`` is the
raw matrix described for each game; ``standardize`` maps any of them onto
an antisymmetric matrix with entries in [-1, 1], which is what every
analysis routine expects.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from spinning_top import rng

ANTISYMMETRY_TOL = 1e-12


@dataclass
class NormalFormGame:
    payoff: np.ndarray
    labels: list[str]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.payoff = np.asarray(self.payoff, dtype=float)
        if self.payoff.ndim != 2 or self.payoff.shape[0] != self.payoff.shape[1]:
            raise ValueError(f"payoff must be square, got shape {self.payoff.shape}")
        if len(self.labels) != self.payoff.shape[0]:
            raise ValueError("labels length does not match payoff dimension")

    @property
    def n(self) -> int:
        return self.payoff.shape[0]

    def standardized(self) -> "NormalFormGame":
        return NormalFormGame(standardize(self.payoff), list(self.labels), dict(self.provenance))


def standardize(P) -> np.ndarray:
    """``(P - P.T) / (2 max|P|)``; the zero matrix maps to itself."""
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError(f"payoff must be square, got shape {P.shape}")
    scale = np.abs(P).max() if P.size else 0.0
    if scale == 0.0:
        return np.zeros_like(P)
    out = (P - P.T) / (2.0 * scale)
    np.fill_diagonal(out, 0.0)
    return out


def is_antisymmetric(P, tol: float = ANTISYMMETRY_TOL) -> bool:
    P = np.asarray(P, dtype=float)
    return P.shape[0] == P.shape[1] and np.all(np.diag(P) == 0) and np.abs(P + P.T).max(initial=0.0) <= tol


def is_monotonic(P) -> bool:
    """True iff beating is transitive: P_ij > 0 and P_jk > 0 imply P_ik > 0."""
    A = (np.asarray(P) > 0).astype(np.int64)
    two_step = (A @ A) > 0
    return not np.any(two_step & (A == 0))


def rps() -> NormalFormGame:
    P = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]], dtype=float)
    return NormalFormGame(P, ["rock", "scissors", "paper"], {"generator": "rps"})


def elo_game(n: int, seed: int, max_rating: float = 2000.0) -> NormalFormGame:
    """Raw win-rate matrix ``1 / (1 + exp(-(S_i - S_j) / 400))``, ratings ~ U(0, max)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    g = rng.stream(seed, 0)
    S = g.uniform(0.0, max_rating, size=n)
    P = elo_winrate(S[:, None] - S[None, :])
    return NormalFormGame(P, [f"elo{i}" for i in range(n)],
                          {"generator": "elo", "n": n, "seed": seed, "ratings": S.tolist()})


def elo_winrate(diff):
    return 1.0 / (1.0 + np.exp(-np.asarray(diff, dtype=float) / 400.0))


def noisy_elo_game(n: int, epsilon: float, seed: int) -> NormalFormGame:
    """Elo win rates plus iid N(0, epsilon^2) noise, then ``P - P.T``."""
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    base = elo_game(n, seed)
    noise = rng.stream(seed, 1).normal(0.0, 1.0, size=(n, n)) * epsilon
    Pe = base.payoff + noise
    P = Pe - Pe.T
    prov = dict(base.provenance, generator="noisy_elo", epsilon=epsilon)
    return NormalFormGame(P, [f"nelo{i}" for i in range(n)], prov)


def disc_game(n: int, seed: int) -> NormalFormGame:
    """Points area-uniform in the unit disc; ``P_ij = A_i^T [[0,-1],[1,0]] A_j``."""
    if n < 2:
        raise ValueError("n must be >= 2")
    g = rng.stream(seed, 0)
    r = np.sqrt(g.uniform(size=n))
    theta = g.uniform(0.0, 2 * np.pi, size=n)
    A = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1)
    P = disc_payoff(A)
    return NormalFormGame(P, [f"disc{i}" for i in range(n)],
                          {"generator": "disc", "n": n, "seed": seed, "points": A.tolist()})


def disc_payoff(A) -> np.ndarray:
    # A_i^T [[0,-1],[1,0]] A_j = y_i x_j - x_i y_j, built as M - M^T so it is exactly antisymmetric
    A = np.asarray(A, dtype=float)
    M = np.outer(A[:, 1], A[:, 0])
    return M - M.T


@dataclass(frozen=True)
class RandomGoSSpec:
    n: int
    sigma_w: float = 1.0
    sigma_s: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (self.sigma_w > 0 and self.sigma_s > 0):
            raise ValueError("sigma_w and sigma_s must be positive")


def random_gos_components(spec: RandomGoSSpec) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(W, S)`` for a random Game of Skill."""
    g = rng.stream(spec.seed, 0)
    W = g.normal(0.0, spec.sigma_w, size=(spec.n, spec.n))
    S = g.normal(0.0, spec.sigma_s, size=spec.n)
    return W, S


def random_gos_payoff(W, S) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    S = np.asarray(S, dtype=float)
    return 0.5 * (W - W.T) + S[:, None] - S[None, :]


def random_game_of_skill(spec: RandomGoSSpec) -> NormalFormGame:
    W, S = random_gos_components(spec)
    return NormalFormGame(random_gos_payoff(W, S), [f"gos{i}" for i in range(spec.n)],
                          {"generator": "random_gos", "n": spec.n, "sigma_w": spec.sigma_w,
                           "sigma_s": spec.sigma_s, "seed": spec.seed, "skill": S.tolist()})


def blotto_allocations(units: int, fields: int) -> list[tuple[int, ...]]:
    """All ways to put ``units`` identical units on ``fields`` fields, in
    lexicographically decreasing order (all units on field 0 first)."""
    if units < 1 or fields < 1:
        raise ValueError("units and fields must be >= 1")
    out = []
    for bars in itertools.combinations(range(units + fields - 1), fields - 1):
        prev = -1
        alloc = []
        for b in bars:
            alloc.append(b - prev - 1)
            prev = b
        alloc.append(units + fields - 1 - prev - 1)
        out.append(tuple(alloc))
    out.sort(reverse=True)
    assert len(out) == comb(units + fields - 1, fields - 1)
    return out


def blotto(units: int, fields: int) -> NormalFormGame:
    """Raw payoff = fields won minus fields lost."""
    allocs = np.array(blotto_allocations(units, fields))
    diff = allocs[:, None, :] - allocs[None, :, :]
    P = (diff > 0).sum(-1) - (diff < 0).sum(-1)
    labels = ["-".join(map(str, a)) for a in allocs]
    return NormalFormGame(P.astype(float), labels, {"generator": "blotto", "units": units, "fields": fields})


@dataclass(frozen=True)
class LayeredSpec:
    """Layer sizes listed from the strongest layer down."""

    layer_sizes: tuple[int, ...]
    z_index: int | None = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("layer sizes must be positive")
        z = self.z_index
        if z is None:
            z = int(np.argmax(sizes))
            object.__setattr__(self, "z_index", z)
        if not 0 <= z < len(sizes):
            raise ValueError("z_index out of range")
        if any(sizes[i] > sizes[i + 1] for i in range(z)) or any(
                sizes[i] < sizes[i + 1] for i in range(z, len(sizes) - 1)):
            raise ValueError(f"layer sizes {sizes} are not unimodal around index {z}")


def layered_game(spec: LayeredSpec, seed: int) -> NormalFormGame:
    """k-layered game: every strategy beats every strategy in any later layer.

    Inside a layer the payoffs form a random tournament (entries +-1). For
    layers with at least three members the tournament contains a random
    Hamiltonian cycle, so every such layer is genuinely cyclic.
    """
    sizes = spec.layer_sizes
    n = sum(sizes)
    layer_of = np.repeat(np.arange(len(sizes)), sizes)
    P = np.where(layer_of[:, None] < layer_of[None, :], 1.0, -1.0)
    np.fill_diagonal(P, 0.0)
    g = rng.stream(seed, 0)
    start = 0
    for size in sizes:
        idx = np.arange(start, start + size)
        start += size
        if size == 1:
            continue
        block = np.zeros((size, size))
        iu = np.triu_indices(size, 1)
        signs = g.choice([-1.0, 1.0], size=len(iu[0]))
        block[iu] = signs
        block[(iu[1], iu[0])] = -signs
        if size >= 3:
            order = g.permutation(size)
            for k in range(size):
                a, b = order[k], order[(k + 1) % size]
                block[a, b], block[b, a] = 1.0, -1.0
        P[np.ix_(idx, idx)] = block
    labels = [f"L{layer_of[i]}_{i}" for i in range(n)]
    return NormalFormGame(P, labels, {"generator": "layered", "layer_sizes": list(sizes),
                                      "z_index": spec.z_index, "seed": seed,
                                      "layer_of": layer_of.tolist()})
