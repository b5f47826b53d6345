"""Constructive cycles in the parity game.

Each constructed strategy owns an ID of ``n_steps - 1`` bits. On every
non-final step it sends one ID bit (flip for 1, keep for 0). Player 0's
final step is a guess taken after all of player 1's signals have been seen,
so player 0 decodes the opponent ID and guesses right or wrong as the
target prescribes. Player 1 never reaches its final step, which makes the
symmetrized match value equal to the target entry.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from spinning_top.games.extensive import FLIP, GUESS0, GUESS1, KEEP, ParityGame


def id_bits(i: int, width: int) -> list[int]:
    return [(i >> (width - 1 - k)) & 1 for k in range(width)]


@dataclass(frozen=True)
class SignallingStrategy:
    ident: int
    target: tuple
    n_steps: int

    def __call__(self, game: ParityGame, state) -> int:
        width = self.n_steps - 1
        step = game.own_step(state)
        if step < width:
            return FLIP if id_bits(self.ident, width)[step] else KEEP
        me = game.player_to_move(state)
        opp_actions = state[1 - me::2]
        opp = 0
        for a in opp_actions[:width]:
            opp = (opp << 1) | (1 if a == FLIP else 0)
        want_win = opp >= len(self.target) or self.target[self.ident][opp] >= 0
        bit = game.bit(state)
        right = GUESS1 if bit else GUESS0
        wrong = GUESS0 if bit else GUESS1
        return right if want_win else wrong


def theorem1_construct(game: ParityGame, target) -> list[SignallingStrategy]:
    """One strategy per row of the antisymmetric ``+-1`` matrix ``target``."""
    T = np.asarray(target)
    m = T.shape[0]
    if T.shape != (m, m):
        raise ValueError("target must be square")
    if np.any(np.diag(T) != 0) or np.any(T != -T.T):
        raise ValueError("target must be antisymmetric")
    off = ~np.eye(m, dtype=bool)
    if np.any(np.abs(T[off]) != 1):
        raise ValueError("off-diagonal target entries must be +1 or -1")
    cap = 2 ** (game.n_steps - 1)
    if m > cap:
        raise ValueError(f"{m} strategies exceed the 2^(n-1) = {cap} limit of this game")
    frozen = tuple(tuple(int(v) for v in row) for row in T)
    return [SignallingStrategy(i, frozen, game.n_steps) for i in range(m)]


def play_policies(game, first, second) -> float:
    """Outcome for ``first`` (player 0) when two state policies meet."""
    state = game.initial_state()
    movers = (first, second)
    while not game.is_terminal(state):
        action = movers[game.player_to_move(state)](game, state)
        state = game.apply(state, action)
    return game.outcome(state)


def simulate_payoff(game, strategies) -> np.ndarray:
    """Symmetrized match matrix of state policies."""
    m = len(strategies)
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            v = 0.5 * (play_policies(game, strategies[i], strategies[j])
                       - play_policies(game, strategies[j], strategies[i]))
            out[i, j], out[j, i] = v, -v
    return out


def cyclic_target(m: int) -> np.ndarray:
    """Tournament where strategy ``i`` beats ``i - 1`` and everything is a cycle."""
    T = np.zeros((m, m), dtype=int)
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            d = (i - j) % m
            T[i, j] = 1 if d <= (m - 1) // 2 and d != 0 else -1
    if m % 2 == 0:
        for i in range(m // 2):
            j = i + m // 2
            T[i, j], T[j, i] = 1, -1
    return T


def find_cycle(P, order) -> bool:
    """True iff each strategy in ``order`` beats its predecessor, cyclically."""
    P = np.asarray(P)
    k = len(order)
    return all(P[order[(t + 1) % k], order[t]] > 0 for t in range(k))
