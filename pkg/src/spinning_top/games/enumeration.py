"""Explicit pure-strategy enumeration for small extensive games.

A pure strategy of player ``j`` maps every decision point it can reach
(given its own earlier choices) to an action. Decision points are keyed by
the action path from the root, so transpositions count separately.
"""
from __future__ import annotations

import itertools

import numpy as np

from spinning_top.games.extensive import ExtensiveGame
from spinning_top.games.normal_form import NormalFormGame

ENUMERATION_LIMIT = 200_000


def enumerate_strategies(game: ExtensiveGame, player: int, limit: int = ENUMERATION_LIMIT) -> list[dict]:
    def rec(state, path):
        if game.is_terminal(state):
            return [{}]
        actions = game.legal_actions(state)
        if game.player_to_move(state) == player:
            out = []
            for a in actions:
                for sub in rec(game.apply(state, a), path + (a,)):
                    d = dict(sub)
                    d[path] = a
                    out.append(d)
                    if len(out) > limit:
                        raise ValueError(f"more than {limit} strategies")
            return out
        subs = [rec(game.apply(state, a), path + (a,)) for a in actions]
        total = 1
        for s in subs:
            total *= len(s)
        if total > limit:
            raise ValueError(f"more than {limit} strategies")
        out = []
        for combo in itertools.product(*subs):
            d = {}
            for part in combo:
                d.update(part)
            out.append(d)
        return out

    return rec(game.initial_state(), ())


def play_pure(game: ExtensiveGame, first: dict, second: dict) -> float:
    state, path = game.initial_state(), ()
    plans = (first, second)
    while not game.is_terminal(state):
        a = plans[game.player_to_move(state)][path]
        state, path = game.apply(state, a), path + (a,)
    return game.outcome(state)


def outcome_table(game: ExtensiveGame):
    s0 = enumerate_strategies(game, 0)
    s1 = enumerate_strategies(game, 1)
    O = np.array([[play_pure(game, a, b) for b in s1] for a in s0])
    return O, s0, s1


def full_enumeration_game(game: ExtensiveGame) -> NormalFormGame:
    """Symmetric normal form over every (player-0 plan, player-1 plan) pair.

    ``P[(x, y), (x', y')] = (O[x, y'] - O[x', y]) / 2``: both seatings of
    the match, averaged.
    """
    O, s0, s1 = outcome_table(game)
    n0, n1 = O.shape
    P = 0.5 * (O[:, None, None, :] - O.T[None, :, :, None])
    P = P.reshape(n0 * n1, n0 * n1)
    labels = [f"{x}/{y}" for x in range(n0) for y in range(n1)]
    return NormalFormGame(P, labels, {"generator": "full_enumeration", "game": game.descriptor(),
                                      "player0_strategies": n0, "player1_strategies": n1})
