"""Game-tree geometry: pruning, n-bit communicativeness and strategy counts.

Communicativeness values are kept exactly. At every retained state the
per-player value has the form ``log2(K)`` for a positive integer ``K``:
leaves contribute ``K = 1`` and choosing ``i`` children multiplies the
weakest child's ``K`` by ``i``. Storing ``K`` keeps ``floor(2**n)`` exact.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from spinning_top.games.extensive import ExtensiveGame

DEFAULT_NODE_BUDGET = 10_000_000
BUDGET_ENV = "SPINTOP_NODE_BUDGET"


class NodeBudgetExceeded(RuntimeError):
    pass


def node_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    return int(os.environ.get(BUDGET_ENV, DEFAULT_NODE_BUDGET))


@dataclass(frozen=True)
class GameGraph:
    """Every reachable state with its distinct children, in post-order."""

    root: Hashable
    order: list
    children: dict
    terminal: dict
    player: dict
    outcome: dict


def explore(game: ExtensiveGame, budget: int | None = None) -> GameGraph:
    """Iterative depth-first walk of the reachable state graph."""
    budget = node_budget(budget)
    root = game.initial_state()
    children, terminal, player, outcome = {}, {}, {}, {}
    order = []
    stack = [(root, False)]
    while stack:
        s, expanded = stack.pop()
        if expanded:
            order.append(s)
            continue
        if s in terminal:
            continue
        if len(terminal) >= budget:
            raise NodeBudgetExceeded(f"state space exceeds node budget {budget}")
        term = game.is_terminal(s)
        terminal[s] = term
        if term:
            outcome[s] = game.outcome(s)
            children[s] = []
            order.append(s)
            continue
        player[s] = game.player_to_move(s)
        kids = game.children(s)
        children[s] = kids
        stack.append((s, True))
        for c in reversed(kids):
            if c not in terminal:
                stack.append((c, False))
    return GameGraph(root, order, children, terminal, player, outcome)


def reachable_signs(graph: GameGraph) -> dict:
    """Bitmask per state: 1 if a win for player 0 is reachable, 2 if a loss is."""
    mask = {}
    for s in graph.order:
        if graph.terminal[s]:
            o = graph.outcome[s]
            mask[s] = (1 if o > 0 else 0) | (2 if o < 0 else 0)
        else:
            m = 0
            for c in graph.children[s]:
                m |= mask[c]
            mask[s] = m
    return mask


def prune_determined(game: ExtensiveGame, budget: int | None = None):
    """States that can still reach both a win and a loss (terminals excluded).

    Returns ``(graph, retained)``. An empty ``retained`` set means the root
    itself is determined and the game is 0-bit communicative.
    """
    graph = explore(game, budget)
    mask = reachable_signs(graph)
    retained = {s for s in graph.order if not graph.terminal[s] and mask[s] == 3}
    return graph, retained


def subset_max_solver(g0: Callable[[int], float], g1: Sequence[float], B: Sequence | None = None):
    """Maximize ``g0(|A|) + min(g1[a] for a in A)`` over nonempty ``A`` of ``B``.

    For a fixed size ``k`` the best subset is the ``k`` elements with the
    largest ``g1``, so one sort plus a prefix scan covers every size. Ties
    go to the smallest subset. Returns ``(subset, value)``.
    """
    B = list(range(len(g1))) if B is None else list(B)
    if not B:
        raise ValueError("B must be nonempty")
    ranked = sorted(B, key=lambda b: -g1[b])
    best_k, best_val = 1, None
    for k in range(1, len(ranked) + 1):
        val = g0(k) + g1[ranked[k - 1]]
        if best_val is None or val > best_val:
            best_k, best_val = k, val
    return ranked[:best_k], best_val


@dataclass
class CommResult:
    n_bits: float
    per_player: tuple[float, float]
    pruned_state_count: int
    root_pruned: bool
    # per-player root values as integers K with value log2(K)
    exact: tuple[int, int]

    @property
    def floor_pow2(self) -> int:
        """``floor(2**n_bits)``, computed without rounding."""
        return min(self.exact)

    def to_dict(self) -> dict:
        return {"n_bits": self.n_bits, "per_player": list(self.per_player),
                "floor_2_pow_n": self.floor_pow2, "pruned_state_count": self.pruned_state_count,
                "root_pruned": self.root_pruned, "exact_K": list(self.exact)}


def _aggregate(mover: int, kids: list[tuple[int, int]]) -> tuple[int, int]:
    """Combine children ``(K0, K1)`` at a node where ``mover`` acts."""
    m = [min(k) for k in kids]
    other = 1 - mover
    ranked = sorted(range(len(kids)), key=lambda i: -m[i])
    best = None
    low_m, low_o = None, None
    for i, idx in enumerate(ranked, start=1):
        low_m = m[idx] if low_m is None else min(low_m, m[idx])
        o = kids[idx][other]
        low_o = o if low_o is None else min(low_o, o)
        cand = i * low_m
        if best is None or cand > best[0]:
            best = (cand, low_o)
    out = [0, 0]
    out[mover], out[other] = best
    return out[0], out[1]


def restricted_communicativeness(game: ExtensiveGame, labeler: Callable[[Hashable], bool] | None,
                                 budget: int | None = None) -> CommResult:
    """Communicativeness where states flagged by ``labeler`` count as leaves."""
    graph, retained = prune_determined(game, budget)
    if graph.root not in retained:
        return CommResult(0.0, (0.0, 0.0), 0, True, (1, 1))
    K = {}
    for s in graph.order:
        if s not in retained:
            continue
        kids = [K[c] for c in graph.children[s] if c in retained]
        if not kids or (labeler is not None and labeler(s)):
            K[s] = (1, 1)
        else:
            K[s] = _aggregate(graph.player[s], kids)
    k0, k1 = K[graph.root]
    per = (math.log2(k0), math.log2(k1))
    return CommResult(min(per), per, len(retained), False, (k0, k1))


def communicativeness(game: ExtensiveGame, budget: int | None = None) -> CommResult:
    return restricted_communicativeness(game, None, budget)


def remaining_depth(graph: GameGraph) -> dict:
    """Longest path (in moves) from each state to a terminal."""
    h = {}
    for s in graph.order:
        kids = graph.children[s]
        h[s] = 0 if not kids else 1 + max(h[c] for c in kids)
    return h


def minmax_depth_labeler(game: ExtensiveGame, depth: int, budget: int | None = None):
    """Flags states a depth-``depth`` full-width search resolves exactly.

    Below such a state the search plays a fixed minimax move, so the class
    of depth-limited searchers can no longer signal anything there.
    """
    h = remaining_depth(explore(game, budget))
    return lambda s: h[s] <= depth


@dataclass
class StrategyCount:
    z_player0: int
    z_player1: int

    @property
    def product(self) -> int:
        return self.z_player0 * self.z_player1

    def to_dict(self) -> dict:
        def lg(v):
            return math.log10(v) if v > 0 else float("-inf")
        return {"z_player0": str(self.z_player0), "z_player1": str(self.z_player1),
                "product": str(self.product), "log10_z_player0": lg(self.z_player0),
                "log10_z_player1": lg(self.z_player1), "log10_product": lg(self.product)}


def count_pure_strategies(game: ExtensiveGame, budget: int | None = None) -> StrategyCount:
    """Number of behaviourally different pure strategies of each player.

    A player's strategy picks one child at each of their reachable decision
    points, so counts add over own choices and multiply over the opponent's.
    """
    graph = explore(game, budget)
    z = [{}, {}]
    for s in graph.order:
        for j in (0, 1):
            if graph.terminal[s]:
                z[j][s] = 1
            elif graph.player[s] == j:
                z[j][s] = sum(z[j][c] for c in graph.children[s])
            else:
                prod = 1
                for c in graph.children[s]:
                    prod *= z[j][c]
                z[j][s] = prod
    return StrategyCount(z[0][graph.root], z[1][graph.root])


def go_bound_bits(moves: int = 180) -> float:
    """``log2(moves!)`` as a plain sum of logarithms."""
    return math.fsum(math.log2(i) for i in range(1, moves + 1))
