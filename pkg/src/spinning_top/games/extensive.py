"""Turn-based, fully observable, deterministic game engines.

A game is described by a small interface over hashable states. Outcomes
are reported from player 0's perspective and lie in [-1, 1]; the
engines here only produce -1, 0 or +1. Legal actions are always returned
in a fixed documented order so that tie-breaking conventions are stable.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Hashable, Sequence

State = Hashable


class ExtensiveGame(ABC):
    """Two-player zero-sum game tree with hashable states."""

    name: str = "game"

    @abstractmethod
    def initial_state(self) -> State: ...

    @abstractmethod
    def player_to_move(self, state: State) -> int: ...

    @abstractmethod
    def legal_actions(self, state: State) -> list[int]: ...

    @abstractmethod
    def apply(self, state: State, action: int) -> State: ...

    @abstractmethod
    def is_terminal(self, state: State) -> bool: ...

    @abstractmethod
    def outcome(self, state: State) -> float:
        """Terminal payoff for player 0."""

    def children(self, state: State) -> list[State]:
        """Distinct successor states, in action order."""
        seen = {}
        for a in self.legal_actions(state):
            s = self.apply(state, a)
            seen.setdefault(s, None)
        return list(seen)

    def replay(self, actions: Sequence[int]) -> State:
        state = self.initial_state()
        for a in actions:
            if self.is_terminal(state):
                raise ValueError("action sequence continues past a terminal state")
            if a not in self.legal_actions(state):
                raise ValueError(f"illegal action {a!r}")
            state = self.apply(state, a)
        return state

    def descriptor(self) -> dict:
        return {"game": self.name}


# --------------------------------------------------------------------------
# Tic-Tac-Toe and its misere variant
# --------------------------------------------------------------------------

_TTT_LINES = ((0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6))


def _ttt_winner(board: tuple) -> int:
    for a, b, c in _TTT_LINES:
        v = board[a]
        if v and v == board[b] == board[c]:
            return v
    return 0


@dataclass(frozen=True)
class TicTacToe(ExtensiveGame):
    """3x3 board as a 9-tuple: 0 empty, 1 player 0 (X), 2 player 1 (O).

    Actions are cell indices 0..8 in row-major order.
    """

    name = "tictactoe"

    def initial_state(self):
        return (0,) * 9

    def player_to_move(self, state):
        return (9 - state.count(0)) % 2

    def legal_actions(self, state):
        if self.is_terminal(state):
            return []
        return [i for i in range(9) if state[i] == 0]

    def apply(self, state, action):
        mark = self.player_to_move(state) + 1
        return state[:action] + (mark,) + state[action + 1:]

    def is_terminal(self, state):
        return _ttt_winner(state) != 0 or 0 not in state

    def outcome(self, state):
        w = _ttt_winner(state)
        return 0.0 if w == 0 else (1.0 if w == 1 else -1.0)


@dataclass(frozen=True)
class Misere(ExtensiveGame):
    """Same tree as ``base`` with every outcome negated."""

    base: ExtensiveGame

    @property
    def name(self):
        return f"misere_{self.base.name}"

    def initial_state(self):
        return self.base.initial_state()

    def player_to_move(self, state):
        return self.base.player_to_move(state)

    def legal_actions(self, state):
        return self.base.legal_actions(state)

    def apply(self, state, action):
        return self.base.apply(state, action)

    def is_terminal(self, state):
        return self.base.is_terminal(state)

    def outcome(self, state):
        return -self.base.outcome(state)

    def descriptor(self):
        return {"game": "misere", "base": self.base.descriptor()}


def tictactoe() -> TicTacToe:
    return TicTacToe()


def misere(game: ExtensiveGame) -> ExtensiveGame:
    return Misere(game)


# --------------------------------------------------------------------------
# Connect Four
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectFour(ExtensiveGame):
    """7 columns x 6 rows. State is ``(columns, last_move)`` where each column
    is a tuple of marks (1 or 2) from the bottom up and ``last_move`` is the
    column of the previous drop (-1 at the start). Actions are columns 0..6.
    """

    name = "connect_four"
    cols: int = 7
    rows: int = 6

    def initial_state(self):
        return (((),) * self.cols, -1)

    def player_to_move(self, state):
        return sum(len(c) for c in state[0]) % 2

    def legal_actions(self, state):
        if self.is_terminal(state):
            return []
        return [c for c in range(self.cols) if len(state[0][c]) < self.rows]

    def apply(self, state, action):
        columns = state[0]
        mark = self.player_to_move(state) + 1
        col = columns[action] + (mark,)
        return (columns[:action] + (col,) + columns[action + 1:], action)

    def _cell(self, columns, c, r):
        if 0 <= c < self.cols and 0 <= r < len(columns[c]):
            return columns[c][r]
        return 0

    def _winner(self, state):
        columns, last = state
        if last < 0:
            return 0
        r = len(columns[last]) - 1
        mark = columns[last][r]
        for dc, dr in ((1, 0), (0, 1), (1, 1), (1, -1)):
            run = 1
            for sign in (1, -1):
                k = 1
                while self._cell(columns, last + sign * k * dc, r + sign * k * dr) == mark:
                    run += 1
                    k += 1
            if run >= 4:
                return mark
        return 0

    def is_terminal(self, state):
        if self._winner(state):
            return True
        return all(len(c) == self.rows for c in state[0])

    def outcome(self, state):
        w = self._winner(state)
        return 0.0 if w == 0 else (1.0 if w == 1 else -1.0)


def connect_four() -> ConnectFour:
    return ConnectFour()


# --------------------------------------------------------------------------
# Parity game
# --------------------------------------------------------------------------

FLIP, GUESS0, GUESS1, KEEP = 0, 1, 2, 3
PARITY_ACTIONS = ("flip", "guess0", "guess1", "keep")


@dataclass(frozen=True)
class ParityGame(ExtensiveGame):
    """Single shared bit, initially 0; players alternate, player 0 first.

    Each player gets at most ``n_steps`` moves. Actions, in order:
    flip (0), guess 0 (1), guess 1 (2), keep (3). On a player's final step
    only the guesses are legal. A guess ends the game and the guesser wins
    iff the guess equals the bit.

    The state is the action history, so strategies may condition on
    everything observed so far.
    """

    n_steps: int = 3

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")

    @property
    def name(self):
        return "parity"

    def initial_state(self):
        return ()

    def player_to_move(self, state):
        return len(state) % 2

    def bit(self, state) -> int:
        return sum(1 for a in state if a == FLIP) % 2

    def own_step(self, state) -> int:
        """0-based index of the mover's own step."""
        return len(state) // 2

    def legal_actions(self, state):
        if self.is_terminal(state):
            return []
        if self.own_step(state) == self.n_steps - 1:
            return [GUESS0, GUESS1]
        return [FLIP, GUESS0, GUESS1, KEEP]

    def apply(self, state, action):
        return state + (action,)

    def is_terminal(self, state):
        return bool(state) and state[-1] in (GUESS0, GUESS1)

    def outcome(self, state):
        bit = self.bit(state[:-1])
        correct = (state[-1] == GUESS1) == (bit == 1)
        mover = (len(state) - 1) % 2
        r = 1.0 if correct else -1.0
        return r if mover == 0 else -r

    def descriptor(self):
        return {"game": "parity", "n_steps": self.n_steps}


def parity_game(n_steps: int) -> ParityGame:
    return ParityGame(n_steps)


# --------------------------------------------------------------------------
# Explicit small trees (fixtures, tests, user-defined toy games)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeGame(ExtensiveGame):
    """Game given as a nested tuple tree.

    A leaf is a number (payoff for player 0); an internal node is a tuple of
    subtrees. By default players alternate by depth starting with player 0;
    an internal node may instead be ``("p", player, (child, ...))`` to fix
    the mover. States are paths of child indices.
    """

    tree: tuple
    label: str = "tree"

    @property
    def name(self):
        return self.label

    def _node(self, state):
        node = self.tree
        for a in state:
            node = self._kids(node)[a]
        return node

    @staticmethod
    def _kids(node):
        if isinstance(node, tuple) and len(node) == 3 and node[0] == "p":
            return node[2]
        return node

    def initial_state(self):
        return ()

    def player_to_move(self, state):
        node = self._node(state)
        if isinstance(node, tuple) and len(node) == 3 and node[0] == "p":
            return node[1]
        return len(state) % 2

    def legal_actions(self, state):
        node = self._node(state)
        if not isinstance(node, tuple):
            return []
        return list(range(len(self._kids(node))))

    def apply(self, state, action):
        return state + (action,)

    def is_terminal(self, state):
        return not isinstance(self._node(state), tuple)

    def outcome(self, state):
        return float(self._node(state))

    def descriptor(self):
        return {"game": self.label}


def three_step_fixture() -> TreeGame:
    """Three-move binary game used to illustrate one bit of communication.

    Player 0 moves, then player 1, then player 0; the leaf is a win for
    player 0 iff the three binary choices have even parity. Every depth-2
    node can still reach both outcomes, so each player gets to choose
    between two live continuations exactly once before the last move
    settles the game.
    """

    def leaf(a, b, c):
        return 1 if (a + b + c) % 2 == 0 else -1

    tree = tuple(tuple(tuple(leaf(a, b, c) for c in (0, 1)) for b in (0, 1)) for a in (0, 1))
    return TreeGame(tree, "three_step")


def one_step_rps_tree() -> TreeGame:
    """A single decision whose three actions fix the outcome immediately."""
    return TreeGame((1, 0, -1), "one_step")
