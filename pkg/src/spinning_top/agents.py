"""Seeded deterministic agents and empirical payoff construction.

Every decision is a pure function of ``(spec, game, state)``: all randomness
comes from a PCG64 stream keyed by the spec's seed, its kind and a digest
of the state. Because of that, decisions can be cached freely and match
results do not depend on evaluation order or worker count.

Agent kinds
-----------
``minmax`` (depth d)
    If every line from the state ends within ``d`` moves, play a move with
    the best exact minimax value, choosing among equally good moves with the
    seeded stream. Otherwise play a seeded random move. Depth 0 is a
    random agent.
``minmax_zero`` (depth d)
    Depth-limited negamax that scores non-terminal cut-off states as 0.
``maxmin`` / ``maxmin_zero``
    The same searches with the payoff negated: they try to lose.
``mcts`` (k simulations)
    UCT with ``c = sqrt(2)``, uniformly random rollouts, most visited root
    action, ties broken by action order.
``random``
    Seeded uniform move.
"""
from __future__ import annotations

import math
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from spinning_top import rng
from spinning_top.games.extensive import ExtensiveGame
from spinning_top.games.io import read_payoff, write_payoff
from spinning_top.games.normal_form import standardize

KINDS = ("minmax", "maxmin", "minmax_zero", "maxmin_zero", "mcts", "random")
_KIND_CODE = {k: i for i, k in enumerate(KINDS)}
UCT_C = math.sqrt(2.0)


@dataclass(frozen=True, order=True)
class AgentSpec:
    kind: str
    param: int
    seed: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if self.param < 0:
            raise ValueError("depth / simulation count must be >= 0")

    @property
    def name(self) -> str:
        return f"{self.kind}({self.param},s={self.seed})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param, "seed": self.seed}


# --------------------------------------------------------------------------
# search helpers, memoized per game
# --------------------------------------------------------------------------


class _Search:
    def __init__(self, game: ExtensiveGame):
        self.game = game
        self.exact: dict = {}
        self.within: dict = {}
        self.zero: dict = {}
        self.decisions: dict = {}

    def value(self, s) -> float:
        """Exact minimax value for player 0."""
        v = self.exact.get(s)
        if v is not None:
            return v
        g = self.game
        # explicit stack to stay clear of the recursion limit on deep games
        stack = [s]
        while stack:
            u = stack[-1]
            if u in self.exact:
                stack.pop()
                continue
            if g.is_terminal(u):
                self.exact[u] = g.outcome(u)
                stack.pop()
                continue
            kids = [g.apply(u, a) for a in g.legal_actions(u)]
            todo = [c for c in kids if c not in self.exact]
            if todo:
                stack.extend(todo)
                continue
            vals = [self.exact[c] for c in kids]
            self.exact[u] = max(vals) if g.player_to_move(u) == 0 else min(vals)
            stack.pop()
        return self.exact[s]

    def ends_within(self, s, d: int) -> bool:
        """True iff every line from ``s`` reaches a terminal within ``d`` moves."""
        g = self.game
        if g.is_terminal(s):
            return True
        if d <= 0:
            return False
        key = (s, d)
        r = self.within.get(key)
        if r is None:
            r = all(self.ends_within(g.apply(s, a), d - 1) for a in g.legal_actions(s))
            self.within[key] = r
        return r

    def zero_value(self, s, d: int) -> float:
        """Depth-limited minimax for player 0 with cut-off value 0."""
        g = self.game
        if g.is_terminal(s):
            return g.outcome(s)
        if d <= 0:
            return 0.0
        key = (s, d)
        v = self.zero.get(key)
        if v is None:
            vals = [self.zero_value(g.apply(s, a), d - 1) for a in g.legal_actions(s)]
            v = max(vals) if g.player_to_move(s) == 0 else min(vals)
            self.zero[key] = v
        return v


_SEARCHES: dict = {}


def _search(game: ExtensiveGame) -> _Search:
    s = _SEARCHES.get(game)
    if s is None:
        s = _SEARCHES[game] = _Search(game)
    return s


def clear_caches():
    _SEARCHES.clear()


def _stream(spec: AgentSpec, state):
    return rng.stream(spec.seed, _KIND_CODE[spec.kind], rng.digest(state))


def _pick_best(spec, state, actions, scores):
    best = max(scores)
    choices = [a for a, v in zip(actions, scores) if v == best]
    if len(choices) == 1:
        return choices[0]
    return choices[int(_stream(spec, state).integers(len(choices)))]


def _mcts(spec: AgentSpec, game: ExtensiveGame, root) -> int:
    g = _stream(spec, root)
    stats = {}  # state -> [visits, per-action visits, per-action total reward for the mover]
    actions_of = {}

    def actions(s):
        a = actions_of.get(s)
        if a is None:
            a = actions_of[s] = game.legal_actions(s)
        return a

    for _ in range(max(1, spec.param)):
        path = []
        s = root
        # selection and expansion
        while not game.is_terminal(s):
            acts = actions(s)
            node = stats.get(s)
            if node is None:
                node = stats[s] = [0, np.zeros(len(acts)), np.zeros(len(acts))]
                untried = list(range(len(acts)))
            else:
                untried = np.flatnonzero(node[1] == 0).tolist()
            if untried:
                k = untried[int(g.integers(len(untried)))]
                path.append((s, k))
                s = game.apply(s, acts[k])
                break
            n_parent, n, w = node
            ucb = w / n + UCT_C * np.sqrt(math.log(n_parent) / n)
            k = int(np.argmax(ucb))
            path.append((s, k))
            s = game.apply(s, acts[k])
        # rollout
        while not game.is_terminal(s):
            acts = actions(s)
            s = game.apply(s, acts[int(g.integers(len(acts)))])
        z = game.outcome(s)
        for u, k in path:
            node = stats[u]
            node[0] += 1
            node[1][k] += 1
            node[2][k] += z if game.player_to_move(u) == 0 else -z
    visits = stats[root][1]
    return actions(root)[int(np.argmax(visits))]


def act(spec: AgentSpec, game: ExtensiveGame, state) -> int:
    """The action ``spec`` takes at ``state``."""
    if game.is_terminal(state):
        raise ValueError("cannot act in a terminal state")
    search = _search(game)
    key = (spec, state)
    cached = search.decisions.get(key)
    if cached is not None:
        return cached
    actions = game.legal_actions(state)
    kind = spec.kind
    if len(actions) == 1:
        choice = actions[0]
    elif kind == "random":
        choice = actions[int(_stream(spec, state).integers(len(actions)))]
    elif kind == "mcts":
        choice = _mcts(spec, game, state)
    else:
        sign = 1.0 if game.player_to_move(state) == 0 else -1.0
        if kind.startswith("maxmin"):
            sign = -sign
        kids = [game.apply(state, a) for a in actions]
        if kind in ("minmax", "maxmin"):
            if search.ends_within(state, spec.param):
                choice = _pick_best(spec, state, actions, [sign * search.value(c) for c in kids])
            else:
                choice = actions[int(_stream(spec, state).integers(len(actions)))]
        else:
            d = spec.param - 1
            choice = _pick_best(spec, state, actions, [sign * search.zero_value(c, d) for c in kids])
    search.decisions[key] = choice
    return choice


def play(game: ExtensiveGame, first: AgentSpec, second: AgentSpec) -> float:
    """Outcome for player 0 when ``first`` moves first."""
    state = game.initial_state()
    players = (first, second)
    while not game.is_terminal(state):
        state = game.apply(state, act(players[game.player_to_move(state)], game, state))
    return game.outcome(state)


def play_match(game: ExtensiveGame, a: AgentSpec, b: AgentSpec) -> float:
    """Average of both seatings, from ``a``'s side."""
    return 0.5 * (play(game, a, b) - play(game, b, a))


# --------------------------------------------------------------------------
# agent grids
# --------------------------------------------------------------------------

FULL_GRID = (
    ("minmax", tuple(range(0, 10)), 50),
    ("minmax_zero", tuple(range(1, 10)), 50),
    ("maxmin", tuple(range(1, 10)), 50),
    ("maxmin_zero", tuple(range(1, 10)), 50),
    ("mcts", (10, 100, 1000), 50),
)

PRESETS = {
    "full": FULL_GRID,
    "small": (
        ("minmax", tuple(range(0, 10)), 9),
        ("minmax_zero", (1, 2, 3, 5, 7, 9), 6),
        ("maxmin", (1, 3, 5, 7, 9), 6),
        ("maxmin_zero", (1, 3, 5, 9), 5),
        ("mcts", (10, 50, 100), 6),
    ),
    "tiny": (
        ("minmax", (0, 5, 9), 3),
        ("maxmin", (9,), 2),
        ("mcts", (10,), 2),
    ),
}


def sample_agent_grid(config) -> list[AgentSpec]:
    """Cross product of ``(kind, params, seed_count)`` rows.

    ``config`` is a preset name or an iterable of rows. Seeds run from 0 to
    ``seed_count - 1``. Repeated ``(kind, param)`` entries are rejected.
    """
    rows = PRESETS[config] if isinstance(config, str) else tuple(config)
    if not rows:
        raise ValueError("empty agent grid")
    seen = set()
    out = []
    for kind, params, seeds in rows:
        for p in params:
            if (kind, p) in seen:
                raise ValueError(f"duplicate grid entry {kind}({p})")
            seen.add((kind, p))
            out.extend(AgentSpec(kind, int(p), s) for s in range(int(seeds)))
    if not out:
        raise ValueError("empty agent grid")
    return out


_RANGE = re.compile(r"^(\d+)\.\.(\d+)$")


def parse_grid(text: str):
    """Parse a grid file: one ``kind params seeds`` row per line.

    ``params`` is ``a..b`` (inclusive) or a comma list. ``#`` starts a comment.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'kind params seeds'")
        kind, params, seeds = parts
        m = _RANGE.match(params)
        vals = tuple(range(int(m[1]), int(m[2]) + 1)) if m else tuple(int(v) for v in params.split(","))
        rows.append((kind, vals, int(seeds)))
    return tuple(rows)


# --------------------------------------------------------------------------
# empirical games
# --------------------------------------------------------------------------


@dataclass
class EmpiricalGame:
    payoff: np.ndarray
    labels: list[str]
    agents: list[AgentSpec] | None = None
    dedup_map: dict[int, list[int]] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.labels)

    def sidecar(self) -> dict:
        return {
            "labels": self.labels,
            "agents": [a.to_dict() for a in self.agents] if self.agents is not None else None,
            "dedup_map": {str(k): v for k, v in self.dedup_map.items()},
        }

    def save(self, path) -> Path:
        return write_payoff(path, self.payoff, self.labels, self.sidecar())


def dedup_rows(P):
    """Keep the first of every group of identical rows.

    Returns ``(kept, dedup_map)`` with ``dedup_map[new index]`` listing the
    original indices merged into it.
    """
    P = np.asarray(P)
    first = {}
    groups: list[list[int]] = []
    for i, row in enumerate(P):
        key = row.tobytes()
        if key in first:
            groups[first[key]].append(i)
        else:
            first[key] = len(groups)
            groups.append([i])
    kept = np.array([g[0] for g in groups], dtype=int)
    return kept, {k: g for k, g in enumerate(groups)}


def _row_block(args):
    game, agents, rows = args
    n = len(agents)
    return [(i, [play_match(game, agents[i], agents[j]) for j in range(i + 1, n)]) for i in rows]


def match_matrix(game: ExtensiveGame, agents, parallelism: int = 1, progress: bool = False) -> np.ndarray:
    """Raw symmetrized payoff between every pair of agents."""
    n = len(agents)
    P = np.zeros((n, n))
    rows = list(range(n))
    if parallelism <= 1:
        blocks = (_row_block((game, agents, [i])) for i in rows)
        results = blocks
    else:
        # interleave rows so workers get similar amounts of work
        chunks = [rows[k::parallelism * 4] for k in range(parallelism * 4)]
        pool = ProcessPoolExecutor(max_workers=parallelism)
        results = pool.map(_row_block, [(game, agents, c) for c in chunks if c])
    done = 0
    for block in results:
        for i, vals in block:
            P[i, i + 1:] = vals
            done += 1
        if progress:
            print(f"\rmatches: {done}/{n} rows", end="", file=sys.stderr, flush=True)
    if parallelism > 1:
        pool.shutdown()
    if progress:
        print(file=sys.stderr)
    return P - P.T


def build_empirical_payoff(game: ExtensiveGame, agents, parallelism: int = 1,
                           progress: bool = False) -> EmpiricalGame:
    """Play every pair, standardize, then drop duplicate rows."""
    agents = list(agents)
    if len(agents) < 2:
        raise ValueError("need at least two agents")
    P = standardize(match_matrix(game, agents, parallelism, progress))
    kept, groups = dedup_rows(P)
    Q = P[np.ix_(kept, kept)]
    return EmpiricalGame(Q, [agents[i].name for i in kept], [agents[i] for i in kept], groups)


def load_external_payoff(path) -> EmpiricalGame:
    """Standardized, deduplicated game from a payoff CSV."""
    P, labels, _ = read_payoff(path)
    P = standardize(P)
    kept, groups = dedup_rows(P)
    return EmpiricalGame(P[np.ix_(kept, kept)], [labels[i] for i in kept], None, groups)


def load_empirical(path) -> EmpiricalGame:
    """Inverse of :meth:`EmpiricalGame.save`."""
    P, labels, meta = read_payoff(path)
    agents = meta.get("agents")
    agents = [AgentSpec(**a) for a in agents] if agents else None
    dmap = {int(k): v for k, v in meta.get("dedup_map", {}).items()}
    return EmpiricalGame(P, labels, agents, dmap)
