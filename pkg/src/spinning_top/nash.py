"""Maximum-entropy Nash equilibria, Nash clustering and RPP.

All symmetric routines take an antisymmetric payoff ``P`` where ``P[i, j]``
is the payoff of strategy ``i`` against ``j``. A mixture ``x`` is optimal
iff ``P @ x <= 0`` componentwise, so its exploitability is ``max(P @ x)``.

Solving happens in two phases. A linear program over the cone of optimal
strategies finds the union of all equilibrium supports. On the face of the
equilibrium polytope spanned by that support, entropy is maximized through
its smooth convex dual with L-BFGS-B. The result is then certified against
the exploitability tolerance.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, sparse
from scipy.special import logsumexp

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 100_000
# Largest total mass of the homogeneous support LP. Weights down to about
# 1 / SUPPORT_SCALE of the largest one are still detected as support.
SUPPORT_SCALE = 1e6


class NashSolverError(RuntimeError):
    """Raised when a solver cannot certify its answer."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass
class MixedStrategy:
    support: np.ndarray
    weights: np.ndarray

    def dense(self, n: int) -> np.ndarray:
        x = np.zeros(n)
        x[self.support] = self.weights
        return x


@dataclass
class Cluster:
    members: np.ndarray
    weights: np.ndarray
    exploitability: float


@dataclass
class NashClustering:
    clusters: list[Cluster]
    n: int

    def __len__(self):
        return len(self.clusters)

    @property
    def sizes(self) -> list[int]:
        return [len(c.members) for c in self.clusters]

    def labels(self) -> np.ndarray:
        """Cluster index of every strategy (0 is the strongest)."""
        out = np.full(self.n, -1, dtype=int)
        for k, c in enumerate(self.clusters):
            out[c.members] = k
        return out

    def to_dict(self, names=None) -> dict:
        rows = []
        for k, c in enumerate(self.clusters):
            rows.append({
                "index": k,
                "members": c.members.tolist(),
                "labels": [names[i] for i in c.members] if names is not None else None,
                "weights": c.weights.tolist(),
                "exploitability": c.exploitability,
            })
        return {"n": self.n, "clusters": rows}

    def to_json(self, names=None) -> str:
        return json.dumps(self.to_dict(names), indent=2)


@dataclass
class RPPResult:
    value: float
    p_a: np.ndarray
    p_b: np.ndarray
    extra: dict = field(default_factory=dict)


def exploitability(P, x) -> float:
    return float(np.max(np.asarray(P) @ np.asarray(x)))


# --------------------------------------------------------------------------
# building blocks
# --------------------------------------------------------------------------


def _max_support_cone(G: np.ndarray, scale: float = SUPPORT_SCALE):
    """Largest support of ``y >= 0`` with ``G @ y <= 0`` and ``y != 0``.

    Solves ``max sum(t)`` subject to ``G y <= 0``, ``t <= y``, ``t <= 1`` and
    ``sum(y) <= scale``. Every ``t_i`` reaches 1 exactly when ``y_i`` can be
    positive, because the cone can be rescaled.
    """
    m, n = G.shape
    c = np.concatenate([np.zeros(n), -np.ones(n)])
    eye = sparse.identity(n, format="csr")
    A = sparse.vstack([
        sparse.hstack([sparse.csr_matrix(G), sparse.csr_matrix((m, n))]),
        sparse.hstack([-eye, eye]),
        sparse.hstack([sparse.csr_matrix(np.ones((1, n))), sparse.csr_matrix((1, n))]),
    ], format="csr")
    b = np.concatenate([np.zeros(m), np.zeros(n), [scale]])
    bounds = [(0, None)] * n + [(0, 1)] * n
    res = optimize.linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if res.status != 0:
        raise NashSolverError(f"support LP failed: {res.message}")
    t = res.x[n:]
    y = res.x[:n]
    return t > 0.5, y


def _entropy_on_face(E: np.ndarray, C: np.ndarray, max_iter: int) -> np.ndarray:
    """Max-entropy point of ``{x in simplex : E x = 0, C x >= 0}``.

    The optimum is ``softmax(E.T lam + C.T mu)`` where ``(lam, mu >= 0)``
    minimizes the log-partition function. The face must contain a strictly
    positive point.
    """
    n = E.shape[1] if E.size else C.shape[1]
    A = np.vstack([E.reshape(-1, n), C.reshape(-1, n)])
    if A.shape[0] == 0:
        return np.full(n, 1.0 / n)
    n_eq = E.reshape(-1, n).shape[0]

    def f(nu):
        theta = A.T @ nu
        val = logsumexp(theta)
        return val, A @ np.exp(theta - val)

    bounds = [(None, None)] * n_eq + [(0, None)] * (A.shape[0] - n_eq)
    res = optimize.minimize(f, np.zeros(A.shape[0]), jac=True, method="L-BFGS-B", bounds=bounds,
                            options={"maxiter": max_iter, "maxfun": max_iter,
                                     "ftol": 1e-15, "gtol": 1e-11, "maxcor": 30})
    return _newton_polish(A, res.x, n_eq)


def _newton_polish(A: np.ndarray, nu: np.ndarray, n_eq: int, iters: int = 60) -> np.ndarray:
    """Projected Newton steps on the unnormalized entropy dual.

    L-BFGS-B stops on relative decrease long before the gradient (the
    constraint violation of the primal point) is small when the face has
    tiny weights. The unnormalized dual ``sum(exp(B.T w - 1)) - w0`` with
    ``B = [A; 1]`` is used here. It is linear along the null space of its
    Hessian; a gradient component there means some inequality multiplier
    belongs at its bound, and the step moves it there exactly. Returns the
    primal point with the smallest constraint violation seen.
    """
    B = np.vstack([A, np.ones(A.shape[1])])
    w = np.append(nu, 1.0 - logsumexp(A.T @ nu))
    is_eq = np.arange(len(w)) < n_eq
    is_eq[-1] = True

    def f(w):
        x = np.exp(B.T @ w - 1.0)
        return x.sum() - w[-1], B @ x - np.eye(len(w))[-1], x

    def violation(x):
        r = A @ (x / x.sum())
        return max(np.abs(r[:n_eq]).max(initial=0.0), -r[n_eq:].min(initial=0.0))

    val, g, x = f(w)
    best, best_viol = x, violation(x)
    for _ in range(iters):
        v = violation(x)
        if v < best_viol:
            best, best_viol = x, v
        free = is_eq | (w > 0) | (g < 0)
        gnorm = np.abs(g[free]).max()
        if gnorm < 1e-15:
            break
        Bf = B[free]
        H = (Bf * x) @ Bf.T
        step = np.zeros_like(w)
        step[free] = np.linalg.lstsq(H, -g[free], rcond=1e-13)[0]
        # along the null space of H the objective is linear; if the gradient has
        # a component there, follow it until a multiplier reaches its bound
        flat = g[free] + H @ step[free]
        linear = np.abs(flat).max() > 1e-3 * gnorm
        if linear:
            step[:] = 0.0
            step[free] = -flat
        hits = np.flatnonzero(~is_eq & (step < 0))
        if linear and hits.size == 0:
            break
        ratios = w[hits] / -step[hits]
        if linear:
            # exact move to the nearest bound, which then pins that multiplier
            k = int(np.argmin(ratios))
            w = w + ratios[k] * step
            w[hits[k]] = 0.0
            w[~is_eq] = np.maximum(w[~is_eq], 0.0)
            val, g, x = f(w)
            continue
        # stop where the first multiplier hits its bound; it is then fixed there
        t = min(1.0, float(ratios.min())) if hits.size else 1.0
        while t > 1e-12:
            cand = w + t * step
            cand[~is_eq] = np.maximum(cand[~is_eq], 0.0)
            cval, cg, cx = f(cand)
            # near the optimum f is flat to machine precision, so a smaller gradient also counts
            if cval < val or (cval <= val + 1e-12 * abs(val) and np.abs(cg[free]).max() < gnorm):
                break
            t *= 0.5
        else:
            break
        w, val, g, x = cand, cval, cg, cx
    if violation(x) < best_viol:
        best = x
    return best / best.sum()


def _dominant(G: np.ndarray):
    """Index of a strategy strictly beating every other one, if any."""
    off = G + np.diag(np.full(len(G), np.inf))
    winners = np.flatnonzero(off.min(axis=1) > 0)
    return int(winners[0]) if len(winners) else None


# --------------------------------------------------------------------------
# symmetric games
# --------------------------------------------------------------------------


def max_entropy_nash(P, restriction=None, tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> MixedStrategy:
    """Maximum-entropy optimal mixture of the game restricted to ``restriction``.

    Returns a :class:`MixedStrategy` indexed by the original strategy ids.
    Raises :class:`NashSolverError` if the exploitability certificate fails.
    """
    P = np.asarray(P, dtype=float)
    R = np.arange(len(P)) if restriction is None else np.asarray(sorted(restriction), dtype=int)
    if R.size == 0:
        raise ValueError("restriction must be nonempty")
    G = P[np.ix_(R, R)]
    n = len(R)
    if n == 1:
        return MixedStrategy(R.copy(), np.ones(1))
    dom = _dominant(G)
    if dom is not None:
        return MixedStrategy(R[[dom]], np.ones(1))

    in_support, _ = _max_support_cone(G)
    S = np.flatnonzero(in_support)
    if S.size == 0:
        raise NashSolverError("support LP returned an empty support")
    rest = np.flatnonzero(~in_support)
    if S.size == 1:
        xs = np.ones(1)
    else:
        xs = _entropy_on_face(G[np.ix_(S, S)], -G[np.ix_(rest, S)], max_iter)
    x = np.zeros(n)
    x[S] = xs
    expl = exploitability(G, x)
    if expl > tol:
        raise NashSolverError(f"exploitability {expl:.3g} exceeds tolerance {tol:g}")
    return MixedStrategy(R[S], xs)


def nash_clustering(P, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> NashClustering:
    """Peel off max-entropy Nash supports until no strategy is left."""
    P = np.asarray(P, dtype=float)
    remaining = np.arange(len(P))
    clusters: list[Cluster] = []
    while remaining.size:
        try:
            ms = max_entropy_nash(P, remaining, tol=tol, max_iter=max_iter)
        except NashSolverError as e:
            raise NashSolverError(str(e), partial=NashClustering(clusters, len(P))) from e
        sub = P[np.ix_(remaining, remaining)]
        x = np.zeros(len(P))
        x[ms.support] = ms.weights
        clusters.append(Cluster(ms.support, ms.weights, exploitability(sub, x[remaining])))
        remaining = np.setdiff1d(remaining, ms.support)
    return NashClustering(clusters, len(P))


# --------------------------------------------------------------------------
# restricted asymmetric games
# --------------------------------------------------------------------------


def matrix_game_value(M) -> float:
    """Value of the zero-sum game where the row player maximizes ``x^T M y``."""
    M = np.asarray(M, dtype=float)
    a, b = M.shape
    if a == 1:
        return float(M.min())
    if b == 1:
        return float(M.max())
    # variables (x, v): maximize v subject to M^T x >= v, sum x = 1
    c = np.zeros(a + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-M.T, np.ones((b, 1))])
    A_eq = np.concatenate([np.ones(a), [0.0]])[None, :]
    res = optimize.linprog(c, A_ub=A_ub, b_ub=np.zeros(b), A_eq=A_eq, b_eq=[1.0],
                           bounds=[(0, None)] * a + [(None, None)], method="highs")
    if res.status != 0:
        raise NashSolverError(f"value LP failed: {res.message}")
    return float(res.x[-1])


def solve_matrix_game(M, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Max-entropy optimal strategies ``(x, y, value)`` of ``max_x min_y x^T M y``."""
    M = np.asarray(M, dtype=float)
    a, b = M.shape
    shifted = M - M.min() + 1.0
    # symmetric embedding: optimal (x, y, t) of K correspond to optimal pairs
    K = np.zeros((a + b + 1, a + b + 1))
    K[:a, a:a + b] = shifted
    K[:a, -1] = -1.0
    K[a:a + b, :a] = -shifted.T
    K[a:a + b, -1] = 1.0
    K[-1, :a] = 1.0
    K[-1, a:a + b] = -1.0
    in_support, _ = _max_support_cone(K)
    SA = np.flatnonzero(in_support[:a])
    SB = np.flatnonzero(in_support[a:a + b])
    if SA.size == 0 or SB.size == 0:
        raise NashSolverError("restricted game support detection failed")
    RA = np.setdiff1d(np.arange(a), SA)
    RB = np.setdiff1d(np.arange(b), SB)

    # row face: columns in SB pay equal amounts, other columns pay at least as much
    cols = shifted[SA].T
    j0 = SB[0]
    x_s = _entropy_on_face(cols[SB[1:]] - cols[j0], cols[RB] - cols[j0], max_iter) if SA.size > 1 \
        else np.ones(1)
    rows = shifted[:, SB]
    i0 = SA[0]
    y_s = _entropy_on_face(rows[SA[1:]] - rows[i0], rows[i0] - rows[RA], max_iter) if SB.size > 1 \
        else np.ones(1)
    x = np.zeros(a)
    x[SA] = x_s
    y = np.zeros(b)
    y[SB] = y_s
    value = float(x @ M @ y)
    gap = float((M @ y).max() - (x @ M).min())
    if gap > tol:
        raise NashSolverError(f"restricted game duality gap {gap:.3g} exceeds tolerance {tol:g}")
    return x, y, value


def rpp(P, set_a, set_b, tol: float = DEFAULT_TOL) -> RPPResult:
    """Relative population performance of population ``set_a`` against ``set_b``."""
    P = np.asarray(P, dtype=float)
    A = np.asarray(list(set_a), dtype=int)
    B = np.asarray(list(set_b), dtype=int)
    if A.size == 0 or B.size == 0:
        raise ValueError("populations must be nonempty")
    M = P[np.ix_(A, B)]
    if A.size == 1 and B.size == 1:
        return RPPResult(float(M[0, 0]), np.ones(1), np.ones(1))
    x, y, value = solve_matrix_game(M, tol=tol)
    return RPPResult(value, x, y)


def rpp_matrix(P, clustering: NashClustering) -> tuple[np.ndarray, np.ndarray]:
    """Pairwise cluster RPP values and their row means."""
    P = np.asarray(P, dtype=float)
    k = len(clustering)
    out = np.zeros((k, k))
    members = [c.members for c in clustering.clusters]
    for i in range(k):
        for j in range(i + 1, k):
            v = matrix_game_value(P[np.ix_(members[i], members[j])])
            out[i, j] = v
            out[j, i] = -v
    return out, out.mean(axis=1)


# --------------------------------------------------------------------------
# brute-force oracle
# --------------------------------------------------------------------------

BRUTE_FORCE_LIMIT = 12


def equilibrium_vertices(G: np.ndarray, feas_tol: float = 1e-9) -> np.ndarray:
    """Vertices of ``{x in simplex : G x <= 0}`` by support enumeration."""
    n = len(G)
    found = []
    for size in range(1, n + 1):
        for T in itertools.combinations(range(n), size):
            T = list(T)
            others = [j for j in range(n) if j not in T]
            for extra_size in range(0, len(others) + 1):
                hit = False
                for J in itertools.combinations(others, extra_size):
                    rows = T + list(J)
                    A = np.vstack([G[np.ix_(rows, T)], np.ones((1, size))])
                    rhs = np.zeros(len(rows) + 1)
                    rhs[-1] = 1.0
                    if np.linalg.matrix_rank(A) < size:
                        continue
                    xt, *_ = np.linalg.lstsq(A, rhs, rcond=None)
                    if np.abs(A @ xt - rhs).max() > 1e-9 or xt.min() <= feas_tol:
                        continue
                    x = np.zeros(n)
                    x[T] = xt
                    if (G @ x).max() <= feas_tol:
                        found.append(x)
                        hit = True
                # a full-rank system with fewer binding rows already pins the vertex
                if hit or (extra_size == 0 and np.linalg.matrix_rank(
                        np.vstack([G[np.ix_(T, T)], np.ones((1, size))])) == size):
                    break
    if not found:
        raise NashSolverError("no equilibrium vertex found")
    V = np.unique(np.round(np.array(found), 12), axis=0)
    return V


def brute_force_nash(P, restriction=None) -> MixedStrategy:
    """Independent max-entropy solver for small games (used as a test oracle)."""
    P = np.asarray(P, dtype=float)
    R = np.arange(len(P)) if restriction is None else np.asarray(sorted(restriction), dtype=int)
    if R.size > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_LIMIT} strategies")
    G = P[np.ix_(R, R)]
    V = equilibrium_vertices(G)
    if len(V) == 1:
        x = V[0]
    else:
        live = np.flatnonzero(V.max(axis=0) > 0)
        Vl = V[:, live]

        def neg_entropy(w):
            x = np.clip(w @ Vl, 1e-300, None)
            return float(np.sum(x * np.log(x)))

        def grad(w):
            x = np.clip(w @ Vl, 1e-300, None)
            return Vl @ (np.log(x) + 1.0)

        k = len(V)
        res = optimize.minimize(neg_entropy, np.full(k, 1.0 / k), jac=grad, method="SLSQP",
                                bounds=[(0, 1)] * k,
                                constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1.0,
                                              "jac": lambda w: np.ones_like(w)}],
                                options={"ftol": 1e-15, "maxiter": 1000})
        w = np.clip(res.x, 0, None)
        x = (w / w.sum()) @ V
    S = np.flatnonzero(x > 1e-12)
    return MixedStrategy(R[S], x[S] / x[S].sum())
