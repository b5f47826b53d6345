"""Spinning-top profile: cluster size against mean RPP, with a skew-normal fit."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.stats import norm

from spinning_top.geometry.cycles import count_3cycles
from spinning_top.nash import DEFAULT_TOL, NashClustering, nash_clustering, rpp_matrix

MIN_FIT_POINTS = 5
_NM_OPTIONS = {"xatol": 1e-9, "fatol": 1e-15, "maxfev": 4000, "adaptive": True}


def skew_bump(x, mu, sigma, alpha):
    """``sigma^2 * 2 phi(z) Phi(alpha z)`` with ``z = (x - mu) / sigma^2``."""
    w = sigma * sigma
    z = (np.asarray(x, dtype=float) - mu) / w
    return w * 2.0 * norm.pdf(z) * norm.cdf(alpha * z)


def skew_model(x, mu, sigma, alpha, a, b):
    return a * skew_bump(x, mu, sigma, alpha) + b


@dataclass
class ProfileFit:
    mu: float
    sigma: float
    alpha: float
    a: float
    b: float
    residual: float

    def __call__(self, x):
        return skew_model(x, self.mu, self.sigma, self.alpha, self.a, self.b)

    def peak(self, lo: float, hi: float, samples: int = 2001) -> float:
        grid = np.linspace(lo, hi, samples)
        return float(grid[np.argmax(self(grid))])

    def to_dict(self) -> dict:
        return {k: float(getattr(self, k)) for k in ("mu", "sigma", "alpha", "a", "b", "residual")}


def _linear_part(basis, y):
    """Least-squares ``(a, b)`` for ``a * basis + b`` and the resulting loss."""
    X = np.column_stack([basis, np.ones_like(basis)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    r = X @ coef - y
    return coef, float(r @ r)


def fit_starts(x, y) -> list[tuple[float, float, float]]:
    """The 8 initializations: 2 centers x 2 widths x 2 skew signs.

    Centers are the x of the largest y and the y-weighted mean of x. Widths
    (as ``sigma^2``) are a quarter and a half of the x range. Skew starts at
    +-1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = y - y.min()
    centers = [float(x[np.argmax(y)]),
               float((w * x).sum() / w.sum()) if w.sum() > 0 else float(x.mean())]
    span = float(x.max() - x.min())
    widths = [np.sqrt(span / 4), np.sqrt(span / 2)]
    return [(m, s, a) for m, s, a in itertools.product(centers, widths, (1.0, -1.0))]


def fit_spinning_top(x, y) -> ProfileFit:
    """Least-squares fit of ``a * psi(x | mu, sigma, alpha) + b``.

    ``a`` and ``b`` enter linearly and are solved exactly for every
    ``(mu, sigma, alpha)``. The remaining three parameters are found by
    Nelder-Mead from each of :func:`fit_starts` and the best result wins.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < MIN_FIT_POINTS:
        raise ValueError(f"need at least {MIN_FIT_POINTS} points, got {len(x)}")
    if np.ptp(x) == 0:
        raise ValueError("degenerate input: all x values are equal")

    def loss(theta):
        mu, log_s, alpha = theta
        basis = skew_bump(x, mu, np.exp(log_s), alpha)
        if not np.all(np.isfinite(basis)):
            return np.inf
        return _linear_part(basis, y)[1]

    best = None
    for mu0, s0, a0 in fit_starts(x, y):
        theta0 = np.array([mu0, np.log(s0), a0])
        res = optimize.minimize(loss, theta0, method="Nelder-Mead", options=_NM_OPTIONS)
        # one restart from the found point; simplex descent stalls easily
        res = optimize.minimize(loss, res.x, method="Nelder-Mead", options=_NM_OPTIONS)
        if best is None or res.fun < best.fun:
            best = res
    mu, log_s, alpha = best.x
    sigma = float(np.exp(log_s))
    (a, b), resid = _linear_part(skew_bump(x, mu, sigma, alpha), y)
    return ProfileFit(float(mu), sigma, float(alpha), float(a), float(b), resid)


def fit_loss(fit_or_params, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if isinstance(fit_or_params, ProfileFit):
        pred = fit_or_params(x)
    else:
        pred = skew_model(x, *fit_or_params)
    r = pred - y
    return float(r @ r)


@dataclass
class GameProfile:
    clustering: NashClustering
    rpp: np.ndarray
    mean_rpp: np.ndarray
    cluster_sizes: np.ndarray
    cycle_counts: np.ndarray
    total_cycles: int
    fit: ProfileFit | None

    def dataset(self) -> np.ndarray:
        """The ``(x_i, y_i)`` points: mean RPP and size per cluster."""
        return np.column_stack([self.mean_rpp, self.cluster_sizes])

    def to_dict(self, names=None) -> dict:
        return {
            "clustering": self.clustering.to_dict(names),
            "rpp": self.rpp.tolist(),
            "mean_rpp": self.mean_rpp.tolist(),
            "cluster_sizes": self.cluster_sizes.tolist(),
            "cycle_counts": self.cycle_counts.tolist(),
            "total_3cycles": self.total_cycles,
            "fit": self.fit.to_dict() if self.fit is not None else None,
        }


def game_profile(P, tol: float = DEFAULT_TOL) -> GameProfile:
    """Cluster, measure RPP between clusters, count cycles and fit the profile.

    The fit is skipped (``None``) when there are fewer than five clusters.
    """
    P = np.asarray(P, dtype=float)
    clustering = nash_clustering(P, tol=tol)
    R, mean = rpp_matrix(P, clustering)
    sizes = np.array(clustering.sizes)
    per, total = count_3cycles(P)
    fit = fit_spinning_top(mean, sizes) if len(sizes) >= MIN_FIT_POINTS and np.ptp(mean) > 0 else None
    return GameProfile(clustering, R, mean, sizes, per, total, fit)
