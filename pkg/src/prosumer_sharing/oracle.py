"""Brute-force validators, independent of the bisection solvers."""
from dataclasses import dataclass
import math

import numpy as np

from .equilibrium import GNE, SOCIAL, penalized_objective, social_objective
from .exceptions import ModeError, ParameterError
from .prosumer import ProsumerArray


@dataclass(frozen=True)
class GridSpec:
    step: float = 0.01
    max_points: int = 4001

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterError(f"grid step must be > 0, got {self.step}")

    def axis(self, lo, hi):
        if hi == lo:
            return np.array([float(lo)])
        n = int(math.ceil((hi - lo) / self.step - 1e-9)) + 1
        if n > self.max_points:
            raise ParameterError(
                f"grid of {n} points on [{lo}, {hi}] exceeds max_points={self.max_points}")
        return np.linspace(lo, hi, n)


def grid_best_response(prosumer, lam, a, I, grid=GridSpec(), chunk=512):
    """Exhaustive minimum of the surrogate bidding objective on a grid.

    Returns ``(p, d, objective)`` at the best grid node. Both box endpoints
    are always grid nodes.
    """
    if not a > 0 or I < 2:
        raise ParameterError("need a > 0 and I >= 2")
    ps = grid.axis(prosumer.p_min, prosumer.p_max)
    ds = grid.axis(prosumer.d_min, prosumer.d_max)
    c = 1.0 / (a * (I - 1))
    curves = prosumer.curves
    fp = np.array([curves.cost(x) for x in ps], dtype=float) - lam * ps
    ud = -np.array([curves.utility(x) for x in ds], dtype=float) + lam * ds

    best = (np.inf, 0, 0)
    for start in range(0, len(ps), chunk):
        rows = slice(start, start + chunk)
        vals = fp[rows, None] + ud[None, :] + 0.5 * c * (ds[None, :] - ps[rows, None]) ** 2
        k = int(np.argmin(vals))
        i, j = divmod(k, len(ds))
        if vals[i, j] < best[0]:
            best = (float(vals[i, j]), start + i, j)
    val, i, j = best
    return float(ps[i]), float(ds[j]), val


@dataclass
class PerturbationResult:
    passed: bool
    worst_improvement: float
    n_evaluated: int


def _project(Y, lo, hi, sweeps=200, tol=1e-12):
    """Alternate projections onto the balance hyperplane and the box."""
    n = Y.shape[1]
    h = np.tile([1.0, -1.0], n // 2)
    for _ in range(sweeps):
        Y = Y - np.outer(Y @ h, h) / n
        Y = np.clip(Y, lo, hi)
        if np.max(np.abs(Y @ h)) <= tol:
            break
    return Y, np.abs(Y @ h)


def _batch_objective(instance, Y, penalized, objective):
    fleet = instance.fleet
    if fleet._quad is None:
        return np.array([objective(instance, y[0::2], y[1::2]) for y in Y])
    P, D = Y[:, 0::2], Y[:, 1::2]
    vals = np.sum(fleet.cost(P) - fleet.utility(D), axis=1)
    if penalized:
        vals = vals + np.sum((D - P) ** 2, axis=1) / (2 * instance.a * (instance.I - 1))
    return vals


def perturbation_optimality_check(instance, solution, n_samples=10_000, radius=1.0,
                                  seed=0, tol=1e-7, balance_tol=1e-9):
    """Sample feasible points near ``solution`` and look for a better objective.

    Each perturbation is drawn uniformly in a ball of ``radius`` and mapped
    back onto ``{balance} x boxes`` by alternating projections; points that
    do not reach ``balance_tol`` are discarded. Passes iff no kept point beats
    the solution's objective by more than ``tol``.
    """
    if solution.mode == SOCIAL:
        objective = social_objective
    elif solution.mode == GNE:
        objective = penalized_objective
    else:
        raise ModeError(f"no objective for mode {solution.mode!r}")
    fleet: ProsumerArray = instance.fleet
    p = np.asarray(solution.p, dtype=float)
    d = np.asarray(solution.d, dtype=float)
    eps = 1e-9
    if (np.any(p < fleet.p_min - eps) or np.any(p > fleet.p_max + eps)
            or np.any(d < fleet.d_min - eps) or np.any(d > fleet.d_max + eps)
            or abs(p.sum() - d.sum()) > 1e-6):
        raise ParameterError("solution is not feasible")

    y0 = np.empty(2 * instance.I)
    y0[0::2], y0[1::2] = p, d
    lo = np.empty_like(y0)
    hi = np.empty_like(y0)
    lo[0::2], lo[1::2] = fleet.p_min, fleet.d_min
    hi[0::2], hi[1::2] = fleet.p_max, fleet.d_max

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_samples, y0.size))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    r = radius * rng.random(n_samples) ** (1.0 / y0.size)
    Y, imbalance = _project(y0 + z * r[:, None], lo, hi)
    keep = imbalance <= balance_tol

    base = objective(instance, p, d)
    vals = _batch_objective(instance, Y[keep], solution.mode == GNE, objective)
    worst = float(np.max(base - vals)) if vals.size else 0.0
    worst = max(worst, 0.0)
    return PerturbationResult(worst <= tol, worst, int(keep.sum()))
