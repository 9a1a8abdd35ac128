"""Iterative bidding between smart meters and the sharing platform.

Each round, every (non-skipping) prosumer solves its surrogate problem at the
announced price and submits ``b = d - p + a * lam``; the platform announces
``sum(b) / (a I)``. The loop stops once the price moves by at most ``epsilon``.
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .equilibrium import (GNE, SOCIAL, EquilibriumSolution, kkt_residual, platform_price,
                          price_bracket)
from .exceptions import ParameterError
from .prosumer import (DEFAULT_TOL, ProsumerArray, _check_market_args, marginal_response,
                       min_market_sensitivity, solve_surrogate_best_response)

STRATEGIC = "strategic"
PRICE_TAKER = "price_taker"

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"
DIVERGED = "diverged"


@dataclass(frozen=True)
class AsyncSchedule:
    """Random update skipping with a hard cap on staleness.

    Each round a prosumer skips with ``miss_probability``; a prosumer that has
    skipped ``max_delay - 1`` rounds in a row must update, so ``max_delay=1``
    is the synchronous protocol.
    """
    miss_probability: float = 0.8
    max_delay: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.miss_probability < 1:
            raise ParameterError("miss_probability must lie in [0, 1)")
        if self.max_delay < 1:
            raise ParameterError("max_delay must be >= 1")


@dataclass(frozen=True)
class BiddingConfig:
    epsilon: float = 1e-4
    max_iterations: int = 500
    mode: str = STRATEGIC
    schedule: Optional[AsyncSchedule] = None
    initial_price: float = 0.0
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError("epsilon must be > 0")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")
        if self.mode not in (STRATEGIC, PRICE_TAKER):
            raise ParameterError(f"unknown bidding mode {self.mode!r}")


@dataclass
class BiddingTrace:
    """Round-by-round history.

    ``prices[k]`` is the price announced before round ``k`` (so ``prices[0]``
    is the initial price) and ``prices[k + 1]`` the one cleared from
    ``bids[k]``. ``p``, ``d``, ``bids``, ``updated`` hold one row per round.
    """
    prices: List[float] = field(default_factory=list)
    p: List[np.ndarray] = field(default_factory=list)
    d: List[np.ndarray] = field(default_factory=list)
    bids: List[np.ndarray] = field(default_factory=list)
    updated: List[np.ndarray] = field(default_factory=list)
    termination: str = ""
    a_min: float = float("nan")

    @property
    def iterations(self):
        return len(self.bids)

    @property
    def converged(self):
        return self.termination == CONVERGED


def prosumer_bid_update(prosumer, lam, a, I, mode=STRATEGIC, tol=DEFAULT_TOL):
    """One smart-meter update; returns ``(p, d, b)``."""
    _check_market_args(a, I)
    if mode == STRATEGIC:
        r = solve_surrogate_best_response(prosumer, lam, a, I, tol)
    elif mode == PRICE_TAKER:
        r = marginal_response(prosumer, lam)
    else:
        raise ParameterError(f"unknown bidding mode {mode!r}")
    return r.p, r.d, r.d - r.p + a * lam


def platform_clear(bids, a):
    """Clearing price ``sum(b) / (a I)``; imports ``-a lam + b_i`` sum to zero."""
    if not a > 0:
        raise ParameterError("a must be > 0")
    return platform_price(bids, a)


def _fleet_update(fleet: ProsumerArray, lam, a, I, mode, tol):
    if mode == STRATEGIC:
        p, d, _ = fleet.surrogate_response(lam, a, I, tol)
    else:
        p, d = fleet.marginal(lam)
    p = np.asarray(p, dtype=float)
    d = np.asarray(d, dtype=float)
    return p, d, d - p + a * lam


def run_bidding(instance, config=BiddingConfig()):
    """Run the bidding protocol; returns ``(solution, trace)``.

    Non-convergence is reported through ``trace.termination``. Once the price
    settles, each meter re-solves at the final price to fix ``(p, d)``.
    """
    a, I = instance.a, instance.I
    _check_market_args(a, I)
    fleet = instance.fleet
    trace = BiddingTrace()
    trace.a_min = min_market_sensitivity(instance.prosumers, I)
    lo, hi = price_bracket(instance, SOCIAL)
    blowup = 1e6 * (hi - lo)

    sched = config.schedule
    window = sched.max_delay if sched is not None else 1
    rng = np.random.default_rng(sched.seed) if sched is not None else None
    misses = np.zeros(I, dtype=int)

    lam = float(config.initial_price)
    trace.prices.append(lam)
    p = d = b = None
    quiet = 0
    trace.termination = MAX_ITERATIONS
    for k in range(config.max_iterations):
        p_new, d_new, b_new = _fleet_update(fleet, lam, a, I, config.mode, config.tol)
        if sched is None or b is None:
            upd = np.ones(I, dtype=bool)
        else:
            upd = rng.random(I) >= sched.miss_probability
            upd |= misses >= sched.max_delay - 1
        misses = np.where(upd, 0, misses + 1)
        if b is None:
            p, d, b = p_new, d_new, b_new
        else:
            p = np.where(upd, p_new, p)
            d = np.where(upd, d_new, d)
            b = np.where(upd, b_new, b)
        new_lam = platform_clear(b, a)

        trace.p.append(p.copy())
        trace.d.append(d.copy())
        trace.bids.append(b.copy())
        trace.updated.append(upd.copy())
        trace.prices.append(new_lam)

        quiet = quiet + 1 if abs(new_lam - lam) <= config.epsilon else 0
        lam = new_lam
        if not np.isfinite(lam) or abs(lam) > blowup:
            trace.termination = DIVERGED
            break
        if quiet >= window:
            trace.termination = CONVERGED
            break

    if trace.termination == DIVERGED:
        p_fin, d_fin = p, d
    else:
        p_fin, d_fin, _ = _fleet_update(fleet, lam, a, I, config.mode, config.tol)
    mode = GNE if config.mode == STRATEGIC else SOCIAL
    sol = EquilibriumSolution(np.asarray(p_fin, float), np.asarray(d_fin, float), lam, lam,
                              mode, b=b.copy(), iterations=trace.iterations, a=a)
    if np.all(np.isfinite(sol.p)) and np.isfinite(lam):
        sol.kkt_residual = kkt_residual(instance, sol)
    return sol, trace


@dataclass
class ConvergenceDiagnostics:
    iterations: int
    final_gap: float
    fejer_holds: bool
    fejer_violations: List[int]
    distance_monotone: bool


def convergence_diagnostics(trace, lam_star, slack=1e-9):
    """Check ``|l[k+1]-l*|^2 <= |l[k]-l*|^2 - |l[k]-l[k+1]|^2`` along a trace."""
    lam = np.asarray(trace.prices, dtype=float)
    dist = np.abs(lam - lam_star)
    step = np.abs(np.diff(lam))
    lhs = dist[1:] ** 2
    rhs = dist[:-1] ** 2 - step ** 2
    bad = [int(k) for k in np.flatnonzero(lhs > rhs + slack)]
    monotone = bool(np.all(np.diff(dist) <= slack))
    gap = float(step[-1]) if step.size else 0.0
    return ConvergenceDiagnostics(trace.iterations, gap, not bad, bad, monotone)
