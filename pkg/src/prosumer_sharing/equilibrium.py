"""Whole-market solvers.

Both the social optimum and the sharing equilibrium are separable once the
power-balance multiplier is fixed, so each solver is a scalar bisection on
that multiplier over the (monotone) aggregate excess supply.
"""
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from ._numerics import bisect_increasing
from .exceptions import (BracketError, ConsistencyError, InfeasibilityError,
                         ModeError, ParameterError)
from .prosumer import DEFAULT_TOL, Prosumer, ProsumerArray

BALANCE_TOL = 1e-7

SOCIAL = "social"
GNE = "gne"
SELF = "self-sufficiency"


@dataclass(frozen=True)
class MarketInstance:
    prosumers: Sequence[Prosumer]
    a: float

    def __post_init__(self):
        object.__setattr__(self, "prosumers", tuple(self.prosumers))
        if not self.a > 0:
            raise ParameterError(f"market sensitivity a must be > 0, got {self.a}")
        if not self.prosumers:
            raise ParameterError("a market needs at least one prosumer")

    @property
    def I(self):
        return len(self.prosumers)

    @cached_property
    def fleet(self):
        return ProsumerArray(self.prosumers)

    def with_a(self, a):
        return MarketInstance(self.prosumers, a)

    def replace_prosumer(self, index, prosumer):
        prs = list(self.prosumers)
        prs[index] = prosumer
        return MarketInstance(prs, self.a)


@dataclass
class EquilibriumSolution:
    p: np.ndarray
    d: np.ndarray
    price: float
    dual: float
    mode: str
    b: Optional[np.ndarray] = None
    kkt_residual: float = float("nan")
    iterations: int = 0
    dual_interval: Optional[tuple] = None
    a: Optional[float] = field(default=None, repr=False)

    @property
    def q(self):
        """Imports ``-a lam + b_i`` (requires bids)."""
        if self.b is None:
            raise ModeError(f"{self.mode} solution carries no bids")
        return -self.a * self.price + self.b


def check_a1(instance):
    """Raise unless the centralized problem is feasible."""
    f = instance.fleet
    if f.p_min.sum() > f.d_max.sum():
        raise InfeasibilityError(
            f"A1 violated: total minimum production {f.p_min.sum():g} exceeds "
            f"total maximum demand {f.d_max.sum():g}", "A1")
    if f.d_min.sum() > f.p_max.sum():
        raise InfeasibilityError(
            f"A1 violated: total minimum demand {f.d_min.sum():g} exceeds "
            f"total maximum production {f.p_max.sum():g}", "A1")


def _responses(instance, price, mode, tol):
    if mode == SOCIAL:
        return instance.fleet.marginal(price)
    if mode in ("penalized", GNE):
        p, d, _ = instance.fleet.surrogate_response(price, instance.a, instance.I, tol * 1e-3)
        return p, d
    raise ParameterError(f"unknown mode {mode!r}")


def aggregate_excess(instance, price, mode=SOCIAL, tol=DEFAULT_TOL):
    """Total production minus total demand of the price responses."""
    p, d = _responses(instance, price, mode, tol)
    return float(np.sum(p) - np.sum(d))


def price_bracket(instance, mode=SOCIAL):
    """Prices outside which every response is saturated at its bounds."""
    f = instance.fleet
    lo = float(np.min(np.minimum(f.dcost(f.p_min), f.dutility(f.d_max)))) - 1.0
    hi = float(np.max(np.maximum(f.dcost(f.p_max), f.dutility(f.d_min)))) + 1.0
    if mode != SOCIAL:
        c = 1.0 / (instance.a * (instance.I - 1))
        lo -= c * max(0.0, float(np.max(f.d_max - f.p_min)))
        hi += c * max(0.0, float(np.max(f.p_max - f.d_min)))
    return lo, hi


def _solve_dual(excess, lo, hi, tol, balance_tol):
    e_lo, e_hi = excess(lo), excess(hi)
    if e_lo > balance_tol or e_hi < -balance_tol:
        raise BracketError(
            f"no sign change of aggregate excess on [{lo:g}, {hi:g}] "
            f"(excess {e_lo:g} .. {e_hi:g})", lo, hi, e_lo, e_hi)
    _, right_of_first = bisect_increasing(lambda x: excess(x) + balance_tol, lo, hi, tol)
    left_of_last, _ = bisect_increasing(lambda x: excess(x) - balance_tol, lo, hi, tol)
    r1, r2 = float(right_of_first), float(left_of_last)
    if r1 <= r2:
        return 0.5 * (r1 + r2), (r1, r2)
    # near-balanced window narrower than tol
    a, b = bisect_increasing(excess, min(r1, r2), max(r1, r2), 0.0)
    z = float(0.5 * (a + b))
    return z, (z, z)


def solve_social_optimum(instance, tol=DEFAULT_TOL, balance_tol=BALANCE_TOL):
    """Minimize total net cost subject to power balance and capacity boxes."""
    check_a1(instance)
    counter = [0]

    def excess(x):
        counter[0] += 1
        return aggregate_excess(instance, x, SOCIAL, tol)

    lo, hi = price_bracket(instance, SOCIAL)
    lam, interval = _solve_dual(excess, lo, hi, tol, balance_tol)
    p, d = instance.fleet.marginal(lam)
    sol = EquilibriumSolution(np.asarray(p, float), np.asarray(d, float), lam, lam,
                              SOCIAL, iterations=counter[0], dual_interval=interval,
                              a=instance.a)
    sol.kkt_residual = kkt_residual(instance, sol)
    return sol


def solve_gne_direct(instance, tol=DEFAULT_TOL, balance_tol=BALANCE_TOL):
    """Sharing equilibrium via the penalized centralized program.

    ``(p, d)`` is the unique minimizer of total net cost plus
    ``sum (d_i - p_i)^2 / (2a(I-1))`` under power balance; the balance
    multiplier is the sharing price and bids are recovered canonically.
    """
    if instance.I < 2:
        raise ParameterError("the sharing game needs at least two prosumers")
    check_a1(instance)
    counter = [0]

    def excess(x):
        counter[0] += 1
        return aggregate_excess(instance, x, "penalized", tol)

    lo, hi = price_bracket(instance, "penalized")
    zeta, interval = _solve_dual(excess, lo, hi, tol, balance_tol)
    p, d = _responses(instance, zeta, "penalized", tol)
    b = recover_bids(p, d, zeta, instance.a, tol=max(balance_tol, 10 * balance_tol))
    # clearing price of the recovered bids; equals zeta up to the balance residual
    lam = platform_price(b, instance.a)
    sol = EquilibriumSolution(np.asarray(p, float), np.asarray(d, float), lam, zeta,
                              GNE, b=b, iterations=counter[0], dual_interval=interval,
                              a=instance.a)
    sol.kkt_residual = kkt_residual(instance, sol)
    return sol


def solve_self_sufficiency_all(instance, tol=DEFAULT_TOL):
    x = np.asarray(instance.fleet.self_sufficiency(tol), dtype=float)
    return EquilibriumSolution(x.copy(), x.copy(), float("nan"), float("nan"), SELF,
                               a=instance.a)


def platform_price(b, a):
    b = np.asarray(b, dtype=float)
    if b.size == 0:
        raise ParameterError("at least one bid is required")
    return float(np.sum(b) / (a * b.size))


def recover_bids(p, d, zeta, a, tol=BALANCE_TOL):
    """Canonical equilibrium bids ``b_i = d_i - p_i + a zeta``."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(d, dtype=float)
    gap = float(np.sum(p) - np.sum(d))
    if abs(gap) > tol:
        raise ConsistencyError(f"profile is not balanced: sum(p) - sum(d) = {gap:g}")
    return d - p + a * zeta


def kkt_residual(instance, solution, active_tol=1e-9):
    """Worst violation of the optimality conditions of ``solution``.

    Social solutions are checked against the centralized conditions with the
    stored dual; sharing equilibria against the penalized conditions, plus
    per-prosumer self balance ``p - a lam + b = d`` when bids are present.
    """
    if solution.mode not in (SOCIAL, GNE):
        raise ModeError(f"no optimality conditions for mode {solution.mode!r}")
    f = instance.fleet
    p = np.asarray(solution.p, dtype=float)
    d = np.asarray(solution.d, dtype=float)
    mu = np.full(len(p), float(solution.dual))
    if solution.mode == GNE:
        mu = mu + (d - p) / (instance.a * (instance.I - 1))

    worst = [np.max(np.maximum(0, f.p_min - p)), np.max(np.maximum(0, p - f.p_max)),
             np.max(np.maximum(0, f.d_min - d)), np.max(np.maximum(0, d - f.d_max))]

    # marginal cost minus price: delta^- = r at the lower bound, delta^+ = -r at the upper
    r = f.dcost(p) - mu
    worst.append(_stationarity(r, p, f.p_min, f.p_max, active_tol))
    s = mu - f.dutility(d)
    worst.append(_stationarity(s, d, f.d_min, f.d_max, active_tol))
    worst.append(abs(float(np.sum(p) - np.sum(d))))

    if solution.mode == GNE and solution.b is not None:
        b = np.asarray(solution.b, dtype=float)
        lam_b = platform_price(b, instance.a)
        worst.append(abs(lam_b - solution.price))
        worst.append(float(np.max(np.abs(p - instance.a * lam_b + b - d))))
    return float(max(worst))


def _stationarity(r, x, lo, hi, active_tol):
    fixed = hi - lo <= active_tol
    at_lo = (x - lo <= active_tol) & ~fixed
    at_hi = (hi - x <= active_tol) & ~fixed
    interior = ~(fixed | at_lo | at_hi)
    viol = np.zeros_like(r)
    viol[interior] = np.abs(r[interior])
    viol[at_lo] = np.maximum(0.0, -r[at_lo])
    viol[at_hi] = np.maximum(0.0, r[at_hi])
    return float(np.max(viol)) if viol.size else 0.0


def social_objective(instance, p, d):
    return float(np.sum(instance.fleet.net_cost(p, d)))


def penalized_objective(instance, p, d):
    p = np.asarray(p, dtype=float)
    d = np.asarray(d, dtype=float)
    pen = np.sum((d - p) ** 2) / (2 * instance.a * (instance.I - 1))
    return social_objective(instance, p, d) + float(pen)


def phi_hessian(instance, p, d):
    """Hessian of the bidding potential at ``y = (p_1, d_1, ..., p_I, d_I)``.

    Diagonal curvature block plus the per-prosumer penalty block minus the
    rank-one coupling through the clearing price; PSD whenever A4 holds.
    """
    I, a = instance.I, instance.a
    fleet = instance.fleet
    fpp = np.array([pr.curves.ddcost(x) for pr, x in zip(fleet.prosumers, p)], dtype=float)
    upp = np.array([pr.curves.ddutility(x) for pr, x in zip(fleet.prosumers, d)], dtype=float)
    diag = np.empty(2 * I)
    diag[0::2] = fpp
    diag[1::2] = -upp
    h = np.tile([1.0, -1.0], I)
    H = np.diag(diag)
    block = np.array([[1.0, -1.0], [-1.0, 1.0]]) / (a * (I - 1))
    for i in range(I):
        H[2 * i:2 * i + 2, 2 * i:2 * i + 2] += block
    H -= np.outer(h, h) / (a * I)
    return H
