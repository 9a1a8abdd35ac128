"""Prosumer data model and single-prosumer subproblem solvers.

A prosumer produces ``p`` at cost ``f(p)`` and consumes ``d`` with utility
``u(d)``, within the box ``[p_min, p_max] x [d_min, d_max]``. The built-in
curves are quadratics; :class:`CurvePair` accepts any strictly convex cost and
strictly concave utility given by value/derivative/second-derivative callables.
"""
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._numerics import bisect_increasing
from .exceptions import InfeasibilityError, ParameterError

DEFAULT_TOL = 1e-9
CURVATURE_SAMPLES = 101


class CurvePair:
    """Cost/utility pair defined by derivative triples.

    The inverse marginal functions are computed by bisection, which relies on
    ``dcost`` being strictly increasing and ``dutility`` strictly decreasing.
    """

    def __init__(self, cost: Callable, dcost: Callable, ddcost: Callable,
                 utility: Callable, dutility: Callable, ddutility: Callable):
        self._f, self._df, self._ddf = cost, dcost, ddcost
        self._u, self._du, self._ddu = utility, dutility, ddutility

    def cost(self, p):
        return self._f(p)

    def dcost(self, p):
        return self._df(p)

    def ddcost(self, p):
        return self._ddf(p)

    def utility(self, d):
        return self._u(d)

    def dutility(self, d):
        return self._du(d)

    def ddutility(self, d):
        return self._ddu(d)

    def production_at(self, price, lo, hi, tol=1e-13):
        """Production whose marginal cost equals ``price``, clipped to [lo, hi]."""
        price = float(price)
        if lo == hi or price <= self.dcost(lo):
            return float(lo)
        if price >= self.dcost(hi):
            return float(hi)
        a, b = bisect_increasing(lambda x: self.dcost(x) - price, lo, hi, tol)
        return float(0.5 * (a + b))

    def demand_at(self, price, lo, hi, tol=1e-13):
        """Demand whose marginal utility equals ``price``, clipped to [lo, hi]."""
        price = float(price)
        if lo == hi or price >= self.dutility(lo):
            return float(lo)
        if price <= self.dutility(hi):
            return float(hi)
        a, b = bisect_increasing(lambda x: price - self.dutility(x), lo, hi, tol)
        return float(0.5 * (a + b))

    def self_sufficiency_point(self, lo, hi, tol=1e-13):
        """Minimizer of ``cost(x) - utility(x)`` over [lo, hi]."""
        g = lambda x: self.dcost(x) - self.dutility(x)
        if lo == hi or g(lo) >= 0:
            return float(lo)
        if g(hi) <= 0:
            return float(hi)
        a, b = bisect_increasing(g, lo, hi, tol)
        return float(0.5 * (a + b))

    def curvature_sup(self, p_lo, p_hi, d_lo, d_hi, n=CURVATURE_SAMPLES):
        """Sampled ``(sup 1/f'', sup -1/u'')`` over the box."""
        ps = np.linspace(p_lo, p_hi, n)
        ds = np.linspace(d_lo, d_hi, n)
        fpp = np.array([self.ddcost(x) for x in ps], dtype=float)
        upp = np.array([self.ddutility(x) for x in ds], dtype=float)
        if np.any(fpp <= 0) or np.any(upp >= 0):
            raise ParameterError(
                "cost must be strictly convex and utility strictly concave on the box")
        return float(np.max(1.0 / fpp)), float(np.max(-1.0 / upp))


@dataclass(frozen=True)
class QuadraticCurves(CurvePair):
    """``f(p) = alpha1 p^2 + alpha2 p`` and ``u(d) = beta1 d^2 + beta2 d``.

    Coefficients may be numpy arrays, in which case every method broadcasts
    over prosumers.
    """
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if np.any(np.asarray(self.alpha1) <= 0):
            raise ParameterError(f"alpha1 must be > 0, got {self.alpha1}")
        if np.any(np.asarray(self.beta1) >= 0):
            raise ParameterError(f"beta1 must be < 0, got {self.beta1}")

    def cost(self, p):
        return self.alpha1 * p * p + self.alpha2 * p

    def dcost(self, p):
        return 2.0 * self.alpha1 * p + self.alpha2

    def ddcost(self, p):
        return 2.0 * self.alpha1 + 0.0 * np.asarray(p)

    def utility(self, d):
        return self.beta1 * d * d + self.beta2 * d

    def dutility(self, d):
        return 2.0 * self.beta1 * d + self.beta2

    def ddutility(self, d):
        return 2.0 * self.beta1 + 0.0 * np.asarray(d)

    def production_at(self, price, lo, hi, tol=None):
        return np.clip((price - self.alpha2) / (2.0 * self.alpha1), lo, hi)

    def demand_at(self, price, lo, hi, tol=None):
        return np.clip((price - self.beta2) / (2.0 * self.beta1), lo, hi)

    def self_sufficiency_point(self, lo, hi, tol=None):
        x = -(self.alpha2 - self.beta2) / (2.0 * (self.alpha1 - self.beta1))
        return np.clip(x, lo, hi)

    def curvature_sup(self, p_lo=None, p_hi=None, d_lo=None, d_hi=None, n=None):
        return (float(np.max(1.0 / (2.0 * np.asarray(self.alpha1)))),
                float(np.max(-1.0 / (2.0 * np.asarray(self.beta1)))))

    def scaled(self, s):
        """All four coefficients multiplied by ``s``."""
        return QuadraticCurves(self.alpha1 * s, self.alpha2 * s,
                               self.beta1 * s, self.beta2 * s)


@dataclass(frozen=True)
class Prosumer:
    id: int
    curves: CurvePair
    p_min: float
    p_max: float
    d_min: float
    d_max: float

    def __post_init__(self):
        if self.p_min > self.p_max:
            raise ParameterError(f"prosumer {self.id}: p_min > p_max")
        if self.d_min > self.d_max:
            raise ParameterError(f"prosumer {self.id}: d_min > d_max")
        if not isinstance(self.curves, QuadraticCurves):
            # rejects curves that are not strictly convex/concave on the box
            self.curves.curvature_sup(self.p_min, self.p_max, self.d_min, self.d_max)

    @classmethod
    def quadratic(cls, id, alpha1, alpha2, beta1, beta2, p_min, p_max, d_min, d_max):
        return cls(id, QuadraticCurves(alpha1, alpha2, beta1, beta2),
                   float(p_min), float(p_max), float(d_min), float(d_max))

    @property
    def self_box(self):
        """Interval of ``x`` with ``p = d = x`` feasible; may be empty (lo > hi)."""
        return max(self.p_min, self.d_min), min(self.p_max, self.d_max)

    @property
    def satisfies_a2(self):
        lo, hi = self.self_box
        return lo <= hi


@dataclass(frozen=True)
class ResponsePoint:
    p: float
    d: float
    effective_price: float
    p_at_min: bool = False
    p_at_max: bool = False
    d_at_min: bool = False
    d_at_max: bool = False


def net_cost(prosumer, p, d):
    """``f(p) - u(d)``; negative values are net utility."""
    c = prosumer.curves
    return c.cost(p) - c.utility(d)


def solve_self_sufficiency(prosumer, tol=DEFAULT_TOL):
    """Best balanced operating point ``p = d`` for a prosumer acting alone."""
    lo, hi = prosumer.self_box
    if lo > hi:
        raise InfeasibilityError(
            f"A2 violated: prosumer {prosumer.id} has no feasible p = d "
            f"(intersection [{lo}, {hi}] is empty)", "A2", [prosumer.id])
    x = float(prosumer.curves.self_sufficiency_point(lo, hi, tol * 1e-3))
    return x, x


def _tags(prosumer, price):
    c = prosumer.curves
    p_lo = prosumer.p_min == prosumer.p_max or price <= c.dcost(prosumer.p_min)
    p_hi = prosumer.p_min == prosumer.p_max or price >= c.dcost(prosumer.p_max)
    d_lo = prosumer.d_min == prosumer.d_max or price >= c.dutility(prosumer.d_min)
    d_hi = prosumer.d_min == prosumer.d_max or price <= c.dutility(prosumer.d_max)
    return dict(p_at_min=bool(p_lo), p_at_max=bool(p_hi),
                d_at_min=bool(d_lo), d_at_max=bool(d_hi))


def marginal_response(prosumer, price):
    """Price-taking response: marginal cost and marginal utility equal ``price``."""
    c = prosumer.curves
    p = float(c.production_at(price, prosumer.p_min, prosumer.p_max))
    d = float(c.demand_at(price, prosumer.d_min, prosumer.d_max))
    return ResponsePoint(p, d, float(price), **_tags(prosumer, price))


def _check_market_args(a, I):
    if not a > 0:
        raise ParameterError(f"market sensitivity a must be > 0, got {a}")
    if I < 2:
        raise ParameterError(f"number of prosumers I must be >= 2, got {I}")


def solve_surrogate_best_response(prosumer, lam, a, I, tol=DEFAULT_TOL):
    """Minimize ``f(p) - u(d) + (d - p)^2 / (2a(I-1)) + lam (d - p)`` over the box.

    The minimizer is the marginal response at the effective price
    ``mu = lam + (d - p) / (a(I-1))``; ``mu`` is found by bisection on the
    strictly increasing residual ``mu - lam - (d(mu) - p(mu)) / (a(I-1))``.
    """
    _check_market_args(a, I)
    fleet = ProsumerArray([prosumer])
    p, d, mu = fleet.surrogate_response(lam, a, I, tol)
    return ResponsePoint(float(p[0]), float(d[0]), float(mu[0]),
                         **_tags(prosumer, float(mu[0])))


def surrogate_objective(prosumer, p, d, lam, a, I):
    c = 1.0 / (a * (I - 1))
    return net_cost(prosumer, p, d) + 0.5 * c * (d - p) ** 2 + lam * (d - p)


def min_market_sensitivity(prosumers, I):
    """Smallest ``a`` meeting A4: ``(2I-4)/(I-1) * sup{1/f'', -1/u''}``."""
    if I < 2:
        raise ParameterError(f"I must be >= 2, got {I}")
    sup = 0.0
    for pr in prosumers:
        gf, gu = pr.curves.curvature_sup(pr.p_min, pr.p_max, pr.d_min, pr.d_max)
        sup = max(sup, gf, gu)
    return (2 * I - 4) / (I - 1) * sup


def lipschitz_constant(prosumers):
    """``gamma``: common Lipschitz constant of all marginal responses."""
    return max(max(pr.curves.curvature_sup(pr.p_min, pr.p_max, pr.d_min, pr.d_max))
               for pr in prosumers)


@dataclass
class ProsumerArray:
    """Vectorized view of a prosumer population.

    Quadratic populations are evaluated with array arithmetic; anything else
    falls back to a loop over the individual curve objects.
    """
    prosumers: Sequence[Prosumer]
    p_min: np.ndarray = field(init=False)
    p_max: np.ndarray = field(init=False)
    d_min: np.ndarray = field(init=False)
    d_max: np.ndarray = field(init=False)

    def __post_init__(self):
        prs = list(self.prosumers)
        self.prosumers = prs
        self.p_min = np.array([x.p_min for x in prs], dtype=float)
        self.p_max = np.array([x.p_max for x in prs], dtype=float)
        self.d_min = np.array([x.d_min for x in prs], dtype=float)
        self.d_max = np.array([x.d_max for x in prs], dtype=float)
        if all(type(x.curves) is QuadraticCurves for x in prs):
            self._quad = QuadraticCurves(
                np.array([x.curves.alpha1 for x in prs], dtype=float),
                np.array([x.curves.alpha2 for x in prs], dtype=float),
                np.array([x.curves.beta1 for x in prs], dtype=float),
                np.array([x.curves.beta2 for x in prs], dtype=float))
        else:
            self._quad = None

    def __len__(self):
        return len(self.prosumers)

    def _each(self, method, xs):
        xs = np.broadcast_to(np.asarray(xs, dtype=float), (len(self),))
        return np.array([getattr(pr.curves, method)(x) for pr, x in zip(self.prosumers, xs)],
                        dtype=float)

    def cost(self, p):
        return self._quad.cost(p) if self._quad is not None else self._each("cost", p)

    def utility(self, d):
        return self._quad.utility(d) if self._quad is not None else self._each("utility", d)

    def dcost(self, p):
        return self._quad.dcost(p) if self._quad is not None else self._each("dcost", p)

    def dutility(self, d):
        return self._quad.dutility(d) if self._quad is not None else self._each("dutility", d)

    def net_cost(self, p, d):
        return self.cost(np.asarray(p, dtype=float)) - self.utility(np.asarray(d, dtype=float))

    def marginal(self, price):
        """Marginal responses ``(p, d)`` at a scalar or per-prosumer price."""
        if self._quad is not None:
            q = self._quad
            return (q.production_at(price, self.p_min, self.p_max),
                    q.demand_at(price, self.d_min, self.d_max))
        price = np.broadcast_to(np.asarray(price, dtype=float), (len(self),))
        p = np.array([pr.curves.production_at(x, pr.p_min, pr.p_max)
                      for pr, x in zip(self.prosumers, price)])
        d = np.array([pr.curves.demand_at(x, pr.d_min, pr.d_max)
                      for pr, x in zip(self.prosumers, price)])
        return p, d

    def surrogate_response(self, lam, a, I, tol=DEFAULT_TOL):
        """Per-prosumer surrogate best responses at announced price(s) ``lam``.

        Returns ``(p, d, mu)`` arrays.
        """
        c = 1.0 / (a * (I - 1))
        lam = np.broadcast_to(np.asarray(lam, dtype=float), (len(self),))
        lo = lam + c * (self.d_min - self.p_max) - 1.0
        hi = lam + c * (self.d_max - self.p_min) + 1.0

        def residual(mu):
            p, d = self.marginal(mu)
            return mu - lam - c * (d - p)

        lo, hi = bisect_increasing(residual, lo, hi, min(tol, 1e-12))
        mu = 0.5 * (lo + hi)
        p, d = self.marginal(mu)
        return p, d, mu

    def self_sufficiency(self, tol=DEFAULT_TOL):
        """Self-sufficiency points ``x`` (``p = d = x``) for all prosumers."""
        lo = np.maximum(self.p_min, self.d_min)
        hi = np.minimum(self.p_max, self.d_max)
        bad = [pr.id for pr, l, h in zip(self.prosumers, lo, hi) if l > h]
        if bad:
            raise InfeasibilityError(
                f"A2 violated: no feasible p = d for prosumers {bad}", "A2", bad)
        if self._quad is not None:
            return self._quad.self_sufficiency_point(lo, hi)
        return np.array([solve_self_sufficiency(pr, tol)[0] for pr in self.prosumers])

    def curvature_sup(self):
        """``max_i sup{1/f''_i, -1/u''_i}`` over each prosumer's box."""
        if self._quad is not None:
            return max(self._quad.curvature_sup())
        return lipschitz_constant(self.prosumers)
