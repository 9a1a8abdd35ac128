"""Efficiency and incentive measures of market outcomes."""
from dataclasses import dataclass

import numpy as np

from .equilibrium import GNE, SOCIAL, solve_self_sufficiency_all, social_objective
from .exceptions import AssumptionError, ModeError, ParameterError

PARETO_TOL = 1e-6


def net_costs(instance, solution):
    """Per-prosumer ``J_i = f_i(p_i) - u_i(d_i)``."""
    return np.asarray(instance.fleet.net_cost(solution.p, solution.d), dtype=float)


def payments(instance, solution):
    """Per-prosumer payment ``lam * q_i`` (negative means revenue)."""
    if solution.b is None:
        raise ModeError(f"{solution.mode} solution carries no bids")
    return solution.price * (-instance.a * solution.price + np.asarray(solution.b, float))


def sharing_payoffs(instance, solution):
    """``Gamma_i = J_i + lam * q_i`` for every prosumer."""
    return net_costs(instance, solution) + payments(instance, solution)


def sharing_payoff(instance, solution, i):
    return float(sharing_payoffs(instance, solution)[i])


def budget_balance(instance, solution):
    """Total payments; zero for any bid vector cleared at its own price."""
    return float(np.sum(payments(instance, solution)))


def total_net_cost(instance, solution):
    return social_objective(instance, solution.p, solution.d)


def price_of_anarchy(instance, gne_solution, social_solution):
    """``J(gne) / J(social)``; below 1 when costs are negative."""
    social = total_net_cost(instance, social_solution)
    if social == 0:
        raise ParameterError("price of anarchy undefined: social total net cost is zero")
    return total_net_cost(instance, gne_solution) / social


def poa_gap(instance, gne_solution, social_solution):
    """Absolute efficiency loss ``J(gne) - J(social)`` (nonnegative)."""
    return total_net_cost(instance, gne_solution) - total_net_cost(instance, social_solution)


@dataclass
class ParetoResult:
    passed: np.ndarray
    self_costs: np.ndarray
    payoffs: np.ndarray
    strict_improvement: bool
    coincide: bool

    @property
    def all_passed(self):
        return bool(np.all(self.passed))


def pareto_check(instance, gne_solution, tol=PARETO_TOL, self_solution=None):
    """Compare sharing payoffs with each prosumer's self-sufficiency cost."""
    if self_solution is None:
        self_solution = solve_self_sufficiency_all(instance)
    self_costs = net_costs(instance, self_solution)
    payoffs = sharing_payoffs(instance, gne_solution)
    passed = payoffs <= self_costs + tol
    coincide = bool(np.allclose(gne_solution.p, self_solution.p, atol=1e-6)
                    and np.allclose(gne_solution.d, self_solution.d, atol=1e-6))
    strict = bool(np.any(payoffs < self_costs - tol))
    return ParetoResult(passed, self_costs, payoffs, strict, coincide)


@dataclass
class PoABound:
    C1: float
    C2: float
    C: float
    bound: float


def poa_lower_bound(instance, self_solution=None):
    """Constant ``C`` and the guarantee ``PoA >= 1 - C / (I - 1)``.

    ``C1`` is the largest squared box mismatch ``(p - d)^2`` a prosumer can
    produce and ``C2`` the self-sufficiency net cost closest to zero.
    """
    if self_solution is None:
        self_solution = solve_self_sufficiency_all(instance)
    J = net_costs(instance, self_solution)
    bad = [pr.id for pr, j in zip(instance.prosumers, J) if not j < 0]
    if bad:
        raise AssumptionError(
            f"A3 violated: self-sufficiency net cost is not negative for prosumers {bad}", bad)
    f = instance.fleet
    C1 = float(np.max(np.maximum((f.p_min - f.d_max) ** 2, (f.p_max - f.d_min) ** 2)))
    C2 = float(np.max(J))
    C = C1 / (instance.a * abs(C2))
    bound = 1.0 - C / (instance.I - 1) if instance.I > 1 else float("-inf")
    return PoABound(C1, C2, C, bound)


@dataclass
class OutcomeReport:
    self_costs: np.ndarray
    social_costs: np.ndarray
    gne_costs: np.ndarray
    payoffs: np.ndarray
    payments: np.ndarray
    total_self: float
    total_social: float
    total_gne: float
    poa: float
    poa_gap: float
    pareto: np.ndarray
    price_gap: float


def outcome_report(instance, gne_solution, social_solution, self_solution=None):
    if gne_solution.mode != GNE or social_solution.mode != SOCIAL:
        raise ModeError("expected a sharing equilibrium and a social optimum")
    if self_solution is None:
        self_solution = solve_self_sufficiency_all(instance)
    par = pareto_check(instance, gne_solution, self_solution=self_solution)
    return OutcomeReport(
        self_costs=par.self_costs,
        social_costs=net_costs(instance, social_solution),
        gne_costs=net_costs(instance, gne_solution),
        payoffs=par.payoffs,
        payments=payments(instance, gne_solution),
        total_self=float(np.sum(par.self_costs)),
        total_social=total_net_cost(instance, social_solution),
        total_gne=total_net_cost(instance, gne_solution),
        poa=price_of_anarchy(instance, gne_solution, social_solution),
        poa_gap=poa_gap(instance, gne_solution, social_solution),
        pareto=par.passed,
        price_gap=abs(gne_solution.dual - social_solution.dual),
    )
