"""Peer-to-peer energy sharing among prosumers.

Social optimum, the sharing equilibrium of the bid-based market, the
iterative bidding protocol and efficiency measures of their outcomes.
"""
from .bidding import (AsyncSchedule, BiddingConfig, BiddingTrace, convergence_diagnostics,
                      platform_clear, prosumer_bid_update, run_bidding)
from .equilibrium import (EquilibriumSolution, MarketInstance, aggregate_excess, kkt_residual,
                          phi_hessian, recover_bids, solve_gne_direct,
                          solve_self_sufficiency_all, solve_social_optimum)
from .exceptions import (AssumptionError, BracketError, ConsistencyError, InfeasibilityError,
                         ModeError, ParameterError, SharingError)
from .metrics import (budget_balance, net_costs, outcome_report, pareto_check, poa_gap,
                      poa_lower_bound, price_of_anarchy, sharing_payoff, sharing_payoffs)
from .oracle import GridSpec, grid_best_response, perturbation_optimality_check
from .prosumer import (CurvePair, Prosumer, ProsumerArray, QuadraticCurves, lipschitz_constant,
                       marginal_response, min_market_sensitivity, net_cost,
                       solve_self_sufficiency, solve_surrogate_best_response, surrogate_objective)
from .scenarios import builtin_three_prosumer, random_instance

__version__ = "0.1.0"

__all__ = [
    "AssumptionError",
    "AsyncSchedule",
    "BiddingConfig",
    "BiddingTrace",
    "BracketError",
    "ConsistencyError",
    "CurvePair",
    "EquilibriumSolution",
    "GridSpec",
    "InfeasibilityError",
    "MarketInstance",
    "ModeError",
    "ParameterError",
    "Prosumer",
    "ProsumerArray",
    "QuadraticCurves",
    "SharingError",
    "aggregate_excess",
    "budget_balance",
    "builtin_three_prosumer",
    "convergence_diagnostics",
    "grid_best_response",
    "kkt_residual",
    "lipschitz_constant",
    "marginal_response",
    "min_market_sensitivity",
    "net_cost",
    "net_costs",
    "outcome_report",
    "pareto_check",
    "perturbation_optimality_check",
    "phi_hessian",
    "platform_clear",
    "poa_gap",
    "poa_lower_bound",
    "price_of_anarchy",
    "prosumer_bid_update",
    "random_instance",
    "recover_bids",
    "run_bidding",
    "sharing_payoff",
    "sharing_payoffs",
    "solve_gne_direct",
    "solve_self_sufficiency",
    "solve_self_sufficiency_all",
    "solve_social_optimum",
    "solve_surrogate_best_response",
    "surrogate_objective",
]
