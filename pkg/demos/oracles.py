"""Brute-force checks of the solvers, plus a prosumer with non-quadratic curves."""
# %%
import numpy as np

from prosumer_sharing import (CurvePair, MarketInstance, Prosumer, builtin_three_prosumer,
                              grid_best_response, perturbation_optimality_check,
                              solve_gne_direct, solve_surrogate_best_response)

market = builtin_three_prosumer()
pr = market.prosumers[0]
print(solve_surrogate_best_response(pr, 0.25, 100.0, 3))
print(grid_best_response(pr, 0.25, 100.0, 3))

# %%
print(perturbation_optimality_check(market, solve_gne_direct(market)))

# %%
# exponential-ish cost and log utility through the derivative-triple hook
exp_curves = CurvePair(
    cost=lambda p: 0.5 * np.expm1(0.1 * p), dcost=lambda p: 0.05 * np.exp(0.1 * p),
    ddcost=lambda p: 0.005 * np.exp(0.1 * p),
    utility=lambda d: 3.0 * np.log1p(d), dutility=lambda d: 3.0 / (1 + d),
    ddutility=lambda d: -3.0 / (1 + d) ** 2)
odd = Prosumer(4, exp_curves, 0.0, 25.0, 5.0, 20.0)
bigger = MarketInstance(list(market.prosumers) + [odd], 100.0)
g = solve_gne_direct(bigger)
print(np.round(g.p, 3), np.round(g.d, 3), round(g.price, 4), g.kkt_residual)
