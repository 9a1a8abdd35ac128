"""The bidding loop between smart meters and the platform."""
# %%
import numpy as np

from prosumer_sharing import (BiddingConfig, builtin_three_prosumer, convergence_diagnostics,
                              min_market_sensitivity, run_bidding, solve_gne_direct)

market = builtin_three_prosumer(a=100.0)
print("smallest safe a:", min_market_sensitivity(market.prosumers, market.I))

sol, trace = run_bidding(market, BiddingConfig(epsilon=1e-4))
print(trace.termination, trace.iterations, "rounds")
for k, lam in enumerate(trace.prices[:8]):
    print(k, round(lam, 5))

# %%
# distance to the equilibrium price never grows
target = solve_gne_direct(market).dual
diag = convergence_diagnostics(trace, target)
print("Fejer inequality holds:", diag.fejer_holds)
print("final (p, d):", np.round(sol.p, 3), np.round(sol.d, 3))

# %%
# tightening epsilon only extends the same sequence
_, long = run_bidding(market, BiddingConfig(epsilon=1e-10, max_iterations=2000))
print(long.iterations, long.prices[:len(trace.prices)] == trace.prices)
