"""Three prosumers: social optimum, sharing equilibrium and going it alone."""
# %%
import numpy as np

from prosumer_sharing import (builtin_three_prosumer, outcome_report, poa_lower_bound,
                              solve_gne_direct, solve_self_sufficiency_all,
                              solve_social_optimum)

market = builtin_three_prosumer(a=100.0)
social = solve_social_optimum(market)
sharing = solve_gne_direct(market)
alone = solve_self_sufficiency_all(market)

# %%
# operating points per regime
for name, sol in (("social", social), ("sharing", sharing), ("alone", alone)):
    pts = ", ".join(f"({p:.1f},{d:.1f})" for p, d in zip(sol.p, sol.d))
    print(f"{name:8s} {pts}")

# %%
rep = outcome_report(market, sharing, social, alone)
print("net cost alone   ", np.round(rep.self_costs, 2), round(rep.total_self, 2))
print("net cost social  ", np.round(rep.social_costs, 2), round(rep.total_social, 2))
print("payoff sharing   ", np.round(rep.payoffs, 2), round(rep.total_gne, 2))
print("payments         ", np.round(rep.payments, 3), "sum", rep.payments.sum())
print(f"prices: social {social.price:.4f}  sharing {sharing.price:.4f}")
print(f"efficiency loss {100 * (1 - rep.poa):.2f}%  everyone better off: {rep.pareto.all()}")

# %%
# the analytic guarantee is loose for three prosumers
print(poa_lower_bound(market, alone))
