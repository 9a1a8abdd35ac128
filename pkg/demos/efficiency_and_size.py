"""Efficiency loss shrinks as more prosumers join; diversity raises savings."""
# %%
from prosumer_sharing.scenarios import diversity_experiment, poa_vs_size

rep = poa_vs_size(range(2, 31, 4), a=100.0, seeds=range(3))
for r in rep.records:
    print(r["seed"], r["I"], f"{r['poa']:.5f}", f"bound {r['poa_bound']:.3f}")

# %%
div = diversity_experiment(I=20, type_counts=(1, 2, 5, 10, 20), n_draws=10, seed=0)
for r in div.records:
    print(r["types"], f"mean {r['mean_saving']:.4f}", f"var {r['var_saving']:.2e}")
