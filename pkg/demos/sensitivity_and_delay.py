"""When the market sensitivity is too small the price oscillates; random
update misses slow convergence down but do not break it."""
# %%
from prosumer_sharing import BiddingConfig, builtin_three_prosumer, random_instance
from prosumer_sharing.scenarios import delay_experiment, sensitivity_sweep

fifty = random_instance(50, a=100.0, seed=2)
rep = sensitivity_sweep(fifty, (25, 50, 75, 100, 125), BiddingConfig(max_iterations=200))
for r in rep.records:
    print(f"a={r['a']:5.0f}  {r['termination']:15s} {r['iterations']:4d}  price {r['price']:.4f}")

# %%
three = builtin_three_prosumer()
rep = delay_experiment(three, BiddingConfig(), delays=(3, 6, 9), seeds=range(10))
for D in (3, 6, 9):
    rows = [r for r in rep.records if r["max_delay"] == D]
    print(D, sum(r["iterations"] for r in rows) / len(rows),
          min(r["price"] for r in rows), max(r["price"] for r in rows))
