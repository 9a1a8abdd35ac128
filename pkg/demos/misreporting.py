"""One prosumer scales its reported curves and we price the outcome with the
true ones."""
# %%
import numpy as np

from prosumer_sharing import builtin_three_prosumer
from prosumer_sharing.scenarios import misreport_sweep

market = builtin_three_prosumer()
scales = np.linspace(0.8, 1.2, 41)
for regime in ("centralized", "sharing"):
    rep = misreport_sweep(market, 0, scales, regime)
    mine = np.array([r["net_utility"][0] for r in rep.records])
    total = np.array(rep.column("total_net_utility"))
    k = int(np.argmax(mine))
    print(f"{regime:12s} best scale {scales[k]:.2f}: own {mine[k]:.4f} "
          f"(truthful {mine[20]:.4f}), total {total[k]:.4f} (truthful {total[20]:.4f})")
