"""Instance builders and experiment drivers."""
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from .bidding import AsyncSchedule, BiddingConfig, run_bidding
from .equilibrium import (MarketInstance, check_a1, solve_gne_direct,
                          solve_self_sufficiency_all, solve_social_optimum)
from .exceptions import ParameterError
from .metrics import (net_costs, poa_lower_bound, price_of_anarchy, sharing_payoffs,
                      total_net_cost)
from .prosumer import Prosumer, QuadraticCurves, solve_self_sufficiency, net_cost

# (alpha1, alpha2, beta1, beta2, p_min, p_max, d_min, d_max)
THREE_PROSUMER_TABLE = (
    (0.015, 0.038, -0.008, 0.8, 0.0, 20.0, 5.0, 15.0),
    (0.008, 0.047, -0.014, 0.5, 0.0, 25.0, 7.0, 18.0),
    (0.011, 0.056, -0.009, 0.4, 0.0, 30.0, 10.0, 25.0),
)

RANDOM_RANGES = {
    "alpha1": (0.01, 0.02),
    "alpha2": (0.02, 0.08),
    "beta1": (-0.01, -0.005),
    "beta2": (0.0, 1.0),
    "p_max": (20.0, 40.0),
    "d_min": (5.0, 10.0),
    "d_max": (15.0, 30.0),
}
MAX_RESAMPLES = 1000


def builtin_three_prosumer(a=100.0):
    prs = [Prosumer.quadratic(i + 1, *row) for i, row in enumerate(THREE_PROSUMER_TABLE)]
    return MarketInstance(prs, a)


def _draw_prosumer(rng, id):
    v = {k: rng.uniform(lo, hi) for k, (lo, hi) in RANDOM_RANGES.items()}
    return Prosumer.quadratic(id, v["alpha1"], v["alpha2"], v["beta1"], v["beta2"],
                              0.0, v["p_max"], v["d_min"], v["d_max"])


def _a3_holds(prosumer):
    x, _ = solve_self_sufficiency(prosumer)
    return net_cost(prosumer, x, x) < 0


def random_prosumers(n, rng, require_a3=False, first_id=1):
    prs = []
    for i in range(n):
        for _ in range(MAX_RESAMPLES):
            pr = _draw_prosumer(rng, first_id + i)
            if not require_a3 or _a3_holds(pr):
                break
        else:
            raise ParameterError(f"could not draw an A3-satisfying prosumer in "
                                 f"{MAX_RESAMPLES} tries")
        prs.append(pr)
    return prs


def random_instance(I, a=100.0, seed=0, require_a3=False):
    """Population drawn uniformly from the reference parameter ranges.

    Prosumers are drawn one after another from a single seeded stream, so the
    instance for ``I`` is a prefix of the instance for any larger ``I``. With
    ``require_a3`` a prosumer whose self-sufficiency net cost is not negative
    is redrawn.
    """
    if I < 2:
        raise ParameterError("I must be >= 2")
    rng = np.random.default_rng(seed)
    inst = MarketInstance(random_prosumers(I, rng, require_a3), a)
    check_a1(inst)
    solve_self_sufficiency_all(inst)
    return inst


def a3_violations(instance):
    J = net_costs(instance, solve_self_sufficiency_all(instance))
    return [pr.id for pr, j in zip(instance.prosumers, J) if not j < 0]


@dataclass
class ScenarioReport:
    """Experiment output: one record per point of the independent variable."""
    tag: str
    variable: str
    values: list
    records: List[Dict] = field(default_factory=list)
    seeds: list = field(default_factory=list)
    params: Dict = field(default_factory=dict)

    def column(self, key):
        return [r[key] for r in self.records]


def misreport_sweep(instance, prosumer_index=0, scales=None, regime="sharing", tol=1e-9):
    """Outcome when one prosumer scales all its reported curve coefficients.

    The mechanism runs on the reported curves; realized net costs are priced
    with the true ones. Under ``sharing`` a prosumer's realized cost includes
    its market payment.
    """
    if scales is None:
        scales = np.linspace(0.8, 1.2, 41)
    scales = [float(s) for s in scales]
    if any(not s > 0 for s in scales):
        raise ParameterError("scales must be positive")
    if regime not in ("sharing", "centralized"):
        raise ParameterError(f"unknown regime {regime!r}")
    true_pr = instance.prosumers[prosumer_index]
    if not isinstance(true_pr.curves, QuadraticCurves):
        raise ParameterError("misreporting is defined for quadratic curves")

    rep = ScenarioReport("misreport", "scale", scales,
                         params=dict(prosumer_index=prosumer_index, regime=regime,
                                     a=instance.a))
    for s in scales:
        liar = Prosumer(true_pr.id, true_pr.curves.scaled(s), true_pr.p_min,
                        true_pr.p_max, true_pr.d_min, true_pr.d_max)
        reported = instance.replace_prosumer(prosumer_index, liar)
        if regime == "sharing":
            sol = solve_gne_direct(reported, tol)
            realized = sharing_payoffs(instance, sol)
        else:
            sol = solve_social_optimum(reported, tol)
            realized = net_costs(instance, sol)
        rep.records.append(dict(scale=s, price=sol.price,
                                net_utility=(-realized).tolist(),
                                total_net_utility=float(-np.sum(realized))))
    return rep


def poa_vs_size(I_range, a=100.0, seeds=range(5), tol=1e-9):
    """PoA and its analytic lower bound as the population grows.

    Instances are drawn with A3 enforced since the bound assumes it.
    """
    I_range = [int(i) for i in I_range]
    if any(i < 2 for i in I_range):
        raise ParameterError("all I must be >= 2")
    seeds = list(seeds)
    rep = ScenarioReport("poa_vs_size", "I", I_range, seeds=seeds, params=dict(a=a))
    for seed in seeds:
        for I in I_range:
            inst = random_instance(I, a, seed, require_a3=True)
            rep.records.append(_poa_point(inst, tol, seed=seed, I=I))
    return rep


def _poa_point(inst, tol, **keys):
    social = solve_social_optimum(inst, tol)
    gne = solve_gne_direct(inst, tol)
    bound = poa_lower_bound(inst)
    return dict(keys, poa=price_of_anarchy(inst, gne, social),
                poa_bound=bound.bound, C=bound.C,
                social_cost=total_net_cost(inst, social),
                gne_cost=total_net_cost(inst, gne))


def identical_population(prosumer, I, a=100.0):
    prs = [Prosumer(i + 1, prosumer.curves, prosumer.p_min, prosumer.p_max,
                    prosumer.d_min, prosumer.d_max) for i in range(I)]
    return MarketInstance(prs, a)


def diversity_experiment(I=100, type_counts=(1, 2, 4, 5, 10, 20, 50, 100), n_draws=50,
                         a=100.0, seed=0, tol=1e-9):
    """Relative saving of sharing over self-sufficiency versus number of types.

    For ``k`` types, ``k`` prosumer types are drawn and each copied ``I / k``
    times. Saving is ``(J_self - J_gne) / |J_self|`` on totals.
    """
    type_counts = [int(k) for k in type_counts]
    for k in type_counts:
        if k < 1 or I % k:
            raise ParameterError(f"type count {k} does not divide I={I}")
    rep = ScenarioReport("diversity", "types", type_counts, seeds=[seed],
                         params=dict(I=I, n_draws=n_draws, a=a))
    for k in type_counts:
        rng = np.random.default_rng([seed, k])
        savings = []
        for _ in range(n_draws):
            types = random_prosumers(k, rng)
            prs = [Prosumer(j * (I // k) + m + 1, t.curves, t.p_min, t.p_max, t.d_min, t.d_max)
                   for j, t in enumerate(types) for m in range(I // k)]
            inst = MarketInstance(prs, a)
            j_self = float(np.sum(net_costs(inst, solve_self_sufficiency_all(inst))))
            j_gne = total_net_cost(inst, solve_gne_direct(inst, tol))
            savings.append((j_self - j_gne) / abs(j_self))
        savings = np.array(savings)
        rep.records.append(dict(types=k, mean_saving=float(savings.mean()),
                                var_saving=float(savings.var()),
                                savings=savings.tolist()))
    return rep


def delay_experiment(instance, config_base=BiddingConfig(), delays=(3, 6, 9), seeds=range(20),
                     miss_probability=0.8):
    """Asynchronous bidding for several staleness caps and random seeds."""
    delays = [int(D) for D in delays]
    if any(D < 1 for D in delays):
        raise ParameterError("delays must be >= 1")
    seeds = list(seeds)
    rep = ScenarioReport("delay", "max_delay", delays, seeds=seeds,
                         params=dict(miss_probability=miss_probability,
                                     epsilon=config_base.epsilon, a=instance.a))
    for D in delays:
        for seed in seeds:
            cfg = BiddingConfig(config_base.epsilon, config_base.max_iterations,
                                config_base.mode, AsyncSchedule(miss_probability, D, seed),
                                config_base.initial_price, config_base.tol)
            sol, trace = run_bidding(instance, cfg)
            rep.records.append(dict(max_delay=D, seed=seed, converged=trace.converged,
                                    iterations=trace.iterations, price=sol.price,
                                    prices=list(trace.prices)))
    return rep


def sensitivity_sweep(instance, a_values=(25, 50, 75, 100, 125), config=None):
    """Synchronous bidding on one population under several market sensitivities."""
    if config is None:
        config = BiddingConfig(max_iterations=200)
    rep = ScenarioReport("sensitivity", "a", [float(x) for x in a_values],
                         params=dict(epsilon=config.epsilon,
                                     max_iterations=config.max_iterations))
    for a in a_values:
        sol, trace = run_bidding(instance.with_a(float(a)), config)
        rep.records.append(dict(a=float(a), converged=trace.converged,
                                termination=trace.termination,
                                iterations=trace.iterations, price=sol.price,
                                a_min=trace.a_min, prices=list(trace.prices)))
    return rep
