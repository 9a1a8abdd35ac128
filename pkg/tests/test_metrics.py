import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import TABLE_GNE_PAYOFF, TABLE_TOTAL_GNE
from prosumer_sharing import (AssumptionError, ModeError, ParameterError, Prosumer,
                              budget_balance, net_costs, outcome_report, pareto_check,
                              poa_gap, poa_lower_bound, price_of_anarchy, random_instance,
                              sharing_payoff, sharing_payoffs, solve_gne_direct,
                              solve_self_sufficiency_all, solve_social_optimum)
from prosumer_sharing.equilibrium import EquilibriumSolution, GNE, MarketInstance
from prosumer_sharing.scenarios import identical_population


def test_sharing_payoffs_reproduce_table(builtin):
    g = solve_gne_direct(builtin)
    assert sharing_payoff(builtin, g, 0) == pytest.approx(-6.90, abs=0.01)
    assert np.allclose(sharing_payoffs(builtin, g), TABLE_GNE_PAYOFF, atol=0.01)
    assert sharing_payoffs(builtin, g).sum() == pytest.approx(TABLE_TOTAL_GNE, abs=0.005)


def test_zero_import_payoff_equals_net_cost(builtin):
    s = solve_self_sufficiency_all(builtin)
    b = np.full(builtin.I, 0.3 * builtin.a)
    sol = EquilibriumSolution(s.p, s.d, 0.3, 0.3, GNE, b=b, a=builtin.a)
    assert np.allclose(sharing_payoffs(builtin, sol), net_costs(builtin, sol))


def test_payoffs_require_bids(builtin):
    with pytest.raises(ModeError):
        sharing_payoffs(builtin, solve_social_optimum(builtin))


def test_price_of_anarchy_table(builtin):
    g, s = solve_gne_direct(builtin), solve_social_optimum(builtin)
    poa = price_of_anarchy(builtin, g, s)
    assert poa == pytest.approx(10.94 / 10.98, abs=5e-4)
    assert 100 * (1 - poa) == pytest.approx(0.36, abs=0.05)
    assert poa_gap(builtin, g, s) > 0


def test_price_of_anarchy_identical_population():
    pr = Prosumer.quadratic(1, 0.01, 0.05, -0.01, 0.6, 0.0, 30.0, 0.0, 30.0)
    inst = identical_population(pr, 5)
    assert price_of_anarchy(inst, solve_gne_direct(inst), solve_social_optimum(inst)) \
        == pytest.approx(1.0, abs=1e-9)


def test_price_of_anarchy_zero_social_cost():
    # zero-cost curves at the origin with a box pinned there
    pr = Prosumer.quadratic(1, 0.01, 0.0, -0.01, 0.0, 0.0, 0.0, 0.0, 0.0)
    inst = MarketInstance([pr, pr], 100.0)
    with pytest.raises(ParameterError):
        price_of_anarchy(inst, solve_gne_direct(inst), solve_social_optimum(inst))


def test_large_random_instance_poa():
    inst = random_instance(50, 100.0, seed=0, require_a3=True)
    assert price_of_anarchy(inst, solve_gne_direct(inst), solve_social_optimum(inst)) > 0.99


def test_pareto_table(builtin):
    res = pareto_check(builtin, solve_gne_direct(builtin))
    assert res.all_passed and res.strict_improvement and not res.coincide
    assert np.allclose(res.self_costs, (-6.255, -2.3319, -1.44), atol=1e-3)


def test_pareto_identical_population():
    pr = Prosumer.quadratic(1, 0.01, 0.05, -0.01, 0.6, 0.0, 30.0, 0.0, 30.0)
    inst = identical_population(pr, 4)
    res = pareto_check(inst, solve_gne_direct(inst))
    assert res.all_passed and res.coincide and not res.strict_improvement
    assert np.allclose(res.payoffs, res.self_costs, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 20), st.integers(0, 10**6))
def test_random_instances_pareto_and_budget(I, seed):
    inst = random_instance(I, 100.0, seed)
    g = solve_gne_direct(inst)
    assert pareto_check(inst, g).all_passed
    assert abs(budget_balance(inst, g)) <= 1e-9
    assert sharing_payoffs(inst, g).sum() == pytest.approx(net_costs(inst, g).sum(), abs=1e-9)


def test_poa_lower_bound_table(builtin):
    b = poa_lower_bound(builtin)
    assert b.C1 == 625.0
    assert b.C2 == pytest.approx(-1.44)
    assert b.C == pytest.approx(625 / (100 * 1.44))
    assert b.bound == pytest.approx(1 - b.C / 2)
    assert b.bound == pytest.approx(-1.17, abs=0.01)


def test_poa_lower_bound_tends_to_one():
    pr = Prosumer.quadratic(1, 0.01, 0.05, -0.01, 0.6, 0.0, 30.0, 0.0, 30.0)
    bounds = [poa_lower_bound(identical_population(pr, I)).bound for I in (10, 100, 1000)]
    assert bounds[0] < bounds[1] < bounds[2] < 1 and 1 - bounds[2] < 1e-2


def test_poa_lower_bound_requires_a3():
    # self-sufficiency net cost is positive: costly production, little utility
    pr = Prosumer.quadratic(1, 0.05, 0.5, -0.01, 0.1, 5.0, 10.0, 5.0, 10.0)
    inst = MarketInstance([pr, pr], 100.0)
    with pytest.raises(AssumptionError):
        poa_lower_bound(inst)


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 30), st.integers(0, 10**6))
def test_poa_above_bound(I, seed):
    inst = random_instance(I, 100.0, seed, require_a3=True)
    poa = price_of_anarchy(inst, solve_gne_direct(inst), solve_social_optimum(inst))
    assert poa >= poa_lower_bound(inst).bound
    assert poa <= 1 + 1e-12


def test_outcome_report(builtin):
    g, s = solve_gne_direct(builtin), solve_social_optimum(builtin)
    rep = outcome_report(builtin, g, s)
    assert rep.total_gne == pytest.approx(-10.94, abs=0.005)
    assert rep.total_social == pytest.approx(-10.98, abs=0.005)
    assert rep.total_self == pytest.approx(-10.03, abs=0.005)
    assert rep.pareto.all()
    assert rep.price_gap == pytest.approx(abs(g.dual - s.dual))
    with pytest.raises(ModeError):
        outcome_report(builtin, s, g)
