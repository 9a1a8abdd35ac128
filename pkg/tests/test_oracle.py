import numpy as np
import pytest

from prosumer_sharing import (GridSpec, ModeError, ParameterError, Prosumer, grid_best_response,
                              perturbation_optimality_check,
                              solve_gne_direct, solve_social_optimum,
                              solve_surrogate_best_response, surrogate_objective)
from prosumer_sharing.equilibrium import EquilibriumSolution, solve_self_sufficiency_all
from prosumer_sharing.scenarios import random_prosumers


def test_grid_axis_includes_endpoints():
    ax = GridSpec(0.3).axis(0.0, 1.0)
    assert ax[0] == 0.0 and ax[-1] == 1.0
    assert np.max(np.diff(ax)) <= 0.3 + 1e-12
    with pytest.raises(ParameterError):
        GridSpec(0.0)
    with pytest.raises(ParameterError):
        GridSpec(0.001, max_points=100).axis(0.0, 10.0)


def test_grid_degenerate_box_returns_the_point():
    pr = Prosumer.quadratic(1, 0.01, 0.05, -0.01, 0.6, 3.0, 3.0, 4.0, 4.0)
    p, d, val = grid_best_response(pr, 0.2, 100.0, 3)
    assert (p, d) == (3.0, 4.0)
    assert val == pytest.approx(surrogate_objective(pr, 3.0, 4.0, 0.2, 100.0, 3))


def test_grid_separable_limit():
    pr = Prosumer.quadratic(1, 0.01, 0.05, -0.01, 0.6, 0.0, 30.0, 0.0, 30.0)
    lam = 0.3
    p, d, _ = grid_best_response(pr, lam, 1e12, 3)
    ps = np.linspace(0, 30, 3001)
    assert p == pytest.approx(ps[np.argmin(pr.curves.cost(ps) - lam * ps)], abs=1e-9)
    assert d == pytest.approx(ps[np.argmin(-pr.curves.utility(ps) + lam * ps)], abs=1e-9)


def test_grid_agrees_with_solver_on_random_tuples():
    rng = np.random.default_rng(2024)
    step = 0.01
    for _ in range(40):
        pr = random_prosumers(1, rng)[0]
        lam, a, I = rng.uniform(-0.2, 1.0), rng.uniform(20, 300), int(rng.integers(2, 60))
        r = solve_surrogate_best_response(pr, lam, a, I)
        gp, gd, gval = grid_best_response(pr, lam, a, I, GridSpec(step))
        assert abs(r.p - gp) <= step and abs(r.d - gd) <= step
        sval = surrogate_objective(pr, r.p, r.d, lam, a, I)
        assert sval <= gval + 1e-12
        slope = max(abs(pr.curves.dcost(pr.p_max)), abs(pr.curves.dutility(pr.d_min))) \
            + abs(lam) + 60 / (a * (I - 1))
        assert gval - sval <= 2 * slope * step


def test_perturbation_passes_on_solver_output(builtin):
    s = solve_social_optimum(builtin)
    g = solve_gne_direct(builtin)
    for sol in (s, g):
        res = perturbation_optimality_check(builtin, sol, n_samples=10_000, radius=1.0)
        assert res.passed and res.n_evaluated > 0


def test_perturbation_fails_on_moved_solution(builtin):
    s = solve_social_optimum(builtin)
    p = s.p.copy()
    p[1] -= 1.0
    p[2] += 1.0
    moved = EquilibriumSolution(p, s.d.copy(), s.price, s.dual, s.mode)
    res = perturbation_optimality_check(builtin, moved, n_samples=2000)
    assert not res.passed and res.worst_improvement > 0


def test_perturbation_zero_radius_vacuous(builtin):
    s = solve_social_optimum(builtin)
    res = perturbation_optimality_check(builtin, s, n_samples=100, radius=0.0)
    assert res.passed and res.worst_improvement == 0.0


def test_perturbation_is_deterministic(small_random):
    g = solve_gne_direct(small_random)
    a = perturbation_optimality_check(small_random, g, n_samples=500, seed=4)
    b = perturbation_optimality_check(small_random, g, n_samples=500, seed=4)
    assert a == b


def test_perturbation_rejects_bad_input(builtin):
    selfs = solve_self_sufficiency_all(builtin)
    with pytest.raises(ModeError):
        perturbation_optimality_check(builtin, selfs)
    s = solve_social_optimum(builtin)
    bad = EquilibriumSolution(s.p + 100.0, s.d, s.price, s.dual, s.mode)
    with pytest.raises(ParameterError):
        perturbation_optimality_check(builtin, bad)
