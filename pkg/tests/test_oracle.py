import numpy as np
import pytest
import torch

from plastiplate.material import Elasticity, apply_C, elastic_energy_density
from plastiplate.ops.potentials import F_lambda, TruncationParams, dpsi_lambda
from plastiplate.ops.sym2 import random_sym2
from plastiplate.oracle import (DenseIncrementalProblem, brute_minimize,
                                conjugate_sup, pointwise_plastic_update,
                                search_radius)
from plastiplate.solver import seed_history
from plastiplate.utils import OracleError


class TestConjugateSearch:

    def test_search_radius(self):
        P = TruncationParams.create(4, 1.0, 2.0)
        assert search_radius(np.zeros(3), P) == 1.0
        small = search_radius(np.array([0.1, 0.0, 0.0]), P)
        large = search_radius(np.array([10.0, 0.0, 0.0]), P)
        assert 1.0 < small < large

    def test_zero(self):
        P = TruncationParams.create(6, 1.0, 1.0)
        assert conjugate_sup(np.zeros(3), P) == pytest.approx(0.0, abs=1e-14)

    def test_rejects_small_box(self):
        P = TruncationParams.create(4, 1.0, 2.0)
        with pytest.raises(OracleError):
            conjugate_sup(np.array([5.0, -5.0, 0.0]), P, R=0.1)

    def test_matches_closed_form_on_both_branches(self):
        P = TruncationParams.create(4, 1.0, 1.0)
        for y in (np.array([0.2, 0.1, 0.05]), np.array([3.0, -1.0, 0.5])):
            np.testing.assert_allclose(conjugate_sup(y, P), F_lambda(y, P),
                                       rtol=1e-4)


class TestDense:

    def test_rejects_large_problems(self, scenario_factory):
        S = scenario_factory(geometry=dict(nx=9, ny=9, layers=2))
        with pytest.raises(OracleError):
            DenseIncrementalProblem(S, seed_history(S), 1)

    def test_history_never_increases(self, scenario_factory):
        S = scenario_factory(geometry=dict(nx=3, ny=3, layers=2))
        seed = seed_history(S)
        problem = DenseIncrementalProblem(S, seed, 1)
        start = problem.initial_point(seed)
        result = brute_minimize(problem, x0=start)
        assert np.all(np.diff(result.history) <= 0.0)
        assert result.objective <= result.history[0]
        assert result.objective == pytest.approx(
            problem.objective_at(result.u, result.p.to_points()), rel=1e-12)

    def test_flow_rate_matches_numpy(self, scenario_factory, rng):
        S = scenario_factory(geometry=dict(nx=3, ny=3, layers=2))
        problem = DenseIncrementalProblem(S, seed_history(S), 1)
        # both sides of the cap |τ|_r = λ
        tau = random_sym2(rng, (2, 9), scale=2.0)
        np.testing.assert_allclose(
            problem.flow_rate(torch.as_tensor(tau)).numpy(),
            dpsi_lambda(tau, S.trunc), rtol=1e-12, atol=1e-15)

    def test_jacobian_is_invertible_at_zero_flow(self, scenario_factory):
        S = scenario_factory(geometry=dict(nx=3, ny=3, layers=2))
        problem = DenseIncrementalProblem(S, seed_history(S), 1)
        nf = problem.free.size
        z = torch.zeros(problem.num_unknowns, dtype=torch.float64)
        jac = torch.autograd.functional.jacobian(problem.stationarity, z)
        np.testing.assert_allclose(jac[nf:, nf:].numpy(),
                                   np.eye(z.numel() - nf), atol=1e-14)

    def test_stops_on_stationarity_past_the_cap(self, scenario_factory):
        S = scenario_factory(
            geometry=dict(nx=3, ny=3, layers=2),
            data=dict(
                rho=dict(preset='bending_bump', params=dict(amplitude=0.8)),
                init=dict(preset='prestressed')),
            **{'yield': dict(alpha0=1.0, N=8, lam=0.5, gamma=0.1)})
        seed = seed_history(S)
        problem = DenseIncrementalProblem(S, seed, 1)
        result = brute_minimize(problem, x0=problem.initial_point(seed))
        scale = 1.0 + abs(result.objective) + np.abs(
            result.sigma.values).max()
        assert result.stationarity <= 1e-10 * scale
        assert result.objective <= result.history[0]


def test_pointwise_update_lowers_the_energy():
    E = Elasticity(1.0, 0.5)
    P = TruncationParams.create(6, 1.0, 2.0)
    strain = np.array([1.5, -0.5, 0.4])
    p_prev = np.array([0.1, 0.0, -0.05])
    update = pointwise_plastic_update(strain, p_prev, 0.1, E, P)
    # Δp = 0 costs ½ C(ε − p_prev):(ε − p_prev)
    frozen = elastic_energy_density(apply_C(strain - p_prev, E), E)
    assert update.energy < float(frozen)
    assert not np.allclose(update.p, p_prev)
