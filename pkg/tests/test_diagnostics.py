import numpy as np
import pytest

from plastiplate.diagnostics import (DiagnosticsLog, RegularityProbe,
                                     StepRecord, constraint_excess,
                                     cutoff_function,
                                     duality_identity, duality_residual,
                                     flow_gap_density, flow_rule_gap,
                                     norton_hoff_gap, regularity_monitor,
                                     stress_excess, thickness_quotients,
                                     uniqueness_check)
from plastiplate.ops.kinematics import kl_strain
from plastiplate.ops.sym2 import YieldSurface, lift_dual, norm_r, random_sym2
from plastiplate.solver import SolverOptions, evolve
from plastiplate.structures import KLDisplacement, PlateGrid
from plastiplate.utils import AcceptanceError, ProbeError


@pytest.fixture(scope='module')
def evolved():
    from plastiplate.scenarios import Config, check_config, load_scenario
    cfg = dict(
        name='diag',
        geometry=dict(nx=9, ny=9, layers=4),
        time=dict(T=1.0, k=6),
        data=dict(
            rho=dict(preset='bending_bump', params=dict(amplitude=0.6),
                     profile=dict(name='ramp')),
            init=dict(preset='velocity', params=dict(amplitude=0.2))),
        **{'yield': dict(alpha0=1.0, N=6, lam=2.0)})
    S = load_scenario(check_config(Config.from_dict(cfg)))
    traj, log = evolve(S)
    return S, traj, log


class TestConstraints:

    def test_stress_excess(self):
        K = YieldSurface(1.0)
        sigma = np.array([[1.0, -1.0, 0.0], [0.1, 0.0, 0.0]])
        np.testing.assert_allclose(stress_excess(sigma, K), np.sqrt(2) - 1)
        assert stress_excess(0.5 * sigma, K) == 0.0

    def test_flow_gap_density_is_non_negative_inside(self, rng):
        sigma = random_sym2(rng, 1000)
        sigma *= (rng.uniform(0, 1.0, 1000) / norm_r(sigma))[:, None]
        pdot = random_sym2(rng, 1000)
        assert np.all(flow_gap_density(sigma, pdot, 1.0) >= -1e-14)

    def test_flow_gap_vanishes_for_normal_rates(self, rng):
        # ṗ ∝ dev_r σ on |σ|_r = α₀ saturates the support function
        sigma = random_sym2(rng, 100)
        sigma /= norm_r(sigma)[:, None]
        from plastiplate.ops.sym2 import dev_r
        pdot = 3.0 * dev_r(sigma)
        np.testing.assert_allclose(flow_gap_density(sigma, pdot, 1.0), 0.0,
                                   atol=1e-12)

    @pytest.mark.parametrize('N', [4, 6, 8, 20])
    def test_norton_hoff_gap_bound(self, N):
        s = np.linspace(0.0, 1.0, 10001)
        gap = norton_hoff_gap(s, 1.0, N)
        assert gap.min() >= 0.0
        assert gap.max() < 1.0 / N

    def test_evolution_series(self, evolved):
        S, traj, log = evolved
        series = flow_rule_gap(traj, S)
        assert len(series.steps) == len(traj) - 1
        assert np.all(series.max_density <= series.bound * (1 + 1e-10))
        excess = constraint_excess(traj, S.yield_surface)
        np.testing.assert_allclose(excess, log.column('excess'), atol=1e-14)


class TestDuality:

    @staticmethod
    def _fields(grid):
        X, Y = grid.coordinates
        x3 = grid.x3[None, None, :, None]
        bar = np.stack([np.sin(np.pi * X) * np.cos(Y), np.cos(np.pi * Y),
                        X * Y], axis=-1)[:, :, None, :]
        hat = np.stack([X**2, np.sin(Y), np.cos(X)], axis=-1)[:, :, None, :]
        sigma = np.broadcast_to(bar + x3 * hat, grid.layered_shape).copy()
        u = KLDisplacement(
            ubar=np.stack([np.sin(X + Y), X * Y**2], axis=-1),
            u3=np.cos(X) * np.sin(2 * Y))
        return sigma, u

    def test_moment_form_equals_pairing_on_kl_states(self, grid, rng):
        sigma, u = self._fields(grid)
        p = random_sym2(rng, grid.layered_shape[:3], 0.1)
        e = kl_strain(u, grid).values - p
        w = KLDisplacement.zeros(grid)
        res = duality_identity(sigma, u, e, p, w, grid)
        np.testing.assert_allclose(res.lhs_moments, res.lhs, rtol=1e-12)

    def test_residual_converges(self):
        residuals = []
        for n in (9, 17, 33):
            grid = PlateGrid(1.0, 1.0, n, n, 2)
            sigma, u = self._fields(grid)
            p = np.zeros(grid.layered_shape)
            e = kl_strain(u, grid).values
            res = duality_identity(sigma, u, e, p, KLDisplacement.zeros(grid),
                                   grid)
            residuals.append(res.residual / res.scale)
        assert residuals[2] < 0.25 * residuals[0]
        # h halves between the last two grids
        assert np.log2(residuals[1] / residuals[2]) > 1.5

    def test_cutoff_derivatives_are_exact(self):
        grid = PlateGrid(2.0, 1.0, 17, 129, 2)
        phi, dphi, d2phi = cutoff_function(grid)
        X, Y = grid.coordinates
        x = np.pi * X / grid.Lx
        y = np.pi * Y / grid.Ly
        np.testing.assert_allclose(phi, (np.sin(x) * np.sin(y))**4)
        expected = 4.0 * np.sin(x)**3 * np.cos(x) * np.sin(y)**4 * np.pi / 2.0
        np.testing.assert_allclose(dphi[..., 0], expected, atol=1e-12)
        # second order central differences of the exact gradient
        h = grid.hy
        fd = (dphi[2:, :, 0] - dphi[:-2, :, 0]) / (2.0 * h)
        np.testing.assert_allclose(d2phi[1:-1, :, 2], fd, atol=0.05)
        for edge in (phi[0], phi[-1], phi[:, 0], dphi[0, :, 1], d2phi[-1]):
            np.testing.assert_allclose(edge, 0.0, atol=1e-12)

    def test_evolved_state(self, evolved):
        S, traj, _ = evolved
        res = duality_residual(traj.final, S)
        assert np.isfinite(res.residual)
        np.testing.assert_allclose(res.lhs_moments, res.lhs, rtol=1e-7,
                                   atol=1e-9)


class TestRegularity:

    def test_subdomain_must_fit(self, grid):
        with pytest.raises(ProbeError):
            RegularityProbe(margin=1, offsets=(2, 1)).mask(grid)
        with pytest.raises(ProbeError):
            RegularityProbe(margin=4, offsets=(1, )).mask(grid)
        with pytest.raises(ProbeError):
            RegularityProbe(margin=2, offsets=(0, ))

    def test_thickness_quotients_need_four_layers(self, rng):
        two = PlateGrid(nx=5, ny=5, layers=2)
        assert thickness_quotients(np.zeros(two.layered_shape), two) is None
        five = PlateGrid(nx=5, ny=5, layers=5)
        Q, w = thickness_quotients(random_sym2(rng, five.layered_shape[:3]),
                                   five)
        assert Q.shape == (5, 5, 2, 3) and w.shape == (2, )

    def test_monitor(self, evolved):
        S, traj, _ = evolved
        report = regularity_monitor(traj, S,
                                    RegularityProbe(margin=2, offsets=(2, 1)))
        assert set(report.sup) == {'d1_sigma', 'd2_sigma', 'd3_sigma',
                                   'd1_v3', 'd2_v3'}
        assert report.restricted == []
        assert all(v >= 0 for d in report.sup.values() for v in d.values())
        assert 'Difference quotients' in report.table()
        assert set(report.as_dict()['sup']['d1_sigma']) == {'2', '1'}

    def test_two_layers_restrict_the_monitor(self, tiny_scenario):
        traj, _ = evolve(tiny_scenario)
        report = regularity_monitor(traj, tiny_scenario,
                                    RegularityProbe(margin=1, offsets=(1, )))
        assert report.restricted == ['d3_sigma']
        assert 'd3_sigma' not in report.sup


class TestUniqueness:

    def test_two_solver_paths(self, tiny_scenario):
        report = uniqueness_check(
            tiny_scenario, SolverOptions(),
            SolverOptions(linear_solver='cg', dof_order='reversed'))
        assert report.passed
        assert report.as_dict()['passed'] is True


class TestLog:

    def test_csv_round_trip(self, evolved, tmp_path):
        _, _, log = evolved
        path = str(tmp_path / 'diagnostics.csv')
        log.to_csv(path)
        back = DiagnosticsLog.from_csv(path)
        assert len(back) == len(log)
        for name in DiagnosticsLog.columns():
            np.testing.assert_allclose(back.column(name), log.column(name))
        assert back[-1].newton_iters == log[-1].newton_iters

    def test_summary_keys(self, evolved):
        _, _, log = evolved
        summary = log.summary()
        for key in ('max_excess', 'min_slack_ratio', 'dissipation',
                    'l2_sigma_rate', 'lnp_lhs', 'lnp_rhs', 'rho_work'):
            assert key in summary
        assert summary['lnp_lhs'] <= summary['lnp_rhs'] * (1 + 1e-10)

    def test_failures_are_reported(self):
        log = DiagnosticsLog([
            StepRecord(step=0, time=0.0),
            StepRecord(step=1, time=0.1, slack=-1.0, scale=1.0,
                       dissipation=1.0),
            StepRecord(step=2, time=0.2, dissipation=0.5),
        ])
        failures = log.failures()
        assert any('energy slack' in f for f in failures)
        assert 'cumulative dissipation decreases' in failures
        with pytest.raises(AcceptanceError) as err:
            log.assert_ok()
        assert err.value.failures == failures

    def test_rate_failures(self):
        records = [StepRecord(step=0, time=0.0)]
        for i, rate in enumerate([1.0, 1.1, 0.9, 1.0, 5.0], start=1):
            records.append(
                StepRecord(step=i, time=0.1 * i, sigma_rate=rate,
                           v3_rate=1.0))
        log = DiagnosticsLog(records)
        failures = log.rate_failures()
        assert len(failures) == 1 and 'sigma_rate' in failures[0]
        assert log.failures() == []
        with pytest.raises(AcceptanceError):
            log.assert_ok(static_loads=True)


def test_lift_dual_of_normal_rate_is_parallel_to_stress(rng):
    # the normality residual of the monitor relies on this identity
    from plastiplate.ops.sym2 import dev_r
    sigma = random_sym2(rng, 20)
    np.testing.assert_allclose(lift_dual(dev_r(sigma)), sigma, atol=1e-13)
