"""Per-step diagnostics of an evolution.

:class:`StepMonitor` is fed consecutive states while the solver runs and
appends one :class:`StepRecord` per step (step 0 describes the seed). The
energy columns follow the discrete balance obtained by testing the step
equations with (uⁱ − u^{i−1}) − (wⁱ − w^{i−1}):

    Kᵢ + Eᵢ + Dᵢ + Σ_j (½‖Δv₃‖² + ½⟨A_r Δσ, Δσ⟩) = K₀ + E₀ + Σ_j workⱼ,

so the slack K₀ + E₀ + Σ work − (K + E + D) is non-negative up to the
solver tolerance.
"""
import csv
from dataclasses import asdict, dataclass, fields
from typing import TYPE_CHECKING, Iterator, List, Optional

import numpy as np

from plastiplate.ops.kinematics import kl_strain, moment_first, moment_zero
from plastiplate.ops.potentials import dpsi_lambda
from plastiplate.ops.sym2 import (frobenius_inner, frobenius_norm, lift_dual,
                                  norm_dual, norm_r)
from plastiplate.structures import PlateGrid, PlateState
from plastiplate.utils import AcceptanceError

if TYPE_CHECKING:
    from plastiplate.solver.scenario import Scenario

SLACK_TOL = 1e-8
RESIDUAL_TOL = 1e-9
IDENTITY_TOL = 1e-10


def integrate_layered(density: np.ndarray, grid: PlateGrid) -> float:
    """Σ_ℓ w_ℓ Σ_nodes W·density for a (ny, nx, layers) array."""
    return float(
        np.einsum('yxl,yx,l->', density, grid.node_weights,
                  grid.layer_weights))


def integrate_nodal(density: np.ndarray, grid: PlateGrid) -> float:
    return float(np.sum(grid.node_weights * density))


def pair_layered(a: np.ndarray, b: np.ndarray, grid: PlateGrid) -> float:
    """⟨a, b⟩ = ∫_Ω a:b for layered Sym2 arrays."""
    return integrate_layered(frobenius_inner(a, b), grid)


@dataclass
class EnergyLedger:
    """Terms of the discrete energy balance at one step."""
    kinetic: float
    elastic: float
    dissipation_cum: float
    external_work_cum: float
    seed_energy: float
    slack: float
    scale: float


@dataclass
class StepRecord:
    step: int
    time: float
    kinetic: float = 0.0
    elastic: float = 0.0
    dissipation: float = 0.0
    work: float = 0.0
    work_inertial: float = 0.0
    work_stress: float = 0.0
    work_g: float = 0.0
    work_f: float = 0.0
    rho_power: float = 0.0
    seed: float = 0.0
    slack: float = 0.0
    scale: float = 1.0
    excess: float = 0.0
    flowgap: float = 0.0
    flowgap_abs: float = 0.0
    flowgap_max_density: float = 0.0
    flowgap_bound: float = 0.0
    flowgap_identity: float = 0.0
    kinematic: float = 0.0
    flow_residual: float = 0.0
    membrane_residual: float = 0.0
    bending_residual: float = 0.0
    sigma_rate: float = 0.0
    v3_rate: float = 0.0
    normality: float = 0.0
    lnp_lhs: float = 0.0
    lnp_rhs: float = 0.0
    newton_iters: int = 0

    @property
    def ledger(self) -> EnergyLedger:
        return EnergyLedger(self.kinetic, self.elastic, self.dissipation,
                            self.work, self.seed, self.slack, self.scale)


class DiagnosticsLog:
    """Ordered :class:`StepRecord` series of one run."""

    def __init__(self, records: Optional[List[StepRecord]] = None):
        self.records: List[StepRecord] = list(records or [])

    def append(self, record: StepRecord):
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[StepRecord]:
        return iter(self.records)

    def __getitem__(self, index) -> StepRecord:
        return self.records[index]

    @staticmethod
    def columns() -> List[str]:
        return [f.name for f in fields(StepRecord)]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def max(self, name: str) -> float:
        return float(self.column(name).max())

    def min(self, name: str) -> float:
        return float(self.column(name).min())

    def to_csv(self, path: str):
        with open(path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=self.columns())
            writer.writeheader()
            for r in self.records:
                writer.writerow(asdict(r))

    @classmethod
    def from_csv(cls, path: str) -> 'DiagnosticsLog':
        types = {f.name: f.type for f in fields(StepRecord)}
        records = []
        with open(path, newline='') as f:
            for row in csv.DictReader(f):
                records.append(
                    StepRecord(**{
                        k: int(v) if types[k] in (int, 'int') else float(v)
                        for k, v in row.items()
                    }))
        return cls(records)

    def summary(self) -> dict:
        """Per-run scalars written to ``summary.json``."""
        rec = self.records
        steps = rec[1:] if len(rec) > 1 else rec
        delta = steps[0].time - rec[0].time if len(rec) > 1 else 0.0
        sigma_rate = np.array([r.sigma_rate for r in steps])
        v3_rate = np.array([r.v3_rate for r in steps])
        slack_ratio = np.array([r.slack / r.scale for r in rec])
        return dict(
            steps=len(rec) - 1,
            max_excess=self.max('excess'),
            max_flowgap=self.max('flowgap'),
            max_flowgap_density=self.max('flowgap_max_density'),
            flowgap_bound=rec[-1].flowgap_bound,
            min_slack=self.min('slack'),
            min_slack_ratio=float(slack_ratio.min()),
            final_kinetic=rec[-1].kinetic,
            final_elastic=rec[-1].elastic,
            dissipation=rec[-1].dissipation,
            work=rec[-1].work,
            rho_work=float(delta * self.column('rho_power')[1:].sum()),
            max_kinematic=self.max('kinematic'),
            max_flow_residual=self.max('flow_residual'),
            max_membrane_residual=self.max('membrane_residual'),
            max_bending_residual=self.max('bending_residual'),
            sup_sigma_rate=float(sigma_rate.max()),
            sup_v3_rate=float(v3_rate.max()),
            l2_sigma_rate=float(np.sqrt(delta * np.sum(sigma_rate**2))),
            l2_v3_rate=float(np.sqrt(delta * np.sum(v3_rate**2))),
            max_normality=self.max('normality'),
            lnp_lhs=rec[-1].lnp_lhs,
            lnp_rhs=rec[-1].lnp_rhs,
            newton_iters=int(self.column('newton_iters').sum()))

    def failures(self) -> List[str]:
        """Violated per-step properties, as human readable strings."""
        out = []
        for r in self.records:
            if r.slack < -SLACK_TOL * r.scale:
                out.append(f'step {r.step}: energy slack {r.slack:.3e} < '
                           f'-{SLACK_TOL:g}*{r.scale:.3e}')
            if r.kinematic > RESIDUAL_TOL:
                out.append(f'step {r.step}: kinematic residual '
                           f'{r.kinematic:.3e}')
            if r.flow_residual > RESIDUAL_TOL:
                out.append(f'step {r.step}: flow residual '
                           f'{r.flow_residual:.3e}')
            if r.flowgap_max_density > r.flowgap_bound * (1 + 1e-10):
                out.append(f'step {r.step}: flow gap density '
                           f'{r.flowgap_max_density:.3e} above alpha0/N')
            if r.flowgap_identity > IDENTITY_TOL:
                out.append(f'step {r.step}: flow gap identity error '
                           f'{r.flowgap_identity:.3e}')
            if r.lnp_lhs > r.lnp_rhs * (1 + 1e-10) + 1e-300:
                out.append(f'step {r.step}: dissipation power bound fails')
        dissipation = self.column('dissipation')
        if np.any(np.diff(dissipation) < -1e-14 * (1 + dissipation.max())):
            out.append('cumulative dissipation decreases')
        return out

    def rate_failures(self, factor: float = 2.0,
                      floor: float = 1e-10) -> List[str]:
        """Per-step quotients ‖(σⁱ − σ^{i−1})/δ‖ and ‖(v₃ⁱ − v₃^{i−1})/δ‖
        growing beyond ``factor`` times their median. Meaningful only for
        loads that do not depend on time."""
        out = []
        for name in ('sigma_rate', 'v3_rate'):
            values = self.column(name)[1:]
            if values.size == 0:
                continue
            limit = factor * float(np.median(values)) + floor
            worst = int(np.argmax(values))
            if values[worst] > limit:
                out.append(f'step {self.records[worst + 1].step}: {name} '
                           f'{values[worst]:.3e} exceeds {factor:g} x median '
                           f'({limit:.3e})')
        return out

    def assert_ok(self, static_loads: bool = False):
        failures = self.failures()
        if static_loads:
            failures += self.rate_failures()
        if failures:
            raise AcceptanceError(
                f'{len(failures)} diagnostic check(s) failed', failures)


class StepMonitor:
    """Computes a :class:`StepRecord` for every accepted step.

    Args:
        scenario (Scenario): The evolved scenario.
        seed (PlateState): State 0 as built by ``seed_history``.
    """

    def __init__(self, scenario: 'Scenario', seed: PlateState):
        self.scenario = scenario
        self.grid = scenario.grid
        self.delta = scenario.delta
        self.log = DiagnosticsLog()
        self._work_cum = 0.0
        self._dissipation_cum = 0.0
        self._lnp_lhs = 0.0
        self._scale = 1.0

        grid = self.grid
        kinetic = 0.5 * integrate_nodal(seed.v3**2, grid)
        elastic = 0.5 * pair_layered(seed.e.values, seed.sigma.values, grid)
        self.seed_energy = kinetic + elastic
        self._scale = 1.0 + self.seed_energy
        record = StepRecord(
            step=int(seed.step),
            time=float(seed.time),
            kinetic=kinetic,
            elastic=elastic,
            seed=self.seed_energy,
            scale=self._scale,
            flowgap_bound=scenario.trunc.alpha0 / scenario.trunc.N)
        sigma_prev = getattr(seed, 'sigma_prev', None)
        if sigma_prev is not None:
            diff = seed.sigma.values - sigma_prev.values
            record.sigma_rate = np.sqrt(pair_layered(diff, diff,
                                                     grid)) / self.delta
        p_prev = getattr(seed, 'p_prev', None)
        if p_prev is not None:
            dp = seed.p.values - p_prev.values
            rate = dpsi_lambda(seed.sigma.values, scenario.trunc)
            record.flow_residual = float(
                np.abs(dp - self.delta * rate).max() /
                (1.0 + np.abs(seed.p.values).max()))
            record.normality = _normality_residual(dp, seed.sigma.values,
                                                   seed.p.values)
        record.excess = float(
            np.maximum(norm_r(seed.sigma.values) - scenario.trunc.alpha0,
                       0.0).max())
        self.log.append(record)

    def record(self, prev: PlateState, cur: PlateState) -> StepRecord:
        S, grid, delta = self.scenario, self.grid, self.delta
        P = S.trunc
        alpha0, N = P.alpha0, P.N
        i = int(cur.step)
        sigma = cur.sigma.values
        rate = dpsi_lambda(sigma, P)

        rec = StepRecord(step=i, time=float(cur.time),
                         newton_iters=int(getattr(cur, 'newton_iters', 0)))

        # energy balance
        rec.kinetic = 0.5 * integrate_nodal(cur.v3**2, grid)
        rec.elastic = 0.5 * pair_layered(cur.e.values, sigma, grid)
        power = pair_layered(sigma, rate, grid)
        self._dissipation_cum += delta * power
        rec.dissipation = self._dissipation_cum

        accel = (cur.u.u3 - 2.0 * cur.u3_prev + cur.u3_prev2) / delta**2
        dw = S.w_at(i) - S.w_at(i - 1)
        du = cur.u - prev.u
        f, g = S.loads_at(i)
        rec.work_inertial = integrate_nodal(accel * dw.u3, grid)
        rec.work_stress = pair_layered(sigma, kl_strain(dw, grid).values,
                                       grid)
        rec.work_g = integrate_nodal(g * (du.u3 - dw.u3), grid)
        rec.work_f = integrate_nodal(
            np.sum(f * (du.ubar - dw.ubar), axis=-1), grid)
        self._work_cum += (rec.work_inertial + rec.work_stress + rec.work_g +
                           rec.work_f)
        rec.work = self._work_cum
        rec.rho_power = pair_layered(S.rho_at(i), rate, grid)
        rec.seed = self.seed_energy
        supply = self.seed_energy + self._work_cum
        stored = rec.kinetic + rec.elastic + rec.dissipation
        rec.slack = supply - stored
        self._scale = max(self._scale, 1.0 + abs(supply), 1.0 + stored)
        rec.scale = self._scale

        # stress constraint and flow rule
        s = norm_r(sigma)
        rec.excess = float(np.maximum(s - alpha0, 0.0).max())
        dp = cur.p.values - prev.p.values
        pdot = dp / delta
        density = alpha0 * norm_dual(pdot) - frobenius_inner(sigma, pdot)
        rec.flowgap = integrate_layered(density, grid)
        rec.flowgap_abs = integrate_layered(np.abs(density), grid)
        rec.flowgap_max_density = float(density.max())
        rec.flowgap_bound = alpha0 / N
        rec.flowgap_identity = _gap_identity_error(sigma, rate, s, P)

        # Euler–Lagrange residuals
        strain = kl_strain(cur.u, grid).values
        rec.kinematic = float(
            np.abs(strain - cur.e.values - cur.p.values).max() /
            (1.0 + np.abs(strain).max()))
        rec.flow_residual = float(
            np.abs(dp - delta * rate).max() /
            (1.0 + np.abs(cur.p.values).max()))
        rec.membrane_residual, rec.bending_residual = \
            _equilibrium_residuals(S, sigma, accel, f, g)

        # time quotients
        dsigma = sigma - prev.sigma.values
        rec.sigma_rate = np.sqrt(pair_layered(dsigma, dsigma, grid)) / delta
        rec.v3_rate = np.sqrt(integrate_nodal(
            (cur.v3 - prev.v3)**2, grid)) / delta

        rec.normality = _normality_residual(dp, sigma, cur.p.values)
        self._lnp_lhs += delta * integrate_layered(
            frobenius_norm(rate)**(N / (N - 1.0)), grid)
        rec.lnp_lhs = self._lnp_lhs
        rec.lnp_rhs = self._dissipation_cum / alpha0
        self.log.append(rec)
        return rec


def _gap_identity_error(sigma, rate, s, P) -> float:
    """Max relative deviation of α₀|Dψ_λ(σ)|_* − σ:Dψ_λ(σ) from
    (s/α₀)^{N−1}(α₀ − s) where the truncation is inactive."""
    mask = s < P.lam
    if not mask.any():
        return 0.0
    alpha0, N = P.alpha0, P.N
    lhs_a = alpha0 * norm_dual(rate)
    lhs_b = frobenius_inner(sigma, rate)
    expected = (s / alpha0)**(N - 1) * (alpha0 - s)
    err = np.abs(lhs_a - lhs_b - expected) / (1.0 + lhs_a + np.abs(lhs_b))
    return float(err[mask].max())


def _equilibrium_residuals(S, sigma, accel, f, g):
    grid = S.grid
    ops = grid.operators
    n = grid.num_nodes
    free = ~grid.fixed_dofs
    membrane = (ops.weak_divergence(moment_zero(sigma, grid)) + f).reshape(
        -1, 2)
    bending = (accel - ops.weak_divdiv(moment_first(sigma, grid)) / 12.0 -
               g).ravel()
    mem = np.concatenate(
        [membrane[:, 0][free[:n]], membrane[:, 1][free[n:2 * n]]])
    ben = bending[free[2 * n:]]
    return (float(np.abs(mem).max(initial=0.0)),
            float(np.abs(ben).max(initial=0.0)))


def _normality_residual(dp, sigma, p) -> float:
    """Largest relative distance of lift_dual(Δp) from the line spanned by
    σ, over points whose increment is resolved above roundoff."""
    lifted = lift_dual(dp)
    size = frobenius_norm(lifted)
    resolved = (size > 1e-6 * size.max()) & (
        frobenius_norm(dp) > 1e-12 * (1.0 + frobenius_norm(p)))
    if not resolved.any():
        return 0.0
    lifted, sig, size = lifted[resolved], sigma[resolved], size[resolved]
    coef = frobenius_inner(lifted, sig) / np.maximum(
        frobenius_inner(sig, sig), 1e-300)
    return float((frobenius_norm(lifted - coef[..., None] * sig) / size).max())
