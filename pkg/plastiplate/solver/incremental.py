"""Implicit incremental time stepping.

Step i minimizes over kinematically admissible u with u = w_i on γ_d

    ½‖(u₃ − 2u₃^{i−1} + u₃^{i−2})/δ‖² + ½⟨A_r σ, σ⟩ + δ Ψ*_λ((p − p^{i−1})/δ)
        − ⟨f_i, ū⟩ − ⟨g_i, u₃⟩.

Eliminating (σ, p) through the return map at η = Eu − p^{i−1} leaves a
smooth convex function of the displacement alone, whose gradient is the
residual below and whose Hessian is the consistent tangent; Newton with
backtracking on that function solves the step.
"""
import logging
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from rich.progress import track
from scipy.sparse.linalg import LinearOperator, cg, spsolve

from plastiplate.diagnostics.monitor import DiagnosticsLog, StepMonitor
from plastiplate.material import (apply_A, apply_C, elastic_tangent,
                                  incremental_energy_density,
                                  plastic_increment, return_map)
from plastiplate.ops.kinematics import kl_strain
from plastiplate.ops.potentials import dpsi_lambda
from plastiplate.structures import (KLDisplacement, LayeredField, PlateState,
                                    Trajectory, make_state)
from plastiplate.utils import (DofOrder, InitialGuess, LinearSolver,
                               NewtonError, TimeCounter, WarnOnlyOnce,
                               get_root_logger)
from .options import SolverOptions
from .scenario import Scenario

ARMIJO_C = 1e-4


class _Context(NamedTuple):
    """Data of step i that does not depend on the unknown."""
    step: int
    p_prev: np.ndarray  # (layers, nodes, 3)
    u3_prev: np.ndarray
    u3_prev2: np.ndarray
    fext: np.ndarray
    boundary: np.ndarray


class _Trial(NamedTuple):
    U: np.ndarray
    sigma: np.ndarray  # (layers, nodes, 3)
    tangent: np.ndarray  # (layers, nodes, 3, 3), Mandel
    internal: np.ndarray
    residual: np.ndarray
    objective: float


def _to_points(values: np.ndarray) -> np.ndarray:
    ny, nx, nl, _ = values.shape
    return np.ascontiguousarray(
        values.transpose(2, 0, 1, 3).reshape(nl, ny * nx, 3))


class IncrementalSolver:
    """Time stepper for one :class:`Scenario`.

    Args:
        scenario (Scenario): Problem data.
        opts (SolverOptions, optional): Newton options.
        logger (logging.Logger, optional): Defaults to the package logger.
    """

    def __init__(self,
                 scenario: Scenario,
                 opts: Optional[SolverOptions] = None,
                 logger: Optional[logging.Logger] = None):
        self.scenario = scenario
        self.opts = opts if opts is not None else SolverOptions()
        self.logger = logger if logger is not None else get_root_logger()
        grid = scenario.grid
        self.grid = grid
        self.op = grid.operators
        self.n = grid.num_nodes
        self.fixed = grid.fixed_dofs
        free = grid.free_dofs
        if self.opts.order is DofOrder.REVERSED:
            free = free[::-1].copy()
        self.free = free
        self.node_weights = self.op.weights
        self.mass = np.concatenate([np.zeros(2 * self.n), self.node_weights])

    @property
    def delta(self) -> float:
        return self.scenario.delta

    def _layered(self, points: np.ndarray) -> LayeredField:
        return LayeredField.from_points(points, self.grid.ny, self.grid.nx)

    # ------------------------------------------------------------------
    # seeding
    # ------------------------------------------------------------------
    def seed_history(self) -> PlateState:
        """State i = 0 with the synthetic slices i = −1, −2.

        u₃⁻¹ = u₃⁰ − δ v₀₃, u₃⁻² = u₃⁻¹ − δ v₀₃, p₀ = Eu₀ − A_r σ₀,
        σ⁻¹ = σ₀ − δ C_r(E v₀ − Dψ_λ(σ₀)) and p⁻¹ = p₀ − δ Dψ_λ(σ₀). The
        step monitor reads σ⁻¹ and p⁻¹ for the time quotients of step 0.
        """
        S, delta = self.scenario, self.delta
        E, P = S.elasticity, S.trunc
        init = S.init
        u0, v0 = init.u0, init.v0
        sigma0 = np.asarray(init.sigma0, dtype=np.float64)

        u3_prev = u0.u3 - delta * v0.u3
        u3_prev2 = u3_prev - delta * v0.u3
        e0 = apply_A(sigma0, E)
        p0 = kl_strain(u0, self.grid).values - e0
        rate0 = dpsi_lambda(sigma0, P)
        sigma_prev = sigma0 - delta * apply_C(
            kl_strain(v0, self.grid).values - rate0, E)
        p_prev = p0 - delta * rate0
        return make_state(
            0,
            0.0,
            u0.clone(),
            sigma0,
            e0,
            p0,
            u3_prev,
            u3_prev2,
            np.array(v0.u3, dtype=np.float64),
            sigma_prev=sigma_prev,
            p_prev=p_prev,
            newton_iters=0,
            residual=0.0)

    # ------------------------------------------------------------------
    # Newton machinery
    # ------------------------------------------------------------------
    def _context(self, hist: PlateState, i: int) -> _Context:
        S = self.scenario
        return _Context(
            step=i,
            p_prev=_to_points(hist.p.values),
            u3_prev=hist.u.u3.ravel(),
            u3_prev2=hist.u3_prev.ravel(),
            fext=S.external_force(i),
            boundary=S.w_at(i).to_vector())

    def _evaluate(self, U: np.ndarray, ctx: _Context) -> _Trial:
        S, opts, delta = self.scenario, self.opts, self.delta
        eta = self.op.layer_strains(U) - ctx.p_prev
        sigma, tangent = return_map(
            eta,
            delta,
            S.elasticity,
            S.trunc,
            tol=opts.return_map_tol,
            max_iter=opts.return_map_max_iter,
            tangent=True)
        internal = self.op.internal_force(sigma)
        jump = U[2 * self.n:] - 2.0 * ctx.u3_prev + ctx.u3_prev2
        residual = internal - ctx.fext
        residual[2 * self.n:] += self.node_weights * jump / delta**2
        density = incremental_energy_density(eta, sigma, delta, S.elasticity,
                                             S.trunc)
        objective = (
            0.5 * float(np.sum(self.node_weights * jump**2)) / delta**2 +
            float(
                np.einsum('l,ln,n->', self.op.layer_weights, density,
                          self.node_weights)) - float(ctx.fext @ U))
        return _Trial(U, sigma, tangent, internal, residual, objective)

    @TimeCounter.count_time('assemble_tangent')
    def _stiffness(self, moduli: np.ndarray) -> sp.csr_matrix:
        K = self.op.tangent(moduli) + sp.diags(self.mass / self.delta**2)
        return K.tocsr()[self.free][:, self.free]

    @TimeCounter.count_time('linear_solve')
    def _solve(self, K: sp.csr_matrix, rhs: np.ndarray) -> np.ndarray:
        opts = self.opts
        if opts.linear is LinearSolver.CG:
            diag = K.diagonal()
            precond = LinearOperator(K.shape, matvec=lambda x: x / diag)
            x, info = cg(
                K,
                rhs,
                rtol=opts.cg_rtol,
                atol=0.0,
                maxiter=opts.cg_max_iter,
                M=precond)
            if info == 0:
                return x
            WarnOnlyOnce.warn(
                self.logger, f'CG stopped with info={info}, '
                'falling back to the direct solver')
        return spsolve(K.tocsc(), rhs)

    def _line_search(self, trial: _Trial, dU: np.ndarray,
                     ctx: _Context) -> Tuple[_Trial, float]:
        opts = self.opts
        if not opts.line_search:
            return self._evaluate(trial.U + dU, ctx), 1.0
        slope = float(trial.residual @ dU)
        slack = 1e-13 * (1.0 + abs(trial.objective))
        alpha = 1.0
        for halving in range(opts.max_halvings + 1):
            candidate = self._evaluate(trial.U + alpha * dU, ctx)
            if candidate.objective <= trial.objective + \
                    ARMIJO_C * alpha * slope + slack:
                if halving:
                    WarnOnlyOnce.warn(
                        self.logger, 'line search shortened a Newton step '
                        f'(first at step {ctx.step})')
                return candidate, alpha
            alpha *= 0.5
        WarnOnlyOnce.warn(
            self.logger, f'line search exhausted {opts.max_halvings} '
            f'halvings at step {ctx.step}, keeping the shortest step')
        return candidate, 2.0 * alpha

    def _initial_guess(self, hist: PlateState, ctx: _Context) -> np.ndarray:
        guess = self.opts.guess
        if guess is InitialGuess.ZERO:
            U = np.zeros(3 * self.n)
        else:
            U = hist.u.to_vector()
        U[self.fixed] = ctx.boundary[self.fixed]
        return U

    def objective(self, hist: PlateState, i: int, U: np.ndarray) -> float:
        """The reduced incremental energy of step i at displacement ``U``."""
        return self._evaluate(np.asarray(U, np.float64),
                              self._context(hist, i)).objective

    @TimeCounter.count_time('newton_step')
    def step(self, hist: PlateState, i: int) -> PlateState:
        """Advance from the state i − 1 (``hist``) to step i.

        Raises:
            NewtonError: When the iteration does not converge or ends above
                the incremental energy of its starting point.
        """
        opts, delta = self.opts, self.delta
        ctx = self._context(hist, i)
        free = self.free

        trial = self._evaluate(self._initial_guess(hist, ctx), ctx)
        start_objective = trial.objective
        if opts.guess is InitialGuess.ELASTIC:
            moduli = elastic_tangent(self.scenario.elasticity,
                                     trial.tangent.shape[:2])
            dU = np.zeros_like(trial.U)
            dU[free] = self._solve(
                self._stiffness(moduli), -trial.residual[free])
            trial = self._evaluate(trial.U + dU, ctx)

        res_scale = 1.0 + np.abs(ctx.fext).max()
        history = [float(np.abs(trial.residual[free]).max(initial=0.0))]
        converged = False
        for it in range(1, opts.max_iter + 1):
            dU = np.zeros_like(trial.U)
            dU[free] = self._solve(
                self._stiffness(trial.tangent), -trial.residual[free])
            trial, alpha = self._line_search(trial, dU, ctx)
            increment = alpha * float(np.abs(dU).max(initial=0.0))
            res = float(np.abs(trial.residual[free]).max(initial=0.0))
            history.append(res)
            self.logger.debug(f'step {i} newton {it}: residual {res:.3e} '
                              f'increment {increment:.3e} alpha {alpha:g}')
            inc_tol = opts.tol_increment * opts.tol_scale * (
                1.0 + np.abs(trial.U).max())
            res_tol = opts.tol_residual * opts.tol_scale * (
                res_scale + np.abs(trial.internal).max())
            if increment < inc_tol and res < res_tol:
                converged = True
                break
        if not converged:
            raise NewtonError(
                f'Newton did not converge in {opts.max_iter} iterations at '
                f'step {i}', history)
        if trial.objective > start_objective + 1e-10 * (
                1.0 + abs(start_objective)):
            raise NewtonError(
                f'incremental energy increased at step {i}: '
                f'{start_objective:.6e} -> {trial.objective:.6e}', history)

        S = self.scenario
        p = ctx.p_prev + plastic_increment(trial.sigma, delta, S.trunc)
        e = apply_A(trial.sigma, S.elasticity)
        u = KLDisplacement.from_vector(trial.U, self.grid.shape)
        state = make_state(
            i,
            S.time.time(i),
            u,
            self._layered(trial.sigma),
            self._layered(e),
            self._layered(p),
            hist.u.u3,
            hist.u3_prev,
            (u.u3 - hist.u.u3) / delta,
            newton_iters=it,
            residual=history[-1])
        if opts.log_interval and i % opts.log_interval == 0:
            self.logger.info(
                f'[{S.name}] step {i}/{S.time.k} t={state.time:.4g} '
                f'newton={it} residual={history[-1]:.3e}')
        return state

    def evolve(self, stride: int = 1) -> Tuple[Trajectory, DiagnosticsLog]:
        """Run all k steps; every step is diagnosed, every ``stride``-th
        state is retained."""
        S = self.scenario
        state = self.seed_history()
        trajectory = Trajectory(stride)
        trajectory.keep(state)
        monitor = StepMonitor(S, state)
        steps = range(1, S.time.k + 1)
        if self.opts.show_progress:
            steps = track(steps, description=f'Evolve {S.name}')
        for i in steps:
            new = self.step(state, i)
            monitor.record(state, new)
            trajectory.keep(new, last=i == S.time.k)
            state = new
        log = monitor.log
        self.logger.info(
            f'[{S.name}] N={S.trunc.N} lambda={S.trunc.lam:g}: {S.time.k} '
            f'steps, max excess {log.max("excess"):.3e}, '
            f'min slack {log.min("slack"):.3e}')
        return trajectory, log


def seed_history(S: Scenario) -> PlateState:
    return IncrementalSolver(S).seed_history()


def step(S: Scenario,
         hist: PlateState,
         i: int,
         opts: Optional[SolverOptions] = None) -> PlateState:
    return IncrementalSolver(S, opts).step(hist, i)


def evolve(S: Scenario,
           opts: Optional[SolverOptions] = None,
           stride: int = 1) -> Tuple[Trajectory, DiagnosticsLog]:
    return IncrementalSolver(S, opts).evolve(stride)
