"""Dense brute-force solution of one incremental step.

The stress is eliminated through σ = C_r(Eu − p), so the unknowns are the
free displacement dofs and the plastic strain of every (layer, node), and
the step energy

    ½ Σ W (u₃ − 2u₃^{i−1} + u₃^{i−2})²/δ²
        + Σ_ℓ w_ℓ Σ W [½ C_r(Eu − p):(Eu − p) + δ F_λ((p − p^{i−1})/δ)]
        − ⟨F_ext, U⟩

is minimized with torch's L-BFGS, and the minimizer is finished by Newton
on the stationarity system in (u, τ), τ being the stress that drives the
flow rate. None of the return map, the consistent tangent or
the sparse assembly of the main solver is used.
"""
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
import torch
from torch import Tensor

from plastiplate.ops.potentials import dF_lambda
from plastiplate.ops.sym2 import FROBENIUS_WEIGHTS, MANDEL_SCALE
from plastiplate.structures import KLDisplacement, LayeredField, PlateState
from plastiplate.utils import OracleError, get_root_logger

MAX_UNKNOWNS = 200


class OracleResult(NamedTuple):
    u: KLDisplacement
    sigma: LayeredField
    p: LayeredField
    objective: float
    stationarity: float
    iterations: int
    history: List[float]


def _torch_F_lambda(y: Tensor, N: int, alpha0: float, lam: float) -> Tensor:
    """F_λ on a (..., 3) tensor; differentiable everywhere, with zero
    gradient at y = 0."""
    w = y.new_tensor(FROBENIUS_WEIGHTS)
    tr = y[..., 0] + y[..., 1]
    q = torch.sum(w * y * y, dim=-1) + tr * tr
    q = torch.clamp_min(q, 1e-300)
    head = alpha0 * (N - 1) / N * torch.clamp_max(
        q**(N / (2.0 * (N - 1))), (lam / alpha0)**N)
    tail = alpha0**(N - 1) / (2.0 * lam**(N - 2)) * torch.relu(
        q - (lam / alpha0)**(2 * N - 2))
    return head + tail


class DenseIncrementalProblem:
    """The step-i energy of a tiny scenario as a dense torch function.

    Args:
        scenario (Scenario): Problem data; at most ``MAX_UNKNOWNS`` unknowns.
        hist (PlateState): The converged state of step i − 1.
        i (int): Step index.
    """

    def __init__(self, scenario, hist: PlateState, i: int):
        grid = scenario.grid
        self.scenario = scenario
        self.grid = grid
        self.step = int(i)
        op = grid.operators
        n = grid.num_nodes
        self.n = n
        self.num_layers = grid.num_layers
        self.free = np.asarray(grid.free_dofs)
        self.num_unknowns = self.free.size + 3 * n * self.num_layers
        if self.num_unknowns > MAX_UNKNOWNS:
            raise OracleError(
                f'{self.num_unknowns} unknowns exceed the dense limit '
                f'{MAX_UNKNOWNS}')

        def t(a):
            return torch.as_tensor(np.asarray(a), dtype=torch.float64)

        self.delta = scenario.delta
        self.G, self.H = t(op.G.toarray()), t(op.H.toarray())
        self.W = t(op.weights)
        self.layer_weights = t(grid.layer_weights)
        self.x3 = t(grid.x3)
        self.mandel = t(MANDEL_SCALE)
        self.frob = t(FROBENIUS_WEIGHTS)

        base = scenario.w_at(i).to_vector()
        base[self.free] = 0.0
        self.base = t(base)
        select = np.zeros((3 * n, self.free.size))
        select[self.free, np.arange(self.free.size)] = 1.0
        self.select = t(select)

        self.p_prev = t(hist.p.to_points())
        self.u3_prev = t(hist.u.u3.ravel())
        self.u3_prev2 = t(hist.u3_prev.ravel())
        self.fext = t(scenario.external_force(i))
        self.mu, self.ell = scenario.elasticity.mu, scenario.elasticity.ell
        P = scenario.trunc
        self.N, self.alpha0, self.lam = P.N, P.alpha0, P.lam

    # ------------------------------------------------------------------
    def split(self, x: Tensor):
        nf = self.free.size
        U = self.base + self.select @ x[:nf]
        p = x[nf:].reshape(self.num_layers, self.n, 3)
        return U, p

    def pack(self, u: KLDisplacement, p: np.ndarray) -> Tensor:
        """Unknown vector of a displacement and (layers, nodes, 3) plastic
        strains."""
        U = u.to_vector()[self.free]
        return torch.as_tensor(
            np.concatenate([U, np.asarray(p).ravel()]), dtype=torch.float64)

    def strains(self, U: Tensor) -> Tensor:
        membrane = (self.G @ U).reshape(3, self.n).T
        bending = (self.H @ U).reshape(3, self.n).T
        layers = membrane[None] - self.x3[:, None, None] * bending[None]
        return layers / self.mandel

    def stress(self, elastic: Tensor) -> Tensor:
        tr = elastic[..., 0] + elastic[..., 1]
        iso = torch.stack([tr, tr, torch.zeros_like(tr)], dim=-1)
        return 2.0 * self.mu * elastic + self.ell * iso

    def objective(self, x: Tensor) -> Tensor:
        U, p = self.split(x)
        elastic = self.strains(U) - p
        sigma = self.stress(elastic)
        energy = 0.5 * torch.sum(self.frob * sigma * elastic, dim=-1)
        rate = (p - self.p_prev) / self.delta
        energy = energy + self.delta * _torch_F_lambda(rate, self.N,
                                                       self.alpha0, self.lam)
        bulk = torch.einsum('l,ln,n->', self.layer_weights, energy, self.W)
        jump = U[2 * self.n:] - 2.0 * self.u3_prev + self.u3_prev2
        inertia = 0.5 * torch.sum(self.W * jump * jump) / self.delta**2
        return inertia + bulk - self.fext @ U

    def objective_at(self, u: KLDisplacement, p: np.ndarray) -> float:
        with torch.no_grad():
            return float(self.objective(self.pack(u, p)))

    def initial_point(self, hist: PlateState) -> Tensor:
        u = hist.u.clone()
        U = u.to_vector()
        fixed = self.grid.fixed_dofs
        U[fixed] = self.base.numpy()[fixed]
        u = KLDisplacement.from_vector(U, self.grid.shape)
        return self.pack(u, hist.p.to_points())

    # (u, τ) coordinates of the stationarity solve
    def flow_rate(self, tau: Tensor) -> Tensor:
        """Dψ_λ(τ) = c(|τ|_r)·dev_r τ, written with torch ops."""
        tr = tau[..., 0] + tau[..., 1]
        s2 = torch.clamp_min(
            torch.sum(self.frob * tau * tau, dim=-1) - tr * tr / 3.0, 0.0)
        c = torch.clamp_max(s2, self.lam**2)**(
            (self.N - 2) / 2.0) / self.alpha0**(self.N - 1)
        iso = torch.stack([tr, tr, torch.zeros_like(tr)], dim=-1) / 3.0
        return c[..., None] * (tau - iso)

    def energy_point(self, z: Tensor) -> Tensor:
        nf = self.free.size
        tau = z[nf:].reshape(self.num_layers, self.n, 3)
        p = self.p_prev + self.delta * self.flow_rate(tau)
        return torch.cat([z[:nf], p.reshape(-1)])

    def stress_point(self, x: Tensor) -> Tensor:
        nf = self.free.size
        _, p = self.split(x.detach())
        rate = ((p - self.p_prev) / self.delta).numpy()
        tau = dF_lambda(rate, self.scenario.trunc)
        return torch.cat([x[:nf].detach(), torch.as_tensor(tau).reshape(-1)])

    def objective_in_stress(self, z: Tensor) -> float:
        with torch.no_grad():
            return float(self.objective(self.energy_point(z)))

    def stationarity(self, z: Tensor) -> Tensor:
        """(∂Φ/∂u at fixed p, τ − σ) at p = p^{i−1} + δ Dψ_λ(τ)."""
        track = z.requires_grad
        if not track:
            z = z.detach().requires_grad_(True)
        nf = self.free.size
        u_free = z[:nf]
        x = self.energy_point(z)
        value = self.objective(torch.cat([u_free, x[nf:]]))
        (grad_u, ) = torch.autograd.grad(value, u_free, create_graph=track)
        U, p = self.split(x)
        sigma = self.stress(self.strains(U) - p)
        residual = torch.cat([grad_u, z[nf:] - sigma.reshape(-1)])
        return residual if track else residual.detach()

    def stationarity_tol(self, z: Tensor, value: float, tol: float) -> float:
        tau = z[self.free.size:]
        scale = float(tau.abs().max()) if tau.numel() else 0.0
        return tol * (1.0 + abs(value) + scale)

    def result(self, x: Tensor, stationarity: float, iterations: int,
               history: List[float]) -> OracleResult:
        with torch.no_grad():
            U, p = self.split(x)
            sigma = self.stress(self.strains(U) - p)
            value = float(self.objective(x))
        ny, nx = self.grid.shape
        return OracleResult(
            KLDisplacement.from_vector(U.numpy().copy(), self.grid.shape),
            LayeredField.from_points(sigma.numpy().copy(), ny, nx),
            LayeredField.from_points(p.numpy().copy(), ny, nx), value,
            stationarity, iterations, history)


def _value(problem: DenseIncrementalProblem, x: Tensor) -> float:
    with torch.no_grad():
        return float(problem.objective(x))


def _lbfgs(problem: DenseIncrementalProblem, x: Tensor, max_iter: int,
           history: List[float]) -> Tuple[Tensor, int]:
    """Plain descent on the (u, p) energy; it stalls near zero flow rates,
    so it only supplies the starting point of the stationarity solve."""
    x = x.clone().requires_grad_(True)
    optimizer = torch.optim.LBFGS([x],
                                  lr=1.0,
                                  max_iter=1,
                                  history_size=50,
                                  tolerance_grad=0.0,
                                  tolerance_change=0.0,
                                  line_search_fn='strong_wolfe')

    def closure():
        optimizer.zero_grad()
        value = problem.objective(x)
        value.backward()
        return value

    best = x.detach().clone()
    iterations = 0
    for iterations in range(1, max_iter + 1):
        optimizer.step(closure)
        value = _value(problem, x)
        if not value < history[-1]:
            break
        best = x.detach().clone()
        history.append(value)
    return best, iterations


def brute_minimize(problem: DenseIncrementalProblem,
                   tol: float = 1e-11,
                   max_iter: int = 200,
                   x0: Optional[Tensor] = None,
                   newton_steps: int = 50) -> OracleResult:
    """Minimize the dense step energy.

    L-BFGS on (u, p) runs first. The minimizer is then finished by Newton
    on the stationarity system in (u, τ) with p = p^{i−1} + δ Dψ_λ(τ),
    whose p-block τ − σ is the gradient of the energy in p; the Jacobian
    comes from autograd and stays invertible at zero flow rate. Steps are
    backtracked on the energy, and ``history`` holds the energy of every
    iterate that lowered it.

    Raises:
        OracleError: If the stationarity residual is still above
            ``tol·(1 + |Φ| + max|τ|)`` after ``newton_steps`` steps.
    """
    logger = get_root_logger()
    x = (x0 if x0 is not None else torch.zeros(
        problem.num_unknowns, dtype=torch.float64)).detach().clone()
    history = [_value(problem, x)]
    x, iterations = _lbfgs(problem, x, max_iter, history)

    z = problem.stress_point(x)
    value = problem.objective_in_stress(z)
    residual = problem.stationarity(z)
    for _ in range(newton_steps):
        size = float(residual.abs().max())
        if size <= problem.stationarity_tol(z, value, tol):
            break
        jac = torch.autograd.functional.jacobian(problem.stationarity, z)
        try:
            direction = -torch.linalg.solve(jac, residual)
        except RuntimeError:
            direction = -torch.linalg.lstsq(jac, residual[:, None]).solution[:,
                                                                             0]
        slack = 1e-13 * (1.0 + abs(value))
        alpha, accepted = 1.0, False
        for _ in range(40):
            trial = z + alpha * direction
            trial_value = problem.objective_in_stress(trial)
            trial_residual = problem.stationarity(trial)
            lowered = trial_value <= value
            # at roundoff level the energy is flat; the residual decides
            if lowered or (trial_value <= value + slack and
                           float(trial_residual.abs().max()) < size):
                z, value, residual = trial, trial_value, trial_residual
                accepted = True
                if value <= history[-1]:
                    history.append(value)
                break
            alpha *= 0.5
        iterations += 1
        if not accepted:
            break

    stationarity = float(residual.abs().max())
    x = problem.energy_point(z)
    logger.debug(f'dense oracle: {iterations} iterations, objective '
                 f'{value:.12e}, stationarity {stationarity:.3e}')
    if stationarity > problem.stationarity_tol(z, value, tol):
        raise OracleError(
            f'dense oracle stopped with stationarity residual '
            f'{stationarity:.3e} after {iterations} iterations')
    return problem.result(x, stationarity, iterations, history)
