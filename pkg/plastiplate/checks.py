"""Randomized property suite run by ``plastiplate check``.

Every check draws its cases from one seeded generator and reports the
worst error it saw against its tolerance; ``tol_scale`` loosens all
tolerances at once.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from plastiplate.ops.kinematics import (from_moments, moment_first,
                                        moment_zero, perp_part)
from plastiplate.ops.potentials import (NortonHoffParams, TruncationParams,
                                        F_lambda, dF_lambda, dphi_N,
                                        dpsi_lambda, psi_lambda)
from plastiplate.ops.sym2 import (FROBENIUS_WEIGHTS, YieldSurface, dev_r,
                                  frobenius_inner, frobenius_norm, inner_r,
                                  lift_dual, norm_dual, norm_r, random_sym2,
                                  support_Hr)
from plastiplate.structures import PlateGrid
from plastiplate.utils import AcceptanceError, TimeCounter, get_root_logger

EXPONENTS = (4, 6, 8)
LAMBDAS = (0.5, 1.0, 2.0, 10.0)


@dataclass
class CheckResult:
    name: str
    cases: int
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst)) and self.worst <= self.tol


@dataclass
class PropertyReport:
    seed: int
    results: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, cases: int, worst: float, tol: float):
        self.results.append(CheckResult(name, cases, float(worst), tol))

    def failures(self) -> List[str]:
        return [
            f'{r.name}: worst {r.worst:.3e} > tol {r.tol:.1e}'
            for r in self.results if not r.passed
        ]

    @property
    def passed(self) -> bool:
        return not self.failures()

    def as_dict(self) -> dict:
        return dict(
            seed=self.seed,
            passed=self.passed,
            checks=[
                dict(name=r.name, cases=r.cases, worst=r.worst, tol=r.tol,
                     passed=r.passed) for r in self.results
            ])

    def table(self) -> str:
        from prettytable import PrettyTable
        t = PrettyTable()
        t.title = f'Property suite (seed {self.seed})'
        t.field_names = ['check', 'cases', 'worst', 'tol', 'ok']
        t.align['check'] = 'l'
        for r in self.results:
            t.add_row([r.name, r.cases, f'{r.worst:.3e}', f'{r.tol:.1e}',
                       'yes' if r.passed else 'NO'])
        return t.get_string()

    def assert_ok(self):
        failures = self.failures()
        if failures:
            raise AcceptanceError(
                f'{len(failures)} property checks failed: ' +
                '; '.join(failures), failures)


def _rel(a, b) -> float:
    """max |a − b| / max(1, |b|), entrywise over the trailing axis."""
    a, b = np.asarray(a, np.float64), np.asarray(b, np.float64)
    scale = np.maximum(1.0, np.abs(b))
    return float(np.max(np.abs(a - b) / scale, initial=0.0))


# ----------------------------------------------------------------------
# tensor algebra
# ----------------------------------------------------------------------
def check_tensor(report: PropertyReport, rng: np.random.Generator,
                 samples: int, tol_scale: float = 1.0):
    xi = random_sym2(rng, samples, scale=2.0)
    zeta = random_sym2(rng, samples, scale=2.0)
    r, d, f = norm_r(xi), norm_dual(xi), frobenius_norm(xi)
    tol = 1e-12 * tol_scale

    report.add('norm_r^2 = inner_r', samples, _rel(inner_r(xi, xi), r * r),
               tol)
    chain = np.maximum(r - f, f - np.sqrt(3.0) * r) / np.maximum(1.0, f)
    report.add('norm_r <= |.| <= sqrt3 norm_r', samples,
               max(float(chain.max()), 0.0), tol)
    report.add('norm_dual(dev_r) = norm_r', samples,
               _rel(norm_dual(dev_r(xi)), r), tol)
    report.add('norm_r(lift_dual) = norm_dual', samples,
               _rel(norm_r(lift_dual(xi)), d), tol)
    report.add('norm_r(dev_r) <= norm_r', samples,
               max(float(np.max(norm_r(dev_r(xi)) - r)), 0.0), tol)
    report.add('dev_r o lift_dual = id', samples,
               max(_rel(dev_r(lift_dual(xi)), xi),
                   _rel(lift_dual(dev_r(xi)), xi)), 1e-13 * tol_scale)
    # the sup defining the dual norm is attained at lift_dual(ξ)/|ξ|_*
    maximizer = lift_dual(xi) / np.maximum(d, 1e-300)[..., None]
    report.add('norm_dual = sup over K_r', samples,
               _rel(frobenius_inner(xi, maximizer), d), tol)
    # the sampled sup can only be below the closed form
    m = min(samples, 256)
    eta = random_sym2(rng, (512, ))
    eta = eta / norm_r(eta)[:, None]
    sampled = np.max(xi[:m] @ (eta * FROBENIUS_WEIGHTS).T, axis=1)
    report.add('sampled sup <= norm_dual', m,
               max(float(np.max((sampled - d[:m]) /
                                 np.maximum(1.0, d[:m]))), 0.0), tol)

    K = YieldSurface(float(rng.uniform(0.5, 2.0)))
    t = rng.uniform(0.0, 3.0, samples)
    homog = _rel(support_Hr(t[:, None] * xi, K), t * support_Hr(xi, K))
    report.add('support_Hr homogeneity', samples, homog, tol)
    tri = support_Hr(xi + zeta, K) - support_Hr(xi, K) - support_Hr(zeta, K)
    report.add('support_Hr subadditivity', samples,
               max(float(tri.max()), 0.0), tol)


# ----------------------------------------------------------------------
# potentials
# ----------------------------------------------------------------------
def check_potentials(report: PropertyReport, rng: np.random.Generator,
                     samples: int, tol_scale: float = 1.0):
    fy_eq = fy_ineq = trip = trip_back = nn1 = flow = mono = 0.0
    per = max(samples // (len(EXPONENTS) * len(LAMBDAS)), 1)
    for N in EXPONENTS:
        for lam in LAMBDAS:
            P = TruncationParams.create(N, 1.0, lam)
            xi = random_sym2(rng, per, scale=lam)
            y = dpsi_lambda(xi, P)
            lhs = psi_lambda(xi, P) + F_lambda(y, P)
            rhs = frobenius_inner(y, xi)
            fy_eq = max(fy_eq, float(np.max(
                np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs)))))
            other = random_sym2(rng, per, scale=lam)
            gap = frobenius_inner(other, xi) - psi_lambda(xi, P) - F_lambda(
                other, P)
            scale = np.maximum(
                1.0, np.abs(psi_lambda(xi, P)) + np.abs(F_lambda(other, P)))
            fy_ineq = max(fy_ineq, float(np.max(gap / scale)))
            trip = max(trip, _rel(dF_lambda(y, P), xi))
            trip_back = max(trip_back,
                            _rel(dpsi_lambda(dF_lambda(other, P), P), other))
            # |Dψ_λ(ξ)|^{N/(N−1)} ≤ (1/α₀) Dψ_λ(ξ):ξ with α₀ = 1
            bound = frobenius_norm(y)**(N / (N - 1)) - rhs
            nn1 = max(nn1, float(np.max(bound / np.maximum(1.0, rhs))))
            mono = max(mono, float(np.max(-frobenius_inner(
                y - dpsi_lambda(other, P), xi - other))))

            base = NortonHoffParams(N, 1.0)
            sigma = random_sym2(rng, per, scale=0.6)
            s = norm_r(sigma)
            rate = dphi_N(sigma, base)
            gap = support_Hr(rate, YieldSurface(1.0)) - frobenius_inner(
                sigma, rate)
            flow = max(flow, _rel(gap, s**(N - 1) * (1.0 - s)))
    cases = per * len(EXPONENTS) * len(LAMBDAS)
    report.add('Fenchel-Young equality', cases, fy_eq, 1e-10 * tol_scale)
    report.add('Fenchel-Young inequality', cases, max(fy_ineq, 0.0),
               1e-10 * tol_scale)
    report.add('dF(dpsi(xi)) = xi', cases, trip, 1e-10 * tol_scale)
    report.add('dpsi(dF(y)) = y', cases, trip_back, 1e-10 * tol_scale)
    report.add('|dpsi|^(N/(N-1)) <= dpsi:xi/alpha0', cases, max(nn1, 0.0),
               1e-12 * tol_scale)
    report.add('monotone dpsi', cases, max(mono, 0.0), 1e-12 * tol_scale)
    report.add('Norton-Hoff flow gap identity', cases, flow,
               1e-12 * tol_scale)


def check_conjugates(report: PropertyReport, rng: np.random.Generator,
                     points: int, tol_scale: float = 1.0):
    """Closed form F_λ against the brute-force sup."""
    from plastiplate.oracle import conjugate_sup
    worst = 0.0
    for _ in range(points):
        P = TruncationParams.create(
            int(rng.choice((4, 6))), 1.0, float(rng.choice((0.5, 1.0, 2.0))))
        y = random_sym2(rng, scale=0.5)
        closed = float(F_lambda(y, P))
        worst = max(worst, abs(conjugate_sup(y, P) - closed) /
                    max(1.0, abs(closed)))
    report.add('F_lambda = brute-force sup', points, worst, 1e-4 * tol_scale)


def check_moments(report: PropertyReport, rng: np.random.Generator,
                  tol_scale: float = 1.0):
    """Thickness moments of affine fields and of the orthogonal part."""
    worst_affine = worst_perp = 0.0
    cases = 0
    for layers in range(2, 6):
        grid = PlateGrid(1.0, 1.0, 3, 4, layers)
        bar = random_sym2(rng, grid.shape)
        hat = random_sym2(rng, grid.shape)
        affine = from_moments(bar, hat, grid)
        worst_affine = max(worst_affine,
                           _rel(moment_zero(affine, grid), bar),
                           _rel(moment_first(affine, grid), hat))
        field_ = random_sym2(rng, grid.layered_shape[:3])
        perp = perp_part(field_, grid)
        worst_perp = max(worst_perp,
                         float(np.abs(moment_zero(perp, grid)).max()),
                         float(np.abs(moment_first(perp, grid)).max()))
        cases += 1
    report.add('moments of bar + x3 hat', cases, worst_affine,
               1e-12 * tol_scale)
    report.add('moments of perp part vanish', cases, worst_perp,
               1e-12 * tol_scale)


# ----------------------------------------------------------------------
# oracle equivalence
# ----------------------------------------------------------------------
def tiny_scenario_config(rng: np.random.Generator, name: str) -> dict:
    """A random 3×3-node, two-layer scenario small enough for the dense
    oracle."""
    return dict(
        name=name,
        geometry=dict(nx=3, ny=3, layers=2),
        material=dict(
            mu=float(rng.uniform(0.5, 2.0)), ell=float(rng.uniform(0.0, 1.0))),
        **{
            'yield':
            dict(
                alpha0=1.0,
                N=int(rng.choice(EXPONENTS)),
                lam=float(rng.choice((0.5, 1.0, 2.0))))
        },
        time=dict(T=1.0, k=int(rng.integers(2, 6))),
        data=dict(
            rho=dict(
                preset=str(rng.choice(('bending_bump', 'membrane_bump'))),
                params=dict(amplitude=float(rng.uniform(0.2, 0.8))),
                profile=dict(name='linear', slope=1.0)),
            w=dict(
                preset='clamped_bend',
                params=dict(slope=float(rng.uniform(-0.5, 0.5))),
                profile=dict(name='ramp')),
            init=dict(
                preset='velocity',
                params=dict(amplitude=float(rng.uniform(0.0, 0.5))))))


def check_oracle(report: PropertyReport,
                 rng: np.random.Generator,
                 trials: int,
                 steps: int = 2,
                 tol_scale: float = 1.0):
    """The Newton step against the dense minimizer of the same step energy,
    on ``trials`` random tiny scenarios."""
    from plastiplate.oracle import DenseIncrementalProblem, brute_minimize
    from plastiplate.scenarios import Config, check_config, load_scenario
    from plastiplate.solver import IncrementalSolver
    logger = get_root_logger()
    worst = {'u': 0.0, 'sigma': 0.0, 'p': 0.0, 'energy': 0.0}
    cases = 0
    for trial in range(trials):
        cfg = check_config(
            Config.from_dict(tiny_scenario_config(rng, f'tiny_{trial}')))
        S = load_scenario(cfg)
        solver = IncrementalSolver(S)
        state = solver.seed_history()
        for i in range(1, min(steps, S.time.k) + 1):
            new = solver.step(state, i)
            problem = DenseIncrementalProblem(S, state, i)
            dense = brute_minimize(problem, x0=problem.initial_point(state))
            u_new = new.u.to_vector()
            worst['u'] = max(worst['u'], _rel(u_new, dense.u.to_vector()))
            worst['sigma'] = max(worst['sigma'],
                                 _rel(new.sigma.values, dense.sigma.values))
            worst['p'] = max(worst['p'], _rel(new.p.values, dense.p.values))
            # the dense value is a minimum, so the Newton point cannot be
            # noticeably below it
            at_newton = problem.objective_at(new.u, new.p.to_points())
            worst['energy'] = max(
                worst['energy'],
                (dense.objective - at_newton) / (1.0 + abs(dense.objective)))
            logger.debug(f'oracle trial {trial} step {i}: N={S.trunc.N} '
                         f'lambda={S.trunc.lam:g} objective '
                         f'{dense.objective:.10e}')
            state = new
            cases += 1
    for name in ('u', 'sigma', 'p'):
        report.add(f'Newton step = dense minimizer ({name})', cases,
                   worst[name], 1e-6 * tol_scale)
    report.add('dense energy <= Newton energy', cases,
               max(worst['energy'], 0.0), 1e-9 * tol_scale)


SECTIONS = ('tensor', 'potentials', 'conjugates', 'moments', 'oracle')


@TimeCounter.count_time('property_suite')
def run_property_suite(seed: int = 0,
                       samples: int = 10_000,
                       conjugate_points: int = 100,
                       oracle_trials: int = 5,
                       tol_scale: float = 1.0,
                       sections=SECTIONS,
                       strict: bool = True,
                       progress: Optional[Callable[[str], None]] = None
                       ) -> PropertyReport:
    """Run the randomized property suite.

    Args:
        seed (int): Seed of the case generator.
        samples (int): Random cases of the tensor and potential checks.
        conjugate_points (int): Points of the brute-force conjugate check.
        oracle_trials (int): Random tiny scenarios of the oracle check.
        tol_scale (float): Common factor on every tolerance.
        sections: Subset of ``SECTIONS`` to run.
        strict (bool): Raise on failure. Defaults to True.
        progress (callable, optional): Called with each section name.

    Raises:
        AcceptanceError: When ``strict`` and a check fails.
    """
    unknown = set(sections) - set(SECTIONS)
    assert not unknown, f'unknown sections {sorted(unknown)}'
    logger = get_root_logger()
    rng = np.random.default_rng(seed)
    report = PropertyReport(seed)
    runners = dict(
        tensor=lambda: check_tensor(report, rng, samples, tol_scale),
        potentials=lambda: check_potentials(report, rng, samples, tol_scale),
        conjugates=lambda: check_conjugates(report, rng, conjugate_points,
                                            tol_scale),
        moments=lambda: check_moments(report, rng, tol_scale),
        oracle=lambda: check_oracle(
            report, rng, oracle_trials, tol_scale=tol_scale))
    for name in SECTIONS:
        if name not in sections:
            continue
        if progress is not None:
            progress(name)
        logger.info(f'property suite: {name}')
        runners[name]()
    if strict:
        report.assert_ok()
    return report
