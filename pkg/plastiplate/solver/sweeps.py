"""Approximation ladder over (λ, N) and refinement studies."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from plastiplate.diagnostics import (DiagnosticsLog, compare_trajectories,
                                     integrate_nodal, pair_layered)
from plastiplate.ops.sym2 import norm_r
from plastiplate.structures import PlateGrid, PlateState, Trajectory
from plastiplate.utils import AcceptanceError, get_root_logger
from .incremental import evolve
from .options import SolverOptions
from .scenario import Scenario

EXCESS_SLACK = 1e-3


@dataclass
class LadderRun:
    N: int
    lam: float
    trajectory: Trajectory
    log: DiagnosticsLog

    @property
    def final(self) -> PlateState:
        return self.trajectory.final

    @property
    def max_sigma_r(self) -> float:
        return max(float(norm_r(s.sigma.values).max())
                   for s in self.trajectory)


@dataclass
class LadderReport:
    """Runs of one scenario for every (λ, N) pair of the ladder."""
    scenario: str
    alpha0: float
    grid: Optional[PlateGrid] = None
    runs: Dict[Tuple[float, int], LadderRun] = field(default_factory=dict)

    @property
    def lambdas(self) -> List[float]:
        return sorted({lam for lam, _ in self.runs})

    @property
    def Ns(self) -> List[int]:
        return sorted({N for _, N in self.runs})

    def excess(self, lam: float) -> List[float]:
        return [self.runs[(lam, N)].log.max('excess') for N in self.Ns]

    def rows(self) -> List[dict]:
        rows = []
        for (lam, N), run in sorted(self.runs.items()):
            summary = run.log.summary()
            rows.append(
                dict(
                    lam=lam,
                    N=N,
                    max_excess=summary['max_excess'],
                    max_flowgap_density=summary['max_flowgap_density'],
                    flowgap_bound=summary['flowgap_bound'],
                    min_slack_ratio=summary['min_slack_ratio'],
                    max_sigma_r=run.max_sigma_r,
                    dissipation=summary['dissipation']))
        return rows

    def inactive_pairs(self, N: int) -> List[Tuple[float, float]]:
        """λ pairs above the largest |σ|_r either run attains."""
        lams = [l for l in self.lambdas if (l, N) in self.runs]
        out = []
        for a, b in zip(lams, lams[1:]):
            top = max(self.runs[(a, N)].max_sigma_r,
                      self.runs[(b, N)].max_sigma_r)
            if top < a:
                out.append((a, b))
        return out

    def lambda_agreement(self, N: int, a: float, b: float) -> float:
        ra, rb = self.runs[(a, N)], self.runs[(b, N)]
        grid_report = compare_trajectories(ra.trajectory, rb.trajectory,
                                           self.grid)
        return grid_report.sigma_diff / grid_report.scale

    def failures(self) -> List[str]:
        out = []
        slack = EXCESS_SLACK * self.alpha0
        for lam in self.lambdas:
            values = [
                self.runs[(lam, N)].log.max('excess') for N in self.Ns
                if (lam, N) in self.runs
            ]
            for lo, hi in zip(values, values[1:]):
                if hi > lo + slack:
                    out.append(f'lambda={lam:g}: excess grows with N '
                               f'({values})')
                    break
        for N in self.Ns:
            for a, b in self.inactive_pairs(N):
                gap = self.lambda_agreement(N, a, b)
                if gap > 1e-7:
                    out.append(f'N={N}: lambda {a:g} and {b:g} differ by '
                               f'{gap:.3e} although the cap is inactive')
        for run in self.runs.values():
            out.extend(f'lambda={run.lam:g}, N={run.N}: {f}'
                       for f in run.log.failures())
        return out

    def assert_ok(self):
        failures = self.failures()
        if failures:
            raise AcceptanceError(f'ladder on {self.scenario} failed',
                                  failures)

    def table(self) -> str:
        from prettytable import PrettyTable
        t = PrettyTable()
        t.title = f'Ladder: {self.scenario}'
        rows = self.rows()
        t.field_names = list(rows[0]) if rows else []
        for r in rows:
            t.add_row([f'{v:.4e}' if isinstance(v, float) else v
                       for v in r.values()])
        return t.get_string()


def ladder(S: Scenario,
           lambdas: Sequence[float],
           Ns: Sequence[int],
           opts: Optional[SolverOptions] = None,
           threads: int = 1,
           stride: Optional[int] = None) -> LadderReport:
    """Evolve ``S`` for every (λ, N); independent runs share a thread pool.

    Args:
        lambdas, Ns: Ascending parameter lists.
        threads (int): Worker threads. Defaults to 1.
        stride (int, optional): Trajectory stride, defaults to keeping only
            the seed and the final state.
    """
    assert list(lambdas) == sorted(lambdas) and list(Ns) == sorted(Ns), \
        'ladder parameters must be sorted ascending'
    logger = get_root_logger()
    stride = stride or S.time.k
    jobs = [(lam, N) for lam in lambdas for N in Ns]

    def _run(job):
        lam, N = job
        traj, log = evolve(S.with_truncation(N=N, lam=lam), opts, stride)
        logger.info(f'ladder {S.name}: lambda={lam:g} N={N} done')
        return LadderRun(N, lam, traj, log)

    report = LadderReport(S.name, S.trunc.alpha0, S.grid)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for job, run in zip(jobs, pool.map(_run, jobs)):
            report.runs[job] = run
    return report


@dataclass
class RefinementReport:
    """Successive differences of the final state under refinement.

    ``errors[j]`` compares levels j and j + 1; ``orders[j]`` is
    log2(errors[j] / errors[j + 1]).
    """
    kind: str
    sizes: List[int]
    sigma_errors: List[float]
    u3_errors: List[float]

    @staticmethod
    def _orders(errors: List[float]) -> List[float]:
        out = []
        for a, b in zip(errors, errors[1:]):
            out.append(math.log2(a / b) if a > 0 and b > 0 else math.nan)
        return out

    @property
    def sigma_orders(self) -> List[float]:
        return self._orders(self.sigma_errors)

    @property
    def u3_orders(self) -> List[float]:
        return self._orders(self.u3_errors)

    def as_dict(self) -> dict:
        return dict(
            kind=self.kind,
            sizes=self.sizes,
            sigma_errors=self.sigma_errors,
            u3_errors=self.u3_errors,
            sigma_orders=self.sigma_orders,
            u3_orders=self.u3_orders)

    def table(self) -> str:
        from prettytable import PrettyTable
        t = PrettyTable()
        t.title = f'{self.kind} refinement'
        t.field_names = [
            'levels', '|d sigma|', 'sigma order', '|d u3|', 'u3 order'
        ]
        so, uo = [math.nan] + self.sigma_orders, [math.nan] + self.u3_orders
        for j, (es, eu) in enumerate(zip(self.sigma_errors, self.u3_errors)):
            t.add_row([
                f'{self.sizes[j]}->{self.sizes[j + 1]}', f'{es:.4e}',
                f'{so[j]:.3f}', f'{eu:.4e}', f'{uo[j]:.3f}'
            ])
        return t.get_string()


def time_refinement(S: Scenario,
                    levels: int = 3,
                    opts: Optional[SolverOptions] = None,
                    threads: int = 1) -> RefinementReport:
    """Evolve with k, 2k, 4k, … steps and compare the final states."""
    ks = [S.time.k * 2**j for j in range(levels + 1)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        finals = list(
            pool.map(lambda k: evolve(S.with_time(k), opts, k)[0].final, ks))
    grid = S.grid
    sig, u3 = [], []
    for a, b in zip(finals, finals[1:]):
        ds = a.sigma.values - b.sigma.values
        sig.append(float(np.sqrt(pair_layered(ds, ds, grid))))
        u3.append(float(np.sqrt(integrate_nodal((a.u.u3 - b.u.u3)**2,
                                                grid))))
    return RefinementReport('time', ks, sig, u3)


def mesh_refinement(factory: Callable[[int], Scenario],
                    levels: int = 3,
                    opts: Optional[SolverOptions] = None,
                    threads: int = 1) -> RefinementReport:
    """Compare final states of ``factory(0), factory(1), …`` whose grids
    have 2n − 1 nodes per side at each level, on the coarser nodes."""
    scenarios = [factory(j) for j in range(levels + 1)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        finals = list(
            pool.map(lambda s: evolve(s, opts, s.time.k)[0].final,
                     scenarios))
    sig, u3 = [], []
    for j, (a, b) in enumerate(zip(finals, finals[1:])):
        coarse = scenarios[j].grid
        assert scenarios[j + 1].grid.nx == 2 * coarse.nx - 1 and \
            scenarios[j + 1].grid.ny == 2 * coarse.ny - 1, \
            'mesh levels must double the number of intervals'
        ds = a.sigma.values - b.sigma.values[::2, ::2]
        du = a.u.u3 - b.u.u3[::2, ::2]
        sig.append(float(np.sqrt(pair_layered(ds, ds, coarse))))
        u3.append(float(np.sqrt(integrate_nodal(du**2, coarse))))
    return RefinementReport('mesh', [s.grid.nx for s in scenarios], sig, u3)
