"""Command line driver: ``plastiplate {simulate,sweep,check,inspect}``.

Exit codes: 0 on success, 1 when a diagnostic or property check fails
(or a run cannot be completed), 2 on configuration and input errors.
"""
import argparse
import json
import logging
import os.path as osp
import sys
from contextlib import contextmanager
from dataclasses import replace
from typing import List, Optional, Sequence

from plastiplate.utils import (AcceptanceError, BuiltinScenario, ConfigError,
                               ExitCode, PlastiplateError, SnapshotError,
                               TimeCounter, collect_env, detach_file_handlers,
                               get_root_logger, mkdir_or_exist, run_dir)
from plastiplate.version import __version__


def _add_run_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        'config',
        help='JSON configuration file or the name of a builtin scenario')
    parser.add_argument(
        '--threads', type=int, default=None,
        help='worker threads of sweeps (overrides solver.threads)')
    parser.add_argument(
        '--out', default=None,
        help='output root (overrides output.out_dir and PLASTIPLATE_OUT)')
    parser.add_argument(
        '--stride', type=int, default=None,
        help='keep every stride-th state (overrides output.stride)')
    parser.add_argument(
        '--tol-scale', type=float, default=None,
        help='common factor on the Newton tolerances')
    parser.add_argument(
        '--png', action='store_true', help='render the final state to PNG')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='plastiplate',
        description='Incremental Norton-Hoff simulations of perfectly '
        'plastic Kirchhoff-Love plates.')
    parser.add_argument(
        '--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument(
        '-v', '--verbose', action='store_true', help='log at DEBUG level')
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    simulate = sub.add_parser(
        'simulate', help='evolve one scenario and diagnose every step')
    _add_run_args(simulate)
    simulate.add_argument(
        '--no-snapshots', action='store_true',
        help='do not write snapshot files')
    simulate.add_argument(
        '--progress', action='store_true', help='show a progress bar')
    simulate.add_argument(
        '--timing', action='store_true',
        help='print latency tables of the step kernels')

    sweep = sub.add_parser(
        'sweep', help='(lambda, N) ladder and refinement studies')
    _add_run_args(sweep)
    sweep.add_argument('--Ns', type=int, nargs='+', default=None)
    sweep.add_argument('--lambdas', type=float, nargs='+', default=None)
    sweep.add_argument(
        '--refine', nargs='+', choices=('time', 'mesh'), default=None)
    sweep.add_argument('--levels', type=int, default=None)

    check = sub.add_parser('check', help='randomized property suite')
    check.add_argument('--seed', type=int, default=0)
    check.add_argument('--tol-scale', type=float, default=1.0)
    check.add_argument('--samples', type=int, default=10_000)
    check.add_argument('--conjugate-points', type=int, default=100)
    check.add_argument('--oracle-trials', type=int, default=5)
    check.add_argument(
        '--sections', nargs='+', default=None,
        help='subset of tensor, potentials, conjugates, moments, oracle')
    check.add_argument(
        '--out', default=None, help='also write the report as JSON here')

    inspect = sub.add_parser('inspect', help='dump a snapshot to CSV')
    inspect.add_argument('snapshot', help='snap_<step>.plp file')
    inspect.add_argument(
        '--csv', default=None,
        help='output CSV path, defaults to the snapshot path with .csv')
    inspect.add_argument(
        '--png', action='store_true', help='render fields to PNG')
    inspect.add_argument('--fields', nargs='+', default=None)
    inspect.add_argument('--layer', type=int, default=0)

    sub.add_parser('scenarios', help='list the builtin scenarios')
    return parser


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------
def resolve_config(source: str):
    """A :class:`Config` from a JSON path or a builtin scenario name."""
    from plastiplate.scenarios import (Config, builtin_config, check_config,
                                       load_config)
    if not osp.isfile(source) and source in BuiltinScenario.values():
        return check_config(Config.from_dict(builtin_config(source)))
    if not osp.isfile(source):
        raise ConfigError(
            f'no such file and no builtin scenario, builtins are '
            f'{BuiltinScenario.values()}', source, 'file')
    return load_config(source, validate=False)


def apply_overrides(cfg, args):
    """Fold command line flags into the configuration."""
    from plastiplate.scenarios import check_config
    options = cfg.solver.options
    if getattr(args, 'tol_scale', None) is not None:
        options = options.replace(tol_scale=args.tol_scale)
    if getattr(args, 'progress', False):
        options = options.replace(show_progress=True)
    solver = replace(cfg.solver, options=options)
    if getattr(args, 'threads', None) is not None:
        solver = replace(solver, threads=args.threads)
    output = cfg.output
    if getattr(args, 'stride', None) is not None:
        output = replace(output, stride=args.stride)
    if getattr(args, 'png', False):
        output = replace(output, png=True)
    if getattr(args, 'no_snapshots', False):
        output = replace(output, snapshots=False)
    sweep = cfg.sweep
    for key, flag in (('Ns', 'Ns'), ('lambdas', 'lambdas'),
                      ('refinement', 'refine'), ('levels', 'levels')):
        value = getattr(args, flag, None)
        if value is not None:
            sweep = replace(sweep, **{key: value})
    return check_config(
        replace(cfg, solver=solver, output=output, sweep=sweep))


def static_loads(cfg) -> bool:
    """True when ϱ, hence f and g, and w do not depend on time."""
    rho, w = cfg.data.rho, cfg.data.w
    constant = (rho.profile is None or
                rho.profile.get('name') == 'constant')
    return constant and rho.preset != 'table' and w.preset == 'zero'


def snapshot_meta(S, cfg) -> dict:
    g = S.grid
    return dict(
        scenario=cfg.name,
        Lx=g.Lx,
        Ly=g.Ly,
        nx=g.nx,
        ny=g.ny,
        x3=[float(x) for x in g.x3],
        layer_weights=[float(w) for w in g.layer_weights],
        mu=S.elasticity.mu,
        ell=S.elasticity.ell,
        alpha0=S.trunc.alpha0,
        N=S.trunc.N,
        lam=S.trunc.lam,
        T=S.time.T,
        k=S.time.k)


@contextmanager
def run_logging(out_dir: str):
    """Tee the package log into ``<out_dir>/run.log``."""
    logger = get_root_logger(log_file=osp.join(out_dir, 'run.log'))
    try:
        yield logger
    finally:
        detach_file_handlers(logger)


def _dump_json(obj, path: str):
    with open(path, 'w') as f:
        json.dump(obj, f, indent=2, default=float)


def _print_summary(title: str, summary: dict, keys: Sequence[str]):
    from prettytable import PrettyTable
    t = PrettyTable()
    t.title = title
    t.field_names = ['quantity', 'value']
    t.align['quantity'] = 'l'
    for key in keys:
        value = summary[key]
        t.add_row([key, f'{value:.6e}' if isinstance(value, float) else
                   value])
    print(t)


SUMMARY_KEYS = ('steps', 'max_excess', 'max_flowgap_density',
                'flowgap_bound', 'min_slack_ratio', 'dissipation',
                'sup_sigma_rate', 'sup_v3_rate', 'max_normality',
                'newton_iters')


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------
def cmd_simulate(args) -> int:
    from plastiplate.io import snapshot_name, write_trajectory
    from plastiplate.scenarios import dump_config, validate_config
    from plastiplate.solver import IncrementalSolver
    cfg = apply_overrides(resolve_config(args.config), args)
    S = validate_config(cfg)
    out = run_dir(cfg.name, args.out or cfg.output.out_dir)
    with run_logging(out) as logger:
        logger.info(f'simulate {cfg.name} into {out}')
        dump_config(cfg, osp.join(out, 'config.json'))
        solver = IncrementalSolver(S, cfg.solver.options, logger)
        if args.timing:
            with TimeCounter.activate(logger=logger):
                traj, log = solver.evolve(cfg.output.stride)
            for name in TimeCounter.names:
                if TimeCounter.summary(name)['calls']:
                    TimeCounter.print_stats(name)
        else:
            traj, log = solver.evolve(cfg.output.stride)
        log.to_csv(osp.join(out, 'diagnostics.csv'))
        meta = snapshot_meta(S, cfg)
        if cfg.output.snapshots:
            write_trajectory(out, traj, meta)
        if cfg.output.png:
            from plastiplate.io import read_snapshot
            from plastiplate.visualization import render_snapshot
            final = osp.join(out, snapshot_name(traj.final.step))
            if not cfg.output.snapshots:
                write_trajectory(out, [traj.final], meta)
            render_snapshot(
                read_snapshot(final), osp.splitext(final)[0] + '.png')
        static = static_loads(cfg)
        failures = log.failures()
        if static:
            failures += log.rate_failures()
        summary = dict(
            name=cfg.name,
            static_loads=static,
            passed=not failures,
            failures=failures,
            env=collect_env(),
            **log.summary())
        _dump_json(summary, osp.join(out, 'summary.json'))
        _print_summary(f'{cfg.name}: {out}', summary, SUMMARY_KEYS)
        if failures:
            raise AcceptanceError(f'{cfg.name}: {len(failures)} diagnostic '
                                  'check(s) failed', failures)
    return ExitCode.SUCCESS.value


def _mesh_factory(cfg):
    from plastiplate.scenarios import build_scenario
    g = cfg.geometry

    def factory(level: int):
        scale = 2**level
        geometry = replace(
            g, nx=(g.nx - 1) * scale + 1, ny=(g.ny - 1) * scale + 1)
        return build_scenario(replace(cfg, geometry=geometry)).validate()

    return factory


def cmd_sweep(args) -> int:
    from plastiplate.scenarios import dump_config, validate_config
    from plastiplate.solver import ladder, mesh_refinement, time_refinement
    cfg = apply_overrides(resolve_config(args.config), args)
    S = validate_config(cfg)
    sw, threads = cfg.sweep, cfg.solver.threads
    Ns = sw.Ns or [cfg.yield_.N]
    lambdas = sw.lambdas or [cfg.yield_.lam]
    opts = cfg.solver.options
    out = run_dir(f'{cfg.name}_sweep', args.out or cfg.output.out_dir)
    with run_logging(out) as logger:
        logger.info(f'sweep {cfg.name}: N={Ns} lambda={lambdas} '
                    f'refinement={sw.refinement} into {out}')
        dump_config(cfg, osp.join(out, 'config.json'))
        report = ladder(S, lambdas, Ns, opts, threads)
        for (lam, N), run in sorted(report.runs.items()):
            sub = osp.join(out, f'lam_{lam:g}_N_{N}')
            mkdir_or_exist(sub)
            run.log.to_csv(osp.join(sub, 'diagnostics.csv'))
            _dump_json(run.log.summary(), osp.join(sub, 'summary.json'))
        print(report.table())
        failures = report.failures()
        summary = dict(
            name=cfg.name, ladder=report.rows(), env=collect_env())
        for kind in sw.refinement:
            if kind == 'time':
                ref = time_refinement(S, sw.levels, opts, threads)
            else:
                ref = mesh_refinement(_mesh_factory(cfg), sw.levels, opts,
                                      threads)
            print(ref.table())
            summary[f'{kind}_refinement'] = ref.as_dict()
        summary.update(passed=not failures, failures=failures)
        _dump_json(summary, osp.join(out, 'summary.json'))
        if failures:
            raise AcceptanceError(f'sweep {cfg.name}: {len(failures)} '
                                  'check(s) failed', failures)
    return ExitCode.SUCCESS.value


def cmd_check(args) -> int:
    from plastiplate.checks import SECTIONS, run_property_suite
    sections = tuple(args.sections or SECTIONS)
    unknown = sorted(set(sections) - set(SECTIONS))
    if unknown:
        raise ConfigError(f'unknown sections {unknown}, expected a subset '
                          f'of {SECTIONS}', 'sections', 'sections')
    report = run_property_suite(
        seed=args.seed,
        samples=args.samples,
        conjugate_points=args.conjugate_points,
        oracle_trials=args.oracle_trials,
        tol_scale=args.tol_scale,
        sections=sections,
        strict=False)
    print(report.table())
    if args.out:
        mkdir_or_exist(osp.dirname(osp.abspath(args.out)))
        _dump_json(report.as_dict(), args.out)
    report.assert_ok()
    return ExitCode.SUCCESS.value


def cmd_inspect(args) -> int:
    from plastiplate.io import export_csv, read_snapshot
    try:
        snap = read_snapshot(args.snapshot)
    except FileNotFoundError as err:
        raise ConfigError(str(err), args.snapshot, 'file') from err
    base = osp.splitext(args.snapshot)[0]
    csv_path = args.csv or base + '.csv'
    rows = export_csv(snap, csv_path)
    h = snap.header
    print(f'{args.snapshot}: step {h.step}, t = {h.time:.6g}, '
          f'{h.ny}x{h.nx} nodes, {h.layers} layers -> {rows} rows in '
          f'{csv_path}')
    if args.png:
        from plastiplate.visualization import render_snapshot
        png = render_snapshot(snap, base + '.png', args.fields, args.layer)
        print(f'fields rendered to {png}')
    return ExitCode.SUCCESS.value


def cmd_scenarios(args) -> int:
    from prettytable import PrettyTable
    from plastiplate.scenarios import builtin_scenarios
    t = PrettyTable()
    t.field_names = ['name', 'grid', 'layers', 'k', 'N', 'lambda', 'rho', 'w']
    for name, cfg in builtin_scenarios().items():
        g = cfg.geometry
        t.add_row([
            name, f'{g.nx}x{g.ny}', g.layers, cfg.time.k, cfg.yield_.N,
            cfg.yield_.lam, cfg.data.rho.preset, cfg.data.w.preset
        ])
    print(t)
    return ExitCode.SUCCESS.value


COMMANDS = dict(
    simulate=cmd_simulate,
    sweep=cmd_sweep,
    check=cmd_check,
    inspect=cmd_inspect,
    scenarios=cmd_scenarios)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.INFO
    logger = get_root_logger(log_level=level)
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)
    try:
        code = COMMANDS[args.command](args)
    except (ConfigError, SnapshotError) as err:
        logger.error(f'configuration error: {err}')
        return ExitCode.CONFIG.value
    except AcceptanceError as err:
        logger.error(str(err))
        for failure in err.failures:
            logger.error(f'  {failure}')
        return ExitCode.ASSERTION.value
    except PlastiplateError as err:
        logger.error(f'run failed: {err}')
        return ExitCode.ASSERTION.value
    return code


if __name__ == '__main__':
    sys.exit(main())
