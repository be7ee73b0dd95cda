import json
import os.path as osp

import pytest

from plastiplate.cli import build_parser, main, static_loads
from plastiplate.scenarios import Config


@pytest.fixture
def tiny_json(config_factory, tmp_path):
    path = tmp_path / 'tiny.json'
    path.write_text(json.dumps(config_factory()))
    return str(path)


def test_scenarios(capsys):
    assert main(['scenarios']) == 0
    out = capsys.readouterr().out
    assert 'quiescent' in out and 'plastic_bend' in out


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_static_loads(config_factory):
    assert not static_loads(Config.from_dict(config_factory()))
    assert static_loads(Config.from_dict(dict(scenario='static_f')))


class TestSimulate:

    def test_builtin_run_directory(self, tmp_path):
        root = str(tmp_path / 'runs')
        assert main(['simulate', 'quiescent', '--out', root]) == 0
        out = osp.join(root, 'quiescent')
        for name in ('config.json', 'diagnostics.csv', 'summary.json',
                     'run.log', 'snap_000000.plp', 'snap_000004.plp',
                     'snap_000004.meta'):
            assert osp.isfile(osp.join(out, name)), name
        with open(osp.join(out, 'summary.json')) as f:
            summary = json.load(f)
        assert summary['passed'] and summary['static_loads']
        assert summary['steps'] == 4
        # a second run never overwrites the first
        assert main(['simulate', 'quiescent', '--out', root]) == 0
        assert osp.isdir(osp.join(root, 'quiescent_1'))

    def test_json_config_with_stride(self, tiny_json, tmp_path):
        root = str(tmp_path / 'runs')
        assert main(['simulate', tiny_json, '--out', root, '--stride',
                     '3']) == 0
        out = osp.join(root, 'tiny')
        assert osp.isfile(osp.join(out, 'snap_000003.plp'))
        assert osp.isfile(osp.join(out, 'snap_000004.plp'))
        assert not osp.isfile(osp.join(out, 'snap_000001.plp'))
        with open(osp.join(out, 'config.json')) as f:
            assert json.load(f)['output']['stride'] == 3

    def test_png(self, tmp_path):
        root = str(tmp_path / 'runs')
        assert main(['simulate', 'quiescent', '--out', root,
                     '--no-snapshots', '--png']) == 0
        assert osp.isfile(osp.join(root, 'quiescent', 'snap_000004.png'))

    def test_input_errors_exit_with_2(self, tmp_path, config_factory):
        root = str(tmp_path / 'runs')
        assert main(['simulate', str(tmp_path / 'none.json'), '--out',
                     root]) == 2
        broken = tmp_path / 'broken.json'
        broken.write_text('{"yield": ')
        assert main(['simulate', str(broken), '--out', root]) == 2
        bad = tmp_path / 'bad.json'
        bad.write_text(json.dumps(config_factory(**{'yield': dict(N=3)})))
        assert main(['simulate', str(bad), '--out', root]) == 2
        unsafe = tmp_path / 'unsafe.json'
        unsafe.write_text(
            json.dumps(
                config_factory(data=dict(rho=dict(
                    preset='membrane_bump', params=dict(amplitude=0.95))))))
        assert main(['simulate', str(unsafe), '--out', root]) == 2
        assert not osp.exists(root)


class TestOtherCommands:

    def test_inspect(self, tmp_path):
        root = str(tmp_path / 'runs')
        assert main(['simulate', 'quiescent', '--out', root]) == 0
        snap = osp.join(root, 'quiescent', 'snap_000002.plp')
        assert main(['inspect', snap, '--png', '--fields', 'u3', 's11']) == 0
        base = osp.splitext(snap)[0]
        assert osp.isfile(base + '.csv') and osp.isfile(base + '.png')
        with open(base + '.csv') as f:
            assert len(f.readlines()) == 1 + 5 * 5 * 2

    def test_inspect_errors(self, tmp_path):
        assert main(['inspect', str(tmp_path / 'snap_000001.plp')]) == 2
        bad = tmp_path / 'snap_000001.plp'
        bad.write_bytes(b'not a snapshot')
        assert main(['inspect', str(bad)]) == 2

    def test_sweep(self, tmp_path):
        root = str(tmp_path / 'runs')
        assert main(['sweep', 'quiescent', '--out', root, '--Ns', '4', '6',
                     '--lambdas', '1', '--refine', 'time', '--levels',
                     '1']) == 0
        out = osp.join(root, 'quiescent_sweep')
        assert osp.isfile(osp.join(out, 'lam_1_N_4', 'diagnostics.csv'))
        with open(osp.join(out, 'summary.json')) as f:
            summary = json.load(f)
        assert len(summary['ladder']) == 2
        assert 'time_refinement' in summary

    def test_check(self, tmp_path):
        report = str(tmp_path / 'check' / 'report.json')
        assert main([
            'check', '--samples', '240', '--conjugate-points', '2',
            '--sections', 'tensor', 'potentials', 'conjugates', '--out',
            report
        ]) == 0
        with open(report) as f:
            assert json.load(f)['passed'] is True

    def test_check_failures_exit_with_1(self):
        assert main(['check', '--sections', 'moments', '--tol-scale',
                     '-1']) == 1
        assert main(['check', '--sections', 'plasticity']) == 2
