import logging

import pytest

from plastiplate.utils import (BuiltinScenario, ConfigError, Edge, ExitCode,
                               PlastiplateError, TimeCounter, WarnOnlyOnce,
                               collect_env, detach_file_handlers, get_logger,
                               get_library_version, output_root, run_dir)


@TimeCounter.count_time('tests.square')
def _square(x):
    return x * x


class TestTimeCounter:

    def test_records_only_when_active(self):
        _square(2)
        assert TimeCounter.summary('tests.square')['calls'] == 0
        with TimeCounter.activate('tests.square', warmup=1):
            assert [_square(i) for i in range(4)] == [0, 1, 4, 9]
        stats = TimeCounter.summary('tests.square')
        assert stats['calls'] == 3
        assert 0.0 <= stats['min'] <= stats['median'] <= stats['max']
        assert _square.__name__ == '_square'

    def test_duplicate_names_and_unknown_timers(self):
        with pytest.raises(AssertionError):
            TimeCounter.count_time('tests.square')(lambda x: x)
        with pytest.raises(AssertionError):
            with TimeCounter.activate('tests.missing'):
                pass

    def test_print_stats(self, capsys):
        with TimeCounter.activate('tests.square'):
            _square(3)
        TimeCounter.print_stats('tests.square')
        assert 'Latency/ms' in capsys.readouterr().out


class TestLogging:

    def test_initialized_once_with_file(self, tmp_path):
        path = str(tmp_path / 'run.log')
        logger = get_logger('tests.logger', log_file=path)
        again = get_logger('tests.logger', log_file=path)
        assert again is logger
        files = [h for h in logger.handlers
                 if isinstance(h, logging.FileHandler)]
        assert len(files) == 1
        logger.info('hello plate')
        detach_file_handlers(logger)
        assert 'hello plate' in (tmp_path / 'run.log').read_text()
        assert not any(isinstance(h, logging.FileHandler)
                       for h in logger.handlers)

    def test_children_are_left_alone(self):
        get_logger('tests.parent')
        child = get_logger('tests.parent.child')
        assert child.handlers == []

    def test_warn_only_once(self, caplog):
        logger = get_logger('tests.warn')
        logger.propagate = True
        WarnOnlyOnce.reset()
        with caplog.at_level(logging.WARNING, logger='tests.warn'):
            for _ in range(3):
                WarnOnlyOnce.warn(logger, 'line search activated')
        assert caplog.text.count('line search activated') == 1


class TestPaths:

    def test_output_root_precedence(self, monkeypatch, tmp_path):
        monkeypatch.delenv('PLASTIPLATE_OUT', raising=False)
        assert output_root() == 'plastiplate_runs'
        monkeypatch.setenv('PLASTIPLATE_OUT', str(tmp_path))
        assert output_root() == str(tmp_path)
        assert output_root('elsewhere') == 'elsewhere'

    def test_run_dir_never_reuses(self, tmp_path):
        first = run_dir('bend', tmp_path)
        second = run_dir('bend', tmp_path)
        third = run_dir('bend', tmp_path)
        assert first.endswith('bend') and second.endswith('bend_1')
        assert third.endswith('bend_2')


class TestConstants:

    def test_enums(self):
        assert 'left' in Edge.values()
        assert Edge.get('top') is Edge.TOP
        assert 'quiescent' in BuiltinScenario.values()
        assert ExitCode.SUCCESS.value == 0

    def test_config_error_is_a_value_error(self):
        err = ConfigError('N must be an integer >= 4', 'yield.N', 'N>=4')
        assert isinstance(err, ValueError)
        assert isinstance(err, PlastiplateError)
        assert err.path == 'yield.N' and err.rule == 'N>=4'


def test_collect_env():
    env = collect_env()
    assert env['numpy'] == get_library_version('numpy')
    assert get_library_version('surely_not_installed_pkg') is None
