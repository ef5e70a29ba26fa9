import argparse
import copy
import json

import pytest

import mbwave
import mbwave.commands  # noqa: F401
from mbwave import core
from mbwave.core import Command, Repeated, command, comma_list, parse_grid
from mbwave.dictlib import ConfigDict


@pytest.fixture
def patch_command_registry(monkeypatch):
    """
    Ensure Command._registry is not mutated by these tests.
    """
    monkeypatch.setattr(Command, '_registry', [])


@pytest.mark.usefixtures("patch_command_registry")
class TestCommandRegistry:
    def test_command_with_aliases(self):
        @command(aliases='mc')
        def my_cmd():
            "help for my command"

        assert len(Command._registry) == 1

        # attempt to re-register the command
        for handler in Command._registry:
            copy.deepcopy(handler).register()

        assert len(Command._registry) == 1
        assert Command._registry[0].aliases == ('mc',)
        assert Command._registry[0].doc == 'help for my command'

    def test_name_required_as_string(self):
        with pytest.raises(ValueError):

            @command
            def oops():
                pass

    def test_options_from_signature(self):
        @command()
        def report(path: str, count: int = 3, tags: Repeated(str) = None, quiet: bool = False):
            "Report."
            return [path, count, tags, quiet]

        parser = argparse.ArgumentParser()
        Command._registry[0].add_parser(parser.add_subparsers())
        args = parser.parse_args(['report', '--path', 'p', '--tags', 'x', '--tags', 'y'])
        bound = args.command.attach(vars(args))
        assert bound() == ['p', 3, ['x', 'y'], False]
        with pytest.raises(SystemExit):
            parser.parse_args(['report'])


def test_attach_ignores_extra_params():
    def func(a, b=2):
        return a, b

    assert core.attach(func, dict(a=1, c=3))() == (1, 2)


def test_comma_list():
    assert comma_list(float)('0.5, 1,') == [0.5, 1.0]


def test_parse_grid():
    assert parse_grid('ny=64,cfl=0.25') == {'ny': 64, 'cfl': 0.25}
    with pytest.raises(argparse.ArgumentTypeError):
        parse_grid('nx=64')


def test_init_config():
    config = core.init_config({'workers': 4})
    assert mbwave.config is config
    assert config.workers == 4
    assert config['quad tol'] == 1e-10
    core.init_config({})


def test_config_files_merge(tmp_path):
    first = tmp_path / 'first.yaml'
    first.write_text('workers: 2\nx count: 5\n')
    second = tmp_path / 'second.yaml'
    second.write_text('workers: 3\n')
    args = core.get_args(
        ['--config', str(first), '--config', str(second), 'classify', '--k', '0.5']
    )
    assert args.config == {'workers': 3, 'x count': 5}


def test_config_exponent_floats(tmp_path):
    settings = tmp_path / 'settings.yaml'
    settings.write_text('quad tol: 1e-10\ncompatibility tol: 5E-9\nworkers: 2\n')
    config = ConfigDict.from_yaml(settings)
    assert config['quad tol'] == 1e-10
    assert config['compatibility tol'] == 5e-9
    assert isinstance(config.workers, int)


def test_run_classify(capsys):
    assert core.run(['classify', '--k', '0.5', '--a', '0.5']) == 0
    record = json.loads(capsys.readouterr().out)
    assert record['kind'] == 'DecayExactlyFirstOrder'
    assert record['b2'] == 2.0


@pytest.mark.parametrize(
    'argv',
    [
        ['classify', '--k', '2', '--a', '0.5'],
        ['classify', '--k', '0.5'],
        ['classify', '--a', '0.5'],
    ],
)
def test_run_validation_status(argv, caplog):
    assert core.run(argv) == 2
    assert caplog.records[-1].levelname == 'ERROR'


def test_run_writes_file(tmp_path):
    out = tmp_path / 'regime.json'
    assert core.run(['classify', '--k', '0.5', '--a', '3', '--out', str(out)]) == 0
    assert json.loads(out.read_text())['kind'] == 'DecayAtMostFirstOrder'
