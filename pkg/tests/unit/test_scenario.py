import json

import pytest

from mbwave.errors import ScenarioError, ValidationError
from mbwave.scenario import (
    FdmSettings,
    load_scenario,
    parse_range,
    scenario_from_mapping,
)


MINIMAL = dict(problem='neumann_damped', k=0.5, a=0.5, initial='example1', t_max=10)

DELAY = dict(
    problem='dirichlet_delay',
    k=0.5,
    mu1=2.0,
    mu2=1.0,
    tau=1.0,
    initial={'preset': 'sine', 'velocity': 0.5},
    history={'preset': 'bump', 'amplitude': 0.5},
)


def line_of(path, key):
    for number, line in enumerate(path.read_text().splitlines(), 1):
        if f'"{key}"' in line:
            return number


def test_minimal(scenario_file):
    scenario = load_scenario(scenario_file(MINIMAL))
    assert scenario.t_max == 10
    assert scenario.sample_count == 101
    assert scenario.quad_tol == 1e-10
    assert scenario.fdm == FdmSettings()
    assert scenario.initial == {'preset': 'example1'}
    assert len(scenario.times) == 101


def test_defaults_echoed(scenario_file, caplog):
    with caplog.at_level('INFO'):
        load_scenario(scenario_file(MINIMAL))
    assert "'sample_count': 101" in caplog.text


def test_caller_defaults(scenario_file):
    scenario = load_scenario(scenario_file(MINIMAL), defaults=dict(quad_tol=1e-8))
    assert scenario.quad_tol == 1e-8


def test_delay_beyond_reach(scenario_file):
    path = scenario_file(dict(DELAY, tau=3))
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    assert 'tau must satisfy 0 < tau < 1/k' in str(info.value)
    assert info.value.field == 'tau'
    assert info.value.line == line_of(path, 'tau')


def test_missing_gain(scenario_file):
    raw = dict(MINIMAL)
    del raw['a']
    with pytest.raises(ScenarioError) as info:
        load_scenario(scenario_file(raw))
    assert info.value.field == 'a'


def test_parameter_of_other_problem(scenario_file):
    with pytest.raises(ScenarioError) as info:
        load_scenario(scenario_file(dict(MINIMAL, mu1=1.0)))
    assert info.value.field == 'mu1'


def test_unknown_problem():
    with pytest.raises(ScenarioError, match='problem must be one of'):
        scenario_from_mapping(dict(MINIMAL, problem='periodic'))


def test_not_a_number():
    with pytest.raises(ScenarioError, match='expected a number'):
        scenario_from_mapping(dict(MINIMAL, k='fast'))


def test_syntax_error(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{\n  "problem": "neumann_damped",\n  "k": 0.5,,\n}\n')
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    assert info.value.line == 3


def test_exponent_without_point(tmp_path):
    path = tmp_path / 'tight.json'
    path.write_text(json.dumps(dict(MINIMAL, quad_tol=1e-9)))
    assert '1e-09' in path.read_text()
    assert load_scenario(path).quad_tol == 1e-9


def test_tab_indented(tmp_path):
    path = tmp_path / 'tabs.json'
    path.write_text(json.dumps(DELAY, indent='\t'))
    assert load_scenario(path).tau == 1.0

    path.write_text(json.dumps(dict(DELAY, tau=3), indent='\t'))
    with pytest.raises(ScenarioError) as info:
        load_scenario(path)
    assert info.value.field == 'tau'
    assert info.value.line == line_of(path, 'tau')


def test_yaml_scenario(tmp_path):
    path = tmp_path / 'scenario.yaml'
    path.write_text(
        'problem: neumann_damped\nk: 0.5\na: 5E-1\ninitial: example1\nquad_tol: 1e-9\n'
    )
    scenario = load_scenario(path)
    assert scenario.a == 0.5
    assert scenario.quad_tol == 1e-9


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / 'absent.json')


def test_invalid_preset(scenario_file):
    with pytest.raises(ScenarioError, match='unknown initial preset'):
        load_scenario(scenario_file(dict(MINIMAL, initial='nope')))


def test_trace_violation(scenario_file):
    with pytest.raises(ValidationError, match='trace violation'):
        load_scenario(scenario_file(dict(DELAY, initial='trig')))


def test_inline_samples(scenario_file):
    raw = dict(MINIMAL, initial={'samples': {'x': [0, 0.5, 1], 'u0': [0, 1, 0], 'u1': [0, 0, 0]}})
    scenario = load_scenario(scenario_file(raw))
    data = scenario.initial_data()
    assert data.breakpoints == (0.5,)
    assert float(data.u0(0.25)) == 0.5


def test_sweep_block():
    scenario = scenario_from_mapping(
        dict(MINIMAL, sweep={'a': {'start': 0, 'stop': 1, 'step': 0.25}, 'k': [0.3, 0.6]})
    )
    assert dict(scenario.sweep) == {'a': (0.0, 0.25, 0.5, 0.75, 1.0), 'k': (0.3, 0.6)}


def test_bad_sweep():
    with pytest.raises(ScenarioError):
        scenario_from_mapping(dict(MINIMAL, sweep={'a': {'start': 1, 'stop': 0, 'step': 0.1}}))


@pytest.mark.parametrize('raw', [MINIMAL, DELAY])
def test_record_round_trip(raw):
    scenario = scenario_from_mapping(raw)
    assert scenario_from_mapping(scenario.to_record()) == scenario


def test_fdm_settings():
    scenario = scenario_from_mapping(dict(MINIMAL, fdm={'ny': 128, 'cfl': 0.25}))
    assert scenario.fdm == FdmSettings(ny=128, cfl=0.25)
    with pytest.raises(ScenarioError):
        scenario_from_mapping(dict(MINIMAL, fdm={'dt': 0.1}))


@pytest.mark.parametrize('text', ['a', 'a=0:1', '=0:1:0.1', 'a=x:1:0.1'])
def test_bad_range(text):
    with pytest.raises(ValidationError):
        parse_range(text)


def test_range_step():
    assert parse_range('tau=0.5:1.5:0.5') == ('tau', (0.5, 1.0, 1.5))
