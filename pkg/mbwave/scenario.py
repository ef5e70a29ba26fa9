"""
Scenario files: one JSON (or YAML) document naming the problem, its
parameters, the initial data and the output resolution.

A minimal Neumann scenario::

    {"problem": "neumann_damped", "k": 0.5, "a": 0.5,
     "initial": "example1", "t_max": 10}

The full schema is described in ``docs/scenario.rst``.
"""

import dataclasses
import logging
import math
import pprint
from typing import Any, Dict, Optional, Tuple

import numpy as np
import yaml

from . import data as presets
from .delay import DelayParams, DelayProfile
from .dictlib import Loader, load_document
from .errors import ScenarioError, ValidationError
from .geometry import DomainGeometry
from .profile import NeumannProfile


log = logging.getLogger(__name__)


PROBLEMS = {
    'neumann_damped': {'required': {'a'}, 'optional': set()},
    'dirichlet_delay': {'required': {'mu1', 'mu2', 'tau'}, 'optional': {'xi', 'history'}},
}

COMMON = {'problem', 'k', 'initial', 't_max', 'sample_count', 'quad_tol', 'fdm', 'sweep'}

DEFAULTS = dict(t_max=10.0, sample_count=101, quad_tol=1e-10, xi=1.0, history='zero')


@dataclasses.dataclass(frozen=True)
class FdmSettings:
    ny: int = 256
    cfl: float = 0.5


@dataclasses.dataclass(frozen=True)
class Scenario:
    problem: str
    k: float
    initial: Dict[str, Any]
    t_max: float = DEFAULTS['t_max']
    sample_count: int = DEFAULTS['sample_count']
    quad_tol: float = DEFAULTS['quad_tol']
    a: Optional[float] = None
    mu1: Optional[float] = None
    mu2: Optional[float] = None
    tau: Optional[float] = None
    xi: Optional[float] = None
    history: Optional[Dict[str, Any]] = None
    fdm: FdmSettings = FdmSettings()
    sweep: Tuple[Tuple[str, Tuple[float, ...]], ...] = ()
    path: Optional[str] = None

    @property
    def is_delay(self):
        return self.problem == 'dirichlet_delay'

    @property
    def geometry(self):
        return DomainGeometry(self.k)

    @property
    def times(self):
        return np.linspace(0.0, self.t_max, self.sample_count)

    def initial_data(self):
        spec = dict(self.initial)
        name = spec.pop('preset')
        a = spec.pop('a', self.a)
        return presets.make_initial(name, k=self.k, a=a, **spec)

    def history_data(self):
        spec = dict(self.history)
        name = spec.pop('preset')
        return presets.make_history(name, self.tau, **spec)

    def delay_params(self):
        return DelayParams(
            mu1=self.mu1, mu2=self.mu2, tau=self.tau, xi=self.xi, g0=self.history_data()
        )

    def build_profile(self, **options):
        """
        The characteristic profile of this scenario. ``options`` go to the
        delay profile (depth bound, break point cap and the like).
        """
        if self.is_delay:
            return DelayProfile(
                self.geometry,
                self.delay_params(),
                self.initial_data(),
                quad_tol=self.quad_tol,
                **options,
            )
        return NeumannProfile(self.geometry, self.a, self.initial_data())

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def to_record(self):
        record = {
            field.name: getattr(self, field.name)
            for field in dataclasses.fields(self)
            if getattr(self, field.name) is not None
        }
        record['fdm'] = dataclasses.asdict(self.fdm)
        record['sweep'] = {name: list(values) for name, values in self.sweep}
        record.pop('path', None)
        return record


def parse_range(text):
    """
    ``name=start:stop:step`` as a name and the grid it spans, both ends
    included.

    >>> name, values = parse_range('a=0:4:0.1')
    >>> name, len(values), values[-1]
    ('a', 41, 4.0)
    """
    name, sep, spec = text.partition('=')
    try:
        start, stop, step = (float(part) for part in spec.split(':'))
    except ValueError:
        raise ValidationError(f"range must look like name=start:stop:step, got {text!r}")
    if not sep or not name:
        raise ValidationError(f"range must look like name=start:stop:step, got {text!r}")
    return name.strip(), _grid(start, stop, step, field=name)


def _grid(start, stop, step, field=None):
    if step <= 0 or stop < start:
        raise ScenarioError("a range needs step > 0 and stop >= start", field=field)
    count = int(round((stop - start) / step)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(count), 12))


def _field_lines(path):
    "Line of each top-level key, for diagnostics."
    try:
        with open(path, encoding='utf-8') as f:
            # JSON allows tabs only as whitespace
            node = yaml.compose(f.read().expandtabs(), Loader=Loader)
    except (OSError, yaml.YAMLError):
        return {}
    if not isinstance(node, yaml.MappingNode):
        return {}
    return {key.value: key.start_mark.line + 1 for key, _ in node.value}


def _preset_spec(value, field):
    """
    Normalize ``"name"``, ``{"preset": name, ...}`` or ``{"samples": {...}}``
    to a mapping with a ``preset`` key.
    """
    if isinstance(value, str):
        return {'preset': value}
    if not isinstance(value, dict):
        raise ScenarioError("expected a preset name or a mapping", field=field)
    if 'samples' in value:
        if set(value) != {'samples'} or not isinstance(value['samples'], dict):
            raise ScenarioError("samples must be the only key, holding arrays", field=field)
        return dict(value['samples'], preset='samples')
    if 'preset' not in value:
        raise ScenarioError("a mapping needs a 'preset' or 'samples' key", field=field)
    return dict(value)


def _number(raw, field, kind=float):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ScenarioError(f"expected a number, got {raw!r}", field=field)
    value = kind(raw)
    if not math.isfinite(value):
        raise ScenarioError("must be finite", field=field)
    return value


def _sweep(raw):
    if raw is None:
        return ()
    if not isinstance(raw, dict):
        raise ScenarioError("expected a mapping of parameter grids", field='sweep')
    grids = []
    for name, spec in raw.items():
        field = f'sweep.{name}'
        if isinstance(spec, list):
            values = tuple(_number(v, field) for v in spec)
        elif isinstance(spec, dict) and set(spec) == {'start', 'stop', 'step'}:
            values = _grid(*(_number(spec[key], field) for key in ('start', 'stop', 'step')), field=field)
        else:
            raise ScenarioError("expected a list or {start, stop, step}", field=field)
        grids.append((name, values))
    return tuple(grids)


def _fdm(raw):
    if raw is None:
        return FdmSettings()
    if not isinstance(raw, dict) or not set(raw) <= {'ny', 'cfl'}:
        raise ScenarioError("expected a mapping with keys ny and cfl", field='fdm')
    settings = FdmSettings(**{key: _number(value, f'fdm.{key}') for key, value in raw.items()})
    return dataclasses.replace(settings, ny=int(settings.ny))


def scenario_from_mapping(raw, path=None, defaults=None):
    """
    Build a scenario from a parsed document. ``defaults`` override the
    built-in defaults for fields the document leaves out.
    """
    if not isinstance(raw, dict):
        raise ScenarioError("expected a mapping at the top level", path=path)
    problem = raw.get('problem')
    if problem not in PROBLEMS:
        raise ScenarioError(
            f"problem must be one of {', '.join(PROBLEMS)}, got {problem!r}",
            field='problem',
        )
    rules = PROBLEMS[problem]
    allowed = COMMON | rules['required'] | rules['optional']
    unexpected = sorted(set(raw) - allowed)
    if unexpected:
        raise ScenarioError(f"not a parameter of {problem}", field=unexpected[0])
    for name in ('k', 'initial', *sorted(rules['required'])):
        if name not in raw:
            raise ScenarioError(f"required for {problem}", field=name)

    values = {**DEFAULTS, **(defaults or {}), **raw}
    fields = dict(
        problem=problem,
        k=_number(values['k'], 'k'),
        initial=_preset_spec(values['initial'], 'initial'),
        t_max=_number(values['t_max'], 't_max'),
        sample_count=_number(values['sample_count'], 'sample_count', int),
        quad_tol=_number(values['quad_tol'], 'quad_tol'),
        fdm=_fdm(raw.get('fdm')),
        sweep=_sweep(raw.get('sweep')),
        path=path,
    )
    for name in rules['required'] | (rules['optional'] - {'history'}):
        fields[name] = _number(values[name], name)
    if 'history' in allowed:
        fields['history'] = _preset_spec(values['history'], 'history')
    return Scenario(**fields)


def validate(scenario):
    """
    Re-check the rules of every module the scenario feeds, by building
    its profile.
    """
    if scenario.t_max <= 0:
        raise ScenarioError("must be positive", field='t_max')
    if scenario.sample_count < 2:
        raise ScenarioError("must be at least 2", field='sample_count')
    if scenario.quad_tol <= 0:
        raise ScenarioError("must be positive", field='quad_tol')
    if scenario.is_delay and not 0 < scenario.tau < 1 / scenario.k:
        raise ScenarioError("tau must satisfy 0 < tau < 1/k", field='tau')
    scenario.build_profile()
    return scenario


def load_scenario(path, defaults=None):
    """
    Read, fill in and validate a scenario file. Errors name the field
    and, where the file gives it, the line.
    """
    raw = load_document(path)
    lines = _field_lines(path)
    try:
        scenario = validate(scenario_from_mapping(raw, path=str(path), defaults=defaults))
    except ScenarioError as exc:
        top = (exc.field or '').split('.')[0]
        raise ScenarioError(
            exc.args[0], path=str(path), field=exc.field, line=lines.get(top)
        ) from exc
    except ValidationError as exc:
        raise ScenarioError(str(exc), path=str(path)) from exc
    log.info("Loaded scenario %s", path)
    log.info(pprint.pformat(scenario.to_record()))
    return scenario
