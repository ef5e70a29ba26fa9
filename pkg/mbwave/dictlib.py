import json
import pathlib
import re

import yaml
from jaraco.collections import ItemsAsAttributes

from .errors import ScenarioError


class Loader(yaml.SafeLoader):
    "Safe loader that also reads ``1e-10`` (no decimal point) as a float."


Loader.add_implicit_resolver(
    'tag:yaml.org,2002:float',
    re.compile(
        r'''^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$''',
        re.X,
    ),
    list('-+0123456789.'),
)


def load_yaml(filename):
    """
    Parse a YAML file, reporting the position of any syntax error.
    """
    try:
        with open(filename, encoding='utf-8') as f:
            return yaml.load(f, Loader=Loader)
    except OSError as exc:
        raise ScenarioError(exc.strerror or str(exc), path=filename) from exc
    except yaml.YAMLError as exc:
        mark = getattr(exc, 'problem_mark', None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, 'problem', None) or str(exc)
        raise ScenarioError(problem, path=filename, line=line) from exc


def load_json(filename):
    try:
        with open(filename, encoding='utf-8') as f:
            return json.load(f)
    except OSError as exc:
        raise ScenarioError(exc.strerror or str(exc), path=filename) from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, path=filename, line=exc.lineno) from exc


def load_document(filename):
    """
    Parse a ``.json`` file as JSON and anything else as YAML.
    """
    if pathlib.Path(filename).suffix.lower() == '.json':
        return load_json(filename)
    return load_yaml(filename)


class ConfigDict(ItemsAsAttributes, dict):
    @classmethod
    def from_yaml(cls, filename):
        loaded = load_yaml(filename)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ScenarioError("expected a mapping at the top level", path=filename)
        return cls(loaded)
