import json
import pathlib

import numpy as np
import pytest


SCENARIOS = pathlib.Path(__file__).parent.parent / 'scenarios'


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def scenario_file(tmp_path):
    """
    Write a scenario mapping as indented JSON, one key per line, and
    return its path.
    """

    def write(mapping, name='scenario.json'):
        path = tmp_path / name
        path.write_text(json.dumps(mapping, indent=2), encoding='utf-8')
        return path

    return write


@pytest.fixture
def shipped():
    "Path of a scenario shipped with the repository."
    return lambda name: SCENARIOS / name
