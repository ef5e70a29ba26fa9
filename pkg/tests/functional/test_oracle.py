"""
Cross-validation of the characteristic solutions against the
finite-difference oracle. Run with ``pytest -m slow``.
"""

import pytest

from mbwave import core


pytestmark = pytest.mark.slow


@pytest.mark.parametrize('name', ['example1.json', 'delay-bump.json'])
def test_verify_passes(name, shipped, capsys):
    argv = ['verify', '--scenario', str(shipped(name))]
    assert core.run(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == 'ny,h,l2_error,order'
    assert [line.split(',')[0] for line in lines[1:4]] == ['128', '256', '512']
    assert lines[-1].startswith('PASS: ')


def test_verify_grid_ladder(shipped, capsys):
    argv = ['verify', '--scenario', str(shipped('example1.json')), '--grid', 'ny=256,tmax=0.5']
    assert core.run(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert [line.split(',')[0] for line in lines[1:4]] == ['64', '128', '256']
