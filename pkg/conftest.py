"""
Shared fixtures: the two-atom example, seeded generators and scenario CSVs
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

from georisk.prob_core import PositivePosition, ProbSpace, Scenario, ScenarioSet
from georisk.settings import get_settings


@pytest.fixture
def fresh_settings(monkeypatch):
    """Rebuild the cached settings around a test that sets GEORISK_* variables"""
    monkeypatch.delenv('GEORISK_ARCHIVE_PATH', raising=False)
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()


@pytest.fixture
def two_atoms():
    return ProbSpace.uniform(2)


@pytest.fixture
def x_example(two_atoms):
    """X = (1, e^3) on two equiprobable atoms"""
    return PositivePosition(two_atoms, np.array([1.0, math.exp(3.0)]))


@pytest.fixture
def y_example(two_atoms):
    """Y = e^2"""
    return PositivePosition(two_atoms, np.full(2, math.exp(2.0)))


@pytest.fixture
def tilted(two_atoms):
    """Scenario with density (0.8, 1.2)"""
    return Scenario(two_atoms, np.array([0.8, 1.2]), label='d1')


@pytest.fixture
def two_scenarios(two_atoms, tilted):
    return ScenarioSet.of(tilted, Scenario(two_atoms, np.array([1.2, 0.8]), label='d2'))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def scenario_csv(tmp_path):
    """Write a scenario CSV from a header and rows; returns the path"""

    def write(header, rows, name='scenarios.csv'):
        path = tmp_path / name
        lines = [','.join(header)] + [','.join(str(v) for v in row) for row in rows]
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
        return path

    return write


@pytest.fixture
def example_csv(scenario_csv):
    """Two atoms, two densities, X = (1, e^3), Y = e^2 and Z = X * Y"""
    e3, e2 = math.exp(3.0), math.exp(2.0)
    return scenario_csv(
        ['outcome', 'p', 'd1', 'd2', 'X', 'Y', 'Z'],
        [['w1', 0.5, 0.8, 1.2, 1.0, repr(e2), repr(e2)],
         ['w2', 0.5, 1.2, 0.8, repr(e3), repr(e2), repr(e3 * e2)]],
    )
