import math
from pathlib import Path

import numpy as np
import pytest

from bodies import VPolytope, Zonotope

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def segment(n, axis):
    """Unit segment along e_axis, centered at the origin."""
    gens = np.zeros((1, n))
    gens[0, axis] = 0.5
    return Zonotope(gens)


def direction_segment(degrees):
    theta = math.radians(degrees)
    return Zonotope([[0.5 * math.cos(theta), 0.5 * math.sin(theta)]])


def unit_cube_zonotope(n):
    return Zonotope(0.5 * np.eye(n))


def box(lengths):
    """Axis-aligned box [0, l_1] x ... x [0, l_n] as a vertex list."""
    corners = np.array(np.meshgrid(*[[0.0, l] for l in lengths], indexing="ij")).reshape(len(lengths), -1).T
    return VPolytope(corners)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture(autouse=True)
def _default_budget(monkeypatch):
    monkeypatch.delenv("ZONOVOL_BUDGET", raising=False)
