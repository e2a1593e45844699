import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from collabnet.graph import from_edges


@pytest.fixture
def triangle():
    return from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture
def path4():
    return from_edges([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])


@pytest.fixture
def star5():
    # hub 0 with 4 leaves
    return from_edges([(0, i, 1.0) for i in range(1, 5)])


@pytest.fixture
def bowtie():
    # triangles {0,1,2} and {2,3,4} sharing node 2
    return from_edges([(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0),
                       (2, 3, 1.0), (2, 4, 1.0), (3, 4, 1.0)])


@pytest.fixture
def k4():
    return from_edges([(i, j, 1.0) for i in range(4) for j in range(i + 1, 4)])


@pytest.fixture
def k5():
    return from_edges([(i, j, 1.0) for i in range(5) for j in range(i + 1, 5)])
