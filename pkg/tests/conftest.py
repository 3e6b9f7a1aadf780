import numpy as np
import pytest

from patterndiv.asrgraph import EdgeWeightedGraph


@pytest.fixture
def triangle():
    """w01=0.9, w02=0.5, w12=0.3."""
    return EdgeWeightedGraph(3, {(0, 1): 0.9, (0, 2): 0.5, (1, 2): 0.3})


@pytest.fixture
def four_vertex():
    """4-cycle with weights 0.9, 0.4, 0.8, 0.1 used for the EWVC-PD hand trace."""
    return EdgeWeightedGraph(4, {(0, 1): 0.9, (1, 2): 0.4, (2, 3): 0.8, (0, 3): 0.1})


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_weighted_graph(rng, G, density=0.5):
    W = np.triu(rng.uniform(0.01, 1.0, (G, G)) * (rng.random((G, G)) < density), 1)
    return EdgeWeightedGraph.from_matrix(W + W.T)
