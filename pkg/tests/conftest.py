from pathlib import Path

import pytest

from graph_processing.decompose import D_HAT_2, K2, ModParallel, ModSeries, apply_tau, dipole, merge_strands, realize
from graph_processing.multigraph import Multigraph, parse_graph

GRAPHS = Path(__file__).resolve().parents[1] / "pipeline" / "graphs"


@pytest.fixture
def graphs_dir():
    return GRAPHS


@pytest.fixture
def d3():
    return dipole(3)


@pytest.fixture
def g1():
    """D3 after one dmt-step"""
    return apply_tau(dipole(3), 0)


@pytest.fixture
def k4():
    return Multigraph.from_edge_pairs([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def strand_expressions():
    n1 = ModSeries((D_HAT_2, D_HAT_2))
    n2 = ModSeries((D_HAT_2, ModParallel(D_HAT_2, K2)))
    n3 = ModParallel(D_HAT_2, D_HAT_2)
    return n1, n2, n3


@pytest.fixture
def worked_example(strand_expressions):
    """The 18-vertex graph, rebuilt from its three strand expressions; terminals 0 and 1"""
    return merge_strands([realize(expr) for expr in strand_expressions])


@pytest.fixture
def worked_example_file():
    return parse_graph((GRAPHS / "worked_example_18.txt").read_text())


@pytest.fixture
def bridged_dipoles():
    return parse_graph((GRAPHS / "bridged_dipoles.txt").read_text())
