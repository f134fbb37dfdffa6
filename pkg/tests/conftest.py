import itertools
import random
import sys

import networkx as nx
import pytest

from fairmso.graph import Graph


def nx_to_graph(g):
    g = nx.convert_node_labels_to_integers(g, ordering="sorted")
    return Graph(g.number_of_nodes(), g.edges())


def graph_to_nx(G):
    h = nx.Graph()
    h.add_nodes_from(range(G.n))
    h.add_edges_from(G.edges())
    return h


def subsets(n):
    for mask in range(1 << n):
        yield {v for v in range(n) if mask >> v & 1}


def random_graph(rng, n, p):
    return Graph(n, [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p])


def random_cluster_with_modulator(rng, n, d, p_mod=0.5, max_clique=4):
    """Random graph whose first ``d`` vertices form a cluster deletion set."""
    d = min(d, n)
    edges = []
    rest = list(range(d, n))
    cliques = []
    while rest:
        s = rng.randint(1, min(max_clique, len(rest)))
        cliques.append(rest[:s])
        rest = rest[s:]
    for C in cliques:
        edges += list(itertools.combinations(C, 2))
    for m in range(d):
        for v in range(d, n):
            if rng.random() < p_mod:
                edges.append((m, v))
        for m2 in range(m + 1, d):
            if rng.random() < 0.5:
                edges.append((m, m2))
    return Graph(n, edges), list(range(d))


@pytest.fixture
def rng():
    return random.Random(12345)


P3 = Graph(3, [(0, 1), (1, 2)])
K2 = Graph(2, [(0, 1)])
K3 = Graph(3, [(0, 1), (1, 2), (0, 2)])
C5 = Graph(5, [(i, (i + 1) % 5) for i in range(5)])
P4 = Graph(4, [(0, 1), (1, 2), (2, 3)])
STAR3 = Graph(4, [(0, 1), (0, 2), (0, 3)])
STAR4 = Graph(5, [(0, i) for i in range(1, 5)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[key])
