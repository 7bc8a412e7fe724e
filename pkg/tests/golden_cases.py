"""Fixed runs whose trace digests are frozen in tests/golden/."""

import random
from fractions import Fraction

from oblivgraph.graph import build_edgelist, random_edges, read_graph
from conftest import FIXTURES


def _fixture(name):
    return build_edgelist(*read_graph(FIXTURES / name))


def _random(n, m, seed, symmetric):
    return build_edgelist(n, random_edges(n, m, random.Random(seed), symmetric=symmetric))


S = Fraction(85, 100)

CASES = {
    "kshell_k4_linear": ("kshell", lambda: _fixture("k4.txt"), dict(backend="linear")),
    "kshell_k4_circuit": ("kshell", lambda: _fixture("k4.txt"), dict(backend="circuit")),
    "kshell_n16_m40_seed1_linear": ("kshell", lambda: _random(16, 40, 1, True),
                                    dict(backend="linear")),
    "pagerank_cycle3_literal_l3_linear": ("pagerank", lambda: _fixture("cycle3.txt"),
                                          dict(l=3, s=S, mode="literal", backend="linear")),
    "pagerank_cycle3_standard_l3_linear": ("pagerank", lambda: _fixture("cycle3.txt"),
                                           dict(l=3, s=S, mode="standard", backend="linear")),
    "pagerank_n10_m25_seed2_standard_l4_circuit": (
        "pagerank", lambda: _random(10, 25, 2, False),
        dict(l=4, s=S, mode="standard", backend="circuit")),
}
