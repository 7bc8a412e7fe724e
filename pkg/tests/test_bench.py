import numpy as np

from oblivgraph import bench
from oblivgraph.omem import CIRCUIT, LINEAR
from oblivgraph.pagerank import STANDARD


def test_fit_recovers_exact_constants():
    terms = [[n, n * n] for n in (2, 4, 8, 16)]
    measured = [3 * a + 0.5 * b for a, b in terms]
    f = bench.fit(measured, terms)
    assert np.allclose(f.constants, [3, 0.5])
    assert abs(f.worst_ratio - 1) < 1e-9


def test_worst_ratio_is_symmetric():
    f = bench.Fit([1.0], [10.0, 10.0], [0.5, 1.25])
    assert f.worst_ratio == 2.0


def test_measure_deterministic_and_backend_sensitive():
    a = bench.measure_kshell(16, 32, CIRCUIT, seed=1)
    assert a == bench.measure_kshell(16, 32, CIRCUIT, seed=3)  # cost depends on sizes only
    assert bench.measure_kshell(16, 32, LINEAR, seed=1) != a
    p = bench.measure_pagerank(8, 16, 2, STANDARD, CIRCUIT, seed=0)
    assert p == bench.measure_pagerank(8, 16, 2, STANDARD, CIRCUIT, seed=9)


def test_terms_grow():
    assert bench.kshell_terms(64, 256)[0] > bench.kshell_terms(32, 128)[0]
    assert bench.pagerank_terms(64, 256, 10)[0] > bench.pagerank_terms(32, 128, 10)[0]
