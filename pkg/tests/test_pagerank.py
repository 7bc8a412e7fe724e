from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from conftest import digraphs
from oblivgraph.abb import BlackBox
from oblivgraph.graph import build_edgelist
from oblivgraph.ingest import load_array
from oblivgraph.omem import CIRCUIT, LINEAR
from oblivgraph.pagerank import (LITERAL, STANDARD, PageRankProtocol, build_update_matrix,
                                 pagerank_oblivious, pagerank_oracle_list,
                                 pagerank_oracle_matrix, update_matrix)
from oblivgraph.tracecheck import edge_update_events, record

CYCLE3 = build_edgelist(3, [(1, 2), (2, 3), (3, 1)])
K3 = build_edgelist(3, [(u, v) for u in range(1, 4) for v in range(1, 4) if u != v])
S = Fraction(85, 100)
TOL = 1e-5


def close(a, b, tol=TOL):
    return np.max(np.abs(np.array([float(x) for x in a]) - np.array(b, dtype=float))) <= tol


@pytest.mark.parametrize("backend", [LINEAR, CIRCUIT])
def test_update_matrix_examples(backend):
    N = build_update_matrix(build_edgelist(3, [(1, 2)]), S, backend=backend)
    res = Fraction(1, 1 << 29)
    assert abs(N[0][1] - Fraction(9, 10)) <= res
    for i, j in [(0, 0), (0, 2)] + [(r, c) for r in (1, 2) for c in range(3)]:
        assert abs(N[i][j] - Fraction(5, 100)) <= res
    N1 = build_update_matrix(build_edgelist(1, []), S, backend=backend)
    assert abs(N1[0][0] - Fraction(15, 100)) <= res


def test_update_matrix_trace_ignores_s():
    def trace(s):
        box = BlackBox()
        build_update_matrix(CYCLE3, s, box=box)
        return box.events

    assert trace(0.85) == trace(0.5)


@pytest.mark.parametrize("backend", [LINEAR, CIRCUIT])
def test_examples(backend):
    lit = pagerank_oblivious(CYCLE3, 1, S, LITERAL, backend=backend)
    assert close(lit, [0.3, 0.3, 0.3], 1e-8)
    std = pagerank_oblivious(CYCLE3, 7, S, STANDARD, backend=backend)
    assert close(std, [1 / 3] * 3, 1e-8)
    two = pagerank_oblivious(build_edgelist(2, [(1, 2)]), 1, S, STANDARD, backend=backend)
    assert close(two, [0.075, 0.5], 1e-8)


def test_oracle_examples():
    adj = K3.adjacency()
    for l in (0, 1, 5):
        assert np.allclose(pagerank_oracle_matrix(3, adj, l, 0.85), 1 / 3)
    assert np.allclose(pagerank_oracle_matrix(2, {1: [2], 2: []}, 1, 0.85), [0.075, 0.5])
    assert np.allclose(pagerank_oracle_list(3, CYCLE3.adjacency(), 1, 0.85), 0.3)
    isolated = {1: [2], 2: [1], 3: []}
    assert pagerank_oracle_list(3, isolated, 4, 0.85)[2] == 0
    # the two semantics differ on the 3-cycle
    assert not np.allclose(pagerank_oracle_list(3, CYCLE3.adjacency(), 1, 0.85),
                           pagerank_oracle_matrix(3, CYCLE3.adjacency(), 1, 0.85))


def test_update_matrix_oracle_matches_oblivious():
    el = build_edgelist(4, [(1, 2), (1, 3), (3, 4), (4, 1)])
    N = build_update_matrix(el, S)
    ref = update_matrix(4, el.adjacency(), 0.85)
    assert np.max(np.abs(np.array(N, dtype=float) - ref)) < 2 ** -29


def test_sources_after_dangling_node():
    # node 2 has out-degree 0; the edge (3, 1) must be credited to node 3
    el = build_edgelist(3, [(1, 2), (3, 1)])
    box = BlackBox()
    proto = PageRankProtocol(box, el, 1, S)
    proto.Idx = load_array(box, proto.g.Idx, LINEAR)
    proto.E = load_array(box, proto.g.E, LINEAR)
    proto.edge_sources()
    assert [box.peek(proto.src.read(t)) for t in (1, 2)] == [1, 3]
    got = pagerank_oblivious(el, 3, S, LITERAL)
    assert close(got, pagerank_oracle_list(3, el.adjacency(), 3, 0.85))


@given(digraphs(max_n=7))
def test_modes_match_their_oracles(el):
    adj = el.adjacency()
    for mode, oracle in [(LITERAL, pagerank_oracle_list), (STANDARD, pagerank_oracle_matrix)]:
        got = pagerank_oblivious(el, 4, S, mode, check_invariants=True)
        assert close(got, oracle(el.n, adj, 4, 0.85))


@given(digraphs(max_n=6))
def test_circuit_backend_agrees(el):
    for mode in (LITERAL, STANDARD):
        a = pagerank_oblivious(el, 3, S, mode, backend=LINEAR)
        b = pagerank_oblivious(el, 3, S, mode, backend=CIRCUIT)
        assert a == b


def test_rank_sum_without_dangling_nodes():
    el = build_edgelist(4, [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])
    for l in range(1, 6):
        r = pagerank_oblivious(el, l, S, STANDARD)
        assert abs(float(sum(r)) - 1) <= TOL


def test_edge_update_count():
    el = build_edgelist(4, [(1, 2), (2, 3), (3, 4)])
    for mode in (LITERAL, STANDARD):
        _, trace = record("pagerank", el, l=5, s=S, mode=mode)
        segs = trace.segments("pagerank:edge")
        assert len(segs) == 5 * 3
        assert {len(seg) for seg in segs} == {edge_update_events(4, 3, mode)}
        # the two rank buffers alternate, so sweeps of equal parity match exactly
        sweeps = [segs[k:k + 3] for k in range(0, 15, 3)]
        assert sweeps[0] == sweeps[2] == sweeps[4] and sweeps[1] == sweeps[3]


def test_modes_have_different_traces():
    _, a = record("pagerank", CYCLE3, l=2, s=S, mode=LITERAL)
    _, b = record("pagerank", CYCLE3, l=2, s=S, mode=STANDARD)
    assert a.digest != b.digest


def test_arguments():
    with pytest.raises(ValueError):
        pagerank_oblivious(CYCLE3, 0)
    with pytest.raises(ValueError):
        pagerank_oblivious(CYCLE3, 1, 1.5)
    with pytest.raises(ValueError):
        pagerank_oblivious(CYCLE3, 1, S, "weird")
