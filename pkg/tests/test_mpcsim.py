import random
from fractions import Fraction

import pytest
from scipy.stats import chisquare

from conftest import FIXTURES
from oblivgraph.abb import MASK
from oblivgraph.errors import PartitionError, ProtocolError
from oblivgraph.graph import (PartyInput, build_edgelist, merge_party_inputs, read_graph,
                              read_parties, symmetrize)
from oblivgraph.kshell import kshell_oblivious
from oblivgraph.mpcsim import (ADDITIVE, IDEAL_HOST, Dealer, Party, SharedBlackBox, ShareSet,
                               Transcript, beaver_mul, deal_inputs, reconstruct_edgelist,
                               run_protocol, split, triple_gen)
from oblivgraph.pagerank import pagerank_oblivious

S = Fraction(85, 100)
FIXTURE_NAMES = sorted(p.name for p in FIXTURES.glob("*.txt"))


def partition(n, edges, k):
    """Round-robin node partition; each edge goes to the owner of its source."""
    k = min(k, n)
    parts = [PartyInput(f"P{i + 1}", set(), []) for i in range(k)]
    for v in range(1, n + 1):
        parts[(v - 1) % k].vertices.add(v)
    for u, v in edges:
        parts[(u - 1) % k].edges.append((u, v))
    return parts


def load(name, sym=False):
    n, edges = read_graph(FIXTURES / name)
    return n, symmetrize(edges) if sym else edges


def test_split_reconstruct():
    rng = random.Random(1)
    for v in (0, 1, -1, 1 << 63, 12345):
        sh = ShareSet(split(v, 4, rng))
        assert len(sh) == 4 and sh.reconstruct() == v & MASK


def test_triples():
    dealer = Dealer(3, seed=5)
    ts = triple_gen(dealer, 10_000, seed=9)
    for t in ts:
        assert t.a.reconstruct() * t.b.reconstruct() & MASK == t.c.reconstruct()
    again = triple_gen(Dealer(3), 10_000, seed=9)
    assert [t.c.shares for t in ts] == [t.c.shares for t in again]
    assert triple_gen(dealer, 0) == []
    with pytest.raises(ValueError):
        triple_gen(dealer, -1)


def test_beaver_examples():
    rng = random.Random(2)
    dealer = Dealer(3, seed=2)
    sh = lambda v: ShareSet(split(v, 3, rng))  # noqa: E731
    assert beaver_mul(sh(3), sh(4), dealer.triple()).reconstruct() == 12
    assert beaver_mul(sh(0), sh(987654321), dealer.triple()).reconstruct() == 0
    t = dealer.triple()
    beaver_mul(sh(1), sh(1), t)
    with pytest.raises(ProtocolError):
        beaver_mul(sh(1), sh(1), t)


def test_ten_thousand_beaver_products():
    rng = random.Random(3)
    dealer = Dealer(3, seed=3)
    for t in triple_gen(dealer, 10_000, seed=4):
        x, y = rng.getrandbits(64), rng.getrandbits(64)
        z = beaver_mul(ShareSet(split(x, 3, rng)), ShareSet(split(y, 3, rng)), t)
        assert z.reconstruct() == (x * y) & MASK


@pytest.mark.parametrize("depth", [1, 2, 5])
def test_multiplication_chain_rounds(depth):
    rng = random.Random(depth)
    dealer = Dealer(2)
    tr = Transcript()
    acc = ShareSet(split(1, 2, rng))
    for _ in range(depth):
        acc = beaver_mul(acc, ShareSet(split(3, 2, rng)), dealer.triple(), tr)
    assert tr.rounds == depth and acc.reconstruct() == 3 ** depth
    assert {m.kind for m in tr.messages} == {"beaver-open"}


def test_shared_box_arithmetic():
    box = SharedBlackBox(3, seed=1)
    a, b = box.store(-6), box.store(7)
    assert box.release(a * b) == -42
    assert box.release(a + b) == 1
    assert box.release(box.lt(a, b)) == 1
    assert box.release(box.div(box.store(1.0, "fixed"), box.store(4.0, "fixed"))) == Fraction(1, 4)
    assert box.shares_of(a).reconstruct() == -6 & MASK
    kinds = {m.kind for m in box.transcript.messages}
    assert {"input-share", "beaver-open", "release", "host-request", "host-response"} <= kinds


@pytest.mark.parametrize("name", FIXTURE_NAMES)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_deal_round_trip(name, k):
    n, edges = load(name)
    parts = partition(n, edges, k)
    box = SharedBlackBox(len(parts), seed=k)
    sel = deal_inputs(parts, box, n)
    assert reconstruct_edgelist(box, sel) == merge_party_inputs(parts, n)
    if k == 1:
        assert reconstruct_edgelist(box, sel) == build_edgelist(n, edges)


def test_bank_partition_matches_central_build():
    parts, n = read_parties(FIXTURES / "bank")
    box = SharedBlackBox(3)
    el = reconstruct_edgelist(box, deal_inputs(parts, box, n))
    central = build_edgelist(n, sorted({e for p in parts for e in p.edges}))
    assert sorted(el.edges()) == sorted(central.edges())
    with pytest.raises(PartitionError):
        deal_inputs([PartyInput("a", {1, 2}), PartyInput("b", {2})], box, 2)


def test_k4_two_parties():
    n, edges = load("k4.txt")
    for backend in (IDEAL_HOST, ADDITIVE):
        out, _ = run_protocol(partition(n, edges, 2), "kshell", backend)
        assert out == [3, 3, 3, 3]


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_ideal_host_equals_single_machine(name):
    n, edges = load(name, sym=True)
    parts = partition(n, edges, 2)
    single = kshell_oblivious(build_edgelist(n, edges), backend="circuit")
    assert run_protocol(parts, "kshell", IDEAL_HOST)[0] == single
    n, edges = load(name)
    parts = partition(n, edges, 2)
    for mode in ("literal", "standard"):
        single = pagerank_oblivious(build_edgelist(n, edges), 3, S, mode, backend="circuit")
        out, _ = run_protocol(parts, "pagerank", IDEAL_HOST, mode=mode, l=3, s=S)
        assert out == single


@pytest.mark.parametrize("name", ["k4.txt", "cycle3.txt", "dangling4.txt"])
def test_additive_equals_ideal(name):
    n, edges = load(name, sym=True)
    parts = partition(n, edges, 3)
    assert run_protocol(parts, "kshell", ADDITIVE, seed=4)[0] == \
        run_protocol(parts, "kshell", IDEAL_HOST)[0]
    n, edges = load(name)
    parts = partition(n, edges, 3)
    a, _ = run_protocol(parts, "pagerank", ADDITIVE, mode="standard", l=2, s=S, seed=4)
    b, _ = run_protocol(parts, "pagerank", IDEAL_HOST, mode="standard", l=2, s=S)
    assert a == b


@pytest.mark.parametrize("backend", [IDEAL_HOST, ADDITIVE])
def test_transcript_shape_depends_on_sizes_only(backend):
    _, star = load("star4.txt")
    _, path = load("path4.txt")
    _, ta = run_protocol(partition(4, star, 2), "kshell", backend, seed=1)
    _, tb = run_protocol(partition(4, path, 2), "kshell", backend, seed=2)
    assert ta.shape() == tb.shape() and ta.to_text() == tb.to_text()
    a = build_edgelist(4, [(1, 2), (1, 3), (3, 4), (4, 1)])
    b = build_edgelist(4, [(1, 2), (2, 3), (3, 4), (4, 1)])
    _, ta = run_protocol(partition(4, a.edges(), 2), "pagerank", backend, l=2)
    _, tb = run_protocol(partition(4, b.edges(), 2), "pagerank", backend, l=2)
    assert ta.shape() == tb.shape()


def test_transcript_text_and_inboxes():
    n, edges = load("k4.txt")
    parties = [Party(p.party_id, p) for p in partition(n, edges, 2)]
    out, tr = run_protocol(parties, "kshell", IDEAL_HOST)
    first = tr.to_text().splitlines()[0].split()
    assert first == ["1", "P1", "host", "input", str((n * n + 7) // 8)]
    assert any(m.kind == "output" for m in parties[0].inbox)
    assert tr.totals()["messages"] == len(tr.messages)


def test_share_marginals_are_uniform():
    dealer = Dealer(3, seed=2024)
    bins = 16
    counts = [[0] * bins for _ in range(3)]
    for _ in range(10_000):
        for p, share in enumerate(dealer.share(42).shares):
            counts[p][share >> 60] += 1
    for row in counts:
        assert chisquare(row).pvalue > 0.001
