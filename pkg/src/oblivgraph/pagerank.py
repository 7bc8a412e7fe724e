"""Oblivious PageRank over the edgelist, and the two clear oracles.

``literal`` mode accumulates only along edges, r_u += N[v][u] * r_v, exactly
as the edge-loop pseudocode does.  ``standard`` mode follows the matrix
update rule r_i = sum_j N[j][i] * r_j over all j: the edge loop uses the link
weight s/od(v) and an O(n) teleport pass adds (1-s)/n * sum(r) to every node.
The two modes give different numbers and both are certified separately.

The update matrix is materialized in an n*n oblivious array.  Edge sources
come from a coalesced n+m-1 step pass over Idx (a single ``v += 1`` per edge
would misattribute edges that follow a node of out-degree 0).
"""

from fractions import Fraction

import numpy as np

from .abb import BlackBox, Secret, SecretFixed
from .errors import ValidationError
from .graph import EdgeList, validate_edgelist
from .ingest import as_secret, load_array
from .omem import LINEAR, ObliviousArray

LITERAL = "literal"
STANDARD = "standard"
MODES = (LITERAL, STANDARD)


class PageRankProtocol:
    def __init__(self, box, graph, l, s, mode=LITERAL, backend=LINEAR, check_invariants=False):
        if mode not in MODES:
            raise ValueError(f"unknown PageRank mode {mode!r}")
        if not isinstance(l, int) or l < 0:
            raise ValueError(f"iteration count must be a non-negative integer, got {l!r}")
        self.box = box
        self.mode = mode
        self.backend = backend
        self.l = l
        self.check_invariants = check_invariants
        self.g = as_secret(box, graph)
        self.n, self.m = self.g.n, self.g.m
        self.s = s if isinstance(s, SecretFixed) else box.store(s, "fixed")
        self.edge_updates = 0

    def run(self):
        box = self.box
        box.mark("pagerank:load")
        self.Idx = load_array(box, self.g.Idx, self.backend)
        self.E = load_array(box, self.g.E, self.backend)
        box.mark("pagerank:matrix")
        self.build_update_matrix()
        box.mark("pagerank:sources")
        self.edge_sources()
        box.mark("pagerank:scatter")
        self.scatter_links()
        box.mark("pagerank:sweeps")
        self.sweeps()
        box.mark("pagerank:output")
        return self.output()

    def build_update_matrix(self):
        box, n, Idx = self.box, self.n, self.Idx
        self.teleport = (1 - self.s) / n
        self.row = ObliviousArray(box, n, "fixed", self.backend)
        self.N = ObliviousArray(box, n * n, "fixed", self.backend)
        for i in range(1, n + 1):
            self.row.write(i, self.row_value(Idx.read(i), Idx.read(i + 1)))
            for j in range(1, n + 1):
                self.N.write((i - 1) * n + j, self.teleport)

    def row_value(self, start, end):
        """Entry of N for an edge leaving a node whose E-range is [start, end)."""
        box = self.box
        od = end - start
        dangling = box.eq(od, 0)
        link = self.s / box.to_fixed(od + dangling) + self.teleport
        return box.mux(dangling, self.teleport, link)

    def edge_sources(self):
        """src[t] = source node of the t-th edge, by a coalesced walk over Idx."""
        box, Idx = self.box, self.Idx
        self.src = ObliviousArray(box, self.m + 1, "int", self.backend)
        v = box.store(1)
        j = box.store(1)
        for _ in range(self.n + self.m - 1):
            advance = box.eq(j, Idx.read(v + 1))
            self.src.write(j, box.mux(advance, self.src.read(j), v))
            v = v + advance
            j = j + (1 - advance)

    def flat_index(self, v, u):
        return v * self.n - self.n + u

    def scatter_links(self):
        for t in range(1, self.m + 1):
            v = self.src.read(t)
            u = self.E.read(t)
            self.N.write(self.flat_index(v, u), self.row.read(v))

    def sweeps(self):
        box, n = self.box, self.n
        self.r = [ObliviousArray(box, n, "fixed", self.backend) for _ in range(2)]
        start = Fraction(1, n)
        for i in range(1, n + 1):
            self.r[0].write(i, start)
        for k in range(1, self.l + 1):
            cur, prev = self.r[k % 2], self.r[1 - k % 2]
            writes_before = prev.writes
            for t in range(1, self.m + 1):
                box.mark("pagerank:edge")
                self.edge_update(t, cur, prev)
                self.edge_updates += 1
            box.mark("pagerank:sweep-end")
            if self.mode == STANDARD:
                self.teleport_pass(cur, prev)
            if self.check_invariants:
                assert prev.writes == writes_before, "read buffer written during its sweep"
            for i in range(1, n + 1):
                prev.write(i, 0)

    def edge_update(self, t, cur, prev):
        v = self.src.read(t)
        u = self.E.read(t)
        weight = self.N.read(self.flat_index(v, u))
        if self.mode == STANDARD:
            weight = weight - self.teleport
        incoming = weight * prev.read(v)
        cur.write(u, cur.read(u) + incoming)

    def teleport_pass(self, cur, prev):
        total = prev.read(1)
        for i in range(2, self.n + 1):
            total = total + prev.read(i)
        share = self.teleport * total
        for i in range(1, self.n + 1):
            cur.write(i, cur.read(i) + share)

    def output(self):
        final = self.r[self.l % 2]
        return [self.box.release(final.read(i)) for i in range(1, self.n + 1)]


def _check(graph):
    if isinstance(graph, EdgeList):
        problems = validate_edgelist(graph)
        if problems:
            raise ValidationError(problems)


def build_update_matrix(graph, s, *, backend=LINEAR, box=None):
    """Materialize N obliviously; returns the released n x n matrix of Fractions."""
    _check(graph)
    box = box or BlackBox(record=False)
    proto = PageRankProtocol(box, graph, 0, s, LITERAL, backend)
    proto.Idx = load_array(box, proto.g.Idx, backend)
    proto.E = load_array(box, proto.g.E, backend)
    proto.build_update_matrix()
    proto.edge_sources()
    proto.scatter_links()
    n = proto.n
    flat = [box.release(proto.N.read(k)) for k in range(1, n * n + 1)]
    return [flat[i * n : (i + 1) * n] for i in range(n)]


def pagerank_oblivious(graph, l=30, s=Fraction(85, 100), mode=LITERAL, *, backend=LINEAR,
                       box=None, check_invariants=False, protocol=PageRankProtocol):
    """Released PageRank vector (Fractions) after ``l`` sweeps."""
    _check(graph)
    if not isinstance(l, int) or l < 1:
        raise ValueError("l must be >= 1")
    if box is None:
        box = BlackBox(record=False, diagnostics=check_invariants)
    if not isinstance(s, Secret):
        s_clear = Fraction(s)
        if not 0 < s_clear < 1:
            raise ValueError(f"s must lie in (0, 1), got {s}")
    return protocol(box, graph, l, s, mode, backend, check_invariants).run()


# -- clear oracles ------------------------------------------------------------


def update_matrix(n, adjacency, s):
    """Dense N as floats: s/od(i) + (1-s)/n on edges (i, j), (1-s)/n elsewhere."""
    N = np.full((n, n), (1.0 - s) / n)
    for i in range(1, n + 1):
        out = list(adjacency.get(i, ()))
        for j in out:
            N[i - 1, j - 1] = s / len(out) + (1.0 - s) / n
    return N


def pagerank_oracle_matrix(n, adjacency, l, s):
    """r^(k)_i = sum_j N_ji r^(k-1)_j, dense floating point."""
    N = update_matrix(n, adjacency, float(s))
    r = np.full(n, 1.0 / n)
    for _ in range(l):
        r = N.T @ r
    return r


def pagerank_oracle_list(n, adjacency, l, s):
    """Edge-only accumulation r^(k)_j += N_ij r^(k-1)_i over the edges (i, j)."""
    N = update_matrix(n, adjacency, float(s))
    r = [1.0 / n] * n
    for _ in range(l):
        nxt = [0.0] * n
        for i in range(1, n + 1):
            for j in adjacency.get(i, ()):
                nxt[j - 1] += N[i - 1, j - 1] * r[i - 1]
        r = nxt
    return np.array(r)
