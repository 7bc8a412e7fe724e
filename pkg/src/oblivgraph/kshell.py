"""Oblivious K-shell decomposition by loop coalescing, and its clear oracle.

The oblivious protocol walks the vertex list sorted by degree and the edge
array with a single loop of exactly n+m-1 iterations.  Each iteration either
advances to the next vertex or processes one neighbor of the current vertex;
both arms run every time and the state update is chosen with ``mux``.  The
cursors i, j, v are secret, so vert, Idx, E, deg, pos and bin are only ever
indexed through oblivious arrays.

The shell of v is the final value of deg[v]: a vertex's degree stops
changing once it is pruned.
"""

from .abb import BlackBox
from .errors import PreconditionError, ValidationError
from .graph import EdgeList, validate_edgelist
from .ingest import as_secret, load_array
from .omem import LINEAR, ObliviousArray
from .osort import sort_handles


class KShellProtocol:
    """One run of the protocol.  Step methods exist so variants can override them."""

    def __init__(self, box, graph, backend=LINEAR, check_invariants=False):
        self.box = box
        self.backend = backend
        self.check_invariants = check_invariants
        self.g = as_secret(box, graph)
        self.n, self.m = self.g.n, self.g.m
        self.iterations = 0

    def run(self):
        box, n = self.box, self.n
        box.mark("kshell:load")
        self.Idx = load_array(box, self.g.Idx, self.backend)
        self.E = load_array(box, self.g.E, self.backend)
        self.deg = ObliviousArray(box, n, "int", self.backend)
        self.vert = ObliviousArray(box, n, "int", self.backend)
        self.pos = ObliviousArray(box, n, "int", self.backend)
        # bin[d] lives at position d+1, for degrees 0..n-1
        self.bin = ObliviousArray(box, n, "int", self.backend)
        box.mark("kshell:degrees")
        self.init_degrees()
        box.mark("kshell:bins")
        self.init_bins()
        box.mark("kshell:sort")
        self.sort_vertices()
        box.mark("kshell:loop")
        self.init_cursors()
        for _ in range(n + self.m - 1):
            box.mark("kshell:iter")
            self.iteration()
            self.iterations += 1
            if self.check_invariants:
                self.check_state()
        box.mark("kshell:output")
        return self.output()

    def init_degrees(self):
        Idx, deg, bin_ = self.Idx, self.deg, self.bin
        for i in range(1, self.n + 1):
            self.vert.write(i, i)
            d = Idx.read(i + 1) - Idx.read(i)
            deg.write(i, d)
            slot = d + 1
            bin_.write(slot, bin_.read(slot) + 1)

    def init_bins(self):
        bin_ = self.bin
        start = self.box.store(1)
        for d in range(1, self.n + 1):
            count = bin_.read(d)
            bin_.write(d, start)
            start = start + count

    def sort_vertices(self):
        n = self.n
        keys = [self.deg.read(i) for i in range(1, n + 1)]
        verts = [self.vert.read(i) for i in range(1, n + 1)]
        _, verts = sort_handles(self.box, keys, verts)
        for i, v in enumerate(verts, 1):
            self.vert.write(i, v)
            self.pos.write(v, i)

    def init_cursors(self):
        self.i = self.box.store(1)
        self.v = self.vert.read(self.i)
        self.j = self.Idx.read(self.v)

    def advance_condition(self):
        return self.box.eq(self.j, self.Idx.read(self.v + 1))

    def iteration(self):
        box = self.box
        Idx, E, deg, pos, vert, bin_ = self.Idx, self.E, self.deg, self.pos, self.vert, self.bin
        i, v, j = self.i, self.v, self.j
        advance = self.advance_condition()

        # arm 1: move to the next vertex in degree order
        i_next = i + advance
        v_next = vert.read(i_next)
        j_next = Idx.read(v_next)

        # arm 2: visit neighbor E[j]; on the advance arm u = v makes every write an identity
        u = box.mux(advance, v, E.read(j))
        du = deg.read(u)
        dv = deg.read(v)
        act = box.mux(advance, 0, box.lt(dv, du))
        pu = pos.read(u)
        slot = du + 1
        pw = bin_.read(slot)
        w = vert.read(pw)
        swap = act * (1 - box.eq(u, w))
        self.move(swap, u, w, pu, pw)
        bin_.write(slot, pw + act)
        deg.write(u, du - act)

        self.i = i_next
        self.v = box.mux(advance, v_next, v)
        self.j = box.mux(advance, j_next, j + 1)

    def move(self, swap, u, w, pu, pw):
        """Swap u and w in vert/pos when ``swap`` is 1; identity writes otherwise."""
        mux = self.box.mux
        self.pos.write(u, mux(swap, pw, pu))
        self.vert.write(pu, mux(swap, w, u))
        self.pos.write(w, mux(swap, pu, pw))
        self.vert.write(pw, mux(swap, u, w))

    def output(self):
        box = self.box
        return [box.release(self.deg.read(i)) for i in range(1, self.n + 1)]

    def check_state(self):
        """Released-state invariants; diagnostics only (uses untraced peeks)."""
        box, n = self.box, self.n
        peek = box.peek
        vert = [peek(c) for c in self.vert._cells]
        pos = [peek(c) for c in self.pos._cells]
        deg = [peek(c) for c in self.deg._cells]
        for t, x in enumerate(vert, 1):
            assert pos[x - 1] == t, f"pos[vert[{t}]] != {t}"
        threshold = deg[peek(self.v) - 1]
        done = peek(self.i)
        for t in range(done, n + 1):
            assert deg[vert[t - 1] - 1] >= threshold, "degree fell below the pruning threshold"


def kshell_oblivious(graph, *, backend=LINEAR, box=None, check_invariants=False,
                     protocol=KShellProtocol):
    """Shell numbers of all nodes of a symmetrized graph, computed obliviously."""
    if isinstance(graph, EdgeList):
        problems = validate_edgelist(graph)
        if problems:
            raise ValidationError(problems)
        if not graph.is_symmetric():
            raise PreconditionError("kshell needs a symmetrized edgelist (every edge in both directions)")
    if box is None:
        box = BlackBox(record=False, diagnostics=check_invariants)
    return protocol(box, graph, backend, check_invariants).run()


def kshell_oracle(n, adjacency):
    """Clear peeling: remove a minimum-degree vertex until none remain.

    ``adjacency`` maps each node 1..n to its neighbors (undirected, simple).
    """
    degree = {u: len(set(adjacency.get(u, ()))) for u in range(1, n + 1)}
    nbrs = {u: set(adjacency.get(u, ())) for u in range(1, n + 1)}
    alive = set(range(1, n + 1))
    shells = [0] * n
    level = 0
    while alive:
        v = min(alive, key=lambda x: (degree[x], x))
        level = max(level, degree[v])
        shells[v - 1] = level
        alive.remove(v)
        for u in nbrs[v]:
            if u in alive:
                degree[u] -= 1
    return shells
