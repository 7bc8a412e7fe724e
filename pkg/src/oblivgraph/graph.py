"""Edgelist graph representation (E, Idx) and its clear-side plumbing.

Node ids are 1-indexed.  ``E`` holds the concatenated out-adjacency lists
followed by the sentinel 0; ``Idx[u]`` is the 1-based position in ``E`` of
u's first out-neighbor, with nodes of out-degree 0 inheriting the entry of
the next node, and an explicit final entry ``Idx[n+1] = m+1``.  Both are
stored as 0-based Python tuples, so ``E[k-1]`` holds the 1-based entry ``E[k]``.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Set, Tuple

from .errors import ParseError, PartitionError, ValidationError

Edge = Tuple[int, int]


@dataclass(frozen=True)
class EdgeList:
    n: int
    m: int
    E: Tuple[int, ...]
    Idx: Tuple[int, ...]

    def out_degree(self, u):
        return self.Idx[u] - self.Idx[u - 1]

    def neighbors(self, u):
        return self.E[self.Idx[u - 1] - 1 : self.Idx[u] - 1]

    def edges(self):
        return [(u, v) for u in range(1, self.n + 1) for v in self.neighbors(u)]

    def adjacency(self):
        return {u: list(self.neighbors(u)) for u in range(1, self.n + 1)}

    def is_symmetric(self):
        es = set(self.edges())
        return all((v, u) in es for u, v in es)

    @property
    def cells(self):
        return len(self.E) + len(self.Idx)


@dataclass
class PartyInput:
    party_id: str
    vertices: Set[int]
    edges: List[Edge] = field(default_factory=list)


def build_edgelist(n, edges):
    """Build (E, Idx) from a list of directed edges, keeping input order per node."""
    if not isinstance(n, int) or n < 1:
        raise ValidationError([f"node count must be a positive integer, got {n!r}"])
    edges = [tuple(e) for e in edges]
    problems = []
    seen = set()
    for u, v in edges:
        if not (1 <= u <= n and 1 <= v <= n):
            problems.append(f"endpoint out of range: ({u}, {v})")
        elif u == v:
            problems.append(f"self-loop: ({u}, {v})")
        elif (u, v) in seen:
            problems.append(f"duplicate edge: ({u}, {v})")
        seen.add((u, v))
    if problems:
        raise ValidationError(problems)

    buckets = [[] for _ in range(n + 1)]
    for u, v in edges:
        buckets[u].append(v)
    E, Idx = [], []
    for u in range(1, n + 1):
        Idx.append(len(E) + 1)
        E.extend(buckets[u])
    m = len(E)
    Idx.append(m + 1)
    E.append(0)
    return EdgeList(n, m, tuple(E), tuple(Idx))


def validate_edgelist(el):
    """Names of violated invariants; an empty list means the edgelist is sound."""
    errors = []
    n, m, E, Idx = el.n, el.m, el.E, el.Idx
    if len(E) != m + 1:
        errors.append("E-length")
    if len(Idx) != n + 1:
        errors.append("Idx-length")
        return errors
    if any(not 1 <= x <= m + 1 for x in Idx):
        errors.append("Idx-range")
    if any(Idx[k] > Idx[k + 1] for k in range(n)):
        errors.append("Idx-monotone")
    if Idx[n] != m + 1:
        errors.append("Idx-sentinel")
    if Idx[0] != 1:
        errors.append("Idx-start")
    if sum(Idx[k + 1] - Idx[k] for k in range(n)) != m:
        errors.append("degree-sum")
    if len(E) == m + 1 and E[m] != 0:
        errors.append("E-sentinel")
    if any(not 1 <= x <= n for x in E[:m]):
        errors.append("E-range")
    if not errors:
        seen = set()
        for u in range(1, n + 1):
            for v in el.neighbors(u):
                if v == u:
                    errors.append("self-loop")
                    return errors
                if (u, v) in seen:
                    errors.append("duplicate-edge")
                    return errors
                seen.add((u, v))
    return errors


def symmetrize(edges):
    """Add the reverse of every edge, drop self-loops and duplicates (sorted output)."""
    out = set()
    for u, v in edges:
        if u != v:
            out.add((u, v))
            out.add((v, u))
    return sorted(out)


def merge_party_inputs(parts, n):
    """Union of the parties' edge sets (deduplicated on exact (u, v)) as an EdgeList."""
    owner = {}
    problems = []
    for p in parts:
        for x in p.vertices:
            if x in owner:
                problems.append(f"node {x} claimed by {owner[x]} and {p.party_id}")
            else:
                owner[x] = p.party_id
    missing = [x for x in range(1, n + 1) if x not in owner]
    if missing:
        problems.append(f"nodes not covered by any partition: {missing}")
    stray = sorted(x for x in owner if not 1 <= x <= n)
    if stray:
        problems.append(f"partition nodes outside [1, {n}]: {stray}")
    for p in parts:
        for u, v in p.edges:
            if u not in p.vertices and v not in p.vertices:
                problems.append(f"party {p.party_id} reports ({u}, {v}) touching none of its nodes")
    if problems:
        raise PartitionError(problems)

    merged, seen = [], set()
    for p in parts:
        for e in p.edges:
            e = tuple(e)
            if e not in seen:
                seen.add(e)
                merged.append(e)
    return build_edgelist(n, merged)


# -- file formats -------------------------------------------------------------


def _content_lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _ints(line, lineno, count, path):
    parts = line.split()
    if len(parts) != count:
        raise ParseError(f"expected {count} integer(s), got {line!r}", path, lineno)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"non-integer token in {line!r}", path, lineno) from None


def parse_graph(text, path=None):
    """Parse the graph text format; returns ``(n, edges)``."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty graph file", path, 1)
    lineno, header = lines[0]
    n, m = _ints(header, lineno, 2, path)
    if n < 1 or m < 0:
        raise ParseError(f"invalid header n={n} m={m}", path, lineno)
    edges = [tuple(_ints(line, ln, 2, path)) for ln, line in lines[1:]]
    if len(edges) != m:
        raise ParseError(f"header declares {m} edges, found {len(edges)}", path, lineno)
    return n, edges


def read_graph(path):
    path = Path(path)
    return parse_graph(path.read_text(encoding="utf-8"), str(path))


def write_graph(path, n, edges):
    lines = [f"{n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_party(text, path=None):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty party file", path, 1)
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"expected 'party_id k', got {header!r}", path, lineno)
    party_id = parts[0]
    try:
        k = int(parts[1])
    except ValueError:
        raise ParseError(f"non-integer node count in {header!r}", path, lineno) from None
    if k < 0 or len(lines) < 1 + k:
        raise ParseError(f"header declares {k} node ids", path, lineno)
    vertices = {_ints(line, ln, 1, path)[0] for ln, line in lines[1 : 1 + k]}
    edges = [tuple(_ints(line, ln, 2, path)) for ln, line in lines[1 + k :]]
    return PartyInput(party_id, vertices, edges)


def read_party(path):
    path = Path(path)
    return parse_party(path.read_text(encoding="utf-8"), str(path))


def read_parties(directory):
    """All ``*.txt`` party files in a directory (sorted by name) and the implied n."""
    names = sorted(f for f in os.listdir(directory) if f.endswith(".txt"))
    if not names:
        raise ParseError("no party files found", str(directory))
    parts = [read_party(Path(directory) / f) for f in names]
    n = sum(len(p.vertices) for p in parts)
    return parts, n


def random_edges(n, m, rng, symmetric=False):
    """``m`` distinct directed edges without self-loops, drawn uniformly.

    With ``symmetric=True`` the result holds m/2 undirected pairs in both
    directions (``m`` must be even).
    """
    if symmetric:
        if m % 2:
            raise ValueError("a symmetric edge set has an even number of directed edges")
        if m // 2 > n * (n - 1) // 2:
            raise ValueError(f"{m // 2} undirected edges do not fit on {n} nodes")
        pairs = set()
        while len(pairs) < m // 2:
            u, v = rng.randint(1, n), rng.randint(1, n)
            if u != v:
                pairs.add((min(u, v), max(u, v)))
        return symmetrize(pairs)
    if m > n * (n - 1):
        raise ValueError(f"{m} directed edges do not fit on {n} nodes")
    edges = set()
    while len(edges) < m:
        u, v = rng.randint(1, n), rng.randint(1, n)
        if u != v:
            edges.add((u, v))
    return sorted(edges)
