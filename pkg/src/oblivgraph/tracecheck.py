"""Canonical execution traces and exact obliviousness certification.

Trace dump format (all integers little-endian)::

    file    := record*
    record  := u32 length, body            (length = byte size of body)
    body    := u8 op, u16 count, u64 operand * count, u8 has_touch, [touch]
    touch   := u8 descriptor, u32 array_id, u64 array_length
    descriptor: 1 = scan, 2 = circuit, 3 = direct

Operands are public integers written modulo 2^64.  The digest is the
lowercase hex SHA-256 of the whole dump.  Released values never appear.
"""

import hashlib
import struct
from functools import partial
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .abb import MASK, BlackBox, Op, TraceEvent
from .kshell import kshell_oblivious
from .omem import backend_name
from .osort import gate_count, padded_width
from .pagerank import pagerank_oblivious

_DESCRIPTORS = {"scan": 1, "circuit": 2, "direct": 3}
_DESCRIPTOR_NAMES = {v: k for k, v in _DESCRIPTORS.items()}


def encode_event(ev):
    ops = ev.operands
    body = struct.pack(f"<BH{len(ops)}Q", ev.op, len(ops), *(x & MASK for x in ops))
    if ev.touch is None:
        body += b"\x00"
    else:
        desc, array_id, length = ev.touch
        body += struct.pack("<BBIQ", 1, _DESCRIPTORS[desc], array_id, length)
    return body


def decode_events(data):
    events, off = [], 0
    while off < len(data):
        (size,) = struct.unpack_from("<I", data, off)
        off += 4
        body = data[off : off + size]
        off += size
        op, count = struct.unpack_from("<BH", body, 0)
        ops = struct.unpack_from(f"<{count}Q", body, 3)
        pos = 3 + 8 * count
        touch = None
        if body[pos]:
            desc, array_id, length = struct.unpack_from("<BIQ", body, pos + 1)
            touch = (_DESCRIPTOR_NAMES[desc], array_id, length)
        events.append(TraceEvent(Op(op), tuple(ops), touch))
    return events


def serialize(events):
    out = bytearray()
    cache = {}
    for ev in events:
        body = cache.get(ev)
        if body is None:
            body = cache[ev] = encode_event(ev)
        out += struct.pack("<I", len(body))
        out += body
    return bytes(out)


@dataclass
class Trace:
    events: List[TraceEvent]
    size_params: Tuple[int, ...]
    marks: List[Tuple[str, int]] = field(default_factory=list)
    _digest: Optional[str] = field(default=None, repr=False)

    def to_bytes(self):
        return serialize(self.events)

    @property
    def digest(self):
        if self._digest is None:
            self._digest = hashlib.sha256(self.to_bytes()).hexdigest()
        return self._digest

    def __len__(self):
        return len(self.events)

    def count(self, label):
        return sum(1 for name, _ in self.marks if name == label)

    def segments(self, label):
        """Event slices that start at each mark ``label`` and end at the next mark."""
        bounds = [pos for _, pos in self.marks] + [len(self.events)]
        out = []
        for k, (name, pos) in enumerate(self.marks):
            if name == label:
                out.append(self.events[pos : bounds[k + 1]])
        return out

    def dump(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    def dump_digest(self, path):
        with open(path, "w", encoding="ascii") as fh:
            fh.write(self.digest + "\n")


def load_trace(path, size_params=()):
    with open(path, "rb") as fh:
        return Trace(decode_events(fh.read()), tuple(size_params))


# -- recording ----------------------------------------------------------------


def _runner(program):
    if callable(program):
        return program
    if program == "kshell":
        return kshell_oblivious
    if program == "pagerank":
        return pagerank_oblivious
    raise ValueError(f"unknown program {program!r}")


def size_params(program, el, **params):
    if program == "pagerank" or params.get("l") is not None:
        return (el.n, el.m, params.get("l", 30))
    return (el.n, el.m)


def record(program, el, **params):
    """Run ``program`` on ``el`` under a recording box; returns ``(output, Trace)``.

    ``program`` is "kshell", "pagerank", or any callable with the signature of
    :func:`kshell_oblivious` (taking ``box=`` and the other keyword params).
    """
    box = BlackBox(record=True)
    run = _runner(program)
    output = run(el, box=box, **params)
    sizes = size_params(program if isinstance(program, str) else "", el, **params)
    return output, Trace(box.events, sizes, box.marks)


@dataclass(frozen=True)
class Verdict:
    status: str  # "oblivious", "violation" or "size_mismatch"
    index: Optional[int] = None
    sizes: Tuple[Tuple[int, ...], Tuple[int, ...]] = ((), ())
    detail: str = ""

    @property
    def oblivious(self):
        return self.status == "oblivious"


def first_divergence(ta, tb):
    ea, eb = ta.events, tb.events
    for k in range(min(len(ea), len(eb))):
        if ea[k] != eb[k]:
            return k
    if len(ea) != len(eb):
        return min(len(ea), len(eb))
    return None


def compare_traces(ta, tb):
    if ta.size_params != tb.size_params:
        return Verdict("size_mismatch", sizes=(ta.size_params, tb.size_params))
    if ta.digest == tb.digest:
        return Verdict("oblivious", sizes=(ta.size_params, tb.size_params))
    k = first_divergence(ta, tb)
    ea = ta.events[k] if k < len(ta.events) else None
    eb = tb.events[k] if k < len(tb.events) else None
    return Verdict("violation", k, (ta.size_params, tb.size_params), f"{ea} != {eb}")


def assert_oblivious(program, el_a, el_b, **params):
    """Verdict on whether two equal-size inputs produce byte-identical traces."""
    sa = size_params(program if isinstance(program, str) else "", el_a, **params)
    sb = size_params(program if isinstance(program, str) else "", el_b, **params)
    if sa != sb:
        return Verdict("size_mismatch", sizes=(sa, sb))
    _, ta = record(program, el_a, **params)
    _, tb = record(program, el_b, **params)
    return compare_traces(ta, tb)


# -- closed-form event counts -------------------------------------------------


def _access(backend, length):
    """Events emitted by one ORAM read or write."""
    return 3 * length + 1 if backend == "linear" else 1


def _sort_events(n):
    return 2 * (padded_width(n) - n) + 6 * gate_count(n)


def kshell_event_count(n, m, backend="linear"):
    """Exact number of trace events of one K-shell run, counted from its skeleton."""
    a = partial(_access, backend_name(backend))
    count = n + m + 2  # store the input cells
    count += 6  # six oram_init
    count += (n + 1) * a(n + 1) + (m + 1) * a(m + 1)  # load Idx and E
    # degrees: write vert, two Idx reads, sub, write deg, add, read+add+write bin
    count += n * (4 * a(n) + 2 * a(n + 1) + 3)
    # bins: store start; per degree read, write, add
    count += 1 + n * (2 * a(n) + 1)
    # sort: read deg and vert, network, write vert and pos
    count += n * 4 * a(n) + _sort_events(n)
    # cursors: store i, read vert, read Idx
    count += 1 + a(n) + a(n + 1)
    count += (n + m - 1) * kshell_iteration_events(n, m, backend)
    count += n * (a(n) + 1)  # read and release deg
    return count


def kshell_iteration_events(n, m, backend="linear"):
    a = partial(_access, backend_name(backend))
    reads = 2 * a(n + 1) + a(m + 1) + 6 * a(n)  # Idx x2, E, vert x2, deg x2, pos, bin
    writes = 6 * a(n)  # pos x2, vert x2, bin, deg
    # add x5, sub x2, eq x2, lt, mul, mux x8
    return reads + writes + 19


def pagerank_event_count(n, m, l, mode="literal", backend="linear"):
    a = partial(_access, backend_name(backend))
    nn = n * n
    count = 1 + n + m + 2  # store s, the input cells
    count += 2 + (n + 1) * a(n + 1) + (m + 1) * a(m + 1)
    # update matrix: sub, div, two inits; per row two Idx reads, sub, eq, add,
    # to_fixed, div, add, mux, row write, and n matrix writes
    count += 4 + n * (2 * a(n + 1) + 7 + a(n) + n * a(nn))
    # sources: init, two stores; per step add, Idx read, eq, src read, mux, src write, add, sub, add
    count += 3 + (n + m - 1) * (a(n + 1) + 2 * a(m + 1) + 6)
    # scatter: src read, E read, mul, sub, add, row read, N write
    count += m * (2 * a(m + 1) + a(n) + a(nn) + 3)
    # sweeps: two inits, initial vector
    count += 2 + n * a(n)
    edge = 2 * a(m + 1) + a(nn) + 3 * a(n) + 3 + 2  # two reads, N read, index, mul, add
    if mode == "standard":
        edge += 1
    per_sweep = m * edge + n * a(n)  # edge loop, buffer clear
    if mode == "standard":
        per_sweep += n * a(n) + (n - 1) + 1 + n * (2 * a(n) + 1)
    count += l * per_sweep
    count += n * (a(n) + 1)
    return count


def edge_update_events(n, m, mode="literal", backend="linear"):
    a = partial(_access, backend_name(backend))
    return 2 * a(m + 1) + a(n * n) + 3 * a(n) + 5 + (1 if mode == "standard" else 0)
