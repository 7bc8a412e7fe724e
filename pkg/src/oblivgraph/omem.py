"""Oblivious arrays with secret-index read/write.

Two backends:

``linear``
    Every access touches every cell: one ``eq`` against each public position,
    one ``mux`` to accumulate the read value and one ``mux`` to rewrite the
    cell.  Reads rewrite with the identity so reads and writes share a shape.
    Cost f(n) = n.

``circuit``
    Cost accounting for a Circuit-ORAM style construction: the access is
    serviced directly by the host and charged f(n) = ceil(log2 n)^2 units.
    The emitted event carries only the array id and length.

Arrays are 1-indexed.  Indices may be secret or public; a public index takes
the same path as a secret one.
"""

from dataclasses import dataclass

from .abb import MASK, Op, Secret, SecretFixed, SecretInt, encode_fixed, encode_int
from .errors import IndexFault, KindError, SizeError

LINEAR = "linear"
CIRCUIT = "circuit"

_ALIASES = {
    "linear": LINEAR,
    "linear_scan": LINEAR,
    "scan": LINEAR,
    "circuit": CIRCUIT,
    "circuit-cost": CIRCUIT,
    "circuit_cost_model": CIRCUIT,
}


def backend_name(backend):
    try:
        return _ALIASES[backend]
    except KeyError:
        raise ValueError(f"unknown ORAM backend {backend!r}") from None


def access_overhead(backend, length):
    """Primitive operations charged for one access to an array of ``length`` cells."""
    if backend_name(backend) == LINEAR:
        return length
    return (length - 1).bit_length() ** 2


@dataclass(frozen=True)
class AccessCost:
    backend: str
    length: int
    reads: int
    writes: int
    charged_units: int


_KINDS = {"int": SecretInt, "fixed": SecretFixed, SecretInt: SecretInt, SecretFixed: SecretFixed}


class ObliviousArray:
    def __init__(self, box, length, elem_kind="int", backend=LINEAR):
        if not isinstance(length, int) or length < 1:
            raise SizeError(f"oblivious array length must be >= 1, got {length!r}")
        try:
            self.kind = _KINDS[elem_kind]
        except KeyError:
            raise KindError(f"unknown element kind {elem_kind!r}") from None
        self.box = box
        self.length = length
        self.backend = backend_name(backend)
        self.array_id = box._new_array_id()
        self.reads = 0
        self.writes = 0
        self._f = access_overhead(self.backend, length)
        self._touch = ("scan" if self.backend == LINEAR else "circuit", self.array_id, length)
        self._cells = [box.zero(self.kind)] * length
        box.arrays.append(self)
        box._emit(Op.ORAM_INIT, (length,))

    def __len__(self):
        return self.length

    @property
    def charged_units(self):
        return (self.reads + self.writes) * self._f

    def cost(self):
        return AccessCost(self.backend, self.length, self.reads, self.writes, self.charged_units)

    def read(self, idx):
        self.reads += 1
        if self.backend == LINEAR:
            return self._scan(idx, None, Op.ORAM_READ)
        box = self.box
        t = self._locate(idx)
        box._emit(Op.ORAM_READ, (self.length,), self._touch)
        if t is None:
            return box.zero(self.kind)
        return self.kind(box, box._refresh(self._cells[t].raw))

    def write(self, idx, val):
        val = self._value(val)
        self.writes += 1
        if self.backend == LINEAR:
            self._scan(idx, val, Op.ORAM_WRITE)
            return
        box = self.box
        t = self._locate(idx)
        box._emit(Op.ORAM_WRITE, (self.length,), self._touch)
        if t is not None:
            if isinstance(val, Secret):
                self._cells[t] = self.kind(box, box._refresh(val.raw))
            else:
                self._cells[t] = self.kind(box, box._const(val))

    # -- internals ------------------------------------------------------------

    def _value(self, val):
        if isinstance(val, Secret):
            if type(val) is not self.kind:
                raise KindError(f"array holds {self.kind.__name__}, got {type(val).__name__}")
            return val
        # public value: the residue goes into the mux path as a public operand
        return encode_fixed(val) if self.kind is SecretFixed else encode_int(val)

    def _diag_index(self, idx):
        box = self.box
        if isinstance(idx, Secret):
            i = box.peek(idx)
        else:
            i = idx
        if not 1 <= i <= self.length:
            raise IndexFault(f"index {i} outside [1, {self.length}] of array {self.array_id}")

    def _locate(self, idx):
        if self.box.diagnostics:
            self._diag_index(idx)
        if isinstance(idx, SecretInt):
            i = self.box._open_index(idx.raw)
        elif isinstance(idx, int):
            i = idx
        else:
            raise KindError("ORAM index must be a SecretInt or a public int")
        if 1 <= i <= self.length:
            return i - 1
        return None

    def _scan(self, idx, val, op):
        box = self.box
        if box.diagnostics:
            self._diag_index(idx)
        if isinstance(idx, int):
            idx = SecretInt(box, box._const(idx & MASK))
        elif not isinstance(idx, SecretInt):
            raise KindError("ORAM index must be a SecretInt or a public int")
        cells = self._cells
        eq, mux = box.eq, box.mux
        if val is not None and not isinstance(val, Secret):
            val = self.kind(box, box._const(val))
        acc = None
        for t in range(self.length):
            cell = cells[t]
            hit = eq(idx, t + 1)
            acc = mux(hit, cell, 0) if acc is None else mux(hit, cell, acc)
            cells[t] = mux(hit, cell if val is None else val, cell)
        box.oram_internal += 3 * self.length
        box._emit(op, (self.length,), self._touch)
        return acc


def oram_init(box, length, elem_kind="int", backend=LINEAR):
    return ObliviousArray(box, length, elem_kind, backend)


def oram_read(arr, idx):
    return arr.read(idx)


def oram_write(arr, idx, val):
    arr.write(idx, val)


def access_cost(arr):
    return arr.cost()
