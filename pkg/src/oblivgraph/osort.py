"""Oblivious key-value sort on a bitonic network.

All comparators are ascending (smaller key to the lower position), using the
flip-then-half-clean formulation, so the gate list is a fixed function of
the padded width.  Each gate costs one ``lt`` and four ``mux``.
"""

from functools import lru_cache

from .abb import Op
from .errors import SizeError

PAD_KEY = 1 << 62
PAD_VALUE = 0


def padded_width(length):
    return 1 << (length - 1).bit_length() if length > 1 else 1


@lru_cache(maxsize=None)
def bitonic_gates(width):
    """Compare-exchange positions (0-based, i < j) for a power-of-two width."""
    if width & (width - 1):
        raise SizeError(f"width {width} is not a power of two")
    gates = []
    k = 2
    while k <= width:
        for i in range(width):
            j = i ^ (k - 1)
            if j > i:
                gates.append((i, j))
        d = k >> 2
        while d >= 1:
            for i in range(width):
                j = i ^ d
                if j > i:
                    gates.append((i, j))
            d >>= 1
        k <<= 1
    return tuple(gates)


def gate_count(length):
    if length < 1:
        raise SizeError("length must be >= 1")
    w = padded_width(length)
    k = w.bit_length() - 1
    return k * (k + 1) // 2 * (w // 2)


def sort_handles(box, keys, values):
    """Sort secret (key, value) lists ascending by key; returns new lists."""
    if len(keys) != len(values):
        raise SizeError(f"{len(keys)} keys but {len(values)} values")
    length = len(keys)
    if length == 0:
        return [], []
    w = padded_width(length)
    keys = list(keys) + [box.store(PAD_KEY) for _ in range(w - length)]
    values = list(values) + [box.store(PAD_VALUE) for _ in range(w - length)]
    lt, mux = box.lt, box.mux
    for i, j in bitonic_gates(w):
        box._emit(Op.SORT_CE, (i, j))
        ki, kj, vi, vj = keys[i], keys[j], values[i], values[j]
        swap = lt(kj, ki)
        keys[i] = mux(swap, kj, ki)
        keys[j] = mux(swap, ki, kj)
        values[i] = mux(swap, vj, vi)
        values[j] = mux(swap, vi, vj)
    return keys[:length], values[:length]


def oblivious_sort(box, keys, values, length=None):
    """In-place sort of two oblivious arrays, ascending by ``keys``."""
    if length is None:
        length = len(keys)
    if len(keys) != length or len(values) != length:
        raise SizeError(f"array lengths {len(keys)}, {len(values)} do not match {length}")
    ks = [keys.read(i) for i in range(1, length + 1)]
    vs = [values.read(i) for i in range(1, length + 1)]
    ks, vs = sort_handles(box, ks, vs)
    for i in range(length):
        keys.write(i + 1, ks[i])
        values.write(i + 1, vs[i])
