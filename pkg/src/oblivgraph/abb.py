"""Arithmetic black box over Z_{2^64}, with a fixed-point extension.

Secret values are only reachable through handles (:class:`SecretInt`,
:class:`SecretFixed`).  Every primitive invocation appends exactly one
:class:`TraceEvent`; events carry public operands only, so a trace is a
function of the program and its public parameters.

The base :class:`BlackBox` is the ideal functionality (a trusted host holding
clear residues).  Share-based realizations subclass it and override the raw
layer (``_add``, ``_mul``, ``_open``, ...); see :mod:`oblivgraph.mpcsim`.
"""

from collections import Counter
from enum import IntEnum
from fractions import Fraction
from numbers import Rational
from typing import NamedTuple, Optional, Tuple

from .errors import ArithmeticFault, HandleError, KindError, RangeError

K = 64
F = 30
MOD = 1 << K
MASK = MOD - 1
HALF = 1 << (K - 1)
SCALE = 1 << F
RESOLUTION = Fraction(1, SCALE)


class Op(IntEnum):
    STORE = 1
    ADD = 2
    SUB = 3
    MUL = 4
    DIV = 5
    LT = 6
    EQ = 7
    MUX = 8
    RELEASE = 9
    ORAM_INIT = 10
    ORAM_READ = 11
    ORAM_WRITE = 12
    SORT_CE = 13


class TraceEvent(NamedTuple):
    op: Op
    operands: Tuple[int, ...] = ()
    # (descriptor, array_id, length); descriptor is "scan", "circuit" or "direct"
    touch: Optional[Tuple[str, int, int]] = None


def signed(x):
    """Two's-complement view of a residue mod 2^64."""
    return x - MOD if x >= HALF else x


def round_div(num, den):
    """Round num/den to the nearest integer, ties to even."""
    if den < 0:
        num, den = -num, -den
    q, r = divmod(num, den)
    twice = 2 * r
    if twice > den or (twice == den and q & 1):
        q += 1
    return q


def encode_int(v):
    if not isinstance(v, int) or isinstance(v, bool):
        raise KindError(f"expected a clear integer, got {type(v).__name__}")
    if not -HALF <= v < HALF:
        raise RangeError(f"{v} outside the signed {K}-bit range")
    return v & MASK


def encode_fixed(v):
    """Residue of the fixed-point mantissa nearest to ``v`` (ties to even)."""
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            raise RangeError(f"{v} is not a finite rational")
    try:
        q = Fraction(v)
    except (TypeError, ValueError) as exc:
        raise KindError(f"cannot interpret {v!r} as a rational") from exc
    mantissa = round_div(q.numerator * SCALE, q.denominator)
    if not -HALF <= mantissa < HALF:
        raise RangeError(f"{v} outside the fixed-point range (K={K}, F={F})")
    return mantissa & MASK


def decode_fixed(residue):
    return Fraction(signed(residue), SCALE)


class Secret:
    __slots__ = ("box", "raw", "epoch")

    def __init__(self, box, raw):
        self.box = box
        self.raw = raw
        self.epoch = box._epoch

    def __add__(self, other):
        return self.box.add(self, other)

    def __radd__(self, other):
        return self.box.add(other, self)

    def __sub__(self, other):
        return self.box.sub(self, other)

    def __rsub__(self, other):
        return self.box.sub(other, self)

    def __mul__(self, other):
        return self.box.mul(self, other)

    def __rmul__(self, other):
        return self.box.mul(other, self)

    def __bool__(self):
        raise TypeError("secret values have no truth value; use BlackBox.mux")

    def __repr__(self):
        return f"<{type(self).__name__} at box {id(self.box):#x}>"


class SecretInt(Secret):
    __slots__ = ()


class SecretFixed(Secret):
    __slots__ = ()

    def __truediv__(self, other):
        return self.box.div(self, other)

    def __rtruediv__(self, other):
        return self.box.div(other, self)


def _fx_mul(x, y):
    return round_div(signed(x) * signed(y), SCALE) & MASK


def _lt(x, y):
    return int(signed(x) < signed(y))


def _eq(x, y):
    return int(x == y)


def _pub(*ops):
    return tuple(p for p in ops if p is not None)


class BlackBox:
    """Ideal arithmetic black box.

    ``record=False`` keeps operation counts but drops the event list, which
    is what the cost benchmarks use.  ``diagnostics=True`` turns caller-contract
    violations that the oblivious contract cannot see (zero divisors,
    out-of-range secret indices, non-bit selectors) into exceptions.
    """

    def __init__(self, *, record=True, diagnostics=False):
        self.events = [] if record else None
        self.counts = Counter()
        self.n_events = 0
        self.diagnostics = diagnostics
        self.oram_internal = 0
        self.arrays = []
        self.marks = []
        self._epoch = 0
        self._next_array = 0

    # -- raw layer: clear residues held by the trusted host -------------------

    def _input(self, residue):
        return residue

    def _const(self, residue):
        return residue

    def _add(self, x, y):
        return (x + y) & MASK

    def _sub(self, x, y):
        return (x - y) & MASK

    def _mul(self, x, y):
        return (x * y) & MASK

    def _scale(self, x, c):
        return (x * c) & MASK

    def _open(self, x):
        return x

    def _service(self, fn, *xs):
        return fn(*xs) & MASK

    def _open_index(self, x):
        return signed(x)

    def _refresh(self, x):
        return x

    # -- bookkeeping ----------------------------------------------------------

    def _emit(self, op, operands=(), touch=None):
        self.counts[op] += 1
        self.n_events += 1
        if self.events is not None:
            self.events.append(TraceEvent(op, operands, touch))

    def mark(self, label):
        """Note a phase boundary; marks are not part of the canonical trace."""
        self.marks.append((label, self.n_events))

    def _new_array_id(self):
        self._next_array += 1
        return self._next_array

    def close(self):
        """Invalidate every handle issued so far."""
        self._epoch += 1

    def _check(self, h):
        if h.box is not self or h.epoch != self._epoch:
            raise HandleError("stale or foreign handle")

    def _kind(self, a, b):
        ka = type(a) if isinstance(a, Secret) else None
        kb = type(b) if isinstance(b, Secret) else None
        if ka is None and kb is None:
            raise KindError("at least one operand must be secret")
        if ka is not None and kb is not None and ka is not kb:
            raise KindError(f"cannot combine {ka.__name__} with {kb.__name__}")
        return ka or kb

    def _coerce(self, x, cls):
        """Return ``(raw, public_operand)``; the latter is None for secrets."""
        if isinstance(x, Secret):
            if x.box is not self:
                raise HandleError("handle belongs to another black box")
            if type(x) is not cls:
                raise KindError(f"expected {cls.__name__}, got {type(x).__name__}")
            return x.raw, None
        r = encode_fixed(x) if cls is SecretFixed else encode_int(x)
        return self._const(r), r

    # -- primitives -----------------------------------------------------------

    def store(self, v, kind=None):
        """Input a clear value. ``kind`` is "int" or "fixed" (default: by type)."""
        if kind is None:
            kind = "int" if isinstance(v, int) and not isinstance(v, bool) else "fixed"
        if kind == "int":
            r, cls, tag = encode_int(v), SecretInt, 0
        elif kind == "fixed":
            r, cls, tag = encode_fixed(v), SecretFixed, 1
        else:
            raise KindError(f"unknown kind {kind!r}")
        self._emit(Op.STORE, (tag,))
        return cls(self, self._input(r))

    def add(self, a, b):
        cls = self._kind(a, b)
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        self._emit(Op.ADD, _pub(px, py))
        return cls(self, self._add(x, y))

    def sub(self, a, b):
        cls = self._kind(a, b)
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        self._emit(Op.SUB, _pub(px, py))
        return cls(self, self._sub(x, y))

    def mul(self, a, b):
        cls = self._kind(a, b)
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        self._emit(Op.MUL, _pub(px, py))
        if cls is SecretFixed:
            return cls(self, self._service(_fx_mul, x, y))
        if px is not None:
            return cls(self, self._scale(y, px))
        if py is not None:
            return cls(self, self._scale(x, py))
        return cls(self, self._mul(x, y))

    def div(self, a, b):
        """Fixed-point division, rounded to nearest.  The divisor must be nonzero."""
        cls = self._kind(a, b)
        if cls is not SecretFixed:
            raise KindError("division is defined on fixed-point values only")
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        self._emit(Op.DIV, _pub(px, py))
        diagnostics = self.diagnostics

        def fx_div(x, y):
            den = signed(y)
            if den == 0:
                if diagnostics:
                    raise ArithmeticFault("fixed-point division by a secret zero")
                return 0
            return round_div(signed(x) * SCALE, den)

        return cls(self, self._service(fx_div, x, y))

    def lt(self, a, b):
        cls = self._kind(a, b)
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        self._emit(Op.LT, _pub(px, py))
        return SecretInt(self, self._service(_lt, x, y))

    def gt(self, a, b):
        return self.lt(b, a)

    def eq(self, a, b):
        cls = self._kind(a, b)
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        self._emit(Op.EQ, _pub(px, py))
        return SecretInt(self, self._service(_eq, x, y))

    def mux(self, c, a, b):
        """``a`` if the secret bit ``c`` is 1 else ``b``, with no data-dependent step."""
        if not isinstance(c, SecretInt):
            raise KindError("mux selector must be a SecretInt bit")
        if c.box is not self:
            raise HandleError("handle belongs to another black box")
        if not isinstance(a, Secret) and not isinstance(b, Secret):
            raise KindError("mux needs at least one secret branch")
        cls = self._kind(a, b)
        x, px = self._coerce(a, cls)
        y, py = self._coerce(b, cls)
        if self.diagnostics and self._peek_raw(c.raw) not in (0, 1):
            raise ArithmeticFault("mux selector is not a bit")
        self._emit(Op.MUX, _pub(px, py))
        if px is not None and py is not None:
            return cls(self, self._add(y, self._scale(c.raw, (px - py) & MASK)))
        return cls(self, self._add(y, self._mul(c.raw, self._sub(x, y))))

    def to_fixed(self, a):
        """Reinterpret a SecretInt as a fixed-point value (one public-scalar mul)."""
        if not isinstance(a, SecretInt):
            raise KindError("to_fixed expects a SecretInt")
        x, _ = self._coerce(a, SecretInt)
        self._emit(Op.MUL, (SCALE,))
        return SecretFixed(self, self._scale(x, SCALE))

    def release(self, h):
        if not isinstance(h, Secret):
            raise KindError("release expects a secret handle")
        self._check(h)
        self._emit(Op.RELEASE)
        r = self._open(h.raw)
        if isinstance(h, SecretFixed):
            return decode_fixed(r)
        return signed(r)

    # -- generic dispatchers ---------------------------------------------

    def int_arith(self, kind, a, b):
        if self._kind(a, b) is not SecretInt:
            raise KindError("int_arith expects SecretInt operands")
        return {"add": self.add, "sub": self.sub, "mul": self.mul}[kind](a, b)

    def fixed_arith(self, kind, a, b):
        if self._kind(a, b) is not SecretFixed:
            raise KindError("fixed_arith expects SecretFixed operands")
        ops = {"add": self.add, "sub": self.sub, "mul": self.mul, "div": self.div}
        return ops[kind](a, b)

    def compare(self, kind, a, b):
        return {"lt": self.lt, "eq": self.eq}[kind](a, b)

    # -- diagnostics ----------------------------------------------------------

    def _peek_raw(self, raw):
        return raw

    def peek(self, h):
        """Clear value of ``h`` without a trace event.  Test diagnostics only."""
        self._check(h)
        r = self._peek_raw(h.raw)
        return decode_fixed(r) if isinstance(h, SecretFixed) else signed(r)

    def zero(self, cls):
        """An untraced zero handle (used for cells that were never written)."""
        return cls(self, self._const(0))

    def cost(self):
        """Total charged cost: ORAM units plus primitives outside ORAM internals."""
        oram = sum(a.charged_units for a in self.arrays)
        outside = self.n_events - self.oram_internal
        return oram + outside - self.counts[Op.ORAM_READ] - self.counts[Op.ORAM_WRITE]
