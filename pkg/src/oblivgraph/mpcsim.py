"""Multi-party simulation: parties, additive sharing, Beaver triples, transcripts.

Two ways to run a protocol for a set of parties:

``ideal_host``
    The parties hand their inputs to a trusted host that runs the arithmetic
    black box (:class:`oblivgraph.abb.BlackBox`) and returns the outputs.

``additive_sharing``
    Values live as additive shares over Z_{2^64}.  Addition and public scaling
    are local, multiplication uses a dealer-issued Beaver triple and one
    opening round, release is one broadcast round.  Comparison, equality,
    fixed-point truncation/division and ORAM index resolution are serviced by
    the ideal host (hybrid model): the parties send it their shares and get
    fresh shares of the result back.

Semi-honest parties only.  All messages go through an in-process bus whose
log (the :class:`Transcript`) records sizes and kinds, never share values.
"""

import random
from dataclasses import dataclass, field
from typing import List, Tuple

from .abb import MASK, BlackBox, signed
from .errors import PreconditionError, ProtocolError
from .graph import EdgeList, PartyInput, merge_party_inputs
from .ingest import SecretEdgeList
from .kshell import kshell_oblivious
from .omem import CIRCUIT
from .pagerank import LITERAL, pagerank_oblivious

SHARE_BYTES = 8
DEALER = "dealer"
HOST = "host"


@dataclass(frozen=True)
class ShareSet:
    shares: Tuple[int, ...]

    def reconstruct(self):
        return sum(self.shares) & MASK

    def __len__(self):
        return len(self.shares)


@dataclass
class BeaverTriple:
    a: ShareSet
    b: ShareSet
    c: ShareSet
    used: bool = False


def split(value, num_parties, rng):
    """Fresh additive shares of ``value``; the first N-1 are uniform."""
    head = [rng.getrandbits(64) for _ in range(num_parties - 1)]
    return tuple(head) + (((value & MASK) - sum(head)) & MASK,)


class Dealer:
    """Honest dealer: shares inputs and issues Beaver triples from a seeded stream."""

    def __init__(self, num_parties, seed=0):
        if num_parties < 1:
            raise ValueError("need at least one party")
        self.num_parties = num_parties
        self.rng = random.Random(seed)

    def share(self, value):
        return ShareSet(split(value, self.num_parties, self.rng))

    def triple(self, rng=None):
        rng = rng or self.rng
        a, b = rng.getrandbits(64), rng.getrandbits(64)
        N = self.num_parties
        return BeaverTriple(
            ShareSet(split(a, N, rng)),
            ShareSet(split(b, N, rng)),
            ShareSet(split(a * b, N, rng)),
        )


def triple_gen(dealer, count, seed=None):
    if count < 0:
        raise ValueError("count must be >= 0")
    rng = random.Random(seed) if seed is not None else dealer.rng
    return [dealer.triple(rng) for _ in range(count)]


@dataclass(frozen=True)
class Message:
    round: int
    sender: str
    receiver: str
    kind: str
    nbytes: int


@dataclass
class Party:
    id: str
    input: PartyInput
    inbox: List[Message] = field(default_factory=list)


class Transcript:
    """Message log of one run; doubles as the in-process bus."""

    def __init__(self, parties=()):
        self.rounds = 0
        self.messages = []
        self.box = None
        self._parties = {p.id: p for p in parties}

    def new_round(self):
        self.rounds += 1
        return self.rounds

    def send(self, rnd, sender, receiver, kind, nbytes):
        msg = Message(rnd, sender, receiver, kind, nbytes)
        self.messages.append(msg)
        party = self._parties.get(receiver)
        if party is not None:
            party.inbox.append(msg)

    def shape(self):
        return (self.rounds, tuple(self.messages))

    def totals(self):
        return {
            "rounds": self.rounds,
            "messages": len(self.messages),
            "bytes": sum(m.nbytes for m in self.messages),
        }

    def to_text(self):
        return "".join(
            f"{m.round} {m.sender} {m.receiver} {m.kind} {m.nbytes}\n" for m in self.messages
        )


def beaver_mul(x, y, t, transcript=None, names=None):
    """Multiply two share sets with one opening round using triple ``t``."""
    if t.used:
        raise ProtocolError("Beaver triple reused")
    t.used = True
    N = len(x.shares)
    if not len(y.shares) == len(t.a.shares) == N:
        raise ProtocolError("share sets of different party counts")
    d_sh = [(xp - ap) & MASK for xp, ap in zip(x.shares, t.a.shares)]
    e_sh = [(yp - bp) & MASK for yp, bp in zip(y.shares, t.b.shares)]
    if transcript is not None:
        names = names or [f"P{p + 1}" for p in range(N)]
        rnd = transcript.new_round()
        for p in range(N):
            for q in range(N):
                if p != q:
                    transcript.send(rnd, names[p], names[q], "beaver-open", 2 * SHARE_BYTES)
    d = sum(d_sh) & MASK
    e = sum(e_sh) & MASK
    z = [
        (cp + d * bp + e * ap) & MASK
        for ap, bp, cp in zip(t.a.shares, t.b.shares, t.c.shares)
    ]
    z[0] = (z[0] + d * e) & MASK
    return ShareSet(tuple(z))


class SharedBlackBox(BlackBox):
    """Black box whose raw values are tuples of additive shares."""

    def __init__(self, num_parties, seed=0, *, transcript=None, record=True, diagnostics=False):
        super().__init__(record=record, diagnostics=diagnostics)
        self.num_parties = num_parties
        self.dealer = Dealer(num_parties, seed)
        self.transcript = transcript if transcript is not None else Transcript()
        self.names = [f"P{p + 1}" for p in range(num_parties)]
        self.triples_used = 0

    def _broadcast_to(self, receiver, kind, nbytes):
        rnd = self.transcript.new_round()
        for name in self.names:
            self.transcript.send(rnd, name, receiver, kind, nbytes)

    def _deal_from(self, sender, kind):
        rnd = self.transcript.new_round()
        for name in self.names:
            self.transcript.send(rnd, sender, name, kind, SHARE_BYTES)

    def _input(self, residue):
        self._deal_from(DEALER, "input-share")
        return self.dealer.share(residue).shares

    def _const(self, residue):
        return (residue & MASK,) + (0,) * (self.num_parties - 1)

    def _add(self, x, y):
        return tuple((a + b) & MASK for a, b in zip(x, y))

    def _sub(self, x, y):
        return tuple((a - b) & MASK for a, b in zip(x, y))

    def _scale(self, x, c):
        return tuple((a * c) & MASK for a in x)

    def _mul(self, x, y):
        self.triples_used += 1
        z = beaver_mul(ShareSet(x), ShareSet(y), self.dealer.triple(), self.transcript, self.names)
        return z.shares

    def _open(self, x):
        rnd = self.transcript.new_round()
        for p in self.names:
            for q in self.names:
                if p != q:
                    self.transcript.send(rnd, p, q, "release", SHARE_BYTES)
        return sum(x) & MASK

    def _service(self, fn, *xs):
        self._broadcast_to(HOST, "host-request", SHARE_BYTES * len(xs))
        result = fn(*(sum(x) & MASK for x in xs)) & MASK
        self._deal_from(HOST, "host-response")
        return self.dealer.share(result).shares

    def _open_index(self, x):
        self._broadcast_to(HOST, "host-index", SHARE_BYTES)
        return signed(sum(x) & MASK)

    def _refresh(self, x):
        self._broadcast_to(HOST, "host-request", SHARE_BYTES)
        self._deal_from(HOST, "host-response")
        return self.dealer.share(sum(x) & MASK).shares

    def _peek_raw(self, raw):
        return sum(raw) & MASK

    def shares_of(self, h):
        self._check(h)
        return ShareSet(h.raw)


# -- input dealing and protocol runs ------------------------------------------


def _inputs(parties):
    return [p.input if isinstance(p, Party) else p for p in parties]


def deal_inputs(parties, box, n=None):
    """Merge the parties' edges in the dealer step and store (E, Idx) in ``box``."""
    parts = _inputs(parties)
    if n is None:
        n = sum(len(p.vertices) for p in parts)
    el = merge_party_inputs(parts, n)
    return SecretEdgeList(el.n, el.m, [box.store(x) for x in el.E], [box.store(x) for x in el.Idx])


def reconstruct_edgelist(box, sel):
    """Clear EdgeList behind a dealt SecretEdgeList (diagnostic, untraced)."""
    E = tuple(box.peek(h) for h in sel.E)
    Idx = tuple(box.peek(h) for h in sel.Idx)
    return EdgeList(sel.n, sel.m, E, Idx)


IDEAL_HOST = "ideal_host"
ADDITIVE = "additive_sharing"


def run_protocol(parties, program, backend=IDEAL_HOST, *, n=None, oram=CIRCUIT, mode=LITERAL,
                 l=30, s=0.85, seed=0, record=False):
    """Run kshell or pagerank for ``parties``; returns ``(outputs, Transcript)``.

    The black box used for the run is left on ``transcript.box`` so callers
    can read its counters and (with ``record=True``) its event trace.
    """
    party_objs = [p for p in parties if isinstance(p, Party)]
    parts = _inputs(parties)
    if n is None:
        n = sum(len(p.vertices) for p in parts)
    names = [f"P{k + 1}" for k in range(len(parts))]
    transcript = Transcript(party_objs)

    # input phase: each party encodes its edge set as an n x n bit matrix
    rnd = transcript.new_round()
    receiver = HOST if backend == IDEAL_HOST else DEALER
    for name in names:
        transcript.send(rnd, name, receiver, "input", (n * n + 7) // 8)

    el = merge_party_inputs(parts, n)
    if program == "kshell" and not el.is_symmetric():
        raise PreconditionError("kshell needs every edge reported in both directions")

    if backend == IDEAL_HOST:
        box = BlackBox(record=record)
    elif backend == ADDITIVE:
        box = SharedBlackBox(len(parts), seed, transcript=transcript, record=record)
    else:
        raise ValueError(f"unknown MPC backend {backend!r}")
    transcript.box = box

    try:
        sel = SecretEdgeList(el.n, el.m, [box.store(x) for x in el.E],
                             [box.store(x) for x in el.Idx])
        if program == "kshell":
            outputs = kshell_oblivious(sel, backend=oram, box=box)
        elif program == "pagerank":
            outputs = pagerank_oblivious(sel, l, s, mode, backend=oram, box=box)
        else:
            raise ValueError(f"unknown program {program!r}")
    except (ProtocolError, ArithmeticError) as exc:
        raise ProtocolError(f"backend fault: {exc}") from exc

    if backend == IDEAL_HOST:
        rnd = transcript.new_round()
        for name in names:
            transcript.send(rnd, HOST, name, "output", SHARE_BYTES * n)
    return outputs, transcript
