"""Charged-cost measurements and least-squares fits to the complexity forms."""

import math
import random
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .abb import BlackBox
from .graph import build_edgelist, random_edges
from .kshell import kshell_oblivious
from .omem import CIRCUIT
from .pagerank import LITERAL, pagerank_oblivious


def _lg2(x):
    return math.log2(x) ** 2


def kshell_terms(n, m):
    """(n+m) log^2 max(n,m) for the coalesced loop, n log^2 n for the sort."""
    return [(n + m) * _lg2(max(n, m)), n * _lg2(n)]


def pagerank_terms(n, m, l):
    return [(n * n + l * m) * _lg2(n * n)]


def measure_kshell(n, m, backend=CIRCUIT, seed=0):
    rng = random.Random(seed)
    el = build_edgelist(n, random_edges(n, m, rng, symmetric=True))
    box = BlackBox(record=False)
    kshell_oblivious(el, backend=backend, box=box)
    return box.cost()


def measure_pagerank(n, m, l, mode=LITERAL, backend=CIRCUIT, seed=0):
    rng = random.Random(seed)
    el = build_edgelist(n, random_edges(n, m, rng))
    box = BlackBox(record=False)
    pagerank_oblivious(el, l, 0.85, mode, backend=backend, box=box)
    return box.cost()


@dataclass
class Fit:
    constants: List[float]
    predicted: List[float]
    ratios: List[float]

    @property
    def worst_ratio(self):
        return max(max(r, 1 / r) for r in self.ratios)


def fit(measured: Sequence[float], terms: Sequence[Sequence[float]]):
    """Least-squares constants for ``measured ~ sum_k c_k * terms[:, k]``."""
    A = np.asarray(terms, dtype=float)
    y = np.asarray(measured, dtype=float)
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = A @ coef
    return Fit(coef.tolist(), pred.tolist(), (y / pred).tolist())
