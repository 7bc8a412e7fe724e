"""Moving an edgelist into a black box."""

from dataclasses import dataclass
from typing import List

from .abb import SecretInt
from .graph import EdgeList
from .omem import ObliviousArray


@dataclass
class SecretEdgeList:
    """The (E, Idx) pair as secret handles; only n and m are public."""

    n: int
    m: int
    E: List[SecretInt]
    Idx: List[SecretInt]


def store_edgelist(box, el):
    return SecretEdgeList(
        el.n,
        el.m,
        [box.store(x) for x in el.E],
        [box.store(x) for x in el.Idx],
    )


def as_secret(box, graph):
    if isinstance(graph, SecretEdgeList):
        for h in graph.E + graph.Idx:
            box._check(h)
        return graph
    if isinstance(graph, EdgeList):
        return store_edgelist(box, graph)
    raise TypeError(f"expected an EdgeList or SecretEdgeList, got {type(graph).__name__}")


def load_array(box, handles, backend):
    arr = ObliviousArray(box, len(handles), "int", backend)
    for i, h in enumerate(handles, 1):
        arr.write(i, h)
    return arr
