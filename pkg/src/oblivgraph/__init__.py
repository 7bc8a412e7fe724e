"""Data-oblivious K-shell and PageRank on an edgelist, with trace certification."""

from .abb import BlackBox, SecretFixed, SecretInt
from .graph import EdgeList, build_edgelist, read_graph, symmetrize, validate_edgelist
from .kshell import kshell_oblivious, kshell_oracle
from .omem import CIRCUIT, LINEAR, ObliviousArray
from .pagerank import LITERAL, STANDARD, pagerank_oblivious, pagerank_oracle_list, pagerank_oracle_matrix
from .tracecheck import assert_oblivious, record

__version__ = "0.1.0"

__all__ = [
    "BlackBox", "SecretInt", "SecretFixed", "EdgeList", "build_edgelist", "read_graph",
    "symmetrize", "validate_edgelist", "kshell_oblivious", "kshell_oracle", "ObliviousArray",
    "LINEAR", "CIRCUIT", "LITERAL", "STANDARD", "pagerank_oblivious", "pagerank_oracle_list",
    "pagerank_oracle_matrix", "assert_oblivious", "record",
]
