"""Phylogenetic networks under subnet prune and regraft (SNPR)."""

from .network import (
    Network,
    NetworkError,
    VertexKind,
    Violation,
    is_isomorphic,
    is_reticulation_visible,
    is_tree,
    is_tree_based,
    is_tree_child,
    reticulation_count,
    validate,
)
from .newick import ENewickError, parse_enewick, write_enewick

__version__ = "0.1.0"
