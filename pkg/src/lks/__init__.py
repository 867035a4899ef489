"""Constructive approximate Loebl-Komlos-Sos tree embedding.

The package follows the regularity-based construction end to end: prune a
clustered host, find a matching structure in its cluster graph, cut the tree
into seeds and small families, split the matching numerically, and embed the
families levelwise.  Every embedding is re-checked by an independent verifier.
"""

from .errors import EXIT_CODES, Infeasible, InputError, InvariantViolation
from .graphs import Graph, RootedTree
from .regularity import Constants, HostPartition, constants, desk_constants, gen_planted_host

__all__ = ["EXIT_CODES", "Infeasible", "InputError", "InvariantViolation", "Graph", "RootedTree",
           "Constants", "HostPartition", "constants", "desk_constants", "gen_planted_host"]
__version__ = "0.1.0"
