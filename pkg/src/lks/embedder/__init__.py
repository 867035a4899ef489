"""Embedding a tree (or a bipartite graph with few extra edges) into a clustered host."""

from .bipartite import embed_bipartite, extra_structure
from .engine import Embedding, Engine
from .host import HostContext
from .pipeline import Setup, embed_tree, prepare, run_pattern

__all__ = ["Embedding", "Engine", "HostContext", "Setup", "embed_bipartite", "embed_tree",
           "extra_structure", "prepare", "run_pattern"]
