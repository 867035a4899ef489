"""Text formats for graphs and trees, and JSON for hosts and reports.

Graph text: a header ``n m`` followed by ``m`` lines ``u v``.  Tree text: a
header ``n root`` followed by ``n`` parent entries, ``-1`` at the root.  Both
ignore extra whitespace and ``#`` comments.
"""

from __future__ import annotations

import hashlib
import json
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Any

from .errors import InputError
from .graphs import Graph, RootedTree
from .regularity import HostPartition

__all__ = ["parse_graph", "format_graph", "parse_tree", "format_tree", "read_graph", "read_tree",
           "host_to_json", "host_from_json", "read_host", "write_host", "dump_json", "stamp"]


def _tokens(text: str) -> list[list[int]]:
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if line:
            try:
                rows.append([int(x) for x in line])
            except ValueError as e:
                raise InputError(f"non-integer token: {e}") from None
    if not rows:
        raise InputError("empty input")
    if len(rows[0]) != 2:
        raise InputError("header must hold exactly two integers")
    return rows


def parse_graph(text: str) -> Graph:
    rows = _tokens(text)
    n, m = rows[0]
    edges = rows[1:]
    if any(len(e) != 2 for e in edges):
        raise InputError("every edge line needs exactly two vertices")
    if len(edges) != m:
        raise InputError(f"header announces {m} edges, found {len(edges)}")
    if len({tuple(sorted(e)) for e in edges}) != m:
        raise InputError("duplicate edge")
    return Graph(n, [tuple(e) for e in edges])


def format_graph(g: Graph) -> str:
    return "\n".join([f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges()]) + "\n"


def parse_tree(text: str) -> RootedTree:
    rows = _tokens(text)
    n, root = rows[0]
    par = [x for row in rows[1:] for x in row]
    if len(par) != n:
        raise InputError(f"header announces {n} vertices, found {len(par)} parent entries")
    if not 0 <= root < n or par[root] != -1:
        raise InputError(f"root {root} must carry parent -1")
    return RootedTree(par, root)


def format_tree(T: RootedTree) -> str:
    return f"{T.n} {T.root}\n" + " ".join(map(str, T.parent)) + "\n"


def read_graph(path: str | Path) -> Graph:
    """Graph text; tree text is accepted as well, since a tree is a graph."""
    text = _read(path)
    try:
        return parse_graph(text)
    except InputError as first:
        try:
            return parse_tree(text).as_graph()
        except InputError:
            raise first from None


def read_tree(path: str | Path) -> RootedTree:
    """Tree text; graph text of a tree is accepted too and rooted at vertex 0."""
    text = _read(path)
    try:
        return parse_tree(text)
    except InputError as first:
        try:
            return RootedTree.from_graph(parse_graph(text), 0)
        except InputError:
            raise first from None


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def host_to_json(g: Graph, part: HostPartition | None) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.edges()],
            "partition": part.to_json() if part is not None else None}


def host_from_json(data: dict) -> tuple[Graph, HostPartition | None]:
    try:
        g = Graph(int(data["n"]), [tuple(e) for e in data["edges"]])
        part = HostPartition.from_json(data["partition"]) if data.get("partition") else None
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"malformed host JSON: {e}") from None
    if part is not None and part.validate():
        raise InputError("host partition is inconsistent: " + "; ".join(part.validate()))
    return g, part


def read_host(path: str | Path) -> tuple[Graph, HostPartition | None]:
    """A host from JSON (with its partition) or from graph text (without one)."""
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            return host_from_json(json.loads(text))
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON in {path}: {e}") from None
    return parse_graph(text), None


def write_host(path: str | Path, g: Graph, part: HostPartition | None, meta: dict | None = None) -> None:
    data = host_to_json(g, part)
    if meta:
        data["meta"] = meta
    Path(path).write_text(dump_json(data))


def _default(o: Any):
    from fractions import Fraction
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def dump_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=1, default=_default) + "\n"


@lru_cache(maxsize=1)
def _describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"], capture_output=True, text=True,
                             timeout=5, cwd=Path(__file__).resolve().parent)
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def stamp(config: dict) -> dict:
    """Provenance block: source revision, seed and a hash of the configuration."""
    blob = json.dumps(config, sort_keys=True, default=_default).encode()
    return {"git": _describe(), "seed": config.get("seed"),
            "config_hash": hashlib.sha256(blob).hexdigest()[:16]}
