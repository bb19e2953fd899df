"""Path counting and connectivity scoring over a directed labeled graph."""

from __future__ import annotations

import csv
import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import kernels
from .errors import DataError
from .model import RankedFeatureList, TieBreak, build_ranked_list

Triple = tuple[str, str, str]


@dataclass(frozen=True)
class ScsParams:
    tau: int = 4
    beta: float = 0.5
    edge_filter: frozenset[str] | None = None
    direction: str = "forward"

    def __post_init__(self):
        if self.tau < 1:
            raise DataError(f"maximum path length must be >= 1, got {self.tau}")
        if not (0.0 < self.beta < 1.0):
            raise DataError(f"damping factor must lie in (0, 1), got {self.beta}")
        if self.direction not in ("forward", "undirected"):
            raise DataError(f"direction must be 'forward' or 'undirected', got {self.direction!r}")
        if self.edge_filter is not None:
            object.__setattr__(self, "edge_filter", frozenset(self.edge_filter))


class FeatureGraph:
    """Immutable set of ``(subject, predicate, object)`` triples.

    Parallel edges with different predicates collapse to one hop for path
    counting: a path is a sequence of distinct nodes.
    """

    def __init__(self, triples: Iterable[Triple], nodes: Iterable[str] = ()):
        edges = frozenset((str(s), str(p), str(o)) for s, p, o in triples)
        all_nodes = set(nodes)
        for s, _, o in edges:
            all_nodes.update((s, o))
        self._edges = edges
        self._nodes = tuple(sorted(all_nodes))
        self._index = {n: i for i, n in enumerate(self._nodes)}
        self._csr_cache: dict = {}

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    @property
    def edges(self) -> frozenset[Triple]:
        return self._edges

    def __contains__(self, node):
        return node in self._index

    def _require(self, *nodes):
        for n in nodes:
            if n not in self._index:
                raise DataError(f"unknown node {n!r}")

    def neighbours(self, direction="forward", edge_filter=None) -> dict[str, list[str]]:
        adj: dict[str, set[str]] = {n: set() for n in self._nodes}
        for s, p, o in self._edges:
            if edge_filter is not None and p not in edge_filter:
                continue
            if s == o:
                continue
            adj[s].add(o)
            if direction == "undirected":
                adj[o].add(s)
        return {n: sorted(vs) for n, vs in adj.items()}

    def csr(self, direction="forward", edge_filter=None):
        key = (direction, None if edge_filter is None else frozenset(edge_filter))
        if key not in self._csr_cache:
            adj = self.neighbours(direction, edge_filter)
            indptr = np.zeros(len(self._nodes) + 1, np.int64)
            indices = []
            for i, n in enumerate(self._nodes):
                indices.extend(self._index[v] for v in adj[n])
                indptr[i + 1] = len(indices)
            self._csr_cache[key] = (indptr, np.array(indices, dtype=np.int64))
        return self._csr_cache[key]

    def path_counts_from(self, a: str, max_len: int, direction="forward", edge_filter=None):
        """Matrix ``counts[node_index, l]`` of simple paths from ``a``."""
        self._require(a)
        indptr, indices = self.csr(direction, edge_filter)
        return kernels.simple_path_counts(indptr, indices, self._index[a], max_len)

    def index(self, node: str) -> int:
        self._require(node)
        return self._index[node]


def count_paths(g: FeatureGraph, a: str, b: str, l: int, direction="forward",
                edge_filter=None) -> int:
    """Number of simple paths of exactly ``l`` edges from ``a`` to ``b``."""
    g._require(a, b)
    if l < 1:
        raise DataError(f"path length must be >= 1, got {l}")
    return int(g.path_counts_from(a, l, direction, edge_filter)[g.index(b), l])


def _damped(counts_row, beta, tau):
    return float(sum(beta ** l * int(counts_row[l]) for l in range(1, tau + 1)))


def scs(g: FeatureGraph, a: str, b: str, params: ScsParams = ScsParams()) -> float:
    """Semantic connectivity: sum over l <= tau of beta**l * #simple paths of length l."""
    g._require(a, b)
    if a == b:
        raise DataError("connectivity of a node with itself is undefined")
    counts = g.path_counts_from(a, params.tau, params.direction, params.edge_filter)
    return _damped(counts[g.index(b)], params.beta, params.tau)


@dataclass(frozen=True)
class FeatureMarker:
    """Nodes count as features when they reach ``class_node`` through one or
    more ``predicate`` edges (e.g. ``skos:broader`` up to a category root)."""

    class_node: str
    predicate: str

    def feature_nodes(self, g: FeatureGraph) -> set[str]:
        up: dict[str, set[str]] = {}
        for s, p, o in g.edges:
            if p == self.predicate:
                up.setdefault(o, set()).add(s)
        found: set[str] = set()
        queue = deque([self.class_node])
        while queue:
            for child in up.get(queue.popleft(), ()):
                if child not in found and child != self.class_node:
                    found.add(child)
                    queue.append(child)
        return found


def within_hops(g: FeatureGraph, root: str, depth: int, direction="forward",
                edge_filter=None) -> set[str]:
    adj = g.neighbours(direction, edge_filter)
    seen = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        if seen[u] == depth:
            continue
        for v in adj[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                queue.append(v)
    del seen[root]
    return set(seen)


def graph_explore_features(g: FeatureGraph, root: str, depth: int,
                           feature_marker: FeatureMarker | Callable[[FeatureGraph], set[str]],
                           params: ScsParams = ScsParams()) -> RankedFeatureList:
    """Rank the feature nodes within ``depth`` hops of ``root`` by their SCS."""
    g._require(root)
    if depth < 1:
        raise DataError(f"exploration depth must be >= 1, got {depth}")
    marked = (feature_marker.feature_nodes(g) if isinstance(feature_marker, FeatureMarker)
              else set(feature_marker(g)))
    reachable = within_hops(g, root, depth, params.direction, params.edge_filter)
    candidates = sorted((reachable & marked) - {root})
    counts = g.path_counts_from(root, params.tau, params.direction, params.edge_filter)
    scored = [(f, _damped(counts[g.index(f)], params.beta, params.tau)) for f in candidates]
    return build_ranked_list(root, scored, TieBreak.LEXICOGRAPHIC)


# -- graph files --------------------------------------------------------------


def read_graph(path: str | Path) -> FeatureGraph:
    """TSV of ``subject<TAB>predicate<TAB>object`` or JSON
    ``{"nodes": [...], "edges": {subject: [[predicate, object], ...]}}``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        triples = []
        for s, outs in doc.get("edges", {}).items():
            for p, o in outs:
                triples.append((s, p, o))
        return FeatureGraph(triples, doc.get("nodes", ()))
    triples = []
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected subject, predicate, object")
            triples.append(tuple(c.strip().strip("<>") for c in row))
    return FeatureGraph(triples)
