"""Hierarchical agglomerative clustering with Lance-Williams updates."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from . import kernels
from .errors import DataError

LINKAGES = ("single", "complete", "average", "ward")


class Merge(NamedTuple):
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """``n - 1`` merges; leaves are ``0..n-1``, merge ``i`` creates node ``n + i``."""

    n: int
    merges: tuple[Merge, ...]
    linkage: str = ""

    def __post_init__(self):
        if len(self.merges) != self.n - 1:
            raise DataError(f"{self.n} leaves need {self.n - 1} merges, got {len(self.merges)}")
        used = set()
        for i, m in enumerate(self.merges):
            for child in (m.left, m.right):
                if child in used or not 0 <= child < self.n + i:
                    raise DataError(f"merge {i} reuses or forward-references node {child}")
                used.add(child)

    @property
    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges])

    def to_json(self) -> dict:
        return {"n": self.n, "linkage": self.linkage,
                "merges": [[m.left, m.right, m.height, m.size] for m in self.merges]}

    @classmethod
    def from_json(cls, doc: dict) -> Dendrogram:
        merges = tuple(Merge(int(a), int(b), float(h), int(s)) for a, b, h, s in doc["merges"])
        return cls(int(doc["n"]), merges, doc.get("linkage", ""))


@dataclass(frozen=True)
class Partition:
    """Cluster label per entity index; labels are ``0..k-1``."""

    labels: tuple[int, ...]
    entities: tuple[str, ...] | None = None

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if labels and set(labels) != set(range(max(labels) + 1)):
            raise DataError("partition labels must form a contiguous range 0..k-1")
        if self.entities is not None:
            ents = tuple(self.entities)
            if len(ents) != len(labels) or len(set(ents)) != len(ents):
                raise DataError("partition entities must be unique and match the labels")
            object.__setattr__(self, "entities", ents)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_groups(cls, assignment: dict[str, str], groups: Sequence[str] | None = None):
        """Build from entity -> group name; labels follow ``groups`` order
        (first appearance by default)."""
        if groups is None:
            groups = list(dict.fromkeys(assignment.values()))
        code = {g: i for i, g in enumerate(groups)}
        missing = set(assignment.values()) - set(code)
        if missing:
            raise DataError(f"groups not declared: {sorted(missing)}")
        return cls(tuple(code[g] for g in assignment.values()), tuple(assignment))

    @property
    def k(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def __len__(self):
        return len(self.labels)

    def restricted_to(self, entities: Sequence[str]) -> Partition:
        """Same partition re-indexed to ``entities`` order (labels renumbered
        by first appearance)."""
        if self.entities is None:
            raise DataError("partition has no entity ids")
        pos = {e: i for i, e in enumerate(self.entities)}
        missing = [e for e in entities if e not in pos]
        if missing:
            raise DataError(f"entities missing from partition: {missing[:5]}")
        raw = [self.labels[pos[e]] for e in entities]
        renum = {old: new for new, old in enumerate(dict.fromkeys(raw))}
        return Partition(tuple(renum[r] for r in raw), tuple(entities))


def validate_distances(d) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DataError(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] < 2:
        raise DataError("clustering needs at least 2 items")
    bad = ~np.isfinite(d)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DataError(f"non-finite distance at ({i}, {j})")
    asym = d != d.T
    if asym.any():
        i, j = np.argwhere(asym)[0]
        raise DataError(f"distance matrix not symmetric at ({i}, {j})")
    if (d < 0).any():
        i, j = np.argwhere(d < 0)[0]
        raise DataError(f"negative distance at ({i}, {j})")
    if np.any(np.diag(d) != 0):
        i = int(np.nonzero(np.diag(d))[0][0])
        raise DataError(f"non-zero self distance at ({i}, {i})")
    return d


def agglomerate(d, linkage: str = "average") -> Dendrogram:
    """Merge the closest pair of clusters until one remains.

    Ties go to the lexicographically smallest ``(left id, right id)``. Ward
    works directly on the given dissimilarities (no squaring).
    """
    if linkage not in LINKAGES:
        raise DataError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    d = validate_distances(d)
    raw = kernels.lance_williams(np.ascontiguousarray(d), LINKAGES.index(linkage))
    merges = tuple(Merge(int(a), int(b), float(h), int(s)) for a, b, h, s in raw)
    return Dendrogram(d.shape[0], merges, linkage)


def cut(t: Dendrogram, k: int, entities: Sequence[str] | None = None) -> Partition:
    """Undo the last ``k - 1`` merges; clusters numbered by smallest member."""
    if not 1 <= k <= t.n:
        raise DataError(f"k must be in [1, {t.n}], got {k}")
    parent = list(range(2 * t.n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, m in enumerate(t.merges[: t.n - k]):
        node = t.n + i
        parent[find(m.left)] = node
        parent[find(m.right)] = node
    labels: dict[int, int] = {}
    out = []
    for leaf in range(t.n):
        root = find(leaf)
        labels.setdefault(root, len(labels))
        out.append(labels[root])
    return Partition(tuple(out), tuple(entities) if entities is not None else None)


def write_partition(path: str | Path, p: Partition) -> None:
    ents = p.entities or tuple(str(i) for i in range(len(p)))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["entity", "cluster"])
        w.writerows(zip(ents, p.labels))


def write_dendrogram(path: str | Path, t: Dendrogram, entities: Sequence[str] | None = None):
    doc = t.to_json()
    if entities is not None:
        doc["entities"] = list(entities)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def read_dendrogram(path: str | Path) -> tuple[Dendrogram, list[str] | None]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return Dendrogram.from_json(doc), doc.get("entities")
