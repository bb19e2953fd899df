"""Domain types shared by every module, plus the ranked-list file formats."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DataError, DuplicateFeatureError

EntityRef = str


class TieBreak(str, Enum):
    LEXICOGRAPHIC = "lexicographic"
    SECONDARY = "by-secondary-score"
    INPUT_ORDER = "stable-input-order"


class ScoredFeature(NamedTuple):
    feature: str
    score: float


def _check_score(entity, feature, score):
    if not isinstance(feature, str) or not feature:
        raise DataError(f"empty feature identifier in list of {entity!r}")
    if not math.isfinite(score) or score < 0:
        raise DataError(f"score of {feature!r} in {entity!r} must be finite and >= 0, got {score!r}")


@dataclass(frozen=True)
class RankedFeatureList:
    """An entity's features, most relevant first.

    Scores are non-increasing along ``items``; features are unique.
    """

    entity: EntityRef
    items: tuple[ScoredFeature, ...] = ()

    def __post_init__(self):
        if not isinstance(self.entity, str) or not self.entity:
            raise DataError("entity identifier must be a non-empty string")
        items = tuple(ScoredFeature(f, float(s)) for f, s in self.items)
        seen = set()
        prev = math.inf
        for f, s in items:
            _check_score(self.entity, f, s)
            if f in seen:
                raise DuplicateFeatureError(self.entity, f)
            if s > prev:
                raise DataError(f"scores increase at {f!r} in ranked list of {self.entity!r}")
            seen.add(f)
            prev = s
        object.__setattr__(self, "items", items)

    @classmethod
    def from_features(cls, entity: EntityRef, features: Sequence[str]) -> RankedFeatureList:
        """Rank by position alone; scores become n, n-1, ..., 1."""
        n = len(features)
        return cls(entity, tuple(ScoredFeature(f, float(n - i)) for i, f in enumerate(features)))

    @property
    def features(self) -> tuple[str, ...]:
        return tuple(f for f, _ in self.items)

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(s for _, s in self.items)

    def as_frequencies(self) -> dict[str, float]:
        return {f: s for f, s in self.items}

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)


def build_ranked_list(
    entity: EntityRef,
    scored: Iterable[tuple[str, float]],
    tie_break: TieBreak | str = TieBreak.LEXICOGRAPHIC,
    secondary: Mapping[str, float] | None = None,
) -> RankedFeatureList:
    """Sort scored features by descending score into a :class:`RankedFeatureList`.

    Equal scores are ordered by ``tie_break``: alphabetically, by a descending
    ``secondary`` score (e.g. a node degree; remaining ties alphabetical), or
    by the order in which ``scored`` yields them.
    """
    tie_break = TieBreak(tie_break)
    pairs = []
    seen = set()
    for f, s in scored:
        s = float(s)
        _check_score(entity, f, s)
        if f in seen:
            raise DuplicateFeatureError(entity, f)
        seen.add(f)
        pairs.append((f, s))

    if tie_break is TieBreak.LEXICOGRAPHIC:
        pairs.sort(key=lambda fs: (-fs[1], fs[0]))
    elif tie_break is TieBreak.SECONDARY:
        if secondary is None:
            raise DataError("by-secondary-score tie-break needs secondary scores")
        missing = [f for f, _ in pairs if f not in secondary]
        if missing:
            raise DataError(f"no secondary score for {missing}")
        pairs.sort(key=lambda fs: (-fs[1], -float(secondary[fs[0]]), fs[0]))
    else:
        pairs.sort(key=lambda fs: -fs[1])  # stable
    return RankedFeatureList(entity, tuple(ScoredFeature(f, s) for f, s in pairs))


@dataclass(frozen=True)
class SimilarityMatrix:
    entities: tuple[EntityRef, ...]
    values: np.ndarray
    metric: str = ""

    def __post_init__(self):
        ents = tuple(self.entities)
        vals = np.array(self.values, dtype=float)
        n = len(ents)
        if len(set(ents)) != n:
            raise DataError("duplicate entity in similarity matrix")
        if vals.shape != (n, n):
            raise DataError(f"matrix shape {vals.shape} does not match {n} entities")
        if not np.all(np.isfinite(vals)):
            raise DataError("similarity matrix has non-finite values")
        if not np.array_equal(vals, vals.T):
            i, j = np.argwhere(vals != vals.T)[0]
            raise DataError(f"similarity matrix not symmetric at ({ents[i]}, {ents[j]})")
        vals.setflags(write=False)
        object.__setattr__(self, "entities", ents)
        object.__setattr__(self, "values", vals)

    def index(self, entity: EntityRef) -> int:
        try:
            return self.entities.index(entity)
        except ValueError:
            raise DataError(f"unknown entity {entity!r}") from None

    def __getitem__(self, pair):
        a, b = pair
        return float(self.values[self.index(a), self.index(b)])

    def __len__(self):
        return len(self.entities)


def to_distance(m: SimilarityMatrix) -> np.ndarray:
    """Map similarities in [0, 1] to distances ``1 - s`` with a zero diagonal."""
    v = m.values
    bad = np.argwhere((v < 0) | (v > 1))
    if len(bad):
        i, j = bad[0]
        raise DataError(
            f"similarity {v[i, j]!r} at ({m.entities[i]}, {m.entities[j]}) is outside [0, 1]"
        )
    d = 1.0 - v
    np.fill_diagonal(d, 0.0)
    return d


@dataclass(frozen=True)
class GroundTruth:
    """Reference structure: a partition (entity -> group) or reference rankings.

    ``rankings`` maps each entity to an ordered tuple of ``(entity, gain)``;
    a gain of ``None`` means "derive from rank".
    """

    partition: dict[str, str] | None = None
    rankings: dict[str, tuple[tuple[str, float | None], ...]] | None = None
    groups: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.partition is None and self.rankings is None:
            raise DataError("ground truth needs a partition or rankings")
        if self.partition is not None and not self.groups:
            order = []
            for g in self.partition.values():
                if g not in order:
                    order.append(g)
            object.__setattr__(self, "groups", tuple(order))
        for ent, ranking in (self.rankings or {}).items():
            ids = [r for r, _ in ranking]
            if len(set(ids)) != len(ids):
                raise DataError(f"reference ranking of {ent!r} repeats an entity")


# -- ranked-list files -------------------------------------------------------


def read_ranked_lists(path: str | Path) -> list[RankedFeatureList]:
    """Read ``.jsonl`` records or a ``.tsv`` (entity, feature[, score]) table."""
    path = Path(path)
    if path.suffix.lower() in (".tsv", ".txt"):
        return _read_tsv(path)
    out = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                entity = rec["entity"]
                feats = rec["features"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: bad ranked-list record ({exc})") from None
            if feats and all("score" not in f for f in feats):
                out.append(RankedFeatureList.from_features(entity, [f["id"] for f in feats]))
            elif any("score" not in f for f in feats):
                raise DataError(f"{path}:{lineno}: scores present for some features only")
            else:
                out.append(RankedFeatureList(entity, tuple((f["id"], f["score"]) for f in feats)))
    _check_unique(out, path)
    return out


def _read_tsv(path: Path) -> list[RankedFeatureList]:
    rows: dict[str, list[list[str]]] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
            if not row or not "".join(row).strip():
                continue
            if len(row) not in (2, 3):
                raise DataError(f"{path}:{lineno}: expected 2 or 3 columns, got {len(row)}")
            rows.setdefault(row[0], []).append(row[1:])
    out = []
    for entity, feats in rows.items():
        widths = {len(r) for r in feats}
        if widths == {1}:
            out.append(RankedFeatureList.from_features(entity, [r[0] for r in feats]))
        elif widths == {2}:
            try:
                items = tuple((r[0], float(r[1])) for r in feats)
            except ValueError as exc:
                raise DataError(f"{path}: bad score for {entity!r}: {exc}") from None
            out.append(RankedFeatureList(entity, items))
        else:
            raise DataError(f"{path}: scores present for some rows of {entity!r} only")
    return out


def _check_unique(lists, path):
    seen = set()
    for rl in lists:
        if rl.entity in seen:
            raise DataError(f"{path}: entity {rl.entity!r} appears twice")
        seen.add(rl.entity)


def _score_out(s: float):
    return int(s) if float(s).is_integer() else s


def dump_ranked_list(rl: RankedFeatureList) -> str:
    """One JSONL record (no trailing newline)."""
    rec = {"entity": rl.entity,
           "features": [{"id": f, "score": _score_out(s)} for f, s in rl.items]}
    return json.dumps(rec, ensure_ascii=False)


def write_ranked_lists(path: str | Path, lists: Iterable[RankedFeatureList]) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rl in lists:
            fh.write(dump_ranked_list(rl) + "\n")


def read_partition_csv(path: str | Path) -> dict[str, str]:
    """Two-column CSV (entity, group); an optional header row is skipped."""
    out: dict[str, str] = {}
    with Path(path).open(encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row:
                continue
            if lineno == 1 and [c.strip().lower() for c in row[:2]] in (
                ["entity", "group"], ["entity", "cluster"], ["entity", "label"]
            ):
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            if row[0] in out:
                raise DataError(f"{path}:{lineno}: entity {row[0]!r} listed twice")
            out[row[0]] = row[1]
    return out


def read_rankings_jsonl(path: str | Path) -> dict[str, tuple[tuple[str, float | None], ...]]:
    """Records ``{"entity": e, "ranking": [ids], "gains": [optional numbers]}``."""
    out = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            ranking = rec.get("ranking")
            if not isinstance(ranking, list):
                raise DataError(f"{path}:{lineno}: missing 'ranking' list")
            gains = rec.get("gains") or [None] * len(ranking)
            if len(gains) != len(ranking):
                raise DataError(f"{path}:{lineno}: gains and ranking lengths differ")
            out[rec["entity"]] = tuple(zip(ranking, gains))
    return out
