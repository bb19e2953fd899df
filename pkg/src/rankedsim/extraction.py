"""Turning external sources into ranked feature lists."""

from __future__ import annotations

import csv
import json
import logging
import re
from collections import Counter, deque
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .errors import ConfigError, CycleError, DataError
from .model import RankedFeatureList, TieBreak, build_ranked_list
from .sparql import SparqlClient

log = logging.getLogger(__name__)

PLACEHOLDER = "{{entity}}"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class QueryTemplate:
    """SELECT text with a ``{{entity}}`` placeholder.

    Rows are read in result order as the ranking, so the query must order by
    a descending aggregate. ``score_variable`` names the projected count,
    when there is one.
    """

    text: str
    feature_variable: str
    score_variable: str | None = None

    def __post_init__(self):
        if PLACEHOLDER not in self.text:
            raise ConfigError(f"query template has no {PLACEHOLDER} placeholder")
        head = re.split(r"\bwhere\b", self.text, maxsplit=1, flags=re.IGNORECASE)[0]
        for var in filter(None, (self.feature_variable, self.score_variable)):
            if not re.search(rf"\?{re.escape(var)}\b", head):
                raise ConfigError(f"variable ?{var} is not projected by the template")
        if not re.search(r"order\s+by\s+desc\s*\(", self.text, re.IGNORECASE):
            raise ConfigError("template must ORDER BY DESC(<aggregate>)")

    def render(self, entity: str) -> str:
        return self.text.replace(PLACEHOLDER, entity)

    @classmethod
    def load(cls, path: str | Path, feature_variable: str, score_variable: str | None = None):
        return cls(Path(path).read_text(encoding="utf-8"), feature_variable, score_variable)


def query_based_extract(client: SparqlClient, template: QueryTemplate, entity: str,
                        tie_break: TieBreak | str = TieBreak.LEXICOGRAPHIC,
                        ) -> RankedFeatureList:
    """Run ``template`` for ``entity``; result rows top to bottom are the ranking.

    With a projected count the count is the score and ``tie_break`` orders
    equal counts. Without one, rows get scores n, n-1, ..., 1.
    """
    table = client.select(template.render(entity))
    feats = table.column(template.feature_variable)
    if any(f is None for f in feats):
        raise DataError(f"{entity}: a result row lacks ?{template.feature_variable}")
    if not feats:
        log.warning("no features extracted for %s", entity)
        return RankedFeatureList(entity)
    if template.score_variable is None:
        return RankedFeatureList.from_features(entity, feats)
    raw_scores = table.column(template.score_variable)
    try:
        scores = [float(s) for s in raw_scores]
    except (TypeError, ValueError):
        raise DataError(f"{entity}: non-numeric ?{template.score_variable} value") from None
    return build_ranked_list(entity, zip(feats, scores), tie_break)


@dataclass(frozen=True)
class CategoryHierarchy:
    parents: Mapping[str, tuple[str, ...]]
    top_levels: tuple[str, ...]

    def __post_init__(self):
        parents = {c: tuple(ps) for c, ps in self.parents.items()}
        tops = set(self.top_levels)
        for child, ps in parents.items():
            if child in ps:
                raise DataError(f"category {child!r} lists itself as parent")
            if child in tops and ps:
                raise DataError(f"top-level category {child!r} has a parent")
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "top_levels", tuple(self.top_levels))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]], top_levels: Iterable[str]):
        parents: dict[str, list[str]] = {}
        for child, parent in edges:
            ps = parents.setdefault(child, [])
            if parent not in ps:
                ps.append(parent)
        return cls({c: tuple(ps) for c, ps in parents.items()}, tuple(top_levels))

    @classmethod
    def load(cls, edges_path: str | Path, top_levels_path: str | Path | None = None):
        """Two-column TSV (child, parent) plus one top-level category per line."""
        edges = []
        with Path(edges_path).open(encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh, delimiter="\t"), 1):
                if not row or row[0].startswith("#"):
                    continue
                if len(row) != 2:
                    raise DataError(f"{edges_path}:{lineno}: expected child, parent")
                edges.append((row[0].strip(), row[1].strip()))
        return cls.from_edges(edges, read_top_levels(top_levels_path))


def read_top_levels(path: str | Path | None = None) -> tuple[str, ...]:
    if path is None:
        text = resources.files("rankedsim").joinpath("data/top_levels.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return tuple(line.strip() for line in text.splitlines() if line.strip()
                 and not line.startswith("#"))


@dataclass(frozen=True)
class ProfileHistogram:
    """Counts per top-level category; ``unclassified`` tallies leaves that
    reach no top-level, listed in ``unclassified_leaves``."""

    entity: str
    counts: Mapping[str, int]
    unclassified: int = 0
    unclassified_leaves: tuple[str, ...] = field(default=())


def _top_ancestors(leaf, h, tops, memo):
    """Distinct top-levels reachable from ``leaf``; raises on a cycle."""
    if leaf in memo:
        return memo[leaf]
    # iterative DFS with an explicit path so the cycle can be reported
    found: set[str] = set()
    state: dict[str, int] = {}
    stack = [(leaf, iter(h.parents.get(leaf, ())))]
    path = [leaf]
    state[leaf] = 1
    while stack:
        node, it = stack[-1]
        if node in tops:
            found.add(node)
        nxt = next(it, None)
        if nxt is None:
            state[node] = 2
            stack.pop()
            path.pop()
            continue
        if state.get(nxt) == 1:
            raise CycleError(path[path.index(nxt):] + [nxt])
        if state.get(nxt) == 2:
            if nxt in memo:
                found |= memo[nxt]
            continue
        if nxt in memo:
            found |= memo[nxt]
            state[nxt] = 2
            continue
        state[nxt] = 1
        path.append(nxt)
        stack.append((nxt, iter(h.parents.get(nxt, ()))))
    memo[leaf] = frozenset(found)
    return memo[leaf]


def rollup_categories(leaf_counts: Mapping[str, int], h: CategoryHierarchy,
                      entity: str = "") -> ProfileHistogram:
    """Add each leaf's count to every distinct top-level it reaches."""
    tops = set(h.top_levels)
    memo: dict[str, frozenset] = {}
    buckets: Counter = Counter()
    lost = 0
    lost_leaves = []
    for leaf, count in leaf_counts.items():
        if count < 0:
            raise DataError(f"negative count for category {leaf!r}")
        reach = _top_ancestors(leaf, h, tops, memo)
        if not reach:
            lost += count
            lost_leaves.append(leaf)
            continue
        for top in reach:
            buckets[top] += count
    if lost_leaves:
        log.warning("%s: %d leaf categories reach no top-level", entity or "profile",
                    len(lost_leaves))
    ordered = {t: buckets[t] for t in h.top_levels if t in buckets}
    return ProfileHistogram(entity, ordered, lost, tuple(sorted(lost_leaves)))


def histogram_to_ranked_list(hist: ProfileHistogram,
                             tie_break: TieBreak | str = TieBreak.LEXICOGRAPHIC
                             ) -> RankedFeatureList:
    return build_ranked_list(hist.entity, ((c, n) for c, n in hist.counts.items() if n > 0),
                             tie_break)


def filter_min_features(lists: Iterable[RankedFeatureList], min_count: int):
    """Split into (kept, dropped); dropped items are ``(list, size)`` pairs."""
    if min_count < 1:
        raise DataError("min_count must be >= 1")
    kept, dropped = [], []
    for rl in lists:
        if len(rl) >= min_count:
            kept.append(rl)
        else:
            dropped.append((rl, len(rl)))
    return kept, dropped


_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def default_stopwords() -> frozenset[str]:
    text = resources.files("rankedsim").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.split() if w.strip())


def porter_stemmer() -> Callable[[str], str]:
    from nltk.stem.porter import PorterStemmer

    stemmer = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    return lambda w: stemmer.stem(w, to_lowercase=False)


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _TOKEN.findall(text)]


def stem_counts(documents: Iterable[str], stopwords: Iterable[str] | None = None,
                stem: Callable[[str], str] | None = None) -> Counter:
    stop = default_stopwords() if stopwords is None else {w.lower() for w in stopwords}
    stem = stem or porter_stemmer()
    counts: Counter = Counter()
    for doc in documents:
        for tok in tokenize(doc):
            if len(tok) < 2 or tok in stop:
                continue
            counts[stem(tok)] += 1
    return counts


def stem_extract(documents: Iterable[str], stopwords: Iterable[str] | None = None,
                 entity: str = "corpus", stem: Callable[[str], str] | None = None,
                 ) -> RankedFeatureList:
    """Rank stems by their token frequency in ``documents``.

    Pass ``stem=lambda w: w`` for input that is already stemmed.
    """
    counts = stem_counts(documents, stopwords, stem)
    hist = ProfileHistogram(entity, dict(counts))
    return histogram_to_ranked_list(hist)


def read_leaf_counts(path: str | Path) -> dict[str, dict[str, int]]:
    """JSON lines ``{"entity": e, "counts": {category: n}}``, in file order."""
    out = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if "entity" not in rec or not isinstance(rec.get("counts"), dict):
                raise DataError(f"{path}:{lineno}: expected entity and counts")
            out[rec["entity"]] = {k: int(v) for k, v in rec["counts"].items()}
    return out
