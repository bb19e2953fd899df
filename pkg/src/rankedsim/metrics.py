"""Pairwise list similarity measures, similarity-matrix assembly and top-k lookup."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from . import kernels
from .errors import DataError, NonConjointError
from .model import RankedFeatureList, SimilarityMatrix

ListLike = Union[RankedFeatureList, Sequence[str]]

TAILS = {"extrapolate": kernels.TAIL_EXTRAPOLATE, "fixed-overlap": kernels.TAIL_FIXED_OVERLAP}


def _features(x: ListLike) -> tuple[str, ...]:
    if isinstance(x, RankedFeatureList):
        return x.features
    return tuple(x)


def _encode(*lists):
    vocab: dict[str, int] = {}
    encoded = [np.array([vocab.setdefault(f, len(vocab)) for f in fs], dtype=np.int64)
               for fs in lists]
    return encoded, max(len(vocab), 1)


@dataclass(frozen=True)
class RboParams:
    """RBO settings.

    ``tail`` picks how agreement continues past the ends of finite lists:
    ``"extrapolate"`` holds the agreement seen at the end of the longer list
    constant (and assumes the unseen part of the shorter list matches at the
    rate it matched so far); ``"fixed-overlap"`` freezes the intersection
    size, so agreement decays as ``|S & T| / d``.

    ``mode="analytic"`` evaluates the infinite sum in closed form;
    ``"truncated"`` adds terms until the remaining weight ``p**d`` drops
    below ``tolerance`` or ``depth`` terms have been added.
    """

    p: float = 0.98
    tail: str = "extrapolate"
    mode: str = "analytic"
    depth: int = 10_000_000
    tolerance: float = 1e-12

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise DataError(f"RBO persistence p must lie in (0, 1), got {self.p!r}")
        if self.tail not in TAILS:
            raise DataError(f"unknown RBO tail {self.tail!r}; expected one of {sorted(TAILS)}")
        if self.mode not in ("analytic", "truncated"):
            raise DataError(f"unknown RBO mode {self.mode!r}")
        if self.depth < 1 or not self.tolerance > 0:
            raise DataError("truncation depth must be >= 1 and tolerance > 0")

    def kernel_args(self):
        return (self.p, TAILS[self.tail], self.mode == "truncated", self.depth, self.tolerance)


def agreement_at_depth(S: ListLike, T: ListLike, d: int) -> float:
    """``|S[:d] & T[:d]| / d``; a list shorter than ``d`` contributes all of itself."""
    if d < 1:
        raise DataError(f"depth must be >= 1, got {d}")
    s, t = _features(S), _features(T)
    return len(set(s[:d]) & set(t[:d])) / d


def average_overlap(S: ListLike, T: ListLike, k: int) -> float:
    if k < 1:
        raise DataError(f"evaluation depth k must be >= 1, got {k}")
    (s, t), n_vocab = _encode(_features(S), _features(T))
    x = kernels.overlap_curve(s, t, n_vocab)
    last = len(x) - 1
    return sum(int(x[min(d, last)]) / d for d in range(1, k + 1)) / k


def rbo(S: ListLike, T: ListLike, params: RboParams | float = RboParams()) -> float:
    """Rank-biased overlap of two ranked lists, in [0, 1].

    Two empty lists score 1.0; one empty list against a non-empty one scores
    0.0.
    """
    if not isinstance(params, RboParams):
        params = RboParams(p=float(params))
    (s, t), n_vocab = _encode(_features(S), _features(T))
    return float(kernels.rbo_pair(s, t, n_vocab, *params.kernel_args()))


def jaccard(S: ListLike, T: ListLike) -> float:
    a, b = set(_features(S)), set(_features(T))
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def cosine(u: Mapping[str, float] | RankedFeatureList, v: Mapping[str, float] | RankedFeatureList,
           names: tuple[str, str] = ("u", "v")) -> float:
    """Cosine of two sparse frequency vectors; missing keys count as zero."""
    vecs = []
    for vec, name in zip((u, v), names):
        if isinstance(vec, RankedFeatureList):
            name = vec.entity
            vec = vec.as_frequencies()
        for key, val in vec.items():
            if not math.isfinite(val) or val < 0:
                raise DataError(f"frequency of {key!r} for {name!r} must be finite and >= 0")
        if not any(val > 0 for val in vec.values()):
            raise DataError(f"zero frequency vector for {name!r}")
        vecs.append(vec)
    u, v = vecs
    keys = sorted(set(u) | set(v))
    a = np.array([u.get(k, 0.0) for k in keys], dtype=float)
    b = np.array([v.get(k, 0.0) for k in keys], dtype=float)
    c = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
    return min(max(c, 0.0), 1.0)


def _conjoint_ranks(S: ListLike, T: ListLike):
    s, t = _features(S), _features(T)
    diff = set(s) ^ set(t)
    if diff:
        raise NonConjointError(diff)
    if len(s) < 2:
        raise DataError("rank correlation needs at least 2 items")
    pos_t = {f: i for i, f in enumerate(t)}
    return np.array([pos_t[f] for f in s])


def kendall_tau(S: ListLike, T: ListLike) -> float:
    """Kendall's tau-a over conjoint lists."""
    r = _conjoint_ranks(S, T)
    n = len(r)
    signs = np.sign(r[None, :] - r[:, None])[np.triu_indices(n, 1)]
    return float(signs.sum() / (n * (n - 1) / 2))


def spearman_rho(S: ListLike, T: ListLike) -> float:
    r = _conjoint_ranks(S, T)
    n = len(r)
    d = r - np.arange(n)
    return float(1.0 - 6.0 * np.sum(d * d) / (n * (n * n - 1)))


@dataclass(frozen=True)
class WlmInput:
    size_a: int
    size_b: int
    overlap: int
    corpus: int

    def __post_init__(self):
        if self.size_a < 1 or self.size_b < 1 or self.corpus < 1 or self.overlap < 0:
            raise DataError("link-set sizes and corpus must be positive, overlap non-negative")
        if self.overlap > min(self.size_a, self.size_b):
            raise DataError("overlap exceeds the smaller link set")
        if max(self.size_a, self.size_b) > self.corpus:
            raise DataError("a link set is larger than the corpus")


def wlm_distance(x: WlmInput) -> float:
    """Milne-Witten link distance, clamped to [0, 1]; zero overlap gives 1."""
    small, large = min(x.size_a, x.size_b), max(x.size_a, x.size_b)
    denom = math.log(x.corpus) - math.log(small)
    if denom <= 0:
        raise DataError("corpus must be larger than the smaller link set")
    if x.overlap == 0:
        return 1.0
    return min(max((math.log(large) - math.log(x.overlap)) / denom, 0.0), 1.0)


def wlm_relatedness(x: WlmInput) -> float:
    return 1.0 - wlm_distance(x)


def wlm_from_links(a: set, b: set, corpus: int) -> float:
    """Relatedness straight from two in-link sets."""
    return wlm_relatedness(WlmInput(len(a), len(b), len(a & b), corpus))


# -- matrices ----------------------------------------------------------------


@dataclass(frozen=True)
class Metric:
    """A matrix metric: ``rbo`` (with :class:`RboParams`), ``ao`` (depth k),
    ``jaccard`` or ``cosine``."""

    name: str
    rbo: RboParams | None = None
    k: int | None = None

    def __post_init__(self):
        if self.name not in ("rbo", "ao", "jaccard", "cosine"):
            raise DataError(f"unknown metric {self.name!r}")
        if self.name == "rbo" and self.rbo is None:
            object.__setattr__(self, "rbo", RboParams())
        if self.name == "ao" and (self.k is None or self.k < 1):
            raise DataError("ao needs a depth k >= 1")

    @property
    def label(self) -> str:
        if self.name == "rbo":
            return f"rbo(p={self.rbo.p:g})"
        if self.name == "ao":
            return f"ao(k={self.k})"
        return self.name

    @classmethod
    def parse(cls, text: str) -> Metric:
        """``"rbo:0.98"``, ``"ao:10"``, ``"jaccard"``, ``"cosine"``."""
        name, _, arg = text.strip().lower().partition(":")
        try:
            if name == "rbo":
                return cls("rbo", rbo=RboParams(p=float(arg)) if arg else RboParams())
            if name == "ao":
                return cls("ao", k=int(arg) if arg else None)
        except ValueError:
            raise DataError(f"bad metric argument in {text!r}") from None
        return cls(name)

    def __call__(self, a: RankedFeatureList, b: RankedFeatureList) -> float:
        if self.name == "rbo":
            return rbo(a, b, self.rbo)
        if self.name == "ao":
            return average_overlap(a, b, self.k)
        if self.name == "jaccard":
            return jaccard(a, b)
        return cosine(a, b)


def _as_lists(items) -> list[RankedFeatureList]:
    if isinstance(items, Mapping):
        from .model import build_ranked_list

        return [build_ranked_list(e, freq.items()) for e, freq in items.items()]
    return list(items)


def similarity_matrix(lists, metric: Metric | str, workers: int = 1) -> SimilarityMatrix:
    """Pairwise similarity over ``lists`` (ranked lists, or entity -> frequency
    mapping). Each unordered pair is computed once and mirrored."""
    if isinstance(metric, str):
        metric = Metric.parse(metric)
    lists = _as_lists(lists)
    n = len(lists)
    if n < 2:
        raise DataError("a similarity matrix needs at least 2 entities")
    entities = tuple(rl.entity for rl in lists)

    if metric.name == "rbo":
        encoded, n_vocab = _encode(*(rl.features for rl in lists))
        offsets = np.zeros(n + 1, np.int64)
        offsets[1:] = np.cumsum([len(e) for e in encoded])
        flat = np.concatenate(encoded) if offsets[-1] else np.zeros(0, np.int64)
        values = kernels.rbo_matrix(flat, offsets, n_vocab, *metric.rbo.kernel_args())
        return SimilarityMatrix(entities, values, metric.label)

    pairs = list(combinations(range(n), 2))

    def one(pair):
        i, j = pair
        try:
            return metric(lists[i], lists[j])
        except DataError as exc:
            raise DataError(f"{metric.label} failed for ({entities[i]}, {entities[j]}): {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            scores = list(pool.map(one, pairs))
    else:
        scores = [one(pr) for pr in pairs]
    values = np.eye(n)
    for (i, j), v in zip(pairs, scores):
        values[i, j] = values[j, i] = v
    return SimilarityMatrix(entities, values, metric.label)


def rank_similars(target: str, m: SimilarityMatrix, k: int) -> list[tuple[str, float]]:
    """The ``k`` entities most similar to ``target``, best first; ties by id."""
    i = m.index(target)
    if not 1 <= k <= len(m) - 1:
        raise DataError(f"k must be in [1, {len(m) - 1}], got {k}")
    row = [(m.entities[j], float(m.values[i, j])) for j in range(len(m)) if j != i]
    row.sort(key=lambda es: (-es[1], es[0]))
    return row[:k]


# -- matrix files -------------------------------------------------------------


def write_matrix(path: str | Path, m: SimilarityMatrix) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = {"entities": list(m.entities), "metric": m.metric,
               "values": [[round(float(v), 12) for v in row] for row in m.values]}
        path.write_text(json.dumps(doc, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
        return
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["entity", *m.entities])
        for e, row in zip(m.entities, m.values):
            w.writerow([e, *(f"{v:.9f}" for v in row)])


def read_matrix(path: str | Path) -> SimilarityMatrix:
    path = Path(path)
    if path.suffix.lower() == ".json":
        doc = json.loads(path.read_text(encoding="utf-8"))
        try:
            return SimilarityMatrix(tuple(doc["entities"]), np.array(doc["values"], float),
                                    doc.get("metric", ""))
        except KeyError as exc:
            raise DataError(f"{path}: missing key {exc}") from None
    with path.open(encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = rows[0][1:]
    if [r[0] for r in rows[1:]] != header:
        raise DataError(f"{path}: row labels do not match the header")
    try:
        values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    return SimilarityMatrix(tuple(header), values)
