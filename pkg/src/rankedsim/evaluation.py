"""Scoring rankings (NDCG) and partitions (Rand, ARI, confusion) against ground truth."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .clustering import Partition
from .errors import DataError


def _gains(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or not np.all(np.isfinite(g)) or np.any(g < 0):
        raise DataError("gains must be a finite, non-negative sequence")
    return g


def dcg(gains: Sequence[float], k: int, base: float = 2.0) -> float:
    """``sum_{i<=k} g_i / log_base(i + 1)``."""
    if k < 1:
        raise DataError(f"k must be >= 1, got {k}")
    g = _gains(gains)[:k]
    if not len(g):
        return 0.0
    disc = np.log(np.arange(2, len(g) + 2)) / math.log(base)
    return float(np.sum(g / disc))


def ndcg_at_k(predicted: Sequence[float], ideal: Sequence[float], k: int,
              base: float = 2.0) -> float:
    ideal = _gains(ideal)
    if np.any(np.diff(ideal) > 0):
        raise DataError("ideal gains must be sorted in descending order")
    best = dcg(ideal, k, base)
    if best <= 0:
        raise DataError("ideal gains are all zero; NDCG is undefined")
    return dcg(predicted, k, base) / best


def reference_gains(reference: Sequence[tuple[str, float | None]] | Sequence[str]
                    ) -> dict[str, float]:
    """Gain per reference item: explicit gains when given, else ``N - r + 1``
    for the item at 1-based rank ``r`` of an ``N``-item reference list."""
    items = [r if isinstance(r, tuple) else (r, None) for r in reference]
    n = len(items)
    return {e: float(g) if g is not None else float(n - i) for i, (e, g) in enumerate(items)}


def ranking_ndcg(predicted: Sequence[str], reference, k: int) -> float:
    """NDCG@k of a predicted entity ranking against a reference ranking;
    items missing from the reference gain 0."""
    gains = reference_gains(reference)
    pred = [gains.get(e, 0.0) for e in predicted]
    ideal = sorted(gains.values(), reverse=True)
    return ndcg_at_k(pred, ideal, k)


def _aligned(p: Partition, q: Partition):
    if p.entities is not None and q.entities is not None:
        if set(p.entities) != set(q.entities):
            diff = sorted(set(p.entities) ^ set(q.entities))
            raise DataError(f"partitions cover different entities: {diff[:5]}")
        if p.entities != q.entities:
            pos = {e: i for i, e in enumerate(q.entities)}
            return np.asarray(p.labels), np.array([q.labels[pos[e]] for e in p.entities])
    elif len(p) != len(q):
        raise DataError(f"partitions have different sizes ({len(p)} vs {len(q)})")
    return np.asarray(p.labels), np.asarray(q.labels)


def contingency(p: Partition, q: Partition) -> np.ndarray:
    a, b = _aligned(p, q)
    table = np.zeros((a.max() + 1 if len(a) else 0, b.max() + 1 if len(b) else 0), np.int64)
    np.add.at(table, (a, b), 1)
    return table


def _comb2(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def rand_index(p: Partition, q: Partition) -> float:
    table = contingency(p, q)
    n = int(table.sum())
    if n < 2:
        raise DataError("Rand index needs at least 2 entities")
    total = n * (n - 1) // 2
    same_both = int(_comb2(table).sum())
    same_p = int(_comb2(table.sum(axis=1)).sum())
    same_q = int(_comb2(table.sum(axis=0)).sum())
    apart_both = total - same_p - same_q + same_both
    return (same_both + apart_both) / total


def adjusted_rand_index(p: Partition, q: Partition) -> float:
    """Hubert-Arabie ARI; 1.0 when the chance-corrected ratio is 0/0."""
    table = contingency(p, q)
    n = int(table.sum())
    if n < 2:
        raise DataError("ARI needs at least 2 entities")
    index = int(_comb2(table).sum())
    sum_a = int(_comb2(table.sum(axis=1)).sum())
    sum_b = int(_comb2(table.sum(axis=0)).sum())
    total = n * (n - 1) // 2
    # scaled by total to keep the arithmetic in integers
    num = index * total - sum_a * sum_b
    den = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if den == 0:
        return 1.0
    return 2 * num / den


def confusion_matrix(truth: Partition, predicted: Partition) -> np.ndarray:
    """Rows are ground-truth groups, columns predicted clusters; no alignment."""
    return contingency(truth, predicted)
