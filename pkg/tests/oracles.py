"""Slow, direct reference implementations used to cross-check the kernels.

Nothing here imports the package's kernels; each oracle recomputes its
quantity from the definition.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


# -- rank-biased overlap -------------------------------------------------------

def overlaps(S, T, upto):
    """X_d = |S[:d] & T[:d]| for d = 0..upto, by explicit set intersection."""
    return [len(set(S[:d]) & set(T[:d])) for d in range(upto + 1)]


def rbo_extrapolated(S, T, p):
    """Closed form for uneven lists: agreement of the unseen part of the
    shorter list is extrapolated, and the final agreement is held forever.
    Exact rational arithmetic."""
    if not S and not T:
        return 1.0
    if not S or not T:
        return 0.0
    if len(S) > len(T):
        S, T = T, S
    s, l = len(S), len(T)
    X = overlaps(S, T, l)
    p = Fraction(p)
    head = sum(Fraction(X[d], d) * p ** d for d in range(1, l + 1))
    head += sum(Fraction(X[s] * (d - s), s * d) * p ** d for d in range(s + 1, l + 1))
    tail = (Fraction(X[l] - X[s], l) + Fraction(X[s], s)) * p ** l
    return float((1 - p) / p * head + tail)


def rbo_fixed_overlap_sum(S, T, p, depth=200_000):
    """(1-p) sum p^(d-1) A_d with A_d = X_d/d inside the lists and
    |S & T| / d beyond them, summed term by term."""
    if not S and not T:
        return 1.0
    if not S or not T:
        return 0.0
    l = max(len(S), len(T))
    X = overlaps(S, T, l)
    total = 0.0
    w = 1.0 - p
    for d in range(1, depth + 1):
        x = X[d] if d <= l else X[l]
        total += w * x / d
        w *= p
        if w < 1e-18:
            break
    return total


def agreement(S, T, d):
    return len(set(S[:d]) & set(T[:d])) / d


# -- clustering ------------------------------------------------------------------

def _linkage_distance(D, A, B, method):
    cross = [D[i][j] for i in A for j in B]
    if method == "single":
        return min(cross)
    if method == "complete":
        return max(cross)
    if method == "average":
        return sum(cross) / len(cross)
    # Ward on raw dissimilarities: the increase-in-dispersion form, with
    # means over all ordered pairs (self pairs contribute zero)
    na, nb = len(A), len(B)
    m_ab = sum(cross) / (na * nb)
    m_aa = sum(D[i][j] for i in A for j in A) / (na * na)
    m_bb = sum(D[i][j] for i in B for j in B) / (nb * nb)
    return 2.0 * na * nb / (na + nb) * (m_ab - 0.5 * m_aa - 0.5 * m_bb)


def naive_agglomerate(D, method):
    """Rescan every cluster pair at every step, using only the original
    distances. Returns [(left id, right id, height, size)], ids as in scipy:
    leaves 0..n-1, merge i creates n+i. Ties go to the smallest id pair."""
    n = len(D)
    clusters = {i: (i,) for i in range(n)}
    out = []
    for step in range(n - 1):
        best = None
        for a, b in itertools.combinations(sorted(clusters), 2):
            h = _linkage_distance(D, clusters[a], clusters[b], method)
            key = (h, a, b)
            if best is None or key < best:
                best = key
        h, a, b = best
        merged = clusters.pop(a) + clusters.pop(b)
        clusters[n + step] = merged
        out.append((a, b, h, len(merged)))
    return out


# -- partitions ----------------------------------------------------------------

def pair_counts(x, y):
    """(same-same, same-diff, diff-same, diff-diff) over unordered pairs."""
    a = b = c = d = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        sx, sy = x[i] == x[j], y[i] == y[j]
        if sx and sy:
            a += 1
        elif sx:
            b += 1
        elif sy:
            c += 1
        else:
            d += 1
    return a, b, c, d


def ari_pairs(x, y):
    a, b, c, d = pair_counts(x, y)
    den = (a + b) * (b + d) + (a + c) * (c + d)
    if den == 0:
        return 1.0
    return 2.0 * (a * d - b * c) / den


def rand_pairs(x, y):
    a, b, c, d = pair_counts(x, y)
    return (a + d) / (a + b + c + d)


# -- graphs ----------------------------------------------------------------------

def simple_paths(edges, a, b, length):
    """Count node sequences a = v0, ..., v_length = b of distinct nodes with
    every consecutive pair joined by some edge."""
    adj = {(s, o) for s, _, o in edges if s != o}
    nodes = sorted({s for s, _, _ in edges} | {o for _, _, o in edges})
    inner = [v for v in nodes if v not in (a, b)]
    count = 0
    for mid in itertools.permutations(inner, length - 1):
        seq = (a, *mid, b)
        if all((seq[i], seq[i + 1]) in adj for i in range(length)):
            count += 1
    return count


def scs_oracle(edges, a, b, tau, beta):
    return sum(beta ** l * simple_paths(edges, a, b, l) for l in range(1, tau + 1))


# -- ranking -----------------------------------------------------------------------

def dcg_oracle(gains, k, base=2.0):
    return sum(g / math.log(i + 2, base) for i, g in enumerate(gains[:k]))
