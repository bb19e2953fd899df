"""Pure-numpy kernels; the fallback when numba is disabled or missing."""

import math

import numpy as np

TAIL_EXTRAPOLATE = 0
TAIL_FIXED_OVERLAP = 1


def overlap_curve(s, t, n_vocab):
    s = np.asarray(s, dtype=np.int64)
    t = np.asarray(t, dtype=np.int64)
    l = max(len(s), len(t))
    pos_t = np.full(n_vocab, -1, np.int64)
    pos_t[t] = np.arange(len(t))
    j = pos_t[s]
    hit = j >= 0
    # a shared item enters the overlap once both prefixes contain it
    depth = np.maximum(np.nonzero(hit)[0], j[hit]) + 1
    return np.cumsum(np.bincount(depth, minlength=l + 1)).astype(np.int64)


def _agreements(x, s, l, d, tail):
    d = np.asarray(d, dtype=np.int64)
    a = np.empty(len(d))
    if tail == TAIL_EXTRAPOLATE:
        head = d <= s
        mid = (d > s) & (d <= l)
        far = d > l
        a[head] = x[d[head]] / d[head]
        a[mid] = (x[d[mid]] + x[s] * (d[mid] - s) / s) / d[mid]
        a[far] = (x[l] - x[s]) / l + x[s] / s
    else:
        near = d <= l
        a[near] = x[d[near]] / d[near]
        a[~near] = x[l] / d[~near]
    return a


def rbo_from_overlap(x, ls, lt, p, tail, truncated, max_depth, tol):
    s, l = min(ls, lt), max(ls, lt)
    if l == 0:
        return 1.0
    if s == 0:
        return 0.0
    if truncated:
        cap = max_depth
        if tol > 0:
            cap = min(cap, int(math.ceil(math.log(tol) / math.log(p))) + 2)
        pw = np.cumprod(np.full(cap, p))  # pw[k] = p^(k+1), same rounding as repeated *=
        below = np.nonzero(pw < tol)[0]
        n_terms = min(int(below[0]) + 1 if len(below) else cap, max_depth)
        d = np.arange(1, n_terms + 1)
        weights = np.concatenate(([1.0], pw[: n_terms - 1]))
        return float(np.sum((1.0 - p) * weights * _agreements(x, s, l, d, tail)))
    d = np.arange(1, l + 1)
    pd = p ** d.astype(float)
    if tail == TAIL_EXTRAPOLATE:
        sum1 = np.sum(x[1:] / d * pd)
        mid = d > s
        sum2 = np.sum(x[s] * (d[mid] - s) / (s * d[mid]) * pd[mid])
        return float((1.0 - p) / p * (sum1 + sum2) + ((x[l] - x[s]) / l + x[s] / s) * p ** l)
    head = np.sum((1.0 - p) * pd / p * x[1:] / d)
    rest = max(-math.log1p(-p) - float(np.sum(pd / d)), 0.0)
    return float(head + (1.0 - p) * x[l] / p * rest)


def rbo_pair(s, t, n_vocab, p, tail, truncated, max_depth, tol):
    x = overlap_curve(s, t, n_vocab)
    return rbo_from_overlap(x, len(s), len(t), p, tail, truncated, max_depth, tol)


def rbo_matrix(flat, offsets, n_vocab, p, tail, truncated, max_depth, tol):
    n = len(offsets) - 1
    out = np.eye(n)
    lists = [flat[offsets[i]:offsets[i + 1]] for i in range(n)]
    for i in range(n):
        for j in range(i):
            v = rbo_pair(lists[i], lists[j], n_vocab, p, tail, truncated, max_depth, tol)
            out[i, j] = out[j, i] = v
    return out


def lance_williams(dist, method):
    n = dist.shape[0]
    d = np.array(dist, dtype=float)
    size = np.ones(n)
    node = np.arange(n)
    active = np.ones(n, bool)
    out = np.empty((n - 1, 4))
    iu, ju = np.triu_indices(n, 1)
    for step in range(n - 1):
        live = active[iu] & active[ju]
        ii, jj = iu[live], ju[live]
        vals = d[ii, jj]
        best = vals.min()
        tied = np.nonzero(vals == best)[0]
        a = np.minimum(node[ii[tied]], node[jj[tied]])
        b = np.maximum(node[ii[tied]], node[jj[tied]])
        pick = tied[np.lexsort((b, a))[0]]
        bi, bj = ii[pick], jj[pick]
        k1, k2 = sorted((node[bi], node[bj]))
        ni, nj = size[bi], size[bj]
        others = active.copy()
        others[[bi, bj]] = False
        dik, djk = d[bi, others], d[bj, others]
        if method == 0:
            new = np.minimum(dik, djk)
        elif method == 1:
            new = np.maximum(dik, djk)
        elif method == 2:
            new = (ni * dik + nj * djk) / (ni + nj)
        else:
            nk = size[others]
            new = ((ni + nk) * dik + (nj + nk) * djk - nk * best) / (ni + nj + nk)
        d[bi, others] = new
        d[others, bi] = new
        active[bj] = False
        size[bi] = ni + nj
        out[step] = (k1, k2, best, ni + nj)
        node[bi] = n + step
    return out


def simple_path_counts(indptr, indices, src, max_len):
    n = len(indptr) - 1
    counts = np.zeros((n, max_len + 1), np.int64)
    on_path = np.zeros(n, bool)

    def walk(u, depth):
        if depth == max_len:
            return
        on_path[u] = True
        for v in indices[indptr[u]:indptr[u + 1]]:
            if not on_path[v]:
                counts[v, depth + 1] += 1
                walk(v, depth + 1)
        on_path[u] = False

    walk(src, 0)
    return counts
