"""numba-compiled kernels. Signatures mirror :mod:`._numpy` exactly."""

import math

import numpy as np
from numba import njit

TAIL_EXTRAPOLATE = 0
TAIL_FIXED_OVERLAP = 1


@njit(cache=True)
def _fill_overlap(flat, a0, a1, b0, b1, mark_s, mark_t, stamp, x):
    ls = a1 - a0
    lt = b1 - b0
    l = max(ls, lt)
    cur = 0
    x[0] = 0
    for d in range(l):
        if d < ls:
            a = flat[a0 + d]
            mark_s[a] = stamp
            if mark_t[a] == stamp:
                cur += 1
        if d < lt:
            b = flat[b0 + d]
            mark_t[b] = stamp
            if mark_s[b] == stamp:
                cur += 1
        x[d + 1] = cur
    return l


@njit(cache=True)
def overlap_curve(s, t, n_vocab):
    flat = np.concatenate((s, t))
    mark_s = np.full(n_vocab, -1, np.int64)
    mark_t = np.full(n_vocab, -1, np.int64)
    x = np.zeros(max(len(s), len(t)) + 1, np.int64)
    _fill_overlap(flat, 0, len(s), len(s), len(s) + len(t), mark_s, mark_t, 1, x)
    return x


@njit(cache=True)
def _agreement(x, s, l, d, tail):
    if tail == TAIL_EXTRAPOLATE:
        if d <= s:
            return x[d] / d
        if d <= l:
            return (x[d] + x[s] * (d - s) / s) / d
        return (x[l] - x[s]) / l + x[s] / s
    if d <= l:
        return x[d] / d
    return x[l] / d


@njit(cache=True)
def rbo_from_overlap(x, ls, lt, p, tail, truncated, max_depth, tol):
    s = min(ls, lt)
    l = max(ls, lt)
    if l == 0:
        return 1.0
    if s == 0:
        return 0.0
    if truncated:
        total = 0.0
        pw = 1.0
        d = 1
        while True:
            total += (1.0 - p) * pw * _agreement(x, s, l, d, tail)
            pw *= p
            if pw < tol or d >= max_depth:
                break
            d += 1
        return total
    if tail == TAIL_EXTRAPOLATE:
        sum1 = 0.0
        sum2 = 0.0
        for d in range(1, l + 1):
            pd = p ** d
            sum1 += x[d] / d * pd
            if d > s:
                sum2 += x[s] * (d - s) / (s * d) * pd
        return (1.0 - p) / p * (sum1 + sum2) + ((x[l] - x[s]) / l + x[s] / s) * p ** l
    head = 0.0
    partial = 0.0
    for d in range(1, l + 1):
        head += (1.0 - p) * p ** (d - 1) * x[d] / d
        partial += p ** d / d
    rest = -math.log1p(-p) - partial
    if rest < 0.0:
        rest = 0.0
    return head + (1.0 - p) * x[l] / p * rest


@njit(cache=True)
def rbo_pair(s, t, n_vocab, p, tail, truncated, max_depth, tol):
    x = overlap_curve(s, t, n_vocab)
    return rbo_from_overlap(x, len(s), len(t), p, tail, truncated, max_depth, tol)


@njit(cache=True)
def rbo_matrix(flat, offsets, n_vocab, p, tail, truncated, max_depth, tol):
    n = len(offsets) - 1
    out = np.eye(n)
    mark_s = np.full(n_vocab, -1, np.int64)
    mark_t = np.full(n_vocab, -1, np.int64)
    longest = 0
    for i in range(n):
        longest = max(longest, offsets[i + 1] - offsets[i])
    x = np.zeros(longest + 1, np.int64)
    stamp = 0
    for i in range(n):
        for j in range(i):
            _fill_overlap(flat, offsets[i], offsets[i + 1], offsets[j], offsets[j + 1],
                          mark_s, mark_t, stamp, x)
            stamp += 1
            v = rbo_from_overlap(x, offsets[i + 1] - offsets[i], offsets[j + 1] - offsets[j],
                                 p, tail, truncated, max_depth, tol)
            out[i, j] = v
            out[j, i] = v
    return out


@njit(cache=True)
def lance_williams(dist, method):
    """Merges as rows (left id, right id, height, size); method 0..3 =
    single, complete, average, ward."""
    n = dist.shape[0]
    d = dist.copy()
    size = np.ones(n)
    node = np.arange(n)
    active = np.ones(n, np.bool_)
    out = np.empty((n - 1, 4))
    for step in range(n - 1):
        best = np.inf
        bi = -1
        bj = -1
        k1 = -1
        k2 = -1
        for i in range(n):
            if not active[i]:
                continue
            for j in range(i + 1, n):
                if not active[j]:
                    continue
                v = d[i, j]
                a = min(node[i], node[j])
                b = max(node[i], node[j])
                if v < best or (v == best and (a < k1 or (a == k1 and b < k2))):
                    best = v
                    bi = i
                    bj = j
                    k1 = a
                    k2 = b
        ni = size[bi]
        nj = size[bj]
        for k in range(n):
            if not active[k] or k == bi or k == bj:
                continue
            dik = d[bi, k]
            djk = d[bj, k]
            if method == 0:
                new = min(dik, djk)
            elif method == 1:
                new = max(dik, djk)
            elif method == 2:
                new = (ni * dik + nj * djk) / (ni + nj)
            else:
                nk = size[k]
                new = ((ni + nk) * dik + (nj + nk) * djk - nk * best) / (ni + nj + nk)
            d[bi, k] = new
            d[k, bi] = new
        active[bj] = False
        size[bi] = ni + nj
        out[step, 0] = k1
        out[step, 1] = k2
        out[step, 2] = best
        out[step, 3] = ni + nj
        node[bi] = n + step
    return out


@njit(cache=True)
def simple_path_counts(indptr, indices, src, max_len):
    """counts[v, l] = number of simple paths src -> v with exactly l edges."""
    n = len(indptr) - 1
    counts = np.zeros((n, max_len + 1), np.int64)
    on_path = np.zeros(n, np.bool_)
    stack_node = np.empty(max_len + 1, np.int64)
    stack_ptr = np.empty(max_len + 1, np.int64)
    top = 0
    stack_node[0] = src
    stack_ptr[0] = indptr[src]
    on_path[src] = True
    while top >= 0:
        u = stack_node[top]
        e = stack_ptr[top]
        if top == max_len or e >= indptr[u + 1]:
            on_path[u] = False
            top -= 1
            continue
        stack_ptr[top] = e + 1
        v = indices[e]
        if on_path[v]:
            continue
        counts[v, top + 1] += 1
        top += 1
        stack_node[top] = v
        stack_ptr[top] = indptr[v]
        on_path[v] = True
    return counts
