"""The numba and numpy backends must agree on every kernel."""

import os
import subprocess
import sys

import numpy as np
import pytest

from rankedsim import kernels

numba_impl = pytest.importorskip("numba") and kernels.get_backend("numba")
numpy_impl = kernels.get_backend("numpy")


def _random_lists(rng, n_lists, vocab=20, max_len=15):
    lists = []
    for _ in range(n_lists):
        k = int(rng.integers(0, max_len + 1))
        lists.append(rng.permutation(vocab)[:k].astype(np.int64))
    return lists


def test_overlap_curve_agrees():
    rng = np.random.default_rng(0)
    for _ in range(50):
        s, t = _random_lists(rng, 2)
        assert np.array_equal(numba_impl.overlap_curve(s, t, 20),
                              numpy_impl.overlap_curve(s, t, 20))


@pytest.mark.parametrize("tail", [kernels.TAIL_EXTRAPOLATE, kernels.TAIL_FIXED_OVERLAP])
@pytest.mark.parametrize("truncated", [False, True])
def test_rbo_pair_agrees(tail, truncated):
    rng = np.random.default_rng(1)
    for _ in range(50):
        s, t = _random_lists(rng, 2)
        args = (0.9, tail, truncated, 10_000_000, 1e-12)
        a = numba_impl.rbo_pair(s, t, 20, *args)
        b = numpy_impl.rbo_pair(s, t, 20, *args)
        assert a == pytest.approx(b, abs=1e-13)


def test_rbo_matrix_agrees():
    rng = np.random.default_rng(2)
    lists = _random_lists(rng, 12)
    offsets = np.zeros(13, np.int64)
    offsets[1:] = np.cumsum([len(x) for x in lists])
    flat = np.concatenate(lists)
    args = (0.95, kernels.TAIL_EXTRAPOLATE, False, 10_000_000, 1e-12)
    a = numba_impl.rbo_matrix(flat, offsets, 20, *args)
    b = numpy_impl.rbo_matrix(flat, offsets, 20, *args)
    assert np.allclose(a, b, atol=1e-13, rtol=0)
    assert np.array_equal(a, a.T)


@pytest.mark.parametrize("method", range(4))
def test_lance_williams_agrees(method):
    rng = np.random.default_rng(3 + method)
    for _ in range(20):
        n = int(rng.integers(2, 15))
        x = rng.random((n, n))
        d = np.ascontiguousarray((x + x.T) / 2)
        np.fill_diagonal(d, 0)
        a = numba_impl.lance_williams(d, method)
        b = numpy_impl.lance_williams(d, method)
        assert np.array_equal(a[:, [0, 1, 3]], b[:, [0, 1, 3]])
        assert np.allclose(a[:, 2], b[:, 2], atol=1e-12)


def test_path_counts_agree():
    rng = np.random.default_rng(9)
    for _ in range(30):
        n = int(rng.integers(2, 9))
        adj = (rng.random((n, n)) < 0.35) & ~np.eye(n, dtype=bool)
        indptr = np.concatenate([[0], np.cumsum(adj.sum(axis=1))]).astype(np.int64)
        indices = np.nonzero(adj)[1].astype(np.int64)
        src = int(rng.integers(0, n))
        assert np.array_equal(numba_impl.simple_path_counts(indptr, indices, src, 4),
                              numpy_impl.simple_path_counts(indptr, indices, src, 4))


def _backend_in_subprocess(value):
    env = dict(os.environ, RANKEDSIM_BACKEND=value)
    return subprocess.run([sys.executable, "-c",
                           "from rankedsim import kernels; print(kernels.BACKEND)"],
                          env=env, capture_output=True, text=True)


def test_environment_flag_selects_backend():
    assert _backend_in_subprocess("numpy").stdout.strip() == "numpy"
    assert _backend_in_subprocess("numba").stdout.strip() == "numba"
    bad = _backend_in_subprocess("fortran")
    assert bad.returncode != 0 and "RANKEDSIM_BACKEND" in bad.stderr
