"""Time each kernel under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--lists 300] [--n 200] [--repeat 3]

Numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from rankedsim import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def workloads(n_lists, n_items, rng):
    vocab = 400
    lists = [rng.permutation(vocab)[: rng.integers(5, 60)].astype(np.int64)
             for _ in range(n_lists)]
    offsets = np.zeros(n_lists + 1, np.int64)
    offsets[1:] = np.cumsum([len(x) for x in lists])
    flat = np.concatenate(lists)
    x = rng.random((n_items, n_items))
    dist = np.ascontiguousarray((x + x.T) / 2)
    np.fill_diagonal(dist, 0)
    n_nodes = 40
    adj = (rng.random((n_nodes, n_nodes)) < 0.12) & ~np.eye(n_nodes, dtype=bool)
    indptr = np.concatenate([[0], np.cumsum(adj.sum(axis=1))]).astype(np.int64)
    indices = np.nonzero(adj)[1].astype(np.int64)
    rbo_args = (0.98, kernels.TAIL_EXTRAPOLATE, False, 10_000_000, 1e-12)
    trunc_args = (0.98, kernels.TAIL_EXTRAPOLATE, True, 10_000_000, 1e-12)
    return {
        f"rbo_matrix analytic ({n_lists} lists)":
            lambda b: b.rbo_matrix(flat, offsets, vocab, *rbo_args),
        f"rbo_matrix truncated ({n_lists // 4} lists)":
            lambda b: b.rbo_matrix(flat[: offsets[n_lists // 4]], offsets[: n_lists // 4 + 1],
                                   vocab, *trunc_args),
        f"lance_williams average (n={n_items})": lambda b: b.lance_williams(dist, 2),
        f"lance_williams ward (n={n_items})": lambda b: b.lance_williams(dist, 3),
        f"simple_path_counts ({n_nodes} nodes, tau=5)":
            lambda b: [b.simple_path_counts(indptr, indices, s, 5) for s in range(n_nodes)],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lists", type=int, default=300)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = {"numba": kernels.get_backend("numba"), "numpy": kernels.get_backend("numpy")}
    jobs = workloads(args.lists, args.n, np.random.default_rng(0))
    print(f"{'kernel':<42}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, job in jobs.items():
        job(backends["numba"])  # compile
        t_nb = best_of(lambda: job(backends["numba"]), args.repeat)
        t_np = best_of(lambda: job(backends["numpy"]), args.repeat)
        print(f"{name:<42}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
