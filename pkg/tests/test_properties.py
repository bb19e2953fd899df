"""Invariants checked over generated inputs."""

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from rankedsim import kernels
from rankedsim.clustering import LINKAGES, Partition, agglomerate, cut
from rankedsim.evaluation import adjusted_rand_index, ndcg_at_k, rand_index
from rankedsim.graph import FeatureGraph, ScsParams, scs
from rankedsim.metrics import (
    RboParams,
    agreement_at_depth,
    average_overlap,
    jaccard,
    kendall_tau,
    rbo,
    spearman_rho,
)
from rankedsim.model import RankedFeatureList, read_ranked_lists, write_ranked_lists
from rankedsim.sparql import normalize_query_digest

VOCAB = [f"f{i}" for i in range(25)]
ranked = st.lists(st.sampled_from(VOCAB), unique=True, max_size=20)
persistence = st.floats(0.05, 0.99)
tails = st.sampled_from(["extrapolate", "fixed-overlap"])


@given(ranked, ranked, persistence, tails)
def test_rbo_bounded_and_symmetric(a, b, p, tail):
    params = RboParams(p, tail=tail)
    x = rbo(a, b, params)
    assert -1e-12 <= x <= 1 + 1e-12
    assert x == pytest.approx(rbo(b, a, params), abs=1e-12)


@given(ranked, persistence)
def test_rbo_identity(a, p):
    assert rbo(a, a, p) == pytest.approx(1.0, abs=1e-12)


@given(ranked, ranked, persistence, tails)
def test_rbo_disjoint(a, b, p, tail):
    b = [f for f in b if f not in a]
    assume(a and b)
    assert rbo(a, b, RboParams(p, tail=tail)) == 0.0


@given(ranked, ranked, st.floats(0.05, 0.95), tails)
def test_rbo_truncated_matches_analytic(a, b, p, tail):
    exact = rbo(a, b, RboParams(p, tail=tail))
    approx = rbo(a, b, RboParams(p, tail=tail, mode="truncated"))
    assert approx == pytest.approx(exact, abs=1e-9)


@given(ranked, ranked, st.sampled_from([0.3, 0.7, 0.9]))
def test_rbo_matches_oracle(a, b, p):
    assert rbo(a, b, p) == pytest.approx(oracles.rbo_extrapolated(a, b, p), abs=1e-12)


@given(st.integers(2, 15), st.integers(1, 14), persistence)
def test_rbo_top_weighting(n, i, p):
    # one shared item at the same depth in both lists: deeper means lower
    assume(i < n)
    def pair(depth):
        s = [f"s{j}" for j in range(n)]
        t = [f"t{j}" for j in range(n)]
        s[depth - 1] = t[depth - 1] = "shared"
        return s, t
    assert rbo(*pair(i), p) > rbo(*pair(i + 1), p)


@given(ranked, ranked, st.integers(1, 25))
def test_agreement_and_ao_bounded(a, b, d):
    assert 0.0 <= agreement_at_depth(a, b, d) <= 1.0
    assert 0.0 <= average_overlap(a, b, d) <= 1.0 + 1e-12


@given(ranked, ranked)
def test_jaccard_bounded_symmetric(a, b):
    assert 0.0 <= jaccard(a, b) == jaccard(b, a) <= 1.0


@given(st.permutations(VOCAB[:8]), st.permutations(VOCAB[:8]))
def test_rank_correlations(a, b):
    assert -1 <= kendall_tau(a, b) <= 1 and -1 <= spearman_rho(a, b) <= 1
    assert kendall_tau(a, a[::-1]) == -1.0
    assert kendall_tau(a, b) == pytest.approx(kendall_tau(b, a))


@given(ranked, ranked)
def test_backends_agree(a, b):
    nb, npy = kernels.get_backend("numba"), kernels.get_backend("numpy")
    idx = {f: i for i, f in enumerate(VOCAB)}
    s = np.array([idx[f] for f in a], np.int64)
    t = np.array([idx[f] for f in b], np.int64)
    for tail in (0, 1):
        for trunc in (False, True):
            args = (0.9, tail, trunc, 10_000_000, 1e-12)
            assert nb.rbo_pair(s, t, 25, *args) == pytest.approx(
                npy.rbo_pair(s, t, 25, *args), abs=1e-13)


labels = st.lists(st.integers(0, 3), min_size=2, max_size=10)


def part(xs):
    return Partition.from_groups({i: x for i, x in enumerate(xs)})


@given(labels, st.data())
def test_ari_properties(x, data):
    y = data.draw(st.lists(st.integers(0, 3), min_size=len(x), max_size=len(x)))
    p, q = part(x), part(y)
    assert adjusted_rand_index(p, q) == pytest.approx(adjusted_rand_index(q, p), abs=1e-12)
    assert adjusted_rand_index(p, p) == 1.0
    assert adjusted_rand_index(p, q) == pytest.approx(oracles.ari_pairs(x, y), abs=1e-12)
    assert 0.0 <= rand_index(p, q) <= 1.0
    renamed = part([(v + 1) % 4 for v in y])
    assert adjusted_rand_index(p, renamed) == adjusted_rand_index(p, q)
    if len(set(x)) > 1:
        assert adjusted_rand_index(p, part([0] * len(x))) == 0.0


def distance_matrices():
    return st.integers(2, 9).flatmap(lambda n: st.lists(
        st.floats(0.01, 10.0), min_size=n * n, max_size=n * n).map(
        lambda v: _sym(np.array(v).reshape(n, n))))


def _sym(x):
    d = (x + x.T) / 2
    np.fill_diagonal(d, 0.0)
    return d


@given(distance_matrices(), st.sampled_from(LINKAGES), st.data())
def test_clustering_properties(d, linkage, data):
    t = agglomerate(d, linkage)
    h = t.heights
    assert np.all(np.diff(h) >= -1e-9)
    assert t.merges[-1].size == len(d)
    k = data.draw(st.integers(1, len(d)))
    assert cut(t, k).k == k


@st.composite
def graphs(draw):
    n = draw(st.integers(2, 7))
    nodes = [f"n{i}" for i in range(n)]
    pairs = [(a, b) for a in nodes for b in nodes if a != b]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    a, b = draw(st.sampled_from(pairs))
    return FeatureGraph([(s, "p", o) for s, o in chosen], nodes), a, b


@given(graphs(), st.integers(1, 3), st.floats(0.1, 0.8))
def test_scs_monotone(gab, tau, beta):
    g, a, b = gab
    base = scs(g, a, b, ScsParams(tau=tau, beta=beta))
    assert scs(g, a, b, ScsParams(tau=tau + 1, beta=beta)) >= base
    assert scs(g, a, b, ScsParams(tau=tau, beta=beta + 0.1)) >= base
    assert base >= 0


gains = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=30)


@given(gains, st.integers(1, 30), st.randoms(use_true_random=False))
def test_ndcg_properties(g, k, rnd):
    ideal = sorted(g, reverse=True)
    assume(ideal[0] > 0)
    assert ndcg_at_k(ideal, ideal, k) == 1.0
    shuffled = list(g)
    rnd.shuffle(shuffled)
    v = ndcg_at_k(shuffled, ideal, k)
    assert 0.0 <= v <= 1.0 + 1e-12
    assert v == pytest.approx(ndcg_at_k(shuffled, ideal, k, base=10.0), abs=1e-12)


@given(st.text(alphabet="SELECT ?xyz{}.\t\n ", max_size=40))
def test_digest_whitespace_invariant(q):
    assert normalize_query_digest(q) == normalize_query_digest("  " + q.replace(" ", " \n ") + "\t")


@given(st.lists(ranked, min_size=1, max_size=4))
def test_ranked_lists_roundtrip(tmp_path_factory, feats):
    lists = [RankedFeatureList.from_features(f"e{i}", fs) for i, fs in enumerate(feats)]
    path = tmp_path_factory.mktemp("rt") / "l.jsonl"
    write_ranked_lists(path, lists)
    assert read_ranked_lists(path) == lists
