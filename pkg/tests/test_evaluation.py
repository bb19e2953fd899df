import math

import numpy as np
import pytest

import oracles
from rankedsim.clustering import Partition
from rankedsim.errors import DataError
from rankedsim.evaluation import (
    adjusted_rand_index,
    confusion_matrix,
    dcg,
    ndcg_at_k,
    rand_index,
    ranking_ndcg,
    reference_gains,
)


def test_dcg_matches_oracle():
    g = [3, 2, 3, 0, 1, 2]
    for k in range(1, 8):
        assert dcg(g, k) == pytest.approx(oracles.dcg_oracle(g, k), abs=1e-12)


def test_ndcg_known_value():
    pred = [3, 2, 3, 0, 1, 2]
    ideal = sorted(pred, reverse=True)
    assert ndcg_at_k(ideal, ideal, 6) == 1.0
    want = oracles.dcg_oracle(pred, 6) / oracles.dcg_oracle(ideal, 6)
    assert ndcg_at_k(pred, ideal, 6) == pytest.approx(want)


def test_ndcg_validation():
    with pytest.raises(DataError):
        ndcg_at_k([1], [1, 2], 2)
    with pytest.raises(DataError):
        ndcg_at_k([1], [0, 0], 2)
    with pytest.raises(DataError):
        dcg([1], 0)
    with pytest.raises(DataError):
        dcg([-1], 1)


def test_reference_gains_from_rank():
    assert reference_gains(["a", "b", "c"]) == {"a": 3, "b": 2, "c": 1}
    assert reference_gains([("a", 7), ("b", None)]) == {"a": 7, "b": 1}


def test_ranking_ndcg():
    ref = ["a", "b", "c"]
    assert ranking_ndcg(["a", "b", "c"], ref, 3) == 1.0
    worse = ranking_ndcg(["c", "x", "a"], ref, 3)
    want = (1 / math.log2(2) + 3 / math.log2(4)) / (3 + 2 / math.log2(3) + 1 / math.log2(4))
    assert worse == pytest.approx(want)


def test_ari_against_pair_counting():
    rng = np.random.default_rng(4)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        x = rng.integers(0, 4, n)
        y = rng.integers(0, 4, n)
        p = Partition.from_groups({i: int(v) for i, v in enumerate(x)})
        q = Partition.from_groups({i: int(v) for i, v in enumerate(y)})
        assert adjusted_rand_index(p, q) == pytest.approx(oracles.ari_pairs(x, y), abs=1e-12)
        assert rand_index(p, q) == pytest.approx(oracles.rand_pairs(x, y), abs=1e-12)


def test_ari_edge_cases():
    p = Partition((0, 0, 1, 1))
    assert adjusted_rand_index(p, Partition((0, 0, 0, 0))) == 0.0
    assert adjusted_rand_index(p, Partition((1 - x for x in (0, 0, 1, 1)))) == 1.0
    assert adjusted_rand_index(Partition((0, 0)), Partition((0, 0))) == 1.0
    with pytest.raises(DataError):
        adjusted_rand_index(Partition((0,)), Partition((0,)))


def test_alignment_by_entity():
    p = Partition((0, 0, 1), ("a", "b", "c"))
    q = Partition((0, 1, 1), ("c", "a", "b"))
    assert adjusted_rand_index(p, q) == 1.0
    with pytest.raises(DataError):
        rand_index(p, Partition((0, 0, 1), ("a", "b", "z")))
    with pytest.raises(DataError):
        rand_index(Partition((0, 1)), Partition((0, 1, 1)))


def test_confusion_matrix_keeps_labels():
    truth = Partition((0, 0, 1, 1, 2), tuple("abcde"))
    pred = Partition((1, 1, 0, 0, 0), tuple("abcde"))
    assert confusion_matrix(truth, pred).tolist() == [[0, 2], [2, 0], [1, 0]]
