import numpy as np
import pytest

import oracles
from rankedsim.clustering import (
    LINKAGES,
    Dendrogram,
    Merge,
    Partition,
    agglomerate,
    cut,
    read_dendrogram,
    write_dendrogram,
    write_partition,
)
from rankedsim.errors import DataError


def random_distances(rng, n):
    x = rng.random((n, n))
    d = (x + x.T) / 2
    np.fill_diagonal(d, 0)
    return d


@pytest.mark.parametrize("linkage", LINKAGES)
def test_matches_naive_oracle(linkage):
    rng = np.random.default_rng(LINKAGES.index(linkage))
    for _ in range(15):
        n = int(rng.integers(2, 10))
        d = random_distances(rng, n)
        got = agglomerate(d, linkage).merges
        want = oracles.naive_agglomerate(d.tolist(), linkage)
        assert [(m.left, m.right, m.size) for m in got] == [(a, b, s) for a, b, _, s in want]
        assert [m.height for m in got] == pytest.approx([h for _, _, h, _ in want], abs=1e-12)


def test_ties_break_to_smallest_pair():
    d = np.ones((4, 4)) - np.eye(4)
    t = agglomerate(d, "single")
    assert (t.merges[0].left, t.merges[0].right) == (0, 1)
    assert (t.merges[1].left, t.merges[1].right) == (2, 3)


def test_known_average_tree():
    d = np.array([[0, 1, 4], [1, 0, 2], [4, 2, 0]], float)
    t = agglomerate(d, "average")
    assert t.merges == (Merge(0, 1, 1.0, 2), Merge(2, 3, 3.0, 3))


def test_ward_single_points_equal_raw_distance():
    d = np.array([[0, 3], [3, 0]], float)
    assert agglomerate(d, "ward").merges[0].height == 3.0


def test_cut():
    d = np.array([[0, 1, 9, 9], [1, 0, 9, 9], [9, 9, 0, 1], [9, 9, 1, 0]], float)
    t = agglomerate(d, "complete")
    assert cut(t, 2).labels == (0, 0, 1, 1)
    assert cut(t, 1).labels == (0, 0, 0, 0)
    assert cut(t, 4).labels == (0, 1, 2, 3)
    with pytest.raises(DataError):
        cut(t, 5)


@pytest.mark.parametrize("bad, msg", [
    (np.array([[0, 1], [2, 0]], float), "symmetric"),
    (np.array([[0, np.nan], [np.nan, 0]]), "non-finite"),
    (np.array([[0, -1], [-1, 0]], float), "negative"),
    (np.array([[1, 1], [1, 0]], float), "self distance"),
    (np.zeros((1, 1)), "at least 2"),
])
def test_bad_distances(bad, msg):
    with pytest.raises(DataError, match=msg):
        agglomerate(bad)


def test_unknown_linkage():
    with pytest.raises(DataError):
        agglomerate(np.zeros((2, 2)), "centroid")


def test_dendrogram_validation():
    with pytest.raises(DataError):
        Dendrogram(3, (Merge(0, 1, 1.0, 2),))
    with pytest.raises(DataError):
        Dendrogram(3, (Merge(0, 1, 1.0, 2), Merge(0, 3, 2.0, 3)))


def test_partition_validation_and_groups():
    with pytest.raises(DataError):
        Partition((0, 2))
    p = Partition.from_groups({"a": "x", "b": "y", "c": "x"})
    assert p.labels == (0, 1, 0) and p.k == 2
    assert p.restricted_to(["c", "b"]).labels == (0, 1)


def test_files(tmp_path):
    d = random_distances(np.random.default_rng(0), 5)
    t = agglomerate(d, "ward")
    write_dendrogram(tmp_path / "t.json", t, list("abcde"))
    back, ents = read_dendrogram(tmp_path / "t.json")
    assert back == t and ents == list("abcde")
    write_partition(tmp_path / "p.csv", cut(t, 2, list("abcde")))
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "entity,cluster"
