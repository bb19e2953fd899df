import json

import numpy as np
import pytest

from rankedsim.errors import DataError, DuplicateFeatureError
from rankedsim.model import (
    GroundTruth,
    RankedFeatureList,
    SimilarityMatrix,
    TieBreak,
    build_ranked_list,
    read_partition_csv,
    read_ranked_lists,
    read_rankings_jsonl,
    to_distance,
    write_ranked_lists,
)


def test_from_features_scores_descend():
    rl = RankedFeatureList.from_features("e", ["a", "b", "c"])
    assert rl.scores == (3.0, 2.0, 1.0)
    assert rl.features == ("a", "b", "c")


def test_lexicographic_ties():
    rl = build_ranked_list("e", [("b", 2), ("c", 5), ("a", 2)])
    assert rl.features == ("c", "a", "b")


def test_input_order_ties():
    rl = build_ranked_list("e", [("b", 2), ("c", 5), ("a", 2)], TieBreak.INPUT_ORDER)
    assert rl.features == ("c", "b", "a")


def test_secondary_ties():
    rl = build_ranked_list("e", [("b", 2), ("a", 2), ("z", 2)], "by-secondary-score",
                           secondary={"a": 1, "b": 9, "z": 1})
    assert rl.features == ("b", "a", "z")


def test_secondary_requires_scores():
    with pytest.raises(DataError):
        build_ranked_list("e", [("a", 1)], "by-secondary-score")


def test_duplicate_feature_rejected():
    with pytest.raises(DuplicateFeatureError) as err:
        build_ranked_list("e", [("a", 1), ("a", 2)])
    assert err.value.feature == "a"


@pytest.mark.parametrize("score", [-1.0, float("nan"), float("inf")])
def test_bad_scores(score):
    with pytest.raises(DataError):
        build_ranked_list("e", [("a", score)])


def test_increasing_scores_rejected():
    with pytest.raises(DataError):
        RankedFeatureList("e", (("a", 1.0), ("b", 2.0)))


def test_empty_list_allowed():
    rl = build_ranked_list("e", [])
    assert len(rl) == 0


def test_similarity_matrix_checks():
    with pytest.raises(DataError):
        SimilarityMatrix(("a", "b"), [[1, 0.2], [0.3, 1]])
    with pytest.raises(DataError):
        SimilarityMatrix(("a", "b"), [[1, np.nan], [np.nan, 1]])
    with pytest.raises(DataError):
        SimilarityMatrix(("a", "a"), np.eye(2))
    m = SimilarityMatrix(("a", "b"), [[1, 0.25], [0.25, 1]])
    assert m["a", "b"] == 0.25
    with pytest.raises(ValueError):
        m.values[0, 1] = 0.5
    with pytest.raises(DataError):
        m.index("zz")


def test_to_distance():
    m = SimilarityMatrix(("a", "b"), [[1, 0.25], [0.25, 1]])
    assert to_distance(m).tolist() == [[0, 0.75], [0.75, 0]]
    with pytest.raises(DataError):
        to_distance(SimilarityMatrix(("a", "b"), [[1, 1.5], [1.5, 1]]))


def test_ground_truth_groups_in_first_appearance_order():
    gt = GroundTruth(partition={"x": "g2", "y": "g1", "z": "g2"})
    assert gt.groups == ("g2", "g1")
    with pytest.raises(DataError):
        GroundTruth()


def test_ranked_list_roundtrip(tmp_path):
    lists = [build_ranked_list("e1", [("a", 3), ("b", 1.5)]),
             RankedFeatureList.from_features("e2", ["x"]), RankedFeatureList("e3")]
    path = tmp_path / "l.jsonl"
    write_ranked_lists(path, lists)
    assert read_ranked_lists(path) == lists
    first = json.loads(path.read_text().splitlines()[0])
    assert first["features"][0] == {"id": "a", "score": 3}


def test_tsv_lists(tmp_path):
    path = tmp_path / "l.tsv"
    path.write_text("e1\ta\ne1\tb\ne2\tx\t4\ne2\ty\t1\n")
    a, b = read_ranked_lists(path)
    assert a.features == ("a", "b") and a.scores == (2.0, 1.0)
    assert b.scores == (4.0, 1.0)
    path.write_text("e1\ta\tb\tc\n")
    with pytest.raises(DataError):
        read_ranked_lists(path)


def test_duplicate_entity_in_file(tmp_path):
    path = tmp_path / "l.jsonl"
    path.write_text('{"entity": "e", "features": []}\n{"entity": "e", "features": []}\n')
    with pytest.raises(DataError):
        read_ranked_lists(path)


def test_partition_csv(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("entity,group\na,x\nb,y\n")
    assert read_partition_csv(path) == {"a": "x", "b": "y"}
    path.write_text("a,x\na,y\n")
    with pytest.raises(DataError):
        read_partition_csv(path)


def test_rankings_jsonl(tmp_path):
    path = tmp_path / "r.jsonl"
    path.write_text('{"entity": "q", "ranking": ["a", "b"], "gains": [3, 1]}\n'
                    '{"entity": "r", "ranking": ["c"]}\n')
    got = read_rankings_jsonl(path)
    assert got == {"q": (("a", 3), ("b", 1)), "r": (("c", None),)}
