"""Regression checks of known reference values against the bundled fixtures."""

from __future__ import annotations

import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

from .errors import CacheMissError
from .extraction import (
    CategoryHierarchy,
    QueryTemplate,
    histogram_to_ranked_list,
    query_based_extract,
    read_leaf_counts,
    read_top_levels,
    rollup_categories,
    stem_counts,
)
from .graph import FeatureMarker, ScsParams, graph_explore_features, read_graph
from .metrics import RboParams, agreement_at_depth, average_overlap, cosine, jaccard, rbo, \
    rank_similars, read_matrix
from .sparql import EndpointConfig, SparqlClient

DBR = "http://dbpedia.org/resource/"
GETTY_ORDER = ["Symbolism_(arts)", "Baroque", "Expressionism", "Romanticism",
               "High_Renaissance", "Dutch_Golden_Age_painting", "Academic_art",
               "Post-Impressionism", "Mannerism"]


def default_fixture_dir() -> Path:
    return Path(str(resources.files("rankedsim").joinpath("data/fixtures")))


class MissingFixture(Exception):
    pass


@dataclass
class CheckResult:
    name: str
    status: str  # PASS | FAIL | MISSING
    measured: str
    expected: str
    tolerance: str

    def line(self) -> str:
        return (f"[{self.status:<7}] {self.name:<28} measured={self.measured} "
                f"expected={self.expected} tol={self.tolerance}")


def _need(path: Path) -> Path:
    if not path.exists():
        raise MissingFixture(str(path))
    return path


def _close(values, expected, tol):
    return all(abs(v - e) <= tol for v, e in zip(values, expected)) and len(values) == len(expected)


def _fmt(vals):
    return "(" + ", ".join(f"{v:.4f}" for v in vals) + ")"


S1 = list("abcdefg")
T1 = list("zcavwxy")
A_EXPECTED = [0.000, 0.000, 0.667, 0.500, 0.400, 0.333, 0.286]
AO_EXPECTED = [0.000, 0.000, 0.222, 0.292, 0.313, 0.317, 0.312]


def check_agreement_series(_root):
    vals = [agreement_at_depth(S1, T1, d) for d in range(1, 8)]
    return _close(vals, A_EXPECTED, 5e-4), _fmt(vals), _fmt(A_EXPECTED), "0.0005"


def check_average_overlap_series(_root):
    vals = [average_overlap(S1, T1, d) for d in range(1, 8)]
    return _close(vals, AO_EXPECTED, 5e-4), _fmt(vals), _fmt(AO_EXPECTED), "0.0005"


def lod_pair_lists(root: Path):
    counts = read_leaf_counts(_need(root / "lod_pair" / "leaf_counts.jsonl"))
    h = CategoryHierarchy({}, read_top_levels())
    return [histogram_to_ranked_list(rollup_categories(c, h, e)) for e, c in counts.items()]


def _lod_pair(metric, expected, tol):
    def check(root):
        a, b = lod_pair_lists(root)
        v = metric(a, b)
        return abs(v - expected) <= tol, f"{v:.4f}", f"{expected}", f"{tol}"
    return check


def check_getty_extraction(root: Path):
    got = [f.removeprefix(DBR) for f in museum_lists(root)[0].features]
    return got == GETTY_ORDER, f"{got[0]}..{got[-1]} ({len(got)})", \
        f"{GETTY_ORDER[0]}..{GETTY_ORDER[-1]} (9)", "exact order"


def museum_lists(root: Path):
    d = root / "museums"
    template = QueryTemplate.load(_need(d / "art_movements.rq"), "artMovement")
    client = SparqlClient(EndpointConfig(mode="replay", fixture_dir=_need(d / "replay")))
    try:
        return [query_based_extract(client, template, DBR + e)
                for e in ("J._Paul_Getty_Museum", "Louvre")]
    except CacheMissError as exc:
        raise MissingFixture(f"replay entry {exc.digest}") from None


def check_getty_louvre_rbo(root: Path):
    getty, louvre = museum_lists(root)
    v = rbo(getty, louvre, RboParams(0.95))
    return abs(v - 0.404) <= 0.002, f"{v:.4f}", "0.404", "0.002"


def check_getty_top_similar(root: Path):
    m = read_matrix(_need(root / "museums" / "getty_similars.json"))
    top = rank_similars(DBR + "J._Paul_Getty_Museum", m, 1)[0]
    name = top[0].removeprefix(DBR)
    ok = name == "Metropolitan_Museum_of_Art" and abs(top[1] - 0.437) <= 5e-4
    return ok, f"{name} {top[1]:.3f}", "Metropolitan_Museum_of_Art 0.437", "0.0005"


def check_louvre_scs_shape(root: Path):
    g = read_graph(_need(root / "graph" / "louvre_categories.tsv"))
    rl = graph_explore_features(g, "dbr:Louvre", 4,
                                FeatureMarker("dbc:Museums_by_type", "skos:broader"),
                                ScsParams(tau=4, beta=0.5))
    s = rl.scores
    ok = len(s) == 4 and s[0] == s[1] == 0.5 and s[-1] == 0.25 and 0.25 < s[2] < 0.5
    return ok, "(" + ", ".join(f"{x:g}" for x in s) + ")", "(0.5, 0.5, x, 0.25), 0.25<x<0.5", \
        "exact"


def check_stems(_root):
    c = stem_counts(["retrieval", "retrieving", "relevant relevance"])
    ok = c.get("retriev") == 2 and c.get("relev") == 2 and len(c) == 2
    return ok, str(dict(sorted(c.items()))), "{'relev': 2, 'retriev': 2}", "exact"


CHECKS: list[tuple[str, Callable]] = [
    ("overlap.agreement", check_agreement_series),
    ("overlap.average_overlap", check_average_overlap_series),
    ("lod_pair.jaccard", _lod_pair(jaccard, 0.9565, 0.001)),
    ("lod_pair.cosine", _lod_pair(cosine, 0.784, 0.005)),
    ("lod_pair.rbo_p0.98", _lod_pair(lambda a, b: rbo(a, b, RboParams(0.98)), 0.887, 0.02)),
    ("lod_pair.rbo_p0.99", _lod_pair(lambda a, b: rbo(a, b, RboParams(0.99)), 0.940, 0.02)),
    ("museums.getty_extraction", check_getty_extraction),
    ("museums.getty_louvre_rbo", check_getty_louvre_rbo),
    ("museums.getty_top_similar", check_getty_top_similar),
    ("graph.louvre_scs_shape", check_louvre_scs_shape),
    ("stems.retriev_relev", check_stems),
]


def run_checks(root: Path | None = None) -> list[CheckResult]:
    root = Path(root) if root is not None else default_fixture_dir()
    results = []
    for name, fn in CHECKS:
        try:
            ok, measured, expected, tol = fn(root)
            results.append(CheckResult(name, "PASS" if ok else "FAIL", measured, expected, tol))
        except MissingFixture as exc:
            results.append(CheckResult(name, "MISSING", "-", str(exc), "-"))
        except Exception as exc:  # a tampered fixture must fail its check, not the run
            results.append(CheckResult(name, "FAIL", f"{type(exc).__name__}: {exc}", "-", "-"))
    return results


def timed_checks(root=None):
    t0 = time.perf_counter()
    res = run_checks(root)
    return res, time.perf_counter() - t0
