"""Config loading and the extract -> matrix -> cluster -> evaluate pipeline."""

from __future__ import annotations

import csv
import json
import logging
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from .clustering import LINKAGES, Partition, agglomerate, cut, write_partition
from .errors import ConfigError, DataError
from .evaluation import adjusted_rand_index, confusion_matrix, rand_index, ranking_ndcg
from .extraction import (
    CategoryHierarchy,
    QueryTemplate,
    filter_min_features,
    histogram_to_ranked_list,
    query_based_extract,
    read_leaf_counts,
    read_top_levels,
    rollup_categories,
    stem_extract,
)
from .graph import FeatureMarker, ScsParams, graph_explore_features, read_graph
from .metrics import Metric, RboParams, rank_similars, similarity_matrix, write_matrix
from .model import (
    GroundTruth,
    RankedFeatureList,
    read_partition_csv,
    read_ranked_lists,
    read_rankings_jsonl,
    to_distance,
    write_ranked_lists,
)
from .sparql import EndpointConfig, SparqlClient

log = logging.getLogger(__name__)

DEFAULT_METRICS = ("jaccard", "cosine", "rbo:0.98", "rbo:0.99")


@dataclass
class PipelineConfig:
    extract: dict[str, Any] = field(default_factory=dict)
    endpoint: dict[str, Any] = field(default_factory=dict)
    metrics: list[str] = field(default_factory=lambda: list(DEFAULT_METRICS))
    linkages: list[str] = field(default_factory=lambda: list(LINKAGES))
    k: int | None = None
    ground_truth: Path | None = None
    rankings: Path | None = None
    ndcg_k: tuple[int, int] = (3, 8)
    out: Path = Path("out")
    workers: int = 1
    base_dir: Path = Path(".")

    def path(self, value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    def parsed_metrics(self, p_override: float | None = None) -> list[Metric]:
        out = []
        for text in self.metrics:
            m = Metric.parse(text)
            if m.name == "rbo" and p_override is not None and ":" not in text:
                m = replace(m, rbo=RboParams(p=p_override))
            out.append(m)
        return out


_KNOWN = {"extract", "endpoint", "metrics", "linkages", "k", "ground_truth", "rankings",
          "ndcg_k", "out", "workers"}


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    cfg = PipelineConfig(base_dir=path.parent.resolve())
    cfg.extract = dict(doc.get("extract") or {})
    cfg.endpoint = dict(doc.get("endpoint") or {})
    if "metrics" in doc:
        cfg.metrics = [str(m) for m in doc["metrics"]]
    if "linkages" in doc:
        cfg.linkages = [str(x) for x in doc["linkages"]]
    cfg.k = doc.get("k")
    if doc.get("ground_truth"):
        cfg.ground_truth = cfg.path(doc["ground_truth"])
    if doc.get("rankings"):
        cfg.rankings = cfg.path(doc["rankings"])
    if "ndcg_k" in doc:
        lo, hi = doc["ndcg_k"]
        cfg.ndcg_k = (int(lo), int(hi))
    if "out" in doc:
        cfg.out = cfg.path(doc["out"])
    cfg.workers = int(doc.get("workers", 1))
    return cfg


def validate(cfg: PipelineConfig) -> None:
    for lk in cfg.linkages:
        if lk not in LINKAGES:
            raise ConfigError(f"unknown linkage {lk!r}")
    try:
        cfg.parsed_metrics()
    except DataError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.k is not None and int(cfg.k) < 1:
        raise ConfigError("k must be >= 1")
    for p in (cfg.ground_truth, cfg.rankings):
        if p is not None and not p.is_file():
            raise ConfigError(f"ground-truth file {p} not found")


def endpoint_config(cfg: PipelineConfig, url=None, replay_dir=None) -> EndpointConfig:
    ep = dict(cfg.endpoint)
    if "fixture_dir" in ep and ep["fixture_dir"] is not None:
        ep["fixture_dir"] = cfg.path(ep["fixture_dir"])
    if replay_dir is not None:
        ep["mode"], ep["fixture_dir"] = "replay", Path(replay_dir)
    if url is not None:
        ep["url"] = url
    return EndpointConfig.from_env(**ep)


def _require_file(cfg, key, section):
    if key not in section:
        raise ConfigError(f"extract.{key} is required")
    p = cfg.path(section[key])
    if not p.exists():
        raise ConfigError(f"extract.{key}: {p} not found")
    return p


def run_extract(cfg: PipelineConfig, endpoint: EndpointConfig | None = None,
                client: SparqlClient | None = None):
    """Returns ``(kept lists, dropped (entity, size) pairs)``."""
    ex = cfg.extract
    kind = ex.get("kind")
    tie = ex.get("tie_break", "lexicographic")
    lists: list[RankedFeatureList]
    if kind == "lists":
        lists = read_ranked_lists(_require_file(cfg, "lists", ex))
    elif kind == "rollup":
        counts = read_leaf_counts(_require_file(cfg, "leaf_counts", ex))
        tops = read_top_levels(cfg.path(ex["top_levels"]) if ex.get("top_levels") else None)
        if ex.get("hierarchy"):
            h = CategoryHierarchy.load(_require_file(cfg, "hierarchy", ex),
                                       cfg.path(ex["top_levels"]) if ex.get("top_levels") else None)
        else:
            h = CategoryHierarchy({}, tops)
        lists = [histogram_to_ranked_list(rollup_categories(c, h, e), tie)
                 for e, c in counts.items()]
    elif kind == "query":
        template = QueryTemplate.load(_require_file(cfg, "template", ex),
                                      ex.get("feature_variable", "feature"),
                                      ex.get("score_variable"))
        entities = _entities(cfg, ex)
        client = client or SparqlClient(endpoint or endpoint_config(cfg))
        lists = []
        for e in entities:
            try:
                lists.append(query_based_extract(client, template, e, tie))
            except DataError as exc:
                raise DataError(f"extraction for {e}: {exc}") from exc
    elif kind == "stem":
        corpus_dir = _require_file(cfg, "corpus_dir", ex)
        stop = None
        if ex.get("stopwords"):
            stop = cfg.path(ex["stopwords"]).read_text(encoding="utf-8").split()
        lists = []
        for f in sorted(corpus_dir.glob("*.txt")):
            docs = f.read_text(encoding="utf-8").splitlines()
            lists.append(stem_extract(docs, stop, entity=f.stem))
    elif kind == "graph":
        g = read_graph(_require_file(cfg, "graph", ex))
        marker = ex.get("marker") or {}
        if "class" not in marker or "predicate" not in marker:
            raise ConfigError("extract.marker needs 'class' and 'predicate'")
        params = ScsParams(tau=int(ex.get("tau", 4)), beta=float(ex.get("beta", 0.5)),
                           edge_filter=ex.get("edge_filter"),
                           direction=ex.get("direction", "forward"))
        fm = FeatureMarker(marker["class"], marker["predicate"])
        lists = [graph_explore_features(g, r, int(ex.get("depth", 4)), fm, params)
                 for r in _entities(cfg, ex)]
    else:
        raise ConfigError(f"extract.kind must be lists, rollup, query, stem or graph; got {kind!r}")

    dropped = []
    if ex.get("min_features"):
        lists, drop = filter_min_features(lists, int(ex["min_features"]))
        dropped = [(rl.entity, size) for rl, size in drop]
        for e, size in dropped:
            log.warning("dropped %s: %d features < %s", e, size, ex["min_features"])
    for rl in lists:
        if not len(rl):
            log.warning("%s has an empty feature list", rl.entity)
    return lists, dropped


def _entities(cfg, ex) -> list[str]:
    if "entities" in ex:
        return [str(e) for e in ex["entities"]]
    if "entities_file" in ex:
        text = _require_file(cfg, "entities_file", ex).read_text(encoding="utf-8")
        return [line.strip() for line in text.splitlines() if line.strip()]
    raise ConfigError("extract.entities or extract.entities_file is required")


def load_ground_truth(cfg: PipelineConfig) -> GroundTruth | None:
    if cfg.ground_truth is None and cfg.rankings is None:
        return None
    part = read_partition_csv(cfg.ground_truth) if cfg.ground_truth else None
    rankings = read_rankings_jsonl(cfg.rankings) if cfg.rankings else None
    return GroundTruth(partition=part, rankings=rankings)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def write_confusion(path: Path, matrix, row_names, col_count):
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["truth\\cluster", *range(col_count), "total"])
        for name, row in zip(row_names, matrix):
            w.writerow([name, *(int(v) for v in row), int(row.sum())])
        w.writerow(["total", *(int(v) for v in matrix.sum(axis=0)), int(matrix.sum())])


def run_pipeline(cfg: PipelineConfig, endpoint: EndpointConfig | None = None,
                 p_override: float | None = None) -> dict:
    """Run every stage; outputs land in ``cfg.out`` only if all stages pass."""
    validate(cfg)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=".rankedsim-", dir=out.parent))
    try:
        report = _pipeline_into(cfg, tmp, endpoint, p_override)
        out.mkdir(parents=True, exist_ok=True)
        for f in sorted(tmp.iterdir()):
            shutil.move(str(f), str(out / f.name))
        return report
    finally:
        shutil.rmtree(tmp, ignore_errors=True)


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (DataError, ConfigError) as exc:
        cls = ConfigError if isinstance(exc, ConfigError) else DataError
        raise cls(f"stage {name!r} failed: {exc}") from exc


def _pipeline_into(cfg, tmp: Path, endpoint, p_override) -> dict:
    lists, dropped = _stage("extract", run_extract, cfg, endpoint)
    write_ranked_lists(tmp / "lists.jsonl", lists)
    metrics = cfg.parsed_metrics(p_override)
    entities = [rl.entity for rl in lists]
    truth = _stage("ground-truth", load_ground_truth, cfg)

    matrices = {}
    for m in metrics:
        sim = _stage("matrix", similarity_matrix, lists, m)
        matrices[m.label] = sim
        write_matrix(tmp / f"matrix_{_slug(m.label)}.csv", sim)

    report: dict[str, Any] = {
        "entities": len(entities),
        "dropped": [{"entity": e, "features": n} for e, n in dropped],
        "metrics": [m.label for m in metrics],
        "linkages": list(cfg.linkages),
    }
    truth_part = None
    if truth is not None and truth.partition is not None:
        gt = Partition.from_groups(truth.partition, truth.groups)
        missing = [e for e in entities if e not in truth.partition]
        if missing:
            raise DataError(f"stage 'evaluate' failed: no ground truth for {missing[:5]}")
        truth_part = Partition(tuple(gt.labels[gt.entities.index(e)] for e in entities),
                               tuple(entities))
    k = cfg.k if cfg.k is not None else (truth_part.k if truth_part is not None else None)
    if k is None:
        raise ConfigError("k is required when no partition ground truth is given")
    report["k"] = int(k)

    cells = [(m.label, lk) for m in metrics for lk in cfg.linkages]

    def run_cell(cell):
        label, lk = cell
        tree = agglomerate(to_distance(matrices[label]), lk)
        return cut(tree, int(k), entities)

    with ThreadPoolExecutor(max(1, cfg.workers)) as pool:
        partitions = list(pool.map(lambda c: _stage("cluster", run_cell, c), cells))

    records = []
    if truth_part is None:
        report["evaluation"] = "skipped: no partition ground truth"
        log.warning("no partition ground truth; ARI grid not evaluated")
    else:
        for (label, lk), part in zip(cells, partitions):
            records.append({"metric": label, "linkage": lk, "k": int(k),
                            "ari": round(adjusted_rand_index(truth_part, part), 12),
                            "rand_index": round(rand_index(truth_part, part), 12)})
        report["grid"] = records
        with (tmp / "ari_grid.csv").open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", *cfg.linkages])
            for m in metrics:
                w.writerow([m.label, *(_fmt(r["ari"]) for r in records if r["metric"] == m.label)])
        best_i = max(range(len(records)), key=lambda i: (records[i]["ari"], -i))
        best = records[best_i]
        report["best"] = {"metric": best["metric"], "linkage": best["linkage"], "ari": best["ari"],
                          "tied": [[r["metric"], r["linkage"]] for r in records
                                   if r["ari"] == best["ari"]]}
        conf = confusion_matrix(truth_part, partitions[best_i])
        groups = [g for g in truth.groups]
        write_confusion(tmp / "confusion.csv", conf, groups[: conf.shape[0]], conf.shape[1])
        write_partition(tmp / "best_partition.csv", partitions[best_i])

    if truth is not None and truth.rankings:
        lo, hi = cfg.ndcg_k
        rows = []
        for m in metrics:
            sim = matrices[m.label]
            for kk in range(lo, hi + 1):
                vals = []
                for ent, ref in truth.rankings.items():
                    if ent not in entities:
                        continue
                    predicted = [e for e, _ in rank_similars(ent, sim, len(entities) - 1)]
                    vals.append(ranking_ndcg(predicted, ref, kk))
                if vals:
                    rows.append((m.label, kk, sum(vals) / len(vals)))
        with (tmp / "ndcg.csv").open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["metric", "k", "ndcg"])
            w.writerows((lab, kk, _fmt(v)) for lab, kk, v in rows)
        report["ndcg"] = [{"metric": lab, "k": kk, "value": round(v, 12)} for lab, kk, v in rows]

    (tmp / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n",
                                     encoding="utf-8")
    return report


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() or c in ".-" else "_" for c in label).strip("_")
