"""``rankedsim`` command line: extract, compare, matrix, cluster, evaluate, pipeline, reproduce."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import __version__
from .clustering import LINKAGES, Partition, agglomerate, cut, write_dendrogram, write_partition
from .errors import CacheMissError, ConfigError, DataError, ResultsParseError, TransportError
from .evaluation import adjusted_rand_index, confusion_matrix, rand_index, ranking_ndcg
from .metrics import Metric, rank_similars, read_matrix, similarity_matrix, write_matrix
from .model import (
    dump_ranked_list,
    read_partition_csv,
    read_ranked_lists,
    read_rankings_jsonl,
    to_distance,
    write_ranked_lists,
)
from .pipeline import (
    DEFAULT_METRICS,
    PipelineConfig,
    endpoint_config,
    load_config,
    run_extract,
    run_pipeline,
    validate,
)

log = logging.getLogger("rankedsim")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRANSPORT = 4
EXIT_ACCEPTANCE = 5
EXIT_MISSING_FIXTURE = 6


def _metrics(args, cfg: PipelineConfig | None) -> list[Metric]:
    texts = args.metric or (cfg.metrics if cfg is not None else list(DEFAULT_METRICS))
    cfg2 = PipelineConfig(metrics=list(texts))
    try:
        return cfg2.parsed_metrics(args.p)
    except DataError as exc:
        raise ConfigError(str(exc)) from None


def _config(args) -> PipelineConfig | None:
    return load_config(args.config) if getattr(args, "config", None) else None


def _lists(args, cfg):
    if getattr(args, "lists", None):
        return read_ranked_lists(args.lists)
    if cfg is not None and cfg.extract:
        lists, _ = run_extract(cfg, endpoint_config(cfg, args.endpoint, args.replay_dir))
        return lists
    raise ConfigError("give --lists or a --config with an extract section")


# -- subcommands ---------------------------------------------------------------


def cmd_extract(args) -> int:
    cfg = _config(args)
    if cfg is None:
        raise ConfigError("extract needs --config")
    if not cfg.extract:
        raise ConfigError("config has no extract section")
    lists, dropped = run_extract(cfg, endpoint_config(cfg, args.endpoint, args.replay_dir))
    if not lists:
        log.warning("no entities extracted; writing empty output")
    out = args.out if args.out is not None else "-"
    if out == "-":
        for rl in lists:
            sys.stdout.write(dump_ranked_list(rl) + "\n")
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        write_ranked_lists(out, lists)
    for e, size in dropped:
        print(f"dropped\t{e}\t{size}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _config(args)
    metrics = _metrics(args, cfg)
    by_id = {rl.entity: rl for rl in _lists(args, cfg)}
    for e in (args.entity_a, args.entity_b):
        if e not in by_id:
            raise DataError(f"unknown entity {e!r}")
    a, b = by_id[args.entity_a], by_id[args.entity_b]
    for m in metrics:
        print(f"{m.label}\t{m(a, b):.6f}")
    return EXIT_OK


def cmd_matrix(args) -> int:
    cfg = _config(args)
    metrics = _metrics(args, cfg)
    if len(metrics) != 1:
        raise ConfigError("matrix takes exactly one --metric")
    m = similarity_matrix(_lists(args, cfg), metrics[0],
                          workers=cfg.workers if cfg is not None else 1)
    if args.nearest:
        k = args.k if args.k is not None else len(m) - 1
        for e, s in rank_similars(args.nearest, m, k):
            print(f"{e}\t{s:.6f}")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_matrix(args.out, m)
    elif not args.nearest:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["entity", *m.entities])
        for e, row in zip(m.entities, m.values):
            w.writerow([e, *(f"{v:.9f}" for v in row)])
    return EXIT_OK


def cmd_cluster(args) -> int:
    if args.k is None:
        raise ConfigError("cluster needs --k")
    linkage = args.linkage or "average"
    m = read_matrix(args.matrix)
    tree = agglomerate(to_distance(m), linkage)
    part = cut(tree, args.k, m.entities)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_partition(out / "partition.csv", part)
        write_dendrogram(out / "dendrogram.json", tree, m.entities)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["entity", "cluster"])
        w.writerows(zip(part.entities, part.labels))
    return EXIT_OK


def _partition_file(path) -> Partition:
    return Partition.from_groups(read_partition_csv(path))


def cmd_evaluate(args) -> int:
    did = False
    if args.partition and args.truth:
        truth_map = read_partition_csv(args.truth)
        truth = Partition.from_groups(truth_map)
        pred = _partition_file(args.partition)
        print(f"ari\t{adjusted_rand_index(truth, pred):.6f}")
        print(f"rand_index\t{rand_index(truth, pred):.6f}")
        conf = confusion_matrix(truth, pred)
        groups = list(dict.fromkeys(truth_map.values()))
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["truth\\cluster", *range(conf.shape[1])])
        for g, row in zip(groups, conf):
            w.writerow([g, *(int(v) for v in row)])
        did = True
    if args.matrix and args.rankings:
        m = read_matrix(args.matrix)
        k = args.k if args.k is not None else 8
        for ent, ref in sorted(read_rankings_jsonl(args.rankings).items()):
            if ent not in m.entities:
                raise DataError(f"ranking target {ent!r} is not in the matrix")
            predicted = [e for e, _ in rank_similars(ent, m, len(m) - 1)]
            print(f"ndcg@{k}\t{ent}\t{ranking_ndcg(predicted, ref, k):.6f}")
        did = True
    if not did:
        raise ConfigError("evaluate needs --partition with --truth, or --matrix with --rankings")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _config(args)
    if cfg is None:
        raise ConfigError("pipeline needs --config")
    if args.metric:
        cfg.metrics = list(args.metric)
    if args.linkage:
        cfg.linkages = [args.linkage]
    if args.k is not None:
        cfg.k = args.k
    if args.out:
        cfg.out = Path(args.out)
    validate(cfg)
    report = run_pipeline(cfg, endpoint_config(cfg, args.endpoint, args.replay_dir), args.p)
    if "best" in report:
        b = report["best"]
        print(f"best\t{b['metric']}\t{b['linkage']}\tari={b['ari']:.6f}")
    else:
        print(report.get("evaluation", "evaluation skipped"))
    print(f"wrote {cfg.out}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    from .reproduce import run_checks

    results = run_checks(args.fixtures)
    for r in results:
        print(r.line())
    failed = [r for r in results if r.status == "FAIL"]
    missing = [r for r in results if r.status == "MISSING"]
    print(f"{len(results) - len(failed) - len(missing)}/{len(results)} checks passed")
    if failed:
        return EXIT_ACCEPTANCE
    if missing:
        return EXIT_MISSING_FIXTURE
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rankedsim", description=__doc__)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, lists=True, metric=True, endpoint=True):
        p.add_argument("--config", help="YAML pipeline config")
        p.add_argument("--out", help="output file or directory")
        if lists:
            p.add_argument("--lists", help="ranked lists (JSONL or TSV)")
        if metric:
            p.add_argument("--metric", action="append",
                           help="rbo[:p], ao:k, jaccard or cosine; repeatable")
            p.add_argument("--p", type=float, help="RBO persistence for metrics without one")
        if endpoint:
            p.add_argument("--endpoint", help="SPARQL endpoint URL (or RANKEDSIM_ENDPOINT)")
            p.add_argument("--replay-dir", help="serve queries from recorded fixtures")

    p = sub.add_parser("extract", help="build ranked feature lists")
    common(p, lists=False, metric=False)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("compare", help="score two entities under each metric")
    common(p)
    p.add_argument("entity_a")
    p.add_argument("entity_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("matrix", help="pairwise similarity matrix")
    common(p)
    p.add_argument("--nearest", metavar="ENTITY", help="print the k most similar entities")
    p.add_argument("--k", type=int, help="how many neighbours for --nearest")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("cluster", help="agglomerate a similarity matrix and cut it")
    p.add_argument("--matrix", required=True)
    p.add_argument("--linkage", choices=LINKAGES)
    p.add_argument("--k", type=int)
    p.add_argument("--out", help="directory for partition.csv and dendrogram.json")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("evaluate", help="ARI/Rand of a partition, NDCG of rankings")
    p.add_argument("--partition")
    p.add_argument("--truth")
    p.add_argument("--matrix")
    p.add_argument("--rankings")
    p.add_argument("--k", type=int, help="NDCG cutoff (default 8)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="extract, matrix, cluster and evaluate")
    common(p, lists=False)
    p.add_argument("--k", type=int)
    p.add_argument("--linkage", choices=LINKAGES)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("reproduce", help="check bundled fixtures against reference values")
    p.add_argument("--fixtures", help="fixture directory (default: bundled)")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TransportError, ResultsParseError, CacheMissError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
