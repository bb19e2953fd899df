"""Regenerate the bundled fixtures under src/rankedsim/data/fixtures.

Run from the repository root: ``python tools/build_fixtures.py``. Output is
deterministic (fixed seed, sorted JSON keys).
"""

import csv
import json
import shutil
from pathlib import Path

import numpy as np

from rankedsim.sparql import EndpointConfig, FixtureStore, Response, SparqlClient

ROOT = Path(__file__).resolve().parents[1] / "src" / "rankedsim" / "data" / "fixtures"
DBR = "http://dbpedia.org/resource/"

TOP_LEVELS = [
    line.strip()
    for line in (ROOT.parent / "top_levels.txt").read_text().splitlines()
    if line.strip() and not line.startswith("#")
]

# Frequencies per top-level category for two LOD datasets; None = absent.
LOD_PAIR = {
    "dbc:Agriculture": (133, 1), "dbc:Applied_science": (57, 28), "dbc:Arts": (85, 75),
    "dbc:Belief": (290, 930), "dbc:Business": (687, 468), "dbc:Chronology": (163, 1377),
    "dbc:Culture": (427, 773), "dbc:Education": (508, 1458), "dbc:Environment": (411, 91),
    "dbc:Geography": (240, 14), "dbc:Health": (38, 3), "dbc:History": (20, 33),
    "dbc:Humanities": (460, 861), "dbc:Language": (84, 367), "dbc:Law": (15, 2),
    "dbc:Life": (291, 401), "dbc:Mathematics": (248, 2142), "dbc:Nature": (1650, 893),
    "dbc:People": (1, None), "dbc:Politics": (118, 26), "dbc:Science": (1529, 2391),
    "dbc:Society": (979, 1650), "dbc:Technology": (987, 948),
}

GETTY = ["Symbolism_(arts)", "Baroque", "Expressionism", "Romanticism", "High_Renaissance",
         "Dutch_Golden_Age_painting", "Academic_art", "Post-Impressionism", "Mannerism"]
# Louvre art movements; the reference list is itself partial.
LOUVRE = ["Romanticism", "High_Renaissance", "Neoclassicism", "Baroque", "Italian_Renaissance",
          "Dutch_Golden_Age_painting", "The_Renaissance", "Classicism", "Realism_(arts)",
          "Flemish_Baroque_painting", "Early_Netherlandish_painting", "Caravaggisti"]

GETTY_SIMILARS = [  # similarity to the Getty, RBO p = 0.95
    ("Metropolitan_Museum_of_Art", 0.437), ("Louvre", 0.404),
    ("Kunsthistorisches_Museum", 0.385), ("Museum_of_Fine_Arts_Boston", 0.360),
    ("Vatican_Museums", 0.351), ("Uffizi", 0.261), ("National_Gallery_of_Art", 0.247),
    ("Musée_d'Orsay", 0.161), ("Philadelphia_Museum_of_Art", 0.161),
    ("Museum_of_Modern_Art", 0.117), ("Art_Institute_of_Chicago", 0.103),
]


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


def build_lod_pair():
    d = ROOT / "lod_pair"
    d.mkdir(parents=True, exist_ok=True)
    records = []
    for col, name in enumerate(("eu-agencies-bodies", "rkb-explorer-citeseer")):
        counts = {c: v[col] for c, v in LOD_PAIR.items() if v[col] is not None}
        records.append({"entity": name, "counts": counts})
    write_jsonl(d / "leaf_counts.jsonl", records)


def sparql_json(var, values):
    doc = {
        "head": {"link": [], "vars": [var]},
        "results": {"distinct": False, "ordered": True, "bindings": [
            {var: {"type": "uri", "value": DBR + v}} for v in values
        ]},
    }
    return (json.dumps(doc, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def build_museums():
    d = ROOT / "museums"
    replay = d / "replay"
    if replay.exists():
        shutil.rmtree(replay)
    replay.mkdir(parents=True)
    template = (d / "art_movements.rq").read_text(encoding="utf-8")
    responses = {
        DBR + "J._Paul_Getty_Museum": GETTY,
        DBR + "Louvre": LOUVRE,
        DBR + "Museum_Without_Artworks": [],
    }
    served = {}
    for entity, values in responses.items():
        served[" ".join(template.replace("{{entity}}", entity).split())] = sparql_json(
            "artMovement", values)

    def transport(method, url, body, headers, timeout):
        from urllib.parse import parse_qs, urlsplit

        q = parse_qs(urlsplit(url).query)["query"][0]
        return Response(200, served[" ".join(q.split())])

    client = SparqlClient(EndpointConfig(url="https://dbpedia.org/sparql", mode="record",
                                         fixture_dir=replay), transport=transport)
    for entity in responses:
        client.select(template.replace("{{entity}}", entity))
    (d / "museums.txt").write_text("\n".join(responses) + "\n", encoding="utf-8")

    ents = [DBR + "J._Paul_Getty_Museum"] + [DBR + n for n, _ in GETTY_SIMILARS]
    n = len(ents)
    values = np.eye(n)
    for j, (_, v) in enumerate(GETTY_SIMILARS, 1):
        values[0, j] = values[j, 0] = v
    doc = {"entities": ents, "metric": "rbo(p=0.95)",
           "note": "only the Getty row is known; other off-diagonal cells are 0",
           "values": values.tolist()}
    (d / "getty_similars.json").write_text(json.dumps(doc, indent=1, ensure_ascii=False) + "\n",
                                           encoding="utf-8")


LOUVRE_GRAPH = [
    ("dbr:Louvre", "dct:subject", "dbc:Museums_of_Ancient_Near_East"),
    ("dbr:Louvre", "dct:subject", "dbc:Museums_of_Ancient_Greece"),
    ("dbr:Louvre", "dct:subject", "dbc:World_Heritage_Sites_in_Paris"),
    ("dbc:Museums_of_Ancient_Near_East", "skos:broader", "dbc:History_museums"),
    ("dbc:Museums_of_Ancient_Greece", "skos:broader", "dbc:Civilization_museums"),
    ("dbc:Civilization_museums", "skos:broader", "dbc:History_museums"),
    ("dbc:History_museums", "skos:broader", "dbc:Museums_by_type"),
    ("dbc:World_Heritage_Sites_in_Paris", "skos:broader", "dbc:World_Heritage_Sites_in_France"),
]


def build_graph():
    d = ROOT / "graph"
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "louvre_categories.tsv", "w", encoding="utf-8", newline="") as fh:
        fh.write("# subject\tpredicate\tobject\n")
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerows(LOUVRE_GRAPH)


def build_synthetic(seed=20170812, per_community=10, sigma=0.35, drop=0.08):
    """Three communities whose datasets share the same two dominant categories
    and differ in the order of the remaining ones."""
    rng = np.random.default_rng(seed)
    d = ROOT / "synthetic"
    d.mkdir(parents=True, exist_ok=True)
    head = ["dbc:Science", "dbc:Nature"]
    rest = [t for t in TOP_LEVELS if t not in head]

    edges = []
    leaves = {}
    for t in TOP_LEVELS:
        short = t.split(":", 1)[1]
        leaves[t] = []
        for j in range(2):
            sub = f"cat:{short}_{j}"
            edges.append((sub, t))
            for m in range(2):
                leaf = f"cat:{short}_{j}{m}"
                edges.append((leaf, sub))
                leaves[t].append(leaf)
    # two shared leaves with parents under different roots
    edges.append(("cat:Technology_00", "cat:Science_1"))
    edges.append(("cat:Life_10", "cat:Health_0"))

    names = ["publications", "government", "life-sciences"]
    profiles = {}
    for name in names:
        order = list(rng.permutation(rest))
        mags = {t: 900.0 * 0.82 ** r for r, t in enumerate(order)}
        mags.update({"dbc:Science": 5000.0, "dbc:Nature": 4600.0})
        profiles[name] = mags

    records, truth = [], []
    for name in names:
        for i in range(per_community):
            ent = f"{name}-{i:02d}"
            counts = {}
            for t, mag in profiles[name].items():
                if t not in head and rng.random() < drop:
                    continue
                total = max(1, int(round(mag * rng.lognormal(0.0, sigma))))
                shares = rng.multinomial(total, rng.dirichlet(np.ones(len(leaves[t]))))
                for leaf, c in zip(leaves[t], shares):
                    if c:
                        counts[leaf] = counts.get(leaf, 0) + int(c)
            records.append({"entity": ent, "counts": dict(sorted(counts.items()))})
            truth.append((ent, name))

    order = rng.permutation(len(records))
    write_jsonl(d / "leaf_counts.jsonl", [records[i] for i in order])
    with open(d / "hierarchy.tsv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerows(edges)
    with open(d / "communities.csv", "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["entity", "group"])
        w.writerows(truth)


if __name__ == "__main__":
    build_lod_pair()
    build_museums()
    build_graph()
    build_synthetic()
