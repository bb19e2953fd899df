"""Minimal SPARQL 1.1 Protocol client for SELECT queries, with record/replay.

A fixture directory holds one ``<digest>.json`` file with the raw response
bytes per recorded query, plus ``manifest.json`` mapping each digest to the
query text it was recorded for.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

from .errors import CacheMissError, ConfigError, ResultsParseError, TransportError

log = logging.getLogger(__name__)

RESULTS_JSON = "application/sparql-results+json"
GET_LIMIT = 2000
ENDPOINT_ENV = "RANKEDSIM_ENDPOINT"
DEFAULT_ENDPOINT = "https://dbpedia.org/sparql"


class Term(NamedTuple):
    type: str  # "uri" | "literal" | "bnode"
    value: str
    datatype: str | None = None
    lang: str | None = None


@dataclass(frozen=True)
class BindingsTable:
    variables: tuple[str, ...]
    rows: tuple[dict[str, Term], ...]

    def column(self, var: str) -> list[str | None]:
        return [r[var].value if var in r else None for r in self.rows]

    def __len__(self):
        return len(self.rows)


class Response(NamedTuple):
    status: int
    body: bytes


# (method, url, body or None, headers, timeout) -> Response
Transport = Callable[[str, str, "bytes | None", dict, float], Response]


def urllib_transport(method, url, body, headers, timeout):
    req = urllib.request.Request(url, data=body, headers=headers, method=method)
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            return Response(resp.status, resp.read())
    except urllib.error.HTTPError as exc:
        return Response(exc.code, exc.read() or b"")


@dataclass(frozen=True)
class EndpointConfig:
    url: str = DEFAULT_ENDPOINT
    timeout: float = 30.0
    max_retries: int = 3
    backoff: float = 0.5
    mode: str = "live"  # live | record | replay
    fixture_dir: Path | None = None

    def __post_init__(self):
        if not self.timeout > 0:
            raise ConfigError("timeout must be positive")
        if self.max_retries < 0 or self.backoff < 0:
            raise ConfigError("max_retries and backoff must be non-negative")
        if self.mode not in ("live", "record", "replay"):
            raise ConfigError(f"unknown endpoint mode {self.mode!r}")
        if self.mode != "live" and self.fixture_dir is None:
            raise ConfigError(f"{self.mode} mode needs a fixture directory")
        if self.fixture_dir is not None:
            object.__setattr__(self, "fixture_dir", Path(self.fixture_dir))

    @classmethod
    def from_env(cls, **overrides) -> EndpointConfig:
        url = overrides.pop("url", None) or os.environ.get(ENDPOINT_ENV) or DEFAULT_ENDPOINT
        return cls(url=url, **overrides)


def normalize_query_digest(query: str) -> str:
    canonical = " ".join(query.split())
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:32]


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def parse_results(body: bytes) -> BindingsTable:
    """Parse an ``application/sparql-results+json`` document, keeping row order."""
    try:
        text = body.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ResultsParseError("results are not UTF-8", exc.start) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ResultsParseError(f"malformed results JSON: {exc.msg}",
                                _byte_offset(text, exc.pos)) from None
    try:
        variables = tuple(doc["head"]["vars"])
        raw_rows = doc["results"]["bindings"]
    except (KeyError, TypeError):
        raise ResultsParseError("results document lacks head.vars or results.bindings") from None
    rows = []
    known = set(variables)
    for i, raw in enumerate(raw_rows):
        if not isinstance(raw, dict) or not set(raw) <= known:
            raise ResultsParseError(f"row {i} binds variables outside head.vars")
        row = {}
        for var, term in raw.items():
            try:
                row[var] = Term(term["type"], term["value"], term.get("datatype"),
                                term.get("xml:lang"))
            except (KeyError, TypeError):
                raise ResultsParseError(f"row {i}, variable {var!r}: malformed term") from None
        rows.append(row)
    return BindingsTable(variables, tuple(rows))


class FixtureStore:
    """Digest-keyed raw responses. Writes are serialized by a lock."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def path_for(self, digest: str) -> Path:
        return self.root / f"{digest}.json"

    def load(self, query: str) -> bytes:
        digest = normalize_query_digest(query)
        path = self.path_for(digest)
        if not path.is_file():
            raise CacheMissError(digest, query)
        return path.read_bytes()

    def save(self, query: str, body: bytes) -> None:
        digest = normalize_query_digest(query)
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            self.path_for(digest).write_bytes(body)
            manifest_path = self.root / "manifest.json"
            manifest = {}
            if manifest_path.is_file():
                manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            manifest[digest] = " ".join(query.split())
            manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True,
                                                ensure_ascii=False) + "\n", encoding="utf-8")


@dataclass
class SparqlClient:
    """Shareable handle; each :meth:`select` call is independent."""

    config: EndpointConfig = field(default_factory=EndpointConfig)
    transport: Transport = urllib_transport
    sleep: Callable[[float], None] = time.sleep

    def __post_init__(self):
        self.store = FixtureStore(self.config.fixture_dir) if self.config.fixture_dir else None
        if self.config.mode == "replay" and not self.config.fixture_dir.is_dir():
            raise ConfigError(f"replay directory {self.config.fixture_dir} does not exist")

    def select(self, query: str) -> BindingsTable:
        return execute_select(self.config, query, self.transport, self.sleep, self.store)

    def fetch(self, query: str) -> bytes:
        return _fetch(self.config, query, self.transport, self.sleep)


def _request(cfg: EndpointConfig, query: str):
    headers = {"Accept": RESULTS_JSON, "User-Agent": "rankedsim/0.1"}
    encoded = urllib.parse.urlencode({"query": query})
    if len(query.encode("utf-8")) > GET_LIMIT:
        headers["Content-Type"] = "application/x-www-form-urlencoded"
        return "POST", cfg.url, encoded.encode("ascii"), headers
    sep = "&" if "?" in cfg.url else "?"
    return "GET", f"{cfg.url}{sep}{encoded}", None, headers


def _fetch(cfg, query, transport, sleep) -> bytes:
    method, url, body, headers = _request(cfg, query)
    attempts = 0
    last = "no attempt made"
    status = None
    while True:
        attempts += 1
        try:
            resp = transport(method, url, body, headers, cfg.timeout)
            status = resp.status
            if 200 <= resp.status < 300:
                return resp.body
            last = f"HTTP {resp.status}"
        except (OSError, urllib.error.URLError) as exc:
            last = f"{type(exc).__name__}: {exc}"
            status = None
        if attempts > cfg.max_retries:
            raise TransportError(f"{cfg.url}: {last} after {attempts} attempts",
                                 attempts=attempts, status=status, query=query)
        delay = cfg.backoff * 2 ** (attempts - 1)
        log.warning("SPARQL request failed (%s); retry %d in %.2fs", last, attempts, delay)
        sleep(delay)


def execute_select(cfg: EndpointConfig, query: str, transport: Transport = urllib_transport,
                   sleep=time.sleep, store: FixtureStore | None = None) -> BindingsTable:
    if not query.strip():
        raise ConfigError("empty SPARQL query")
    if not re.search(r"\bselect\b", query, re.IGNORECASE):
        raise ConfigError("only SELECT queries are supported")
    if cfg.mode != "live" and store is None:
        store = FixtureStore(cfg.fixture_dir)
    if cfg.mode == "replay":
        return parse_results(store.load(query))
    body = _fetch(cfg, query, transport, sleep)
    table = parse_results(body)
    if cfg.mode == "record":
        store.save(query, body)
    return table
