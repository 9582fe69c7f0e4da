"""NDJSON schema.org/Dataset ingestion into an immutable corpus."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from .model import (
    DEFAULT_DERIVATION_PATTERNS,
    DOI_SEARCH,
    DatasetRecord,
    NormalizedRecord,
    canonical_ref,
    host_of,
    is_doi,
    normalize_record,
)

log = logging.getLogger(__name__)

SNAPSHOT_FORMAT = "datarel-corpus"
SNAPSHOT_VERSION = 1


class RecordRejected(ValueError):
    def __init__(self, reason: str, line: Optional[int] = None):
        super().__init__(reason)
        self.reason = reason
        self.line = line


@dataclass(frozen=True)
class Corpus:
    records: Mapping[str, DatasetRecord]
    normalized: Mapping[str, NormalizedRecord]
    manifest: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, rid: str) -> bool:
        return rid in self.records

    def ids(self) -> list[str]:
        return list(self.records)


def _as_list(value) -> list:
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def _ref_strings(value) -> list[str]:
    """Flatten a schema.org reference property into raw strings."""
    out = []
    for item in _as_list(value):
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, dict):
            for key in ("@id", "url", "identifier", "sameAs"):
                if isinstance(item.get(key), str):
                    out.append(item[key])
                    break
    return [s for s in out if s.strip()]


def _text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value.strip()
    if isinstance(value, list):
        return " ".join(_text(v) for v in value).strip()
    if isinstance(value, dict):
        return _text(value.get("@value", ""))
    return str(value).strip()


def _find_doi(values) -> Optional[str]:
    for raw in values:
        ref, ok = canonical_ref(raw)
        if ok and is_doi(ref):
            return ref
        m = DOI_SEARCH.search(raw)
        if m:
            return "doi:" + m.group(0).lower().rstrip(".,;")
    return None


def parse_record(line: str, lineno: Optional[int] = None) -> DatasetRecord:
    """Parse one JSON-LD Dataset object; raise RecordRejected if unusable."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordRejected(f"malformed JSON: {exc.msg}", lineno) from None
    if not isinstance(obj, dict):
        raise RecordRejected("not a JSON object", lineno)

    name = _text(obj.get("name"))
    if not name:
        raise RecordRejected("missing name", lineno)
    description = _text(obj.get("description"))

    page_url = ""
    url = obj.get("url")
    if isinstance(url, list):
        url = next((u for u in url if isinstance(u, str)), None)
    if isinstance(url, str) and url.strip():
        ref, ok = canonical_ref(url)
        if ok and not is_doi(ref):
            page_url = ref

    same_as = tuple(dict.fromkeys(canonical_ref(s)[0] for s in _ref_strings(obj.get("sameAs"))))
    based_on = tuple(dict.fromkeys(
        canonical_ref(s)[0] for s in _ref_strings(obj.get("isBasedOn"))))

    identifier_strings = _ref_strings(obj.get("identifier"))
    for item in _as_list(obj.get("identifier")):
        if isinstance(item, dict) and isinstance(item.get("value"), str):
            identifier_strings.append(item["value"])
    doi = _find_doi(identifier_strings)
    if doi is None and isinstance(obj.get("@id"), str):
        doi = _find_doi([obj["@id"]])
    if doi is None and isinstance(url, str):
        ref, ok = canonical_ref(url)
        if ok and is_doi(ref):
            doi = ref

    raw_id = obj.get("@id")
    if isinstance(raw_id, str) and raw_id.strip():
        rid = raw_id.strip()
    elif page_url:
        rid = page_url
    else:
        digest = hashlib.sha256(f"{name}\x00{description}".encode("utf-8")).hexdigest()
        rid = "sha256:" + digest[:16]

    version = obj.get("version")
    return DatasetRecord(
        id=rid,
        name=name,
        description=description,
        page_url=page_url,
        host=host_of(page_url),
        doi=doi,
        same_as=same_as,
        is_based_on=based_on,
        version_label=None if version is None else _text(version) or None,
        date_published=_text(obj.get("datePublished")) or None,
        date_modified=_text(obj.get("dateModified")) or None,
    )


def build_corpus(records: Iterable[DatasetRecord], manifest: Optional[dict] = None,
                 patterns=DEFAULT_DERIVATION_PATTERNS) -> Corpus:
    """Assemble records (already unique by id and page_url) into a Corpus."""
    ordered = sorted(records, key=lambda r: r.id)
    recs = {r.id: r for r in ordered}
    norm = {r.id: normalize_record(r, patterns) for r in ordered}
    return Corpus(MappingProxyType(recs), MappingProxyType(norm), dict(manifest or {}))


def ingest_corpus(lines: Iterable[str], source: str = "<stream>",
                  patterns=DEFAULT_DERIVATION_PATTERNS) -> Corpus:
    """Parse an NDJSON stream; duplicates by id or page URL keep the first seen."""
    return ingest_sources([(source, lines)], patterns)


def ingest_sources(sources, patterns=DEFAULT_DERIVATION_PATTERNS) -> Corpus:
    accepted: dict[str, DatasetRecord] = {}
    seen_urls: set[str] = set()
    rejected = []
    duplicates = 0
    files = []
    for source, lines in sources:
        n_ok = 0
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                rec = parse_record(line, lineno)
            except RecordRejected as exc:
                rejected.append({"source": source, "line": lineno, "reason": exc.reason})
                continue
            if rec.id in accepted or (rec.page_url and rec.page_url in seen_urls):
                duplicates += 1
                continue
            accepted[rec.id] = rec
            if rec.page_url:
                seen_urls.add(rec.page_url)
            n_ok += 1
        files.append({"source": source, "accepted": n_ok})
    manifest = {
        "sources": files,
        "accepted": len(accepted),
        "rejected": len(rejected),
        "duplicates": duplicates,
        "rejections": rejected,
    }
    if rejected:
        log.info("rejected %d records", len(rejected))
    return build_corpus(accepted.values(), manifest, patterns)


def filter_citable(corpus: Corpus) -> Corpus:
    """Keep records carrying a DOI, back-filling ``doi`` from DOI-form sameAs."""
    kept = []
    for rec in corpus.records.values():
        if rec.doi:
            kept.append(rec)
            continue
        doi = next((s for s in rec.same_as if is_doi(s)), None)
        if doi:
            kept.append(replace(rec, doi=doi))
    manifest = dict(corpus.manifest)
    manifest["citable"] = len(kept)
    patterns = next(iter(corpus.normalized.values())).derivation_patterns if corpus.normalized \
        else DEFAULT_DERIVATION_PATTERNS
    return build_corpus(kept, manifest, patterns)


# --------------------------------------------------------------------------
# Snapshot I/O
# --------------------------------------------------------------------------

def record_to_jsonld(rec: DatasetRecord) -> dict:
    """Render a record back into the schema.org shape parse_record accepts."""
    obj = {"@id": rec.id, "@type": "Dataset", "name": rec.name}
    if rec.description:
        obj["description"] = rec.description
    if rec.page_url:
        obj["url"] = rec.page_url
    if rec.doi:
        obj["identifier"] = rec.doi
    if rec.same_as:
        obj["sameAs"] = list(rec.same_as)
    if rec.is_based_on:
        obj["isBasedOn"] = list(rec.is_based_on)
    if rec.version_label:
        obj["version"] = rec.version_label
    if rec.date_published:
        obj["datePublished"] = rec.date_published
    if rec.date_modified:
        obj["dateModified"] = rec.date_modified
    return obj


def dump_snapshot(corpus: Corpus) -> str:
    payload = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "manifest": corpus.manifest,
        "records": [record_to_jsonld(r) for r in corpus.records.values()],
    }
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def load_corpus(path: str, patterns=DEFAULT_DERIVATION_PATTERNS) -> Corpus:
    """Load a snapshot written by dump_snapshot, or ingest an NDJSON file."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError:
        payload = None
    if isinstance(payload, dict) and payload.get("format") == SNAPSHOT_FORMAT:
        if payload.get("version") != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {payload.get('version')}")
        recs = [parse_record(json.dumps(o)) for o in payload["records"]]
        return build_corpus(recs, payload.get("manifest", {}), patterns)
    return ingest_corpus(text.splitlines(), source=str(path), patterns=patterns)
