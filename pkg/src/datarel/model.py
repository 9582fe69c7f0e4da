"""Core record types and deterministic text normalization."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Optional
from urllib.parse import urlsplit, urlunsplit


class Relation(str, Enum):
    REPLICA = "replica"
    VERSION = "version"
    SUBSET = "subset"
    DERIVED = "derived"
    VARIANT = "variant"
    NONE = "none"

    @property
    def directional(self) -> bool:
        return self in (Relation.SUBSET, Relation.DERIVED)

    @property
    def title(self) -> str:
        return self.value.capitalize()


RELATIONS = tuple(Relation)


class Label(NamedTuple):
    """A relationship type plus orientation relative to an (a, b) pair.

    ``direction`` is +1 when ``a`` is the child/derived side (a -> b), -1 when
    ``b`` is, and 0 for bidirectional types and ``NONE``.
    """

    rel: Relation
    direction: int = 0

    def flipped(self) -> "Label":
        return Label(self.rel, -self.direction)

    @classmethod
    def of(cls, rel: Relation, direction: int = 0) -> "Label":
        return cls(rel, direction if rel.directional else 0)


NO_RELATION = Label(Relation.NONE, 0)


class Method(str, Enum):
    MARKUP = "markup"
    HEURISTIC = "heuristic"
    GBDT = "gbdt"


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    name: str
    description: str = ""
    page_url: str = ""
    host: str = ""
    doi: Optional[str] = None
    same_as: tuple[str, ...] = ()
    is_based_on: tuple[str, ...] = ()
    version_label: Optional[str] = None
    date_published: Optional[str] = None
    date_modified: Optional[str] = None

    def identifiers(self) -> set[str]:
        """Canonical strings other records may use to point at this one."""
        out = set()
        if self.page_url:
            out.add(self.page_url)
        if self.doi:
            out.add(self.doi)
        return out


class TemporalToken(NamedTuple):
    kind: str  # year | month | day | month-name
    value: str


@dataclass(frozen=True)
class NormalizedRecord:
    record_id: str
    norm_name: str
    norm_description: str
    host: str = ""
    doi: Optional[str] = None
    version_token: Optional[str] = None
    version_residual: str = ""
    temporal_tokens: tuple[TemporalToken, ...] = ()
    temporal_residual: str = ""
    name_prefix: str = ""
    name_suffix: str = ""
    stripped_name: str = ""
    derivation_patterns: tuple[str, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class RelationshipEdge:
    src_id: str
    dst_id: str
    rel: Relation
    method: Method
    confidence: float = 1.0

    def __post_init__(self):
        if self.src_id == self.dst_id:
            raise ValueError(f"self-edge on {self.src_id!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence out of range: {self.confidence}")

    @property
    def pair(self) -> tuple[str, str]:
        return canonical_pair(self.src_id, self.dst_id)

    @classmethod
    def from_label(cls, a: str, b: str, label: Label, method: Method,
                   confidence: float = 1.0) -> "RelationshipEdge":
        """Build an edge in storage order from a label oriented on (a, b)."""
        if label.rel is Relation.NONE:
            raise ValueError("no edge for Relation.NONE")
        if label.rel.directional:
            src, dst = (a, b) if label.direction >= 0 else (b, a)
        else:
            src, dst = canonical_pair(a, b)
        return cls(src, dst, label.rel, method, float(confidence))

    def label_for(self, a: str, b: str) -> Label:
        """Orientation of this edge relative to the pair (a, b)."""
        if not self.rel.directional:
            return Label(self.rel, 0)
        return Label(self.rel, 1 if self.src_id == a else -1)


@dataclass(frozen=True)
class LabeledPair:
    a_id: str
    b_id: str
    gold: Label

    def canonical(self) -> "LabeledPair":
        if self.a_id <= self.b_id:
            return self
        return LabeledPair(self.b_id, self.a_id, self.gold.flipped())


def canonical_pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


# --------------------------------------------------------------------------
# Text normalization
# --------------------------------------------------------------------------

_WS = re.compile(r"\s+")


def _fold(raw: str) -> str:
    return unicodedata.normalize("NFKC", unicodedata.normalize("NFKC", raw).lower())


def normalize_text(raw: str) -> str:
    """Lowercase, keep letters and digits, collapse everything else to single spaces."""
    if not raw:
        return ""
    folded = _fold(raw)
    chars = [ch if ch.isalnum() else " " for ch in folded]
    out = _WS.sub(" ", "".join(chars)).strip()
    # lower()/NFKC can interact on a handful of code points; settle to a fixpoint
    while True:
        again = _WS.sub(" ", "".join(c if c.isalnum() else " " for c in _fold(out))).strip()
        if again == out:
            return out
        out = again


def _normalize_keep_dots(raw: str) -> str:
    """normalize_text, but dots between digits survive (``2.1`` stays ``2.1``)."""
    folded = _fold(raw)
    chars = []
    for i, ch in enumerate(folded):
        if ch.isalnum():
            chars.append(ch)
        elif (ch == "." and 0 < i < len(folded) - 1
              and folded[i - 1].isdigit() and folded[i + 1].isdigit()):
            chars.append(ch)
        else:
            chars.append(" ")
    return _WS.sub(" ", "".join(chars)).strip()


# --------------------------------------------------------------------------
# URL / DOI canonicalization
# --------------------------------------------------------------------------

_DOI_BARE = re.compile(r"^(10\.\d{4,9}/\S+)$", re.I)
_DOI_MARKED = re.compile(
    r"^(?:doi:\s*|(?:https?://)?(?:dx\.)?doi\.org/)(10\.[^/\s]+/\S+)$", re.I)
DOI_SEARCH = re.compile(r"10\.\d{4,9}/\S+", re.I)


def canonical_ref(raw: str) -> tuple[str, bool]:
    """Canonicalize a URL or DOI; the flag is False for unparseable input."""
    s = raw.strip()
    m = _DOI_MARKED.match(s) or _DOI_BARE.match(s)
    if m:
        return "doi:" + m.group(1).lower(), True
    parts = urlsplit(s)
    scheme = parts.scheme.lower()
    if not parts.netloc or not scheme or " " in s:
        return s.lower(), False
    if scheme == "http":
        scheme = "https"
    path = parts.path.rstrip("/")
    return urlunsplit((scheme, parts.netloc.lower(), path, parts.query, "")), True


def canonicalize_url(raw: str) -> str:
    return canonical_ref(raw)[0]


def is_doi(ref: str) -> bool:
    return ref.startswith("doi:")


def host_of(page_url: str) -> str:
    """Site key for a landing page: lowercased hostname without a ``www.`` label."""
    if not page_url:
        return ""
    host = (urlsplit(page_url).hostname or "").lower()
    if host.startswith("www."):
        host = host[4:]
    return host


# --------------------------------------------------------------------------
# Name token extraction
# --------------------------------------------------------------------------

_VERSION = re.compile(r"(?<![0-9a-z])(?:version|ver|v)\s?(\d+(?:\.\d+)*)(?![0-9a-z])")


def extract_version_token(name: str) -> tuple[Optional[str], str]:
    """Return (rightmost version number, name with version tokens removed).

    Accepts a normalized name; dotted numbers such as ``2.1`` are honoured
    when present.  The residual is stripped until no version token remains.
    """
    matches = list(_VERSION.finditer(name))
    if not matches:
        return None, name
    token = matches[-1].group(1)
    residual = name
    while True:
        stripped = _VERSION.sub(" ", residual)
        if stripped == residual:
            break
        residual = stripped
    return token, normalize_text(residual)


def version_key(token: Optional[str]) -> Optional[tuple[int, ...]]:
    """Numeric identity of a version token; ``2`` and ``2.0`` compare equal."""
    if token is None:
        return None
    parts = [int(p) for p in token.split(".")]
    while len(parts) > 1 and parts[-1] == 0:
        parts.pop()
    return tuple(parts)


MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11,
    "december": 12,
}
_MONTH_ALIASES = {name: name for name in MONTHS}
_MONTH_ALIASES.update({name[:3]: name for name in MONTHS})

YEAR_MIN, YEAR_MAX = 1800, 2100


def _as_year(tok: str) -> Optional[int]:
    if len(tok) == 4 and tok.isdigit():
        y = int(tok)
        if YEAR_MIN <= y <= YEAR_MAX:
            return y
    return None


def _in_range(tok: str, lo: int, hi: int) -> Optional[int]:
    if 1 <= len(tok) <= 2 and tok.isdigit() and lo <= int(tok) <= hi:
        return int(tok)
    return None


def extract_temporal_tokens(norm_name: str) -> tuple[list[TemporalToken], str]:
    """Pull years, numeric year-month(-day) dates and month names out of a name."""
    words = norm_name.split()
    tokens: list[TemporalToken] = []
    rest: list[str] = []
    i = 0
    while i < len(words):
        w = words[i]
        year = _as_year(w)
        if year is not None:
            tokens.append(TemporalToken("year", str(year)))
            i += 1
            month = _in_range(words[i], 1, 12) if i < len(words) else None
            if month is not None:
                tokens.append(TemporalToken("month", str(month)))
                i += 1
                day = _in_range(words[i], 1, 31) if i < len(words) else None
                if day is not None:
                    tokens.append(TemporalToken("day", str(day)))
                    i += 1
            continue
        if w in _MONTH_ALIASES:
            tokens.append(TemporalToken("month-name", _MONTH_ALIASES[w]))
        else:
            rest.append(w)
        i += 1
    if not tokens:
        return [], norm_name
    return tokens, " ".join(rest)


DELIMITERS = (" - ", " – ", ": ", " | ", ", ")


def split_prefix_suffix(raw_name: str) -> tuple[str, str]:
    """Split a raw title at its last delimiter into normalized (prefix, suffix)."""
    best, width = -1, 0
    for d in DELIMITERS:
        pos = raw_name.rfind(d)
        if pos > best:
            best, width = pos, len(d)
    if best < 0:
        return normalize_text(raw_name), ""
    prefix = normalize_text(raw_name[:best])
    suffix = normalize_text(raw_name[best + width:])
    if not suffix:
        return normalize_text(raw_name), ""
    return prefix, suffix


# --------------------------------------------------------------------------
# Derivation patterns
# --------------------------------------------------------------------------

DEFAULT_DERIVATION_PATTERNS = (
    "analysis of", "summary of", "statistics for", "aggregated", "derived from",
)


def load_patterns(path) -> tuple[str, ...]:
    """Read a pattern file: one phrase per line, ``#`` starts a comment."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            phrase = normalize_text(line.split("#", 1)[0])
            if phrase and phrase not in out:
                out.append(phrase)
    return tuple(out)


def has_pattern(norm_name: str, pattern: str) -> bool:
    return f" {pattern} " in f" {norm_name} "


def strip_pattern(norm_name: str, pattern: str) -> str:
    padded = f" {norm_name} "
    while f" {pattern} " in padded:
        padded = padded.replace(f" {pattern} ", " ")
    return normalize_text(padded)


def strip_patterns(norm_name: str, patterns) -> str:
    out = norm_name
    for p in patterns:
        out = strip_pattern(out, p)
    return out


def normalize_record(record: DatasetRecord,
                     patterns=DEFAULT_DERIVATION_PATTERNS) -> NormalizedRecord:
    norm_name = normalize_text(record.name)
    version_token, version_residual = extract_version_token(
        _normalize_keep_dots(record.name))
    temporal, temporal_residual = extract_temporal_tokens(norm_name)
    prefix, suffix = split_prefix_suffix(record.name)
    patterns = tuple(normalize_text(p) for p in patterns)
    return NormalizedRecord(
        record_id=record.id,
        norm_name=norm_name,
        norm_description=normalize_text(record.description),
        host=record.host,
        doi=record.doi,
        version_token=version_token,
        version_residual=normalize_text(version_residual),
        temporal_tokens=tuple(temporal),
        temporal_residual=temporal_residual,
        name_prefix=prefix,
        name_suffix=suffix,
        stripped_name=strip_patterns(norm_name, patterns),
        derivation_patterns=patterns,
    )
