"""Rule-based pair classification over normalized names and descriptions.

Rules are evaluated with a fixed precedence, strictest first:
Replica > Version > Subset > Derived > Variant > None.
"""

from __future__ import annotations

from collections import Counter
from typing import Optional

from .model import (
    NO_RELATION,
    Label,
    NormalizedRecord,
    Relation,
    extract_temporal_tokens,
    extract_version_token,
    has_pattern,
    strip_pattern,
    version_key,
)

MIN_PREFIX_CHARS = 40
MIN_PREFIX_SHARE = 0.5


def is_nontrivial_prefix(a: str, b: str) -> bool:
    """True if the shorter string starts the longer one and is long enough to matter."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    if not long_.startswith(short):
        return False
    return len(short) >= MIN_PREFIX_CHARS and len(short) >= MIN_PREFIX_SHARE * len(long_)


def is_replica(a: NormalizedRecord, b: NormalizedRecord) -> bool:
    if not a.host or not b.host or a.host == b.host:
        return False
    if a.norm_name != b.norm_name:
        return False
    da, db = a.norm_description, b.norm_description
    return da == db or is_nontrivial_prefix(da, db)


def is_version(a: NormalizedRecord, b: NormalizedRecord) -> bool:
    if a.version_token is None and b.version_token is None:
        return False
    if not a.version_residual or a.version_residual != b.version_residual:
        return False
    return version_key(a.version_token) != version_key(b.version_token)


def _pure_version(text: str) -> bool:
    token, residual = extract_version_token(text)
    return token is not None and not residual


def _pure_temporal(text: str) -> Optional[Counter]:
    tokens, residual = extract_temporal_tokens(text)
    if tokens and not residual:
        return Counter(tokens)
    return None


def _temporal_containment(sa: str, sb: str) -> bool:
    ta, tb = _pure_temporal(sa), _pure_temporal(sb)
    if ta is None or tb is None or ta == tb:
        return False
    return all(ta[k] <= tb[k] for k in ta) or all(tb[k] <= ta[k] for k in tb)


def is_variant(a: NormalizedRecord, b: NormalizedRecord) -> bool:
    if (a.temporal_tokens and b.temporal_tokens and a.temporal_residual
            and a.temporal_residual == b.temporal_residual
            and Counter(a.temporal_tokens) != Counter(b.temporal_tokens)):
        return True
    sa, sb = a.name_suffix, b.name_suffix
    if not (a.name_prefix and a.name_prefix == b.name_prefix and sa and sb and sa != sb):
        return False
    if _pure_version(sa) or _pure_version(sb):
        return False
    return not _temporal_containment(sa, sb)


def _subset_of(a: NormalizedRecord, b: NormalizedRecord) -> bool:
    if a.name_suffix and not b.name_suffix and a.name_prefix == b.norm_name:
        return True
    return bool(a.temporal_tokens and not b.temporal_tokens
                and a.temporal_residual and a.temporal_residual == b.norm_name)


def is_subset(a: NormalizedRecord, b: NormalizedRecord) -> int:
    """+1 if a is a subset of b, -1 if b of a, 0 when neither or ambiguous."""
    ab, ba = _subset_of(a, b), _subset_of(b, a)
    if ab == ba:
        return 0
    return 1 if ab else -1


def _derived_from(a: NormalizedRecord, b: NormalizedRecord) -> bool:
    for p in a.derivation_patterns:
        if has_pattern(a.norm_name, p) and not has_pattern(b.norm_name, p):
            stripped = strip_pattern(a.norm_name, p)
            if stripped and stripped == b.norm_name:
                return True
    return False


def is_derived(a: NormalizedRecord, b: NormalizedRecord) -> int:
    """+1 if a is derived from b, -1 if b from a, 0 otherwise."""
    ab, ba = _derived_from(a, b), _derived_from(b, a)
    if ab == ba:
        return 0
    return 1 if ab else -1


def classify_pair_heuristic(a: NormalizedRecord, b: NormalizedRecord) -> Label:
    if is_replica(a, b):
        return Label(Relation.REPLICA)
    if is_version(a, b):
        return Label(Relation.VERSION)
    direction = is_subset(a, b)
    if direction:
        return Label(Relation.SUBSET, direction)
    direction = is_derived(a, b)
    if direction:
        return Label(Relation.DERIVED, direction)
    if is_variant(a, b):
        return Label(Relation.VARIANT)
    return NO_RELATION
