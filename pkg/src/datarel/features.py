"""Fixed-length numeric features for an ordered pair of records."""

from __future__ import annotations

import hashlib
import math
from collections import Counter

import numpy as np

from .heuristics import is_nontrivial_prefix
from .model import NormalizedRecord, has_pattern, version_key

FEATURE_NAMES = (
    "name_exact_eq",
    "name_prefix_eq",
    "desc_exact_eq",
    "desc_prefix",
    "name_token_jaccard",
    "desc_token_jaccard",
    "name_trigram_cosine",
    "same_host",
    "both_have_version",
    "version_tokens_differ",
    "residual_name_eq_after_version",
    "temporal_asymmetry",
    "residual_name_eq_after_temporal",
    "prefix_eq_suffix_asymmetry",
    "derivation_pattern_asymmetry",
    "name_len_ratio",
    "shared_doi_prefix",
)
N_FEATURES = len(FEATURE_NAMES)

# features whose sign flips with pair order; all others are symmetric
DIRECTIONAL = ("temporal_asymmetry", "prefix_eq_suffix_asymmetry",
               "derivation_pattern_asymmetry")
DIRECTIONAL_INDEX = tuple(FEATURE_NAMES.index(f) for f in DIRECTIONAL)


def feature_order_hash() -> str:
    return hashlib.sha256("\n".join(FEATURE_NAMES).encode()).hexdigest()[:16]


def _jaccard(a: str, b: str) -> float:
    sa, sb = set(a.split()), set(b.split())
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


def _trigrams(text: str) -> Counter:
    return Counter(text[i:i + 3] for i in range(len(text) - 2))


def _trigram_cosine(a: str, b: str) -> float:
    ca, cb = _trigrams(a), _trigrams(b)
    if not ca or not cb:
        return 1.0 if a == b else 0.0
    dot = sum(v * cb[g] for g, v in ca.items() if g in cb)
    return min(1.0, dot / math.sqrt(sum(v * v for v in ca.values())
                                    * sum(v * v for v in cb.values())))


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


def _doi_prefix(doi) -> str:
    if not doi:
        return ""
    return doi.removeprefix("doi:").split("/", 1)[0]


def _has_any_pattern(rec: NormalizedRecord) -> bool:
    return any(has_pattern(rec.norm_name, p) for p in rec.derivation_patterns)


def featurize_pair(a: NormalizedRecord, b: NormalizedRecord) -> np.ndarray:
    na, nb = a.norm_name, b.norm_name
    da, db = a.norm_description, b.norm_description
    prefix_eq = bool(a.name_prefix) and a.name_prefix == b.name_prefix
    if a.name_prefix and a.name_prefix == b.name_prefix:
        suffix_asym = _sign(bool(a.name_suffix) - bool(b.name_suffix))
    elif a.name_suffix and not b.name_suffix and a.name_prefix == nb:
        suffix_asym = 1
    elif b.name_suffix and not a.name_suffix and b.name_prefix == na:
        suffix_asym = -1
    else:
        suffix_asym = 0
    va, vb = version_key(a.version_token), version_key(b.version_token)
    doi_a, doi_b = _doi_prefix(a.doi), _doi_prefix(b.doi)
    values = (
        float(na == nb),
        float(prefix_eq),
        float(da == db),
        float(da != db and is_nontrivial_prefix(da, db)),
        _jaccard(na, nb),
        _jaccard(da, db),
        _trigram_cosine(na, nb),
        float(bool(a.host) and a.host == b.host),
        float(va is not None and vb is not None),
        float((va is not None or vb is not None) and va != vb),
        float(bool(a.version_residual) and a.version_residual == b.version_residual),
        float(_sign(bool(a.temporal_tokens) - bool(b.temporal_tokens))),
        float(bool(a.temporal_residual) and a.temporal_residual == b.temporal_residual),
        float(suffix_asym),
        float(_sign(_has_any_pattern(a) - _has_any_pattern(b))),
        min(len(na), len(nb)) / max(len(na), len(nb), 1),
        float(bool(doi_a) and doi_a == doi_b),
    )
    return np.array(values, dtype=float)


def featurize_pairs(pairs, normalized) -> np.ndarray:
    """Stack features for (a_id, b_id) pairs looked up in ``normalized``."""
    rows = [featurize_pair(normalized[a], normalized[b]) for a, b in pairs]
    if not rows:
        return np.zeros((0, N_FEATURES))
    return np.vstack(rows)
