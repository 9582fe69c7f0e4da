"""Pair classification with a trained GBDT, plus the labeled-pair split."""

from __future__ import annotations

import warnings
from collections import defaultdict
from typing import Sequence

import numpy as np

from .features import (
    FEATURE_NAMES,
    N_FEATURES,
    featurize_pair,
    feature_order_hash,
)
from .gbdt import GbdtModel, GbdtParams, train_gbdt
from .model import Label, LabeledPair, NormalizedRecord, Relation

_DIRECTION_FEATURES = {
    Relation.SUBSET: ("prefix_eq_suffix_asymmetry", "temporal_asymmetry"),
    Relation.DERIVED: ("derivation_pattern_asymmetry", "prefix_eq_suffix_asymmetry"),
}


def direction_from_features(rel: Relation, x: np.ndarray, fallback: int = 1) -> int:
    """Orientation of a directional label from the signed features of an (a, b) row."""
    if not rel.directional:
        return 0
    for name in _DIRECTION_FEATURES[rel]:
        v = x[FEATURE_NAMES.index(name)]
        if v:
            return 1 if v > 0 else -1
    return fallback


def _length_fallback(a: NormalizedRecord, b: NormalizedRecord) -> int:
    # the longer title is usually the narrower or processed one
    return -1 if len(b.norm_name) > len(a.norm_name) else 1


def predict_features(model: GbdtModel, x: np.ndarray, fallback: int = 1):
    """Return ({class: probability}, Label) for one feature row."""
    x = np.asarray(x, dtype=float)
    if x.shape != (N_FEATURES,):
        raise ValueError(f"feature vector must have length {N_FEATURES}, got {x.shape}")
    probs = model.predict_proba(x[None, :])[0]
    best = int(np.argmax(probs))
    rel = Relation(model.classes[best])
    label = Label(rel, direction_from_features(rel, x, fallback))
    return {c: float(p) for c, p in zip(model.classes, probs)}, label


def predict_pair(model: GbdtModel, a: NormalizedRecord, b: NormalizedRecord):
    """Classify an unordered pair; the label is oriented on the (a, b) presented."""
    swap = a.record_id > b.record_id
    first, second = (b, a) if swap else (a, b)
    x = featurize_pair(first, second)
    probs, label = predict_features(model, x, _length_fallback(first, second))
    return probs, (label.flipped() if swap else label)


def predict_pairs(model: GbdtModel, pairs, normalized) -> list[Label]:
    """Batch version of predict_pair for (a_id, b_id) pairs."""
    if not pairs:
        return []
    rows, swaps, fallbacks = [], [], []
    for a_id, b_id in pairs:
        a, b = normalized[a_id], normalized[b_id]
        swap = a_id > b_id
        first, second = (b, a) if swap else (a, b)
        rows.append(featurize_pair(first, second))
        swaps.append(swap)
        fallbacks.append(_length_fallback(first, second))
    X = np.vstack(rows)
    probs = model.predict_proba(X)
    out = []
    for x, p, swap, fb in zip(X, probs, swaps, fallbacks):
        rel = Relation(model.classes[int(np.argmax(p))])
        label = Label(rel, direction_from_features(rel, x, fb))
        out.append(label.flipped() if swap else label)
    return out


def pair_matrix(pairs: Sequence[LabeledPair], normalized):
    """Canonically oriented feature rows and class labels for labeled pairs."""
    rows, labels = [], []
    for lp in pairs:
        lp = lp.canonical()
        rows.append(featurize_pair(normalized[lp.a_id], normalized[lp.b_id]))
        labels.append(lp.gold.rel.value)
    X = np.vstack(rows) if rows else np.zeros((0, N_FEATURES))
    return X, labels


def train_pair_classifier(train: Sequence[LabeledPair], valid: Sequence[LabeledPair],
                          normalized, params: GbdtParams = GbdtParams(), *,
                          seed: int) -> GbdtModel:
    return train_gbdt(pair_matrix(train, normalized),
                      pair_matrix(valid, normalized) if valid else None,
                      params, seed=seed, feature_names=FEATURE_NAMES,
                      feature_hash=feature_order_hash())


def load_model(text: str) -> GbdtModel:
    """Deserialize a model, refusing one trained on a different feature order."""
    return GbdtModel.from_json(text, expected_hash=feature_order_hash())


# --------------------------------------------------------------------------
# Split
# --------------------------------------------------------------------------

def split_sizes(n: int, valid_frac: float = 0.15, test_frac: float = 0.15):
    n_valid = int(round(n * valid_frac))
    n_test = int(round(n * test_frac))
    return n - n_valid - n_test, n_valid, n_test


def _apportion(counts: dict, total: int) -> dict:
    """Largest-remainder allocation of ``total`` proportional to ``counts``."""
    n = sum(counts.values())
    quotas = {k: total * c / n for k, c in counts.items()}
    alloc = {k: int(np.floor(q)) for k, q in quotas.items()}
    left = total - sum(alloc.values())
    for k in sorted(counts, key=lambda k: (-(quotas[k] - alloc[k]), k))[:left]:
        alloc[k] += 1
    return alloc


def split_labeled(pairs: Sequence[LabeledPair], seed: int,
                  valid_frac: float = 0.15, test_frac: float = 0.15):
    """Seeded 70:15:15 train/valid/test split, stratified by relation type."""
    if len(pairs) < 10:
        raise ValueError(f"need at least 10 labeled pairs, got {len(pairs)}")
    canon = sorted((p.canonical() for p in pairs),
                   key=lambda p: (p.a_id, p.b_id, p.gold.rel.value, p.gold.direction))
    rng = np.random.default_rng(seed)
    n_train, n_valid, n_test = split_sizes(len(canon), valid_frac, test_frac)

    groups: dict[str, list[LabeledPair]] = defaultdict(list)
    for p in canon:
        groups[p.gold.rel.value].append(p)
    if min(len(g) for g in groups.values()) < 3:
        warnings.warn("a class has fewer than 3 pairs; falling back to an unstratified split",
                      stacklevel=2)
        groups = {"all": canon}

    sizes = {k: len(g) for k, g in groups.items()}
    test_alloc = _apportion(sizes, n_test)
    remaining = {k: sizes[k] - test_alloc[k] for k in sizes}
    valid_alloc = _apportion(remaining, n_valid)

    train, valid, test = [], [], []
    for key in sorted(groups):
        members = list(groups[key])
        order = rng.permutation(len(members))
        shuffled = [members[i] for i in order]
        t, v = test_alloc[key], valid_alloc[key]
        test.extend(shuffled[:t])
        valid.extend(shuffled[t:t + v])
        train.extend(shuffled[t + v:])
    return train, valid, test
