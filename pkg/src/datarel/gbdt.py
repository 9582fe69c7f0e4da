"""Multiclass gradient-boosted regression trees with a softmax cross-entropy loss.

Each round fits one least-squares regression tree per class to the negative
gradient ``y_k - p_k`` on a row subsample, sets each leaf to a single Newton
step ``sum(residual) / sum(p_k (1 - p_k))`` clamped to ``[-leaf_clamp,
leaf_clamp]``, and adds the trees to the class scores scaled by the shrinkage.
Split search is exhaustive over midpoints between distinct feature values.
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

log = logging.getLogger(__name__)

MODEL_FORMAT = "datarel-gbdt"
MODEL_VERSION = 1


@dataclass(frozen=True)
class GbdtParams:
    max_depth: int = 4
    shrinkage: float = 0.0887
    max_rounds: int = 300
    early_stopping_rounds: int = 20
    subsample: float = 0.8
    min_samples_leaf: int = 1
    leaf_clamp: float = 4.0
    # halvings tried before a round that would raise training loss is dropped
    max_step_halvings: int = 30


# --------------------------------------------------------------------------
# Loss
# --------------------------------------------------------------------------

def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(scores: np.ndarray, y: np.ndarray) -> float:
    """Mean softmax cross-entropy; ``y`` holds integer class indices."""
    z = scores - scores.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(z).sum(axis=1))
    return float(np.mean(logsum - z[np.arange(len(y)), y]))


def cross_entropy_grad(scores: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of cross_entropy with respect to the score matrix."""
    p = softmax(scores)
    p[np.arange(len(y)), y] -= 1.0
    return p / len(y)


# --------------------------------------------------------------------------
# Trees
# --------------------------------------------------------------------------

@dataclass
class Tree:
    """Array-encoded binary tree; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def predict(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        while True:
            f = self.feature[node]
            internal = f >= 0
            if not internal.any():
                return self.value[node]
            rows = np.flatnonzero(internal)
            go_left = X[rows, f[rows]] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])

    def depth(self) -> int:
        def walk(i: int) -> int:
            if self.feature[i] < 0:
                return 0
            return 1 + max(walk(self.left[i]), walk(self.right[i]))
        return walk(0)

    def scaled(self, factor: float) -> "Tree":
        return Tree(self.feature, self.threshold, self.left, self.right, self.value * factor)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(np.array(d["feature"], dtype=np.int64),
                   np.array(d["threshold"], dtype=float),
                   np.array(d["left"], dtype=np.int64),
                   np.array(d["right"], dtype=np.int64),
                   np.array(d["value"], dtype=float))


class _Binned:
    """Per-feature sorted distinct values and bin codes for exact split search."""

    def __init__(self, X: np.ndarray):
        self.n, self.F = X.shape
        self.uniq = [np.unique(X[:, f]) for f in range(self.F)]
        sizes = np.array([len(u) for u in self.uniq])
        self.offset = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        self.total = int(sizes.sum())
        codes = np.column_stack([np.searchsorted(self.uniq[f], X[:, f])
                                 for f in range(self.F)]) if self.F else np.zeros((self.n, 0))
        self.flat = (codes + self.offset).astype(np.int64)
        pos, feat, thr = [], [], []
        for f, u in enumerate(self.uniq):
            for t in range(len(u) - 1):
                pos.append(self.offset[f] + t)
                feat.append(f)
                thr.append((u[t] + u[t + 1]) / 2.0)
        self.pos = np.array(pos, dtype=np.int64)
        self.feat = np.array(feat, dtype=np.int64)
        self.thr = np.array(thr, dtype=float)
        self.seg_start = self.offset[self.feat] if len(self.feat) else np.zeros(0, np.int64)


def _best_split(binned: _Binned, rows: np.ndarray, r: np.ndarray, min_leaf: int):
    if len(binned.pos) == 0 or len(rows) < 2 * min_leaf:
        return None
    g = binned.flat[rows].ravel()
    w = np.repeat(r[rows], binned.F)
    S = np.bincount(g, weights=w, minlength=binned.total)
    C = np.bincount(g, minlength=binned.total).astype(float)
    cS, cC = np.cumsum(S), np.cumsum(C)
    before_S = np.where(binned.seg_start > 0, cS[binned.seg_start - 1], 0.0)
    before_C = np.where(binned.seg_start > 0, cC[binned.seg_start - 1], 0.0)
    SL = cS[binned.pos] - before_S
    CL = cC[binned.pos] - before_C
    n = float(len(rows))
    total = float(r[rows].sum())
    SR, CR = total - SL, n - CL
    ok = (CL >= min_leaf) & (CR >= min_leaf)
    if not ok.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = SL ** 2 / CL + SR ** 2 / CR - total ** 2 / n
    gain = np.where(ok, gain, -np.inf)
    best = int(np.argmax(gain))
    if not np.isfinite(gain[best]) or gain[best] <= 1e-12:
        return None
    return int(binned.feat[best]), float(binned.thr[best])


def fit_tree(X: np.ndarray, residual: np.ndarray, hessian: np.ndarray, rows: np.ndarray,
             max_depth: int, min_leaf: int = 1, leaf_clamp: float = 4.0,
             binned: Optional[_Binned] = None) -> Tree:
    """Least-squares tree on ``residual[rows]`` with Newton-step leaf values."""
    binned = binned or _Binned(X)
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def leaf_value(idx: np.ndarray) -> float:
        h = float(hessian[idx].sum())
        v = float(residual[idx].sum()) / max(h, 1e-12)
        return float(np.clip(v, -leaf_clamp, leaf_clamp))

    def grow(node: int, idx: np.ndarray, depth: int) -> None:
        split = _best_split(binned, idx, residual, min_leaf) if depth < max_depth else None
        if split is None:
            value[node] = leaf_value(idx) if len(idx) else 0.0
            return
        f, t = split
        mask = X[idx, f] <= t
        feature[node], threshold[node] = f, t
        lnode, rnode = new_node(), new_node()
        left[node], right[node] = lnode, rnode
        grow(lnode, idx[mask], depth + 1)
        grow(rnode, idx[~mask], depth + 1)

    grow(new_node(), np.asarray(rows), 0)
    return Tree(np.array(feature, dtype=np.int64), np.array(threshold),
                np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                np.array(value))


# --------------------------------------------------------------------------
# Model
# --------------------------------------------------------------------------

@dataclass
class GbdtModel:
    classes: list[str]
    init_scores: np.ndarray
    shrinkage: float
    max_depth: int
    trees: list[list[Tree]] = field(default_factory=list)
    n_features: int = 0
    feature_names: tuple[str, ...] = ()
    feature_hash: str = ""
    report: dict = field(default_factory=dict)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        F = np.tile(self.init_scores, (len(X), 1))
        for round_trees in self.trees:
            for k, tree in enumerate(round_trees):
                F[:, k] += self.shrinkage * tree.predict(X)
        return F

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return softmax(self.decision_function(X))

    def predict(self, X: np.ndarray) -> list[str]:
        return [self.classes[i] for i in np.argmax(self.predict_proba(X), axis=1)]

    def to_json(self) -> str:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "classes": self.classes,
            "init_scores": self.init_scores.tolist(),
            "shrinkage": self.shrinkage,
            "max_depth": self.max_depth,
            "n_features": self.n_features,
            "feature_names": list(self.feature_names),
            "feature_hash": self.feature_hash,
            "trees": [[t.to_dict() for t in rnd] for rnd in self.trees],
            "report": self.report,
        }
        return json.dumps(payload, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str, expected_hash: Optional[str] = None) -> "GbdtModel":
        d = json.loads(text)
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError("not a supported model file")
        if expected_hash is not None and d["feature_hash"] != expected_hash:
            raise ValueError(
                f"feature order mismatch: model {d['feature_hash']} vs code {expected_hash}")
        return cls(
            classes=list(d["classes"]),
            init_scores=np.array(d["init_scores"], dtype=float),
            shrinkage=float(d["shrinkage"]),
            max_depth=int(d["max_depth"]),
            trees=[[Tree.from_dict(t) for t in rnd] for rnd in d["trees"]],
            n_features=int(d["n_features"]),
            feature_names=tuple(d["feature_names"]),
            feature_hash=d["feature_hash"],
            report=d.get("report", {}),
        )


def train_gbdt(train: tuple[np.ndarray, Sequence], valid: Optional[tuple] = None,
               params: GbdtParams = GbdtParams(), *, seed: int,
               feature_names: Sequence[str] = (), feature_hash: str = "") -> GbdtModel:
    """Fit a softmax GBDT; ``train``/``valid`` are ``(X, labels)`` pairs.

    Rounds that would increase the training loss have their step halved until
    they do not (or are dropped), so the training loss curve never rises.
    Training stops after ``early_stopping_rounds`` rounds without validation
    improvement and the model is truncated to the best round.
    """
    X = np.asarray(train[0], dtype=float)
    labels = list(train[1])
    if len(labels) == 0:
        raise ValueError("empty training set")
    if X.ndim != 2 or len(X) != len(labels):
        raise ValueError("training features and labels disagree in length")
    classes = sorted(set(labels))
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[c] for c in labels])
    n, K = len(y), len(classes)
    counts = np.bincount(y, minlength=K)
    init = np.log(counts / n)

    model = GbdtModel(classes, init, params.shrinkage, params.max_depth,
                      n_features=X.shape[1], feature_names=tuple(feature_names),
                      feature_hash=feature_hash)
    report = {
        "seed": seed,
        "params": asdict(params),
        "split_type": "axis-aligned",
        "n_train": n,
        "class_counts": {c: int(k) for c, k in zip(classes, counts)},
        "train_loss": [],
        "valid_loss": [],
        "step_scale": [],
    }
    model.report = report
    if K == 1:
        warnings.warn("single-class training data; returning a constant predictor",
                      stacklevel=2)
        report.update(rounds=0, best_round=0)
        return model

    if valid is not None and len(valid[1]):
        Xv = np.asarray(valid[0], dtype=float)
        keep = [i for i, c in enumerate(valid[1]) if c in index]
        Xv = Xv[keep]
        yv = np.array([index[valid[1][i]] for i in keep])
    else:
        Xv, yv = None, None

    rng = np.random.default_rng(seed)
    binned = _Binned(X)
    F = np.tile(init, (n, 1))
    Fv = np.tile(init, (len(yv), 1)) if yv is not None else None
    Y = np.eye(K)[y]
    loss = cross_entropy(F, y)
    report["train_loss"].append(loss)
    if yv is not None and len(yv):
        report["valid_loss"].append(cross_entropy(Fv, yv))
    best_valid = report["valid_loss"][0] if report["valid_loss"] else None
    best_round, stale = 0, 0
    n_sub = max(1, int(round(params.subsample * n)))

    for rnd in range(1, params.max_rounds + 1):
        rows = np.sort(rng.choice(n, size=n_sub, replace=False)) if n_sub < n else np.arange(n)
        P = softmax(F)
        R = Y - P
        H = P * (1.0 - P)
        trees = [fit_tree(X, R[:, k], H[:, k], rows, params.max_depth,
                          params.min_samples_leaf, params.leaf_clamp, binned)
                 for k in range(K)]
        step = np.column_stack([t.predict(X) for t in trees]) * params.shrinkage
        scale = 1.0
        new_loss = cross_entropy(F + step, y)
        halvings = 0
        while new_loss > loss and halvings < params.max_step_halvings:
            scale *= 0.5
            halvings += 1
            new_loss = cross_entropy(F + scale * step, y)
        if new_loss > loss:
            scale, new_loss = 0.0, loss
        if scale != 1.0:
            trees = [t.scaled(scale) for t in trees]
        F = F + scale * step
        loss = new_loss
        model.trees.append(trees)
        report["train_loss"].append(loss)
        report["step_scale"].append(scale)

        if Fv is not None and len(yv):
            Fv = Fv + params.shrinkage * np.column_stack([t.predict(Xv) for t in trees])
            vloss = cross_entropy(Fv, yv)
            report["valid_loss"].append(vloss)
            if vloss < best_valid - 1e-12:
                best_valid, best_round, stale = vloss, rnd, 0
            else:
                stale += 1
                if stale >= params.early_stopping_rounds:
                    break
        else:
            best_round = rnd

    model.trees = model.trees[:best_round]
    report["rounds"] = len(report["step_scale"])
    report["best_round"] = best_round
    log.debug("gbdt: %d rounds, best %d", report["rounds"], best_round)
    return model
