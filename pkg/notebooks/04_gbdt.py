"""
Gradient-boosted trees from scratch
===================================

A softmax GBDT: one small regression tree per class per round, fit to
``y - p`` with Newton leaf values.  Here it is trained on pair features
from a synthetic corpus and compared against the rules.
"""

import numpy as np

from datarel.classifier import pair_matrix, split_labeled, train_pair_classifier
from datarel.evaluation import comparison_table, run_benchmark
from datarel.features import FEATURE_NAMES
from datarel.gbdt import GbdtParams, cross_entropy, cross_entropy_grad, train_gbdt
from datarel.synthetic import SyntheticConfig, generate_synthetic

# %%
# The gradient the trees chase, checked against finite differences
rng = np.random.default_rng(0)
s, y = rng.normal(size=(1, 6)), np.array([2])
h = 1e-6
num = np.array([[(cross_entropy(s + h * e, y) - cross_entropy(s - h * e, y)) / (2 * h)
                 for e in np.eye(6)]])
print("max |analytic - numeric|:", np.abs(num - cross_entropy_grad(s, y)).max())

# %%
# A toy problem: the label is a function of one bit
X = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], float)
toy = train_gbdt((X, ["none", "none", "replica", "replica"]),
                 params=GbdtParams(max_rounds=10, subsample=1.0), seed=0)
print(toy.predict(X), np.round(toy.predict_proba(X), 3).tolist())

# %%
# Pair features on a noisy synthetic corpus
corpus, gold = generate_synthetic(SyntheticConfig(seed=1, name_perturbation=0.3))
train, valid, test = split_labeled(gold, seed=1)
print("split:", len(train), len(valid), len(test))
Xtr, ytr = pair_matrix(train[:3], corpus.normalized)
for name, value in zip(FEATURE_NAMES, Xtr[0]):
    print(f"  {name:32} {value:.3f}")

model = train_pair_classifier(train, valid, corpus.normalized, seed=1)
rep = model.report
print(f"rounds run {rep['rounds']}, kept {rep['best_round']}")
print("train loss", np.round(rep["train_loss"][::20], 4).tolist())
print("valid loss", np.round(rep["valid_loss"][::20], 4).tolist())

# %%
# Held-out comparison in the familiar table layout
reports = run_benchmark(corpus, test, ("markup", "heuristic", "gbdt"), model)
print(comparison_table(reports))
