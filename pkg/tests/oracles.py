"""Independent reference computations used by the tests.

Nothing here imports from ``datarel.blocking``: hashing, TF-IDF weighting,
normalization and ranking are written out again from their definitions.
"""

import math
import zlib
from collections import Counter

import numpy as np
import scipy.sparse as sp


def ngram_vectors(texts, lo=3, hi=5, bits=20):
    grams = []
    for t in texts:
        c = Counter()
        for n in range(lo, hi + 1):
            for i in range(len(t) - n + 1):
                c[zlib.crc32(t[i:i + n].encode("utf-8")) % (1 << bits)] += 1
        grams.append(c)
    N = len(texts)
    df = Counter(g for c in grams for g in c)
    vecs = []
    for c in grams:
        v = {g: tf * (math.log((N + 1) / (df[g] + 1)) + 1) for g, tf in c.items()}
        norm = math.sqrt(sum(w * w for w in v.values()))
        vecs.append({g: w / norm for g, w in v.items()} if norm else {})
    return vecs


def dict_cosine(u, v):
    return sum(w * v.get(g, 0.0) for g, w in u.items())


def corpus_texts(corpus):
    ids = sorted(corpus.ids())
    texts = []
    for i in ids:
        n = corpus.normalized[i]
        texts.append(f"{n.norm_name} {n.norm_description}".strip())
    return ids, texts


def brute_force_knn(corpus, k):
    """All-pairs cosine, each row fully sorted by (-cosine, id)."""
    ids, texts = corpus_texts(corpus)
    vecs = ngram_vectors(texts)
    rows, cols, vals = [], [], []
    for r, v in enumerate(vecs):
        for g, w in v.items():
            rows.append(r)
            cols.append(g)
            vals.append(w)
    X = sp.csr_matrix((vals, (rows, cols)), shape=(len(ids), 1 << 20))
    S = (X @ X.T).toarray()
    out = set()
    for i in range(len(ids)):
        ranked = sorted((-round(float(S[i, j]), 10), ids[j]) for j in range(len(ids)) if j != i)
        for _, other in ranked[:k]:
            out.add(tuple(sorted((ids[i], other))))
    return out


def central_difference(f, x, h=1e-6):
    g = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        up, down = x.copy(), x.copy()
        up[idx] += h
        down[idx] -= h
        g[idx] = (f(up) - f(down)) / (2 * h)
    return g
