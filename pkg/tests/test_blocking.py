from collections import Counter

import numpy as np
import pytest

from conftest import corpus_from, make_record
from oracles import brute_force_knn, dict_cosine, ngram_vectors

from datarel.blocking import (
    VectorizerConfig,
    fit_idf,
    knn_candidates,
    ngram_counts,
    vectorize,
)
from datarel.ingest import ingest_corpus
from datarel.synthetic import SyntheticConfig, corpus_to_ndjson, generate_synthetic


def _norm(text):
    return make_record(text)


def test_identical_texts_cosine_one():
    a, b = _norm("annual v4"), _norm("annual v4")
    idf = fit_idf([a, b])
    assert vectorize(a, idf).dot(vectorize(b, idf)) == pytest.approx(1.0)


def test_disjoint_alphabets_cosine_zero():
    a, b = _norm("aaaa"), _norm("zzzz")
    idf = fit_idf([a, b])
    assert vectorize(a, idf).dot(vectorize(b, idf)) == 0.0


def test_versions_are_close_but_not_equal():
    recs = [_norm("annual v4"), _norm("annual v5"), _norm("weather ohio")]
    idf = fit_idf(recs)
    va, vb = vectorize(recs[0], idf), vectorize(recs[1], idf)
    expected = ngram_vectors(["annual v4", "annual v5", "weather ohio"])
    oracle_cos = dict_cosine(expected[0], expected[1])
    assert 0.5 < va.dot(vb) < 1.0
    assert va.dot(vb) == pytest.approx(oracle_cos, abs=1e-12)


def test_vector_invariants():
    recs = [_norm("gridded sea surface temperature"), _norm("x"), _norm("")]
    idf = fit_idf(recs)
    v = vectorize(recs[0], idf)
    assert np.all(np.diff(v.indices) > 0)
    assert np.linalg.norm(v.weights) == pytest.approx(1.0, abs=1e-9)
    assert vectorize(recs[2], idf).empty


def test_ngram_counts_respect_config():
    cfg = VectorizerConfig(3, 3, 8)
    counts = ngram_counts("abcd", cfg)
    assert sum(counts.values()) == 2
    assert all(0 <= i < 256 for i in counts)


def test_three_record_corpus_returns_all_pairs():
    c = corpus_from([{"name": n} for n in ("a", "b", "c")])
    cands = knn_candidates(c, k=20)
    assert len(cands) == 3
    assert all(a < b for a, b in cands.pairs)


def _synthetic(seed, base):
    corpus, _ = generate_synthetic(SyntheticConfig(seed=seed, base_count=base))
    return corpus


@pytest.mark.parametrize("seed", [0, 1])
def test_matches_brute_force_oracle(seed):
    corpus = _synthetic(seed, 150)
    got = set(knn_candidates(corpus, k=5).pairs)
    assert got == brute_force_knn(corpus, 5)


def test_degree_and_size_bounds():
    corpus = _synthetic(3, 150)
    k = 7
    cands = knn_candidates(corpus, k=k)
    n = len(corpus)
    assert n * k / 2 <= len(cands) <= n * k
    deg = Counter()
    for a, b in cands.pairs:
        assert a != b
        deg[a] += 1
        deg[b] += 1
    assert min(deg[i] for i in corpus.ids()) >= min(k, n - 1)
    assert len(set(cands.pairs)) == len(cands.pairs)


def test_invariant_under_input_order_and_threads():
    corpus = _synthetic(4, 120)
    lines = corpus_to_ndjson(corpus).splitlines()
    shuffled = ingest_corpus(list(reversed(lines)))
    base = knn_candidates(corpus, k=6)
    assert knn_candidates(shuffled, k=6).pairs == base.pairs
    assert knn_candidates(corpus, k=6, threads=4, chunk=17).pairs == base.pairs


def test_exact_duplicates_are_recovered():
    objs = [{"name": f"dataset {w}", "description": f"about {w}", "url": f"https://a.org/{w}"}
            for w in ("alpha", "beta", "gamma", "delta", "epsilon", "zeta")]
    objs.append({"name": "dataset gamma", "description": "about gamma", "url": "https://b.org/g"})
    cands = knn_candidates(corpus_from(objs), k=1)
    assert ("https://a.org/gamma", "https://b.org/g") in cands.pairs


def test_tsv_export():
    c = corpus_from([{"name": n, "url": f"https://a.org/{n}"} for n in ("aa", "ab", "b")])
    lines = knn_candidates(c, k=1).to_tsv().splitlines()
    assert lines[0] == "id_a\tid_b\tcosine"
    assert all(len(l.split("\t")) == 3 for l in lines[1:])
