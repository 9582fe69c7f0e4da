from collections import Counter

import pytest

from datarel.heuristics import is_replica
from datarel.model import Relation
from datarel.synthetic import SyntheticConfig, corpus_to_ndjson, generate_synthetic


def test_seeded_byte_identical():
    cfg = SyntheticConfig(seed=5, base_count=200)
    a, ga = generate_synthetic(cfg)
    b, gb = generate_synthetic(cfg)
    assert corpus_to_ndjson(a) == corpus_to_ndjson(b)
    assert ga == gb
    c, _ = generate_synthetic(SyntheticConfig(seed=6, base_count=200))
    assert corpus_to_ndjson(c) != corpus_to_ndjson(a)


def test_zero_rates_give_only_none():
    cfg = SyntheticConfig(seed=1, base_count=100, replica_rate=0, version_rate=0,
                          subset_rate=0, variant_rate=0, derived_rate=0)
    _, gold = generate_synthetic(cfg)
    assert gold and {lp.gold.rel for lp in gold} == {Relation.NONE}


def test_replica_plants_found_by_rule():
    cfg = SyntheticConfig.zero_noise(seed=2, base_count=100, replica_rate=0.05, version_rate=0,
                                     subset_rate=0, variant_rate=0, derived_rate=0)
    corpus, gold = generate_synthetic(cfg)
    reps = [lp for lp in gold if lp.gold.rel is Relation.REPLICA]
    assert reps
    for lp in reps:
        assert is_replica(corpus.normalized[lp.a_id], corpus.normalized[lp.b_id])


def test_gold_consistency():
    corpus, gold = generate_synthetic(SyntheticConfig(seed=3, base_count=300))
    keys = [(lp.a_id, lp.b_id) for lp in gold]
    assert len(set(keys)) == len(keys)
    assert all(a < b for a, b in keys)
    for lp in gold:
        assert lp.a_id in corpus and lp.b_id in corpus
        if lp.gold.rel is Relation.REPLICA:
            assert corpus.records[lp.a_id].host != corpus.records[lp.b_id].host
    counts = Counter(lp.gold.rel for lp in gold)
    assert counts[Relation.NONE] == pytest.approx(len(gold) / 2, abs=2)


@pytest.mark.parametrize("bad", [
    dict(replica_rate=0.6, version_rate=0.5),
    dict(name_perturbation=1.5),
    dict(base_count=1),
])
def test_invalid_config(bad):
    with pytest.raises(ValueError):
        generate_synthetic(SyntheticConfig(seed=0, **bad))


def test_markup_omission_controls_markup():
    cfg = SyntheticConfig(seed=4, base_count=200, markup_omission=1.0)
    corpus, _ = generate_synthetic(cfg)
    assert not any(r.same_as or r.is_based_on for r in corpus.records.values())
