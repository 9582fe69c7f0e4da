import random

import numpy as np
import pytest

from datarel.evaluation import (
    comparison_table,
    evaluate,
    gold_to_tsv,
    read_gold,
    run_benchmark,
)
from datarel.model import NO_RELATION, Label, LabeledPair, Relation

R, V, N = Label(Relation.REPLICA), Label(Relation.VERSION), NO_RELATION


def _maps(gold, pred):
    keys = [(f"a{i}", f"b{i}") for i in range(len(gold))]
    return dict(zip(keys, pred)), dict(zip(keys, gold))


def test_all_correct():
    gold = [R, V, N, Label(Relation.SUBSET, 1)]
    rep = evaluate(*_maps(gold, gold))
    assert rep.accuracy == 1.0
    for r in rep.displayed_classes():
        m = rep.per_class[r]
        assert m.precision == m.recall == m.f1 == 1.0


def test_hand_arithmetic():
    rep = evaluate(*_maps([R, R, V, N], [R, N, V, N]))
    m = rep.per_class[Relation.REPLICA]
    assert (m.precision, m.recall) == (1.0, 0.5)
    assert m.f1 == pytest.approx(2 / 3)
    assert rep.accuracy == 0.75
    assert rep.per_class[Relation.NONE].precision == 0.5


def test_absent_class_is_zero_and_hidden():
    rep = evaluate(*_maps([R, N], [R, N]))
    m = rep.per_class[Relation.DERIVED]
    assert (m.precision, m.recall, m.f1) == (0.0, 0.0, 0.0)
    assert Relation.DERIVED not in rep.displayed_classes()
    assert "derived" not in rep.to_dict()["per_class"]


def test_mismatched_pairs_raise():
    pred, gold = _maps([R, N], [R, N])
    pred.pop(next(iter(pred)))
    with pytest.raises(ValueError, match="without prediction"):
        evaluate(pred, gold)


def test_direction_errors_counted_separately():
    rep = evaluate(*_maps([Label(Relation.SUBSET, 1)], [Label(Relation.SUBSET, -1)]))
    assert rep.accuracy == 1.0 and rep.direction_errors == 1


def test_invariants_on_random_labels():
    rng = random.Random(0)
    labels = [R, V, N, Label(Relation.SUBSET, 1), Label(Relation.DERIVED, -1)]
    gold = [rng.choice(labels) for _ in range(200)]
    pred = [rng.choice(labels) for _ in range(200)]
    p, g = _maps(gold, pred)
    rep = evaluate(p, g)
    assert rep.confusion.sum(axis=1).tolist() == [rep.per_class[r].support for r in Relation]
    assert rep.accuracy == pytest.approx(np.trace(rep.confusion) / rep.total)
    assert rep.accuracy == pytest.approx(np.mean([a.rel is b.rel for a, b in zip(gold, pred)]))
    items = list(p.items())
    rng.shuffle(items)
    assert evaluate(dict(items), g).to_dict() == rep.to_dict()
    for m in rep.per_class.values():
        assert 0 <= m.precision <= 1 and 0 <= m.recall <= 1 and 0 <= m.f1 <= 1


def test_gold_tsv_roundtrip(tmp_path):
    pairs = [LabeledPair("b", "a", Label(Relation.SUBSET, 1)), LabeledPair("c", "d", R)]
    path = tmp_path / "g.tsv"
    path.write_text(gold_to_tsv(pairs))
    back = read_gold(str(path))
    assert back == [p.canonical() for p in pairs]
    assert back[0].gold == Label(Relation.SUBSET, -1)


def test_benchmark_and_table(small_world):
    corpus, gold, model, (_, _, test) = small_world
    reports = run_benchmark(corpus, test, ("markup", "heuristic", "gbdt"), model)
    assert list(reports) == ["markup", "heuristic", "gbdt"]
    table = comparison_table(reports)
    lines = table.splitlines()
    assert lines[0].startswith("Relationship")
    assert [l.split("|")[0].strip() for l in lines[3:9]] == \
        ["Replica", "Version", "Subset", "Derived", "Variant", "None"]
    assert lines[-1].startswith("Accuracy")


def test_benchmark_needs_model(small_world):
    corpus, gold = small_world[:2]
    with pytest.raises(ValueError):
        run_benchmark(corpus, gold, ("gbdt",))
