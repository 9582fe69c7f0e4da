
import pytest
from hypothesis import given, strategies as st

from conftest import corpus_from

from datarel.graph import (
    build_graph,
    corpus_stats,
    edges_to_jsonl,
    edges_to_tsv,
    read_edges,
    replica_components,
)
from datarel.model import Method, Relation, RelationshipEdge

HOSTS = {"A": "https://x.org/A", "B": "https://y.org/B", "C": "https://z.org/C",
         "D": "https://x.org/D", "E": "https://y.org/E"}


def corpus(n=5):
    names = list(HOSTS)[:n]
    return corpus_from([{"@id": k, "name": k, "url": HOSTS[k]} for k in names])


def E(a, b, rel, method=Method.HEURISTIC, conf=1.0):
    return RelationshipEdge(a, b, rel, method, conf)


def test_dedup_with_provenance():
    g = build_graph(corpus(), [E("A", "B", Relation.REPLICA, Method.MARKUP),
                               E("B", "A", Relation.REPLICA, Method.GBDT, 0.9)])
    (edge,) = g.edges.values()
    assert set(edge.methods) == {Method.MARKUP, Method.GBDT}
    assert edge.confidence == 1.0
    assert (edge.src_id, edge.dst_id) == ("A", "B")


def test_multiple_types_on_one_pair():
    g = build_graph(corpus(), [E("A", "B", Relation.VARIANT), E("A", "B", Relation.DERIVED)])
    assert len(g.edges) == 2


def test_unknown_id_rejected():
    g = build_graph(corpus(), [E("A", "Z", Relation.REPLICA)])
    assert g.edges == {} and g.rejected == 1


@pytest.mark.parametrize("edges, expected", [
    ([("A", "B"), ("B", "C")], [["A", "B", "C"]]),
    ([], []),
    ([("A", "B"), ("C", "D")], [["A", "B"], ["C", "D"]]),
])
def test_replica_components(edges, expected):
    g = build_graph(corpus(), [E(a, b, Relation.REPLICA) for a, b in edges])
    assert replica_components(g) == expected


def test_components_ignore_other_types():
    g = build_graph(corpus(), [E("A", "B", Relation.REPLICA), E("B", "C", Relation.SUBSET)])
    assert replica_components(g) == [["A", "B"]]


def test_stats_percent_related():
    objs = [{"@id": str(i), "name": str(i), "url": f"https://h{i}.org/{i}"} for i in range(10)]
    g = build_graph(corpus_from(objs), [E("0", "1", Relation.REPLICA)])
    s = corpus_stats(g)
    assert s["total_datasets"] == 10
    assert s["pct_with_relationship"] == 20.0
    assert s["per_type"]["replica"]["same_site_pct"] == 0.0
    assert s["per_type"]["replica"]["cross_site_pct"] == 100.0


def test_stats_multiple_and_same_site():
    g = build_graph(corpus(), [E("A", "D", Relation.VERSION), E("A", "B", Relation.REPLICA),
                               E("A", "B", Relation.DERIVED)])
    s = corpus_stats(g)
    assert s["related_datasets"] == 3
    assert s["pct_multiple_of_related"] == pytest.approx(200 / 3)  # A and B
    assert s["pct_multiple_of_all"] == pytest.approx(40.0)
    assert s["per_type"]["version"]["same_site_pct"] == 100.0
    assert s["total_edges"] == 3


def test_stats_method_filter():
    g = build_graph(corpus(), [E("A", "B", Relation.REPLICA, Method.MARKUP),
                               E("A", "C", Relation.REPLICA, Method.GBDT, 0.7)])
    assert corpus_stats(g, [Method.MARKUP])["total_edges"] == 1


def test_empty_graph_is_zero():
    s = corpus_stats(build_graph(corpus(), []))
    assert s["pct_with_relationship"] == 0.0
    assert all(v["share_pct"] == 0.0 for v in s["per_type"].values())


_types = st.sampled_from([r for r in Relation if r is not Relation.NONE])
_edge = st.tuples(st.sampled_from(list(HOSTS)), st.sampled_from(list(HOSTS)), _types)


@given(st.lists(_edge, min_size=1, max_size=25))
def test_stats_invariants(raw):
    edges = [E(a, b, r) for a, b, r in raw if a != b]
    g = build_graph(corpus(), edges)
    s = corpus_stats(g)
    assert s == corpus_stats(g)
    if s["total_edges"]:
        assert sum(v["share_pct"] for v in s["per_type"].values()) == pytest.approx(100, abs=0.1)
    assert sum(v["edges"] for v in s["per_type"].values()) == s["total_edges"]
    for key in ("pct_with_relationship", "pct_multiple_of_related", "pct_multiple_of_all"):
        assert 0 <= s[key] <= 100


@pytest.mark.parametrize("fmt", ["tsv", "jsonl"])
def test_edge_export_roundtrip(tmp_path, fmt):
    g = build_graph(corpus(), [E("B", "A", Relation.SUBSET, Method.GBDT, 0.8125),
                               E("A", "C", Relation.REPLICA, Method.MARKUP)])
    text = edges_to_tsv(g) if fmt == "tsv" else edges_to_jsonl(g)
    path = tmp_path / f"e.{fmt}"
    path.write_text(text)
    back = build_graph(corpus(), read_edges(str(path)))
    assert (edges_to_tsv(back) if fmt == "tsv" else edges_to_jsonl(back)) == text
    if fmt == "tsv":
        assert text.splitlines()[0].split("\t") == \
            ["src_id", "dst_id", "type", "direction", "method", "confidence"]
