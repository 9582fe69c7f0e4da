from conftest import corpus_from

from datarel.markup import extract_explicit
from datarel.model import Relation


def test_same_as_doi_gives_replica():
    c = corpus_from([
        {"name": "A", "url": "https://a.org/a", "sameAs": "https://doi.org/10.1/B"},
        {"name": "B", "url": "https://b.org/b", "identifier": "doi:10.1/b"},
    ])
    res = extract_explicit(c)
    assert [(e.src_id, e.dst_id, e.rel) for e in res.edges] == \
        [("https://a.org/a", "https://b.org/b", Relation.REPLICA)]
    assert res.edges[0].confidence == 1.0


def test_is_based_on_url_gives_derived():
    c = corpus_from([
        {"name": "A", "url": "https://z.org/a", "isBasedOn": "http://b.org/b/"},
        {"name": "B", "url": "https://b.org/b"},
    ])
    (e,) = extract_explicit(c).edges
    assert (e.src_id, e.dst_id, e.rel) == ("https://z.org/a", "https://b.org/b", Relation.DERIVED)


def test_dangling_reference():
    c = corpus_from([{"name": "A", "url": "https://a.org/a", "sameAs": "https://nowhere.org/q"}])
    res = extract_explicit(c)
    assert res.edges == [] and res.dangling == 1


def test_mutual_same_as_stored_once():
    c = corpus_from([
        {"name": "A", "url": "https://a.org/a", "sameAs": "https://b.org/b"},
        {"name": "B", "url": "https://b.org/b", "sameAs": "https://a.org/a"},
    ])
    assert len(extract_explicit(c).edges) == 1


def test_self_reference_ignored():
    c = corpus_from([{"name": "A", "url": "https://a.org/a", "sameAs": "https://a.org/a"}])
    res = extract_explicit(c)
    assert res.edges == [] and res.self_references == 1


def test_edge_count_bound():
    objs = [{"name": str(i), "url": f"https://h{i % 3}.org/{i}",
             "sameAs": [f"https://h{(i + 1) % 3}.org/{(i + 1) % 6}"],
             "isBasedOn": [f"https://h{(i + 2) % 3}.org/{(i + 2) % 6}"]} for i in range(6)]
    c = corpus_from(objs)
    refs = sum(len(r.same_as) + len(r.is_based_on) for r in c.records.values())
    assert len(extract_explicit(c).edges) <= refs
