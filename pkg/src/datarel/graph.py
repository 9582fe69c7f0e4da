"""Typed relationship graph, replica clustering and corpus-level statistics."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .ingest import Corpus
from .model import Method, Relation, RelationshipEdge

_METHOD_RANK = {Method.MARKUP: 0, Method.HEURISTIC: 1, Method.GBDT: 2}


@dataclass
class GraphEdge:
    src_id: str
    dst_id: str
    rel: Relation
    confidence: float
    methods: dict[Method, float] = field(default_factory=dict)

    @property
    def best_method(self) -> Method:
        return min(self.methods, key=lambda m: (-self.methods[m], _METHOD_RANK[m]))


@dataclass
class RelationshipGraph:
    nodes: dict[str, str]
    edges: dict[tuple[str, str, Relation], GraphEdge] = field(default_factory=dict)
    rejected: int = 0

    def edges_of(self, rel: Relation) -> list[GraphEdge]:
        return [e for (_, _, r), e in sorted(self.edges.items(), key=_edge_key) if r is rel]

    def sorted_edges(self) -> list[GraphEdge]:
        return [e for _, e in sorted(self.edges.items(), key=_edge_key)]


def _edge_key(item):
    (src, dst, rel), _ = item
    return (src, dst, rel.value)


def build_graph(corpus: Corpus, edges: Iterable[RelationshipEdge]) -> RelationshipGraph:
    """Merge edges from any number of methods; one entry per (pair, type)."""
    graph = RelationshipGraph({rid: rec.host for rid, rec in corpus.records.items()})
    for e in edges:
        if e.rel is Relation.NONE:
            continue
        if e.src_id not in graph.nodes or e.dst_id not in graph.nodes:
            graph.rejected += 1
            continue
        src, dst = e.src_id, e.dst_id
        if not e.rel.directional and dst < src:
            src, dst = dst, src
        key = (src, dst, e.rel)
        g = graph.edges.get(key)
        if g is None:
            g = graph.edges[key] = GraphEdge(src, dst, e.rel, e.confidence)
        g.methods[e.method] = max(g.methods.get(e.method, 0.0), e.confidence)
        g.confidence = max(g.confidence, e.confidence)
    return graph


def replica_components(graph: RelationshipGraph) -> list[list[str]]:
    """Connected components of the Replica subgraph, singletons omitted."""
    reps = graph.edges_of(Relation.REPLICA)
    if not reps:
        return []
    ids = sorted({e.src_id for e in reps} | {e.dst_id for e in reps})
    pos = {rid: i for i, rid in enumerate(ids)}
    rows = [pos[e.src_id] for e in reps]
    cols = [pos[e.dst_id] for e in reps]
    adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(ids), len(ids)))
    _, labels = connected_components(adj, directed=False)
    clusters = defaultdict(list)
    for rid, lab in zip(ids, labels):
        clusters[lab].append(rid)
    out = [sorted(c) for c in clusters.values() if len(c) > 1]
    return sorted(out, key=lambda c: (-len(c), c[0]))


TYPE_ORDER = (Relation.REPLICA, Relation.SUBSET, Relation.VARIANT,
              Relation.DERIVED, Relation.VERSION)


def corpus_stats(graph: RelationshipGraph,
                 methods: Optional[Iterable[Method]] = None) -> dict:
    """Corpus-level relationship statistics.

    Type shares count unique (unordered pair, type) entries.  "Multiple
    relationships" is reported both over related datasets and over all
    datasets, since either base is a plausible reading.
    """
    allowed = set(methods) if methods is not None else None
    entries = set()
    for (src, dst, rel), e in graph.edges.items():
        if allowed is not None and not allowed & set(e.methods):
            continue
        a, b = (src, dst) if src <= dst else (dst, src)
        entries.add((a, b, rel))

    total = len(graph.nodes)
    degree = Counter()
    for a, b, _ in entries:
        degree[a] += 1
        degree[b] += 1
    related = len(degree)
    multi = sum(1 for d in degree.values() if d >= 2)

    by_type = Counter(rel for _, _, rel in entries)
    same_site = Counter(rel for a, b, rel in entries
                        if graph.nodes[a] and graph.nodes[a] == graph.nodes[b])
    n_edges = len(entries)

    def pct(num, den):
        return 100.0 * num / den if den else 0.0

    per_type = {}
    for rel in TYPE_ORDER:
        count = by_type.get(rel, 0)
        per_type[rel.value] = {
            "edges": count,
            "share_pct": pct(count, n_edges),
            "same_site_pct": pct(same_site.get(rel, 0), count),
            "cross_site_pct": pct(count - same_site.get(rel, 0), count) if count else 0.0,
        }
    return {
        "total_datasets": total,
        "related_datasets": related,
        "pct_with_relationship": pct(related, total),
        "pct_multiple_of_related": pct(multi, related),
        "pct_multiple_of_all": pct(multi, total),
        "total_edges": n_edges,
        "per_type": per_type,
        "pair_unit": "unique unordered pair per relationship type",
    }


# --------------------------------------------------------------------------
# Export
# --------------------------------------------------------------------------

EDGE_COLUMNS = ("src_id", "dst_id", "type", "direction", "method", "confidence")


def _edge_rows(graph: RelationshipGraph):
    for e in graph.sorted_edges():
        for m in sorted(e.methods, key=lambda m: _METHOD_RANK[m]):
            yield {
                "src_id": e.src_id,
                "dst_id": e.dst_id,
                "type": e.rel.value,
                "direction": "directed" if e.rel.directional else "bidirectional",
                "method": m.value,
                "confidence": round(e.methods[m], 6),
            }


def edges_to_tsv(graph: RelationshipGraph) -> str:
    lines = ["\t".join(EDGE_COLUMNS)]
    for row in _edge_rows(graph):
        lines.append("\t".join(
            f"{row[c]:.6f}" if c == "confidence" else str(row[c]) for c in EDGE_COLUMNS))
    return "\n".join(lines) + "\n"


def edges_to_jsonl(graph: RelationshipGraph) -> str:
    return "".join(json.dumps(row, sort_keys=True) + "\n" for row in _edge_rows(graph))


def read_edges(path: str) -> list[RelationshipEdge]:
    """Read edges written by edges_to_tsv or edges_to_jsonl."""
    out = []
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if lines and lines[0].lstrip().startswith("{"):
        rows = [json.loads(ln) for ln in lines]
    else:
        header = lines[0].split("\t") if lines else []
        rows = [dict(zip(header, ln.split("\t"))) for ln in lines[1:]]
    for r in rows:
        out.append(RelationshipEdge(r["src_id"], r["dst_id"], Relation(r["type"]),
                                    Method(r["method"]), float(r["confidence"])))
    return out
