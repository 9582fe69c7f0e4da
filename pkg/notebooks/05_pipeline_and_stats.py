"""
End to end: corpus to relationship graph
========================================

Block, classify with every method, merge into one typed graph, cluster
replicas and summarize the corpus.  The same steps are available as
``datarel infer`` and ``datarel stats``.
"""

import json
from collections import Counter

from datarel.classifier import split_labeled, train_pair_classifier
from datarel.cli import infer_edges
from datarel.graph import build_graph, corpus_stats, edges_to_tsv, replica_components
from datarel.synthetic import SyntheticConfig, generate_synthetic

corpus, gold = generate_synthetic(SyntheticConfig(seed=5, base_count=800))
train, valid, _ = split_labeled(gold, seed=5)
model = train_pair_classifier(train, valid, corpus.normalized, seed=5)

# %%
edges, info = infer_edges(corpus, ("markup", "heuristic", "gbdt"), model, k=10)
print(info["candidate_pairs"], "candidate pairs,", len(edges), "raw edges")
print(Counter(e.method.value for e in edges))

# %%
# One entry per (pair, type); every method that found it is remembered
graph = build_graph(corpus, edges)
multi = [e for e in graph.sorted_edges() if len(e.methods) > 1]
print(len(graph.edges), "graph edges,", len(multi), "found by more than one method")
print(edges_to_tsv(graph).splitlines()[:4])

# %%
clusters = replica_components(graph)
print(len(clusters), "replica clusters; largest:", clusters[0] if clusters else None)

# %%
stats = corpus_stats(graph)
print(json.dumps({k: v for k, v in stats.items() if k != "per_type"}, indent=1))
for rel, row in stats["per_type"].items():
    print(f"{rel:8} share {row['share_pct']:5.1f}%  same-site {row['same_site_pct']:5.1f}%")
