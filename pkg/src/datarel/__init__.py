"""Provenance relationships between Web datasets from schema.org metadata.

Replicas, versions, subsets, derivations and variants are found three ways:
explicit ``sameAs``/``isBasedOn`` markup, name/description heuristics, and a
gradient-boosted tree classifier over pair features.  Candidate pairs come
from exact kNN over character n-gram TF-IDF vectors.
"""

__version__ = "0.1.0"

from .model import (
    DatasetRecord,
    Label,
    LabeledPair,
    Method,
    NormalizedRecord,
    Relation,
    RelationshipEdge,
    canonicalize_url,
    extract_temporal_tokens,
    extract_version_token,
    normalize_record,
    normalize_text,
    split_prefix_suffix,
)
from .ingest import Corpus, filter_citable, ingest_corpus, load_corpus, parse_record
from .markup import extract_explicit
from .heuristics import classify_pair_heuristic
from .blocking import knn_candidates
from .features import featurize_pair
from .gbdt import GbdtModel, GbdtParams, train_gbdt
from .classifier import predict_pair, split_labeled, train_pair_classifier
from .graph import build_graph, corpus_stats, replica_components
from .evaluation import evaluate, run_benchmark
from .synthetic import SyntheticConfig, generate_synthetic

__all__ = [
    "DatasetRecord",
    "Label",
    "LabeledPair",
    "Method",
    "NormalizedRecord",
    "Relation",
    "RelationshipEdge",
    "canonicalize_url",
    "extract_temporal_tokens",
    "extract_version_token",
    "normalize_record",
    "normalize_text",
    "split_prefix_suffix",
    "Corpus",
    "filter_citable",
    "ingest_corpus",
    "load_corpus",
    "parse_record",
    "extract_explicit",
    "classify_pair_heuristic",
    "knn_candidates",
    "featurize_pair",
    "GbdtModel",
    "GbdtParams",
    "train_gbdt",
    "predict_pair",
    "split_labeled",
    "train_pair_classifier",
    "build_graph",
    "corpus_stats",
    "replica_components",
    "evaluate",
    "run_benchmark",
    "SyntheticConfig",
    "generate_synthetic",
]
