"""``datarel`` command line: ingest, synth, train, eval, infer, stats."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .blocking import VectorizerConfig, knn_candidates
from .classifier import (
    load_model,
    predict_pairs,
    split_labeled,
    train_pair_classifier,
)
from .features import featurize_pairs
from .evaluation import (
    comparison_table,
    gold_to_tsv,
    read_gold,
    run_benchmark,
)
from .gbdt import GbdtParams
from .graph import (
    build_graph,
    corpus_stats,
    edges_to_jsonl,
    edges_to_tsv,
    read_edges,
    replica_components,
)
from .heuristics import classify_pair_heuristic
from .ingest import dump_snapshot, filter_citable, ingest_sources, load_corpus
from .markup import extract_explicit
from .model import DEFAULT_DERIVATION_PATTERNS, Method, Relation, RelationshipEdge, load_patterns
from .synthetic import SyntheticConfig, corpus_to_ndjson, generate_synthetic

log = logging.getLogger("datarel")

RESULT_FORMAT = "datarel-result"
RESULT_VERSION = 1


class UsageError(Exception):
    pass


def _emit(command: str, payload: dict, out=None) -> None:
    doc = {"format": RESULT_FORMAT, "version": RESULT_VERSION, "command": command}
    doc.update(payload)
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    (out or sys.stdout).write(text)


def _write(path: str, text: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _patterns(args) -> tuple[str, ...]:
    if getattr(args, "patterns", None):
        return load_patterns(args.patterns)
    return DEFAULT_DERIVATION_PATTERNS


def _methods(text: str) -> list[str]:
    names = [m.strip().lower() for m in text.split(",") if m.strip()]
    valid = {m.value for m in Method}
    bad = [m for m in names if m not in valid]
    if bad or not names:
        raise UsageError(f"--methods must be a comma list drawn from {sorted(valid)}")
    return list(dict.fromkeys(names))


def _read_model(path: Optional[str], methods: Sequence[str]):
    if "gbdt" not in methods:
        return None
    if not path:
        raise UsageError("the gbdt method requires --model")
    with open(path, encoding="utf-8") as fh:
        return load_model(fh.read())


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    sources = []
    for path in args.input:
        with open(path, encoding="utf-8") as fh:
            sources.append((path, fh.read().splitlines()))
    corpus = ingest_sources(sources, _patterns(args))
    if args.citable_only:
        corpus = filter_citable(corpus)
    manifest = dict(corpus.manifest, records=len(corpus))
    manifest_text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    if args.manifest:
        _write(args.manifest, manifest_text)
    else:
        sys.stderr.write(manifest_text)
    if len(corpus) == 0:
        log.error("no records accepted")
        return 1
    _write(args.out, dump_snapshot(corpus))
    _emit("ingest", {"records": len(corpus), "out": args.out,
                     "rejected": manifest.get("rejected", 0),
                     "duplicates": manifest.get("duplicates", 0)})
    return 0


def cmd_synth(args) -> int:
    settings = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            settings = json.load(fh)
    if args.seed is not None:
        settings["seed"] = args.seed
    if "seed" not in settings:
        raise UsageError("synth needs --seed or a config with a seed")
    if args.zero_noise:
        cfg = SyntheticConfig.zero_noise(**settings)
    else:
        cfg = SyntheticConfig.from_dict(settings)
    corpus, gold = generate_synthetic(cfg)
    _write(args.out_corpus, corpus_to_ndjson(corpus))
    _write(args.out_gold, gold_to_tsv(gold))
    counts = {}
    for lp in gold:
        counts[lp.gold.rel.value] = counts.get(lp.gold.rel.value, 0) + 1
    _emit("synth", {"config": cfg.to_dict(), "records": len(corpus), "gold_pairs": len(gold),
                    "gold_counts": dict(sorted(counts.items()))})
    return 0


def _gbdt_params(args) -> GbdtParams:
    return GbdtParams(max_depth=args.max_depth, shrinkage=args.shrinkage,
                      max_rounds=args.max_rounds,
                      early_stopping_rounds=args.early_stopping_rounds,
                      subsample=args.subsample)


def cmd_train(args) -> int:
    corpus = load_corpus(args.corpus, _patterns(args))
    gold = read_gold(args.gold)
    train, valid, test = split_labeled(gold, args.seed)
    model = train_pair_classifier(train, valid, corpus.normalized, _gbdt_params(args),
                                  seed=args.seed)
    model.report["split"] = {"train": len(train), "valid": len(valid), "test": len(test)}
    if test:
        rep = run_benchmark(corpus, test, ("gbdt",), model)["gbdt"]
        model.report["test_accuracy"] = rep.accuracy
    _write(args.out, model.to_json())
    _emit("train", {"model": args.out, "report": model.report})
    return 0


def cmd_eval(args) -> int:
    methods = _methods(args.methods)
    model = _read_model(args.model, methods)
    corpus = load_corpus(args.corpus, _patterns(args))
    gold = read_gold(args.gold)
    if args.split == "test":
        gold = split_labeled(gold, args.seed)[2]
    reports = run_benchmark(corpus, gold, methods, model)
    table = comparison_table(reports)
    payload = {"split": args.split, "pairs": len(gold),
               "reports": {k: v.to_dict() for k, v in reports.items()},
               "table": table}
    if args.out:
        _write(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    if args.table:
        sys.stdout.write(table)
    else:
        _emit("eval", payload)
    return 0


def infer_edges(corpus, methods, model=None, k=20, config=VectorizerConfig(), threads=None):
    """Markup over the whole corpus, classifiers over kNN candidate pairs."""
    edges: list[RelationshipEdge] = []
    info = {}
    if "markup" in methods:
        res = extract_explicit(corpus)
        edges += res.edges
        info["markup_dangling"] = res.dangling
    classify = [m for m in methods if m != "markup"]
    if classify:
        cands = knn_candidates(corpus, k=k, config=config, threads=threads)
        info["candidate_pairs"] = len(cands)
        info["vectorizer"] = {"kind": "char-ngram-tfidf", "hash": cands.config_hash,
                              "ngram_min": config.ngram_min, "ngram_max": config.ngram_max,
                              "hash_bits": config.hash_bits}
        pairs = list(cands.pairs)
        norm = corpus.normalized
        if "heuristic" in classify:
            for a, b in pairs:
                label = classify_pair_heuristic(norm[a], norm[b])
                if label.rel is not Relation.NONE:
                    edges.append(RelationshipEdge.from_label(a, b, label, Method.HEURISTIC))
        if "gbdt" in classify:
            labels = predict_pairs(model, pairs, norm)
            probs = model.predict_proba(featurize_pairs(pairs, norm)) if pairs else []
            for (a, b), label, p in zip(pairs, labels, probs):
                if label.rel is not Relation.NONE:
                    conf = float(np.max(p))
                    edges.append(RelationshipEdge.from_label(a, b, label, Method.GBDT, conf))
    return edges, info


def cmd_infer(args) -> int:
    methods = _methods(args.methods)
    model = _read_model(args.model, methods)
    corpus = load_corpus(args.corpus, _patterns(args))
    config = VectorizerConfig(args.ngram_min, args.ngram_max, args.hash_bits)
    edges, info = infer_edges(corpus, methods, model, args.k, config, args.threads)
    graph = build_graph(corpus, edges)
    text = edges_to_jsonl(graph) if args.out.endswith((".jsonl", ".ndjson")) \
        else edges_to_tsv(graph)
    _write(args.out, text)
    stats = corpus_stats(graph)
    stats["replica_clusters"] = len(replica_components(graph))
    stats_path = args.stats or args.out + ".stats.json"
    _write(stats_path, json.dumps(stats, sort_keys=True, indent=2) + "\n")
    _emit("infer", {"methods": methods, "k": args.k, "edges": len(graph.edges),
                    "edges_out": args.out, "stats_out": stats_path, **info})
    return 0


def cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus, _patterns(args))
    edges = read_edges(args.edges)
    graph = build_graph(corpus, edges)
    methods = [Method(m) for m in _methods(args.methods)] if args.methods else None
    stats = corpus_stats(graph, methods)
    stats["rejected_edges"] = graph.rejected
    stats["replica_clusters"] = len(replica_components(graph))
    if args.out:
        _write(args.out, json.dumps(stats, sort_keys=True, indent=2) + "\n")
    _emit("stats", {"stats": stats})
    return 0


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="datarel",
                                description="Infer provenance relationships between datasets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker cap for parallel steps; results do not depend on it")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    def corpus_opts(sp):
        sp.add_argument("--corpus", required=True,
                        help="corpus snapshot from `ingest`, or an NDJSON file")
        sp.add_argument("--patterns", help="derivation pattern file (one phrase per line)")

    sp = add_parser("ingest", help="parse NDJSON JSON-LD into a corpus snapshot")
    sp.add_argument("--input", nargs="+", required=True, help="NDJSON input files")
    sp.add_argument("--citable-only", action="store_true", help="keep only records with a DOI")
    sp.add_argument("--manifest", help="write the ingest manifest here instead of stderr")
    sp.add_argument("--patterns", help="derivation pattern file")
    sp.add_argument("--out", required=True, help="corpus snapshot path (JSON)")
    sp.add_argument("--seed", type=int, default=0, help="accepted for uniformity; unused")
    sp.set_defaults(func=cmd_ingest)

    sp = add_parser("synth", help="generate a synthetic corpus with gold pairs")
    sp.add_argument("--config", help="JSON file of SyntheticConfig fields")
    sp.add_argument("--seed", type=int, help="overrides the config seed")
    sp.add_argument("--zero-noise", action="store_true",
                    help="default all noise knobs to zero")
    sp.add_argument("--out-corpus", required=True, help="NDJSON corpus output")
    sp.add_argument("--out-gold", required=True, help="gold pair TSV output")
    sp.set_defaults(func=cmd_synth)

    sp = add_parser("train", help="train the GBDT pair classifier on a 70:15:15 split")
    corpus_opts(sp)
    sp.add_argument("--gold", required=True, help="gold pair TSV")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True, help="model JSON output")
    sp.add_argument("--max-depth", type=int, default=GbdtParams.max_depth)
    sp.add_argument("--shrinkage", type=float, default=GbdtParams.shrinkage)
    sp.add_argument("--max-rounds", type=int, default=GbdtParams.max_rounds)
    sp.add_argument("--early-stopping-rounds", type=int,
                    default=GbdtParams.early_stopping_rounds)
    sp.add_argument("--subsample", type=float, default=GbdtParams.subsample)
    sp.set_defaults(func=cmd_train)

    sp = add_parser("eval", help="compare methods on gold pairs (P/R/F1 table)")
    corpus_opts(sp)
    sp.add_argument("--gold", required=True)
    sp.add_argument("--methods", default="markup,heuristic,gbdt")
    sp.add_argument("--model", help="model JSON, required for gbdt")
    sp.add_argument("--seed", type=int, default=0, help="split seed used with --split test")
    sp.add_argument("--split", choices=("test", "all"), default="test",
                    help="evaluate on the held-out 15%% (default) or every gold pair")
    sp.add_argument("--out", help="also write the JSON report here")
    sp.add_argument("--table", action="store_true", help="print the aligned text table")
    sp.set_defaults(func=cmd_eval)

    sp = add_parser("infer", help="block with kNN and classify candidate pairs")
    corpus_opts(sp)
    sp.add_argument("--methods", default="markup,heuristic")
    sp.add_argument("--model", help="model JSON, required for gbdt")
    sp.add_argument("--k", type=int, default=20, help="neighbours per record")
    sp.add_argument("--ngram-min", type=int, default=3)
    sp.add_argument("--ngram-max", type=int, default=5)
    sp.add_argument("--hash-bits", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0, help="accepted for uniformity; unused")
    sp.add_argument("--out", required=True, help="edge file (.tsv, or .jsonl for JSON Lines)")
    sp.add_argument("--stats", help="stats JSON path (default: <out>.stats.json)")
    sp.set_defaults(func=cmd_infer)

    sp = add_parser("stats", help="corpus-level statistics for an edge file")
    corpus_opts(sp)
    sp.add_argument("--edges", required=True)
    sp.add_argument("--methods", help="restrict to edges found by these methods")
    sp.add_argument("--seed", type=int, default=0, help="accepted for uniformity; unused")
    sp.add_argument("--out", help="also write the stats JSON here")
    sp.set_defaults(func=cmd_stats)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
