"""Relationships declared explicitly through ``sameAs`` / ``isBasedOn`` markup."""

from __future__ import annotations

from dataclasses import dataclass, field

from .ingest import Corpus
from .model import Label, Method, Relation, RelationshipEdge


@dataclass
class MarkupResult:
    edges: list[RelationshipEdge]
    dangling: int = 0
    self_references: int = 0
    dangling_refs: list[tuple[str, str]] = field(default_factory=list)


def identifier_index(corpus: Corpus) -> dict[str, str]:
    """Map every canonical page URL and DOI in the corpus to its record id."""
    index: dict[str, str] = {}
    for rec in corpus.records.values():
        for ref in sorted(rec.identifiers()):
            index.setdefault(ref, rec.id)
    return index


def extract_explicit(corpus: Corpus) -> MarkupResult:
    index = identifier_index(corpus)
    seen: dict[tuple, RelationshipEdge] = {}
    result = MarkupResult(edges=[])
    for rec in corpus.records.values():
        for refs, label in ((rec.same_as, Label(Relation.REPLICA)),
                            (rec.is_based_on, Label(Relation.DERIVED, 1))):
            for ref in refs:
                target = index.get(ref)
                if target is None:
                    result.dangling += 1
                    result.dangling_refs.append((rec.id, ref))
                    continue
                if target == rec.id:
                    result.self_references += 1
                    continue
                edge = RelationshipEdge.from_label(rec.id, target, label, Method.MARKUP)
                seen.setdefault((edge.src_id, edge.dst_id, edge.rel), edge)
    result.edges = [seen[k] for k in sorted(seen, key=lambda k: (k[0], k[1], k[2].value))]
    return result
