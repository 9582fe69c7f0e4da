"""Per-class precision/recall/F1, accuracy, and the method benchmark."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .classifier import predict_pairs
from .gbdt import GbdtModel
from .heuristics import classify_pair_heuristic
from .ingest import Corpus
from .markup import extract_explicit
from .model import (
    NO_RELATION,
    RELATIONS,
    Label,
    LabeledPair,
    Method,
    Relation,
    canonical_pair,
)

Pair = tuple[str, str]


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int
    predicted: int


@dataclass
class EvalReport:
    per_class: dict[Relation, ClassMetrics]
    accuracy: float
    confusion: np.ndarray  # rows gold, columns predicted, in RELATIONS order
    total: int
    direction_errors: int = 0
    method: str = ""

    def displayed_classes(self) -> list[Relation]:
        return [r for r in RELATIONS
                if self.per_class[r].support or self.per_class[r].predicted]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "accuracy": self.accuracy,
            "total": self.total,
            "direction_errors": self.direction_errors,
            "classes": [r.value for r in RELATIONS],
            "confusion": self.confusion.tolist(),
            "per_class": {
                r.value: {"precision": m.precision, "recall": m.recall, "f1": m.f1,
                          "support": m.support, "predicted": m.predicted}
                for r, m in self.per_class.items() if r in self.displayed_classes()
            },
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def evaluate(predictions: Mapping[Pair, Label], gold: Mapping[Pair, Label],
             method: str = "") -> EvalReport:
    """Score predicted labels against gold labels over the same pair set.

    Class membership uses the relation type only; wrong orientation on a
    correctly typed directional pair is counted in ``direction_errors``.
    """
    missing = sorted(set(gold) - set(predictions))
    extra = sorted(set(predictions) - set(gold))
    if missing or extra:
        raise ValueError(f"pair sets differ: {len(missing)} without prediction "
                         f"(e.g. {missing[:3]}), {len(extra)} not in gold (e.g. {extra[:3]})")
    index = {r: i for i, r in enumerate(RELATIONS)}
    cm = np.zeros((len(RELATIONS), len(RELATIONS)), dtype=np.int64)
    dir_err = 0
    for pair, g in gold.items():
        p = predictions[pair]
        cm[index[g.rel], index[p.rel]] += 1
        if g.rel is p.rel and g.rel.directional and g.direction != p.direction:
            dir_err += 1
    per_class = {}
    for r, i in index.items():
        tp = int(cm[i, i])
        support = int(cm[i].sum())
        predicted = int(cm[:, i].sum())
        prec = _safe_div(tp, predicted)
        rec = _safe_div(tp, support)
        per_class[r] = ClassMetrics(prec, rec, _safe_div(2 * prec * rec, prec + rec),
                                    support, predicted)
    total = int(cm.sum())
    return EvalReport(per_class, _safe_div(float(np.trace(cm)), total), cm, total,
                      dir_err, method)


def gold_map(pairs: Iterable[LabeledPair]) -> dict[Pair, Label]:
    out = {}
    for lp in pairs:
        lp = lp.canonical()
        out[(lp.a_id, lp.b_id)] = lp.gold
    return out


def predict_markup(corpus: Corpus, pairs: Sequence[Pair]) -> dict[Pair, Label]:
    found: dict[Pair, Label] = {}
    for e in extract_explicit(corpus).edges:
        key = canonical_pair(e.src_id, e.dst_id)
        # a pair with both sameAs and isBasedOn keeps the replica reading
        if key not in found or e.rel is Relation.REPLICA:
            found[key] = e.label_for(*key)
    return {p: found.get(p, NO_RELATION) for p in pairs}


def predict_heuristic(corpus: Corpus, pairs: Sequence[Pair]) -> dict[Pair, Label]:
    norm = corpus.normalized
    return {(a, b): classify_pair_heuristic(norm[a], norm[b]) for a, b in pairs}


def predict_gbdt(corpus: Corpus, pairs: Sequence[Pair], model: GbdtModel) -> dict[Pair, Label]:
    return dict(zip(pairs, predict_pairs(model, list(pairs), corpus.normalized)))


def run_benchmark(corpus: Corpus, gold: Iterable[LabeledPair],
                  methods: Sequence[str] = ("markup", "heuristic", "gbdt"),
                  model: Optional[GbdtModel] = None) -> dict[str, EvalReport]:
    truth = gold_map(gold)
    unknown = [p for p in truth if p[0] not in corpus or p[1] not in corpus]
    if unknown:
        raise ValueError(f"{len(unknown)} gold pairs reference ids absent from the corpus")
    pairs = sorted(truth)
    reports = {}
    for name in methods:
        m = Method(name)
        if m is Method.MARKUP:
            pred = predict_markup(corpus, pairs)
        elif m is Method.HEURISTIC:
            pred = predict_heuristic(corpus, pairs)
        else:
            if model is None:
                raise ValueError("the gbdt method needs a trained model")
            pred = predict_gbdt(corpus, pairs, model)
        reports[name] = evaluate(pred, truth, method=name)
    return reports


def comparison_table(reports: Mapping[str, EvalReport]) -> str:
    """Aligned text table: one row per relation, P/R/F1 per method, then accuracy."""
    names = list(reports)
    header = f"{'Relationship':<13}" + "".join(f"| {n:^20} " for n in names)
    sub = f"{'':<13}" + "".join(f"| {'P':>6}{'R':>7}{'F1':>7} " for _ in names)
    lines = [header, sub, "-" * len(sub)]
    for r in RELATIONS:
        cells = []
        for n in names:
            m = reports[n].per_class[r]
            if m.support == 0 and m.predicted == 0:
                cells.append(f"| {'N/A':>6}{'N/A':>7}{'N/A':>7} ")
            else:
                cells.append(f"| {m.precision:6.2f}{m.recall:7.2f}{m.f1:7.2f} ")
        lines.append(f"{r.title:<13}" + "".join(cells))
    lines.append("-" * len(sub))
    lines.append(f"{'Accuracy':<13}" + "".join(f"| {reports[n].accuracy:>20.3f} " for n in names))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Gold pair files
# --------------------------------------------------------------------------

_DIRECTION_TEXT = {1: "forward", -1: "reverse", 0: "none"}
_DIRECTION_CODE = {v: k for k, v in _DIRECTION_TEXT.items()}


def gold_to_tsv(pairs: Iterable[LabeledPair]) -> str:
    """``forward`` means id_a is the subset/derived side, ``reverse`` means id_b is."""
    lines = ["id_a\tid_b\tlabel\tdirection"]
    for lp in sorted((p.canonical() for p in pairs), key=lambda p: (p.a_id, p.b_id)):
        lines.append(f"{lp.a_id}\t{lp.b_id}\t{lp.gold.rel.value}\t"
                     f"{_DIRECTION_TEXT[lp.gold.direction]}")
    return "\n".join(lines) + "\n"


def read_gold(path: str) -> list[LabeledPair]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.rstrip("\n")
            if not line or (i == 0 and line.startswith("id_a\t")):
                continue
            cols = line.split("\t")
            if len(cols) < 3:
                raise ValueError(f"{path}:{i + 1}: expected at least 3 columns")
            rel = Relation(cols[2].strip().lower())
            direction = _DIRECTION_CODE[cols[3].strip()] if len(cols) > 3 and cols[3] else 0
            out.append(LabeledPair(cols[0], cols[1], Label.of(rel, direction)))
    return out
