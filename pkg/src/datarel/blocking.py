"""Candidate-pair generation by exact cosine kNN over hashed character n-grams."""

from __future__ import annotations

import hashlib
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .ingest import Corpus
from .model import NormalizedRecord

# cosines are compared at this resolution so that independent summation
# orders rank exact ties identically
COSINE_DECIMALS = 10


@dataclass(frozen=True)
class VectorizerConfig:
    ngram_min: int = 3
    ngram_max: int = 5
    hash_bits: int = 20

    @property
    def dim(self) -> int:
        return 1 << self.hash_bits

    def digest(self) -> str:
        text = f"char-ngram-tfidf:{self.ngram_min}-{self.ngram_max}:crc32:{self.hash_bits}"
        return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class SparseVector:
    indices: np.ndarray
    weights: np.ndarray
    empty: bool = False

    def dot(self, other: "SparseVector") -> float:
        common, ia, ib = np.intersect1d(self.indices, other.indices,
                                        assume_unique=True, return_indices=True)
        return float(np.dot(self.weights[ia], other.weights[ib]))


@dataclass
class CandidatePairSet:
    pairs: list[tuple[str, str]]
    k: int
    config_hash: str
    cosine: dict[tuple[str, str], float] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def to_tsv(self) -> str:
        lines = ["id_a\tid_b\tcosine"]
        for a, b in self.pairs:
            lines.append(f"{a}\t{b}\t{self.cosine.get((a, b), 0.0):.6f}")
        return "\n".join(lines) + "\n"


def record_text(rec: NormalizedRecord) -> str:
    return f"{rec.norm_name} {rec.norm_description}".strip()


def ngram_counts(text: str, config: VectorizerConfig = VectorizerConfig()) -> dict[int, int]:
    counts: dict[int, int] = {}
    mask = config.dim - 1
    # n-grams are taken over characters, hashed over their UTF-8 bytes
    for n in range(config.ngram_min, config.ngram_max + 1):
        for i in range(len(text) - n + 1):
            h = zlib.crc32(text[i:i + n].encode("utf-8")) & mask
            counts[h] = counts.get(h, 0) + 1
    return counts


@dataclass
class IdfTable:
    n_docs: int
    df: dict[int, int]

    def idf(self, index: int) -> float:
        return math.log((self.n_docs + 1) / (self.df.get(index, 0) + 1)) + 1.0


def fit_idf(records: Sequence[NormalizedRecord],
            config: VectorizerConfig = VectorizerConfig()) -> IdfTable:
    df: dict[int, int] = {}
    for rec in records:
        for idx in ngram_counts(record_text(rec), config):
            df[idx] = df.get(idx, 0) + 1
    return IdfTable(len(records), df)


def vectorize(rec: NormalizedRecord, idf: IdfTable,
              config: VectorizerConfig = VectorizerConfig()) -> SparseVector:
    counts = ngram_counts(record_text(rec), config)
    if not counts:
        return SparseVector(np.zeros(0, np.int64), np.zeros(0), empty=True)
    idx = np.array(sorted(counts), dtype=np.int64)
    w = np.array([counts[i] * idf.idf(i) for i in idx.tolist()])
    w /= np.linalg.norm(w)
    return SparseVector(idx, w)


def vectorize_corpus(corpus: Corpus, config: VectorizerConfig = VectorizerConfig()):
    """Return (ids, CSR matrix of L2-normalized rows) in canonical id order."""
    ids = corpus.ids()
    recs = [corpus.normalized[i] for i in ids]
    all_counts = [ngram_counts(record_text(r), config) for r in recs]
    df: dict[int, int] = {}
    for counts in all_counts:
        for idx in counts:
            df[idx] = df.get(idx, 0) + 1
    idf = IdfTable(len(recs), df)
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for counts in all_counts:
        cols = sorted(counts)
        w = np.array([counts[c] * idf.idf(c) for c in cols])
        if len(w):
            w /= np.linalg.norm(w)
        indices.extend(cols)
        data.extend(w.tolist())
        indptr.append(len(indices))
    X = sp.csr_matrix((np.array(data), np.array(indices, dtype=np.int64), np.array(indptr)),
                      shape=(len(ids), config.dim))
    return ids, X


def _top_k(s: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest entries of s, ties by ascending index."""
    if k >= len(s):
        cand = np.arange(len(s))
    else:
        kth = np.partition(s, len(s) - k)[len(s) - k]
        cand = np.flatnonzero(s >= kth)
    order = np.lexsort((cand, -s[cand]))
    return cand[order[:k]]


def knn_candidates(corpus: Corpus, k: int = 20,
                   config: VectorizerConfig = VectorizerConfig(),
                   threads: Optional[int] = None, chunk: int = 512) -> CandidatePairSet:
    """Union of every record's k nearest neighbours by cosine, canonically ordered.

    Exact search: similarities come from sparse row-block products, and
    columns are in id order so ascending index breaks ties by id.
    """
    ids, X = vectorize_corpus(corpus, config)
    n = len(ids)
    result = CandidatePairSet([], k, config.digest())
    if n < 2:
        return result
    kk = min(k, n - 1)
    XT = X.T.tocsc()

    def block(start: int):
        sims = (X[start:start + chunk] @ XT).toarray()
        found = []
        for r in range(sims.shape[0]):
            i = start + r
            s = np.round(sims[r], COSINE_DECIMALS)
            s[i] = -np.inf
            for j in _top_k(s, kk).tolist():
                found.append((i, j, float(np.clip(sims[r, j], 0.0, 1.0))))
        return found

    starts = range(0, n, chunk)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(block, starts))
    else:
        blocks = [block(s) for s in starts]

    cos: dict[tuple[str, str], float] = {}
    for found in blocks:
        for i, j, c in found:
            key = (ids[i], ids[j]) if i < j else (ids[j], ids[i])
            cos.setdefault(key, round(c, COSINE_DECIMALS))
    result.pairs = sorted(cos)
    result.cosine = cos
    return result
