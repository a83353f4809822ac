"""TF-IDF and BM25 ranking over an :class:`~accessaudit.index.InvertedIndex`.

A document's score is a sum over query-term occurrences of a per-term
weight. Documents matching no query term are not ranked at all.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from accessaudit.errors import InputError

MODELS = ("tfidf", "bm25")


@dataclass(frozen=True)
class RankingModel:
    kind: str = "bm25"
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.kind not in MODELS:
            raise InputError(f"unknown ranking model {self.kind!r}; expected one of {MODELS}")
        if not self.k1 >= 0:
            raise InputError(f"k1 must be >= 0, got {self.k1}")
        if not 0 <= self.b <= 1:
            raise InputError(f"b must lie in [0, 1], got {self.b}")

    def describe(self) -> dict:
        if self.kind == "tfidf":
            return {"kind": "tfidf"}
        return asdict(self)


@dataclass(frozen=True)
class RankedList:
    """Top-``depth`` documents for one query; rank of entry i is i + 1."""

    query_ordinal: int
    doc_ords: np.ndarray
    scores: np.ndarray
    depth: int

    def __len__(self):
        return len(self.doc_ords)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.doc_ords.tolist(), self.scores.tolist()))

    def rank_of(self, ordinal: int):
        """1-based rank of a document, or None when it was not retrieved."""
        hits = np.flatnonzero(self.doc_ords == ordinal)
        return int(hits[0]) + 1 if len(hits) else None


def idf(model: RankingModel, df: int, n_docs: int) -> float:
    if model.kind == "tfidf":
        return math.log(1 + n_docs / df)
    return math.log(1 + (n_docs - df + 0.5) / (df + 0.5))


def term_weight(model: RankingModel, tf, term_idf, doc_len, avg_len):
    """Contribution of one query term to one document's score.

    Works elementwise on numpy arrays with the same operation order as on
    Python floats, so batch and scalar paths agree bit for bit.
    """
    if model.kind == "tfidf":
        return tf * term_idf
    k1, b = model.k1, model.b
    return term_idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * doc_len / avg_len))


def score(model: RankingModel, query_terms, ordinal: int, index) -> float:
    """Score of a single document; 0.0 if it contains no query term."""
    stats = index.stats
    doc_len = int(index.doc_lengths[ordinal])
    total = 0.0
    for term in query_terms:
        ords, tfs = index.span(term)
        pos = np.searchsorted(ords, ordinal)
        if pos == len(ords) or ords[pos] != ordinal:
            continue
        term_idf = idf(model, len(ords), stats.n_docs)
        total += term_weight(model, float(tfs[pos]), term_idf, doc_len, stats.avg_doc_length)
    return total


class Scorer:
    """Precomputed term weights for every posting under one model.

    Built once per (index, model) and shared read-only by all queries.
    """

    def __init__(self, index, model: RankingModel):
        self.index = index
        self.model = model
        stats = index.stats
        dfs = np.diff(index.indptr)
        idfs = np.array([idf(model, int(df), stats.n_docs) for df in dfs], dtype=np.float64)
        term_idf = np.repeat(idfs, dfs)
        tf = index.tfs.astype(np.float64)
        doc_len = index.doc_lengths[index.doc_ords].astype(np.float64)
        avg_len = stats.avg_doc_length if stats.avg_doc_length > 0 else 1.0
        self.weights = term_weight(model, tf, term_idf, doc_len, avg_len)

    def _span(self, term):
        t = self.index.term_ids.get(term)
        if t is None:
            return None
        lo, hi = self.index.indptr[t], self.index.indptr[t + 1]
        return self.index.doc_ords[lo:hi], self.weights[lo:hi]

    def match(self, query_terms):
        """Matching doc ordinals (ascending) and their summed scores."""
        spans = [s for s in map(self._span, query_terms) if s is not None]
        if not spans:
            return np.zeros(0, np.int64), np.zeros(0, np.float64)
        if len(spans) == 1:
            return spans[0]
        ords = np.concatenate([s[0] for s in spans])
        weights = np.concatenate([s[1] for s in spans])
        cand, inverse = np.unique(ords, return_inverse=True)
        # bincount adds in input order, i.e. query-term order.
        return cand, np.bincount(inverse, weights=weights, minlength=len(cand))

    def topk(self, query_terms, depth: int, query_ordinal: int = 0) -> RankedList:
        cand, scores = self.match(query_terms)
        # Primary key: descending score; ties by ascending ordinal.
        order = np.lexsort((cand, -scores))[:depth]
        return RankedList(query_ordinal, cand[order], scores[order], depth)


def retrieve_topk(model: RankingModel, query_terms, index, depth: int, query_ordinal: int = 0) -> RankedList:
    if depth < 1:
        raise InputError(f"depth must be >= 1, got {depth}")
    return Scorer(index, model).topk(query_terms, depth, query_ordinal)
