"""In-memory inverted index and collection statistics."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from accessaudit.errors import InputError

SNAPSHOT_FORMAT = "accessaudit-index"
SNAPSHOT_VERSION = 1


@dataclass(frozen=True)
class PostingList:
    term: str
    entries: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class CollectionStats:
    n_docs: int
    avg_doc_length: float
    df: dict
    cf: dict


class InvertedIndex:
    """Term -> postings, stored as flat CSR-style arrays.

    Postings of the term with id ``t`` live in
    ``doc_ords[indptr[t]:indptr[t + 1]]`` (ascending) with matching
    ``tfs``. The structure is never mutated after construction.
    """

    def __init__(self, doc_ids, doc_lengths, vocabulary, indptr, doc_ords, tfs, checksum=""):
        self.doc_ids = list(doc_ids)
        self.doc_lengths = np.asarray(doc_lengths, dtype=np.int64)
        self.vocabulary = list(vocabulary)
        self.term_ids = {t: i for i, t in enumerate(self.vocabulary)}
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.doc_ords = np.asarray(doc_ords, dtype=np.int64)
        self.tfs = np.asarray(tfs, dtype=np.int64)
        self.checksum = checksum
        self._stats = None

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def __contains__(self, term) -> bool:
        return term in self.term_ids

    def span(self, term):
        """(doc ordinals, tfs) array views for ``term``; empty if unknown."""
        t = self.term_ids.get(term)
        if t is None:
            return self.doc_ords[:0], self.tfs[:0]
        lo, hi = self.indptr[t], self.indptr[t + 1]
        return self.doc_ords[lo:hi], self.tfs[lo:hi]

    def postings(self, term) -> PostingList:
        ords, tfs = self.span(term)
        return PostingList(term, tuple(zip(ords.tolist(), tfs.tolist())))

    def df(self, term) -> int:
        t = self.term_ids.get(term)
        return 0 if t is None else int(self.indptr[t + 1] - self.indptr[t])

    def cf(self, term) -> int:
        return int(self.span(term)[1].sum())

    @property
    def stats(self) -> CollectionStats:
        if self._stats is None:
            dfs = np.diff(self.indptr)
            cfs = np.add.reduceat(self.tfs, self.indptr[:-1]) if len(self.tfs) else np.zeros(0, np.int64)
            n = self.n_docs
            self._stats = CollectionStats(
                n_docs=n,
                avg_doc_length=float(self.doc_lengths.sum()) / n if n else 0.0,
                df=dict(zip(self.vocabulary, dfs.tolist())),
                cf=dict(zip(self.vocabulary, cfs.tolist())),
            )
        return self._stats

    def save(self, path) -> None:
        header = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "checksum": self.checksum,
            "doc_ids": self.doc_ids,
            "vocabulary": self.vocabulary,
        }
        with open(path, "wb") as fh:
            np.savez_compressed(
                fh,
                header=np.frombuffer(json.dumps(header).encode("utf-8"), dtype=np.uint8),
                doc_lengths=self.doc_lengths,
                indptr=self.indptr,
                doc_ords=self.doc_ords,
                tfs=self.tfs,
            )

    @classmethod
    def load(cls, path) -> "InvertedIndex":
        path = Path(path)
        if not path.is_file():
            raise InputError(f"no such index snapshot: {path}")
        try:
            with np.load(path, allow_pickle=False) as data:
                header = json.loads(data["header"].tobytes().decode("utf-8"))
                arrays = {k: data[k] for k in ("doc_lengths", "indptr", "doc_ords", "tfs")}
        except (OSError, ValueError, KeyError) as exc:
            raise InputError(f"{path}: not a readable index snapshot ({exc})") from None
        if header.get("format") != SNAPSHOT_FORMAT or header.get("version") != SNAPSHOT_VERSION:
            raise InputError(f"{path}: unsupported snapshot format/version")
        return cls(
            header["doc_ids"],
            arrays["doc_lengths"],
            header["vocabulary"],
            arrays["indptr"],
            arrays["doc_ords"],
            arrays["tfs"],
            checksum=header["checksum"],
        )


def build_index(collection) -> InvertedIndex:
    """Index every (term, document) pair of ``collection``.

    Terms are numbered in order of first occurrence, so the layout is a
    pure function of the collection.
    """
    if len(collection) == 0:
        raise InputError("empty collection")
    term_ids = {}
    per_term = []  # term id -> [(ordinal, tf), ...]
    for ordinal, doc in enumerate(collection):
        for term, tf in Counter(doc.tokens).items():
            t = term_ids.get(term)
            if t is None:
                t = term_ids[term] = len(per_term)
                per_term.append([])
            per_term[t].append((ordinal, tf))

    indptr = np.zeros(len(per_term) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(p) for p in per_term])
    flat = [pair for plist in per_term for pair in plist]
    pairs = np.array(flat, dtype=np.int64).reshape(-1, 2)
    return InvertedIndex(
        [d.doc_id for d in collection],
        [d.length for d in collection],
        list(term_ids),
        indptr,
        pairs[:, 0],
        pairs[:, 1],
        checksum=collection.checksum(),
    )
