"""Corpus-derived query universes with query likelihoods.

No query log is assumed. The universe is the enumerated set of corpus
unigrams (and optionally adjacent bigrams), each carrying a likelihood.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from accessaudit.errors import InputError

WEIGHTINGS = ("uniform", "cf-proportional", "bigram-freq")


@dataclass(frozen=True)
class Query:
    terms: tuple[str, ...]
    likelihood: float

    @property
    def text(self) -> str:
        return " ".join(self.terms)


@dataclass(frozen=True)
class QueryUniverse:
    queries: tuple[Query, ...]
    normalized: bool
    # Generation provenance, echoed into audit metadata.
    meta: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.queries)

    def __iter__(self):
        return iter(self.queries)

    @property
    def likelihoods(self) -> list[float]:
        return [q.likelihood for q in self.queries]

    def total_likelihood(self) -> float:
        return math.fsum(self.likelihoods)

    def normalize(self) -> "QueryUniverse":
        total = self.total_likelihood()
        if total <= 0:
            raise InputError("cannot normalize a universe with zero total likelihood")
        queries = tuple(Query(q.terms, q.likelihood / total) for q in self.queries)
        return QueryUniverse(queries, True, dict(self.meta))

    def scaled(self, factor: float) -> "QueryUniverse":
        queries = tuple(Query(q.terms, q.likelihood * factor) for q in self.queries)
        return QueryUniverse(queries, False, dict(self.meta))


def check_vocabulary(universe: QueryUniverse, index) -> None:
    """Reject queries using terms the index has never seen."""
    for i, q in enumerate(universe.queries):
        for term in q.terms:
            if term not in index:
                raise InputError(f"query {i} ({q.text!r}) uses term {term!r} absent from the index")


def generate_universe(
    collection,
    index,
    max_len: int = 1,
    min_df: int = 1,
    weighting: str = "cf-proportional",
    max_queries: Optional[int] = None,
) -> QueryUniverse:
    """Enumerate unigram (and, for ``max_len=2``, bigram) queries.

    Unigrams are indexed terms with ``df >= min_df``; bigrams are adjacent
    token pairs contained in at least ``min_df`` documents. Raw weights:

    * ``uniform``: 1 per query.
    * ``cf-proportional``: corpus occurrence count of the n-gram.
    * ``bigram-freq``: occurrence count normalized within each query
      length, so unigrams and bigrams carry equal total mass.

    The ``max_queries`` heaviest queries are kept (ties broken by term
    order) and the result is normalized to sum to one.
    """
    if max_len not in (1, 2):
        raise InputError(f"max_len must be 1 or 2, got {max_len}")
    if min_df < 1:
        raise InputError(f"min_df must be >= 1, got {min_df}")
    if weighting not in WEIGHTINGS:
        raise InputError(f"unknown weighting {weighting!r}; expected one of {WEIGHTINGS}")
    if max_queries is not None and max_queries < 1:
        raise InputError(f"max_queries must be >= 1, got {max_queries}")
    if not index.vocabulary:
        raise InputError("empty vocabulary")

    stats = index.stats
    counts = {}  # term tuple -> corpus count
    for term in index.vocabulary:
        if stats.df[term] >= min_df:
            counts[(term,)] = stats.cf[term]
    if max_len == 2:
        pair_cf = Counter()
        pair_df = Counter()
        for doc in collection:
            pairs = Counter(zip(doc.tokens, doc.tokens[1:]))
            pair_cf.update(pairs)
            pair_df.update(pairs.keys())
        for pair, n in pair_df.items():
            if n >= min_df:
                counts[pair] = pair_cf[pair]
    if not counts:
        raise InputError("empty universe")

    if weighting == "uniform":
        raw = {q: 1.0 for q in counts}
    elif weighting == "cf-proportional":
        raw = {q: float(n) for q, n in counts.items()}
    else:
        by_len = Counter()
        for q, n in counts.items():
            by_len[len(q)] += n
        raw = {q: n / by_len[len(q)] for q, n in counts.items()}

    candidates = sorted(raw, key=lambda q: (-raw[q], q))
    truncated = max_queries is not None and len(candidates) > max_queries
    if truncated:
        candidates = candidates[:max_queries]
    total = math.fsum(raw[q] for q in candidates)
    queries = tuple(Query(q, raw[q] / total) for q in candidates)
    meta = {
        "max_len": max_len,
        "min_df": min_df,
        "weighting": weighting,
        "max_queries": max_queries,
        "candidates": len(raw),
        "truncated": truncated,
    }
    return QueryUniverse(queries, True, meta)


def save_universe(universe: QueryUniverse, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in universe.meta.items():
            fh.write(f"# {key}={value}\n")
        for q in universe.queries:
            fh.write(f"{q.text}\t{q.likelihood!r}\n")


def _parse_meta_value(value: str):
    if value in ("True", "False"):
        return value == "True"
    if value == "None":
        return None
    try:
        return int(value)
    except ValueError:
        return value


def load_universe(path) -> QueryUniverse:
    """Read a universe TSV (``term[ term...]<TAB>likelihood`` per line).

    ``# key=value`` comment lines are kept as provenance metadata; other
    comments are ignored.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such universe file: {path}")
    queries = []
    meta = {}
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if sep and key and " " not in key:
                    meta[key] = _parse_meta_value(value)
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'terms<TAB>likelihood'")
            terms = tuple(parts[0].split())
            if not terms:
                raise InputError(f"{path}:{lineno}: query has no terms")
            try:
                likelihood = float(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: unparseable likelihood {parts[1]!r}") from None
            if not math.isfinite(likelihood) or likelihood < 0:
                raise InputError(f"{path}:{lineno}: likelihood must be finite and >= 0")
            if terms in seen:
                raise InputError(f"{path}:{lineno}: duplicate query {parts[0]!r}")
            seen.add(terms)
            queries.append(Query(terms, likelihood))
    if not queries:
        raise InputError("empty universe")
    total = math.fsum(q.likelihood for q in queries)
    return QueryUniverse(tuple(queries), abs(total - 1.0) <= 1e-9, meta)
