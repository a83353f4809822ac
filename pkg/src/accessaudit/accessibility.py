"""Per-document accessibility scores.

For each document d::

    A(d) = sum over queries q of  o_q * f(rank of d in R_q)

where ``f`` is either the cumulative cutoff (1 if rank <= c, else 0) or
the gravity decay ``1 / rank**beta``. Documents outside the top ``depth``
of a ranking contribute nothing for that query.
"""

from __future__ import annotations

import csv
import json
import logging
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from accessaudit.errors import InputError, InvariantError
from accessaudit.ranking import Scorer

log = logging.getLogger(__name__)

MEASURES = ("cumulative", "gravity")
SCORES_FILE = "scores.csv"
METADATA_FILE = "metadata.json"


def f_cumulative(rank: int, c: int) -> int:
    return 1 if rank <= c else 0


def f_gravity(rank: int, beta: float) -> float:
    return 1.0 / rank**beta


@dataclass(frozen=True)
class MeasureConfig:
    kind: str = "gravity"
    c: int = 10
    beta: float = 1.0
    depth: int = 100

    def __post_init__(self):
        if self.kind not in MEASURES:
            raise InputError(f"unknown measure {self.kind!r}; expected one of {MEASURES}")
        if self.depth < 1:
            raise InputError(f"depth must be >= 1, got {self.depth}")
        if self.kind == "cumulative" and not 1 <= self.c <= self.depth:
            raise InputError(f"cutoff c must satisfy 1 <= c <= depth ({self.depth}), got {self.c}")
        if self.kind == "gravity" and not self.beta >= 0:
            raise InputError(f"beta must be >= 0, got {self.beta}")

    def describe(self) -> dict:
        out = {"kind": self.kind, "depth": self.depth}
        if self.kind == "cumulative":
            out["c"] = self.c
        else:
            out["beta"] = self.beta
        return out

    def cost_table(self) -> np.ndarray:
        """f evaluated at ranks 1..depth."""
        ranks = range(1, self.depth + 1)
        if self.kind == "cumulative":
            return np.array([float(f_cumulative(r, self.c)) for r in ranks])
        return np.array([f_gravity(r, self.beta) for r in ranks])


@dataclass
class AccessVector:
    scores: np.ndarray
    doc_ids: list
    measure: MeasureConfig
    universe_size: int
    model: dict
    checksum: str = ""
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.scores)

    def as_dict(self) -> dict:
        return dict(zip(self.doc_ids, self.scores.tolist()))


def query_contributions(ranked, likelihood: float, measure: MeasureConfig):
    """(doc ordinals, o_q * f(rank)) for one ranked list."""
    table = measure.cost_table()
    return ranked.doc_ords, likelihood * table[: len(ranked)]


# Worker-process state, installed once per process by _init_worker.
_STATE = {}


def _init_worker(scorer, term_lists, depth):
    _STATE["scorer"] = scorer
    _STATE["terms"] = term_lists
    _STATE["depth"] = depth


def _evaluate(bounds):
    lo, hi = bounds
    scorer, terms, depth = _STATE["scorer"], _STATE["terms"], _STATE["depth"]
    return [scorer.topk(terms[i], depth, i).doc_ords for i in range(lo, hi)]


def _chunks(n, parts):
    step = max(1, -(-n // parts))
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def retrieve_all(scorer, universe, depth: int, workers: int = 1):
    """Top-``depth`` doc ordinals for every query, in query order."""
    term_lists = [q.terms for q in universe.queries]
    n = len(term_lists)
    if workers <= 1 or n < 2:
        _init_worker(scorer, term_lists, depth)
        try:
            return _evaluate((0, n))
        finally:
            _STATE.clear()
    chunks = _chunks(n, workers * 4)
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(
        max_workers=workers,
        mp_context=ctx,
        initializer=_init_worker,
        initargs=(scorer, term_lists, depth),
    ) as pool:
        results = []
        for part in pool.map(_evaluate, chunks):
            results.extend(part)
    return results


def accumulate_scores(index, model, universe, measure: MeasureConfig, workers: int = 1) -> AccessVector:
    """Accessibility of every document in ``index`` over ``universe``.

    Likelihoods are used as given (no normalization here). Rankings may be
    computed by several worker processes, but contributions are always
    folded in ascending query order, so the result is bit-identical for
    any worker count.
    """
    if len(universe) == 0:
        raise InputError("empty universe")
    if workers < 1:
        raise InputError(f"workers must be >= 1, got {workers}")
    scorer = Scorer(index, model)
    rankings = retrieve_all(scorer, universe, measure.depth, workers)
    if len(rankings) != len(universe):
        raise InvariantError("lost rankings during parallel evaluation")

    table = measure.cost_table()
    likelihoods = universe.likelihoods
    ords = np.concatenate(rankings) if rankings else np.zeros(0, np.int64)
    contrib = np.concatenate(
        [o_q * table[: len(r)] for o_q, r in zip(likelihoods, rankings)]
    ) if rankings else np.zeros(0)
    # bincount sums each bin sequentially in input (= query) order.
    scores = np.bincount(ords, weights=contrib, minlength=index.n_docs).astype(np.float64)
    if len(scores) != index.n_docs or (scores < 0).any():
        raise InvariantError("accessibility scores violate length/non-negativity")
    return AccessVector(
        scores=scores,
        doc_ids=list(index.doc_ids),
        measure=measure,
        universe_size=len(universe),
        model=model.describe(),
        checksum=index.checksum,
        meta={"retrieved_pairs": int(len(ords))},
    )


def format_score(x: float) -> str:
    return format(x, ".12g")


def write_run(vector: AccessVector, out_dir, metadata: dict) -> None:
    """Write ``scores.csv`` and ``metadata.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / SCORES_FILE, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "score"])
        for doc_id, s in zip(vector.doc_ids, vector.scores.tolist()):
            writer.writerow([doc_id, format_score(s)])
    with open(out_dir / METADATA_FILE, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(metadata, fh, indent=2)
        fh.write("\n")


def read_run(run_dir) -> AccessVector:
    """Load a run written by :func:`write_run`."""
    run_dir = Path(run_dir)
    scores_path, meta_path = run_dir / SCORES_FILE, run_dir / METADATA_FILE
    for p in (scores_path, meta_path):
        if not p.is_file():
            raise InputError(f"missing run file: {p}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{meta_path}: malformed JSON ({exc.msg})") from None
    doc_ids, scores = [], []
    with open(scores_path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["doc_id", "score"]:
            raise InputError(f"{scores_path}: expected header 'doc_id,score'")
        for lineno, row in enumerate(reader, 2):
            try:
                doc_id, value = row
                scores.append(float(value))
            except ValueError:
                raise InputError(f"{scores_path}:{lineno}: malformed row") from None
            doc_ids.append(doc_id)
    m = meta.get("measure", {})
    try:
        measure = MeasureConfig(
            kind=m.get("kind", "gravity"),
            c=m.get("c", m.get("depth", 100)),
            beta=m.get("beta", 1.0),
            depth=m.get("depth", 100),
        )
    except TypeError:
        raise InputError(f"{meta_path}: malformed measure block") from None
    return AccessVector(
        scores=np.array(scores, dtype=np.float64),
        doc_ids=doc_ids,
        measure=measure,
        universe_size=meta.get("universe_size", 0),
        model=meta.get("model", {}),
        checksum=meta.get("corpus_checksum", ""),
        meta=meta,
    )


def run_metadata(vector: AccessVector, universe, raw_likelihood_sum: float, config: dict) -> dict:
    return {
        "measure": vector.measure.describe(),
        "model": vector.model,
        "universe_size": vector.universe_size,
        "universe": dict(universe.meta),
        "truncated": bool(universe.meta.get("truncated", False)),
        "raw_likelihood_sum": raw_likelihood_sum,
        "normalized": universe.normalized,
        "corpus_checksum": vector.checksum,
        "n_docs": len(vector),
        "config": config,
    }
