"""Distribution, inequality and comparison statistics over access scores."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import stats as sps

from accessaudit.accessibility import format_score
from accessaudit.errors import InputError

QUANTILES = (10, 20, 30, 40, 50, 60, 70, 80, 90)


def gini(scores) -> float:
    """Gini coefficient of non-negative scores, 0.0 when all are zero.

    Uses the sorted-rank form ``sum_i (2i - n - 1) x_(i) / (n sum x)``,
    summed exactly with ``math.fsum`` so that equal scores give exactly 0.
    """
    x = np.sort(np.asarray(scores, dtype=np.float64))
    n = len(x)
    if n == 0:
        raise InputError("gini of an empty vector")
    total = math.fsum(x.tolist())
    if total <= 0:
        return 0.0
    weights = 2 * np.arange(1, n + 1, dtype=np.float64) - n - 1
    g = math.fsum((weights * x).tolist()) / (n * total)
    return min(max(g, 0.0), 1.0)


def lorenz_curve(scores) -> list[tuple[float, float]]:
    """(population share, score share) points from (0, 0) to (1, 1).

    With zero total mass the curve is the equality diagonal.
    """
    x = np.sort(np.asarray(scores, dtype=np.float64))
    n = len(x)
    pop = np.arange(n + 1, dtype=np.float64) / n
    total = float(x.sum())
    if total <= 0:
        share = pop.copy()
    else:
        share = np.concatenate(([0.0], np.cumsum(x) / total))
        share = np.minimum(np.maximum.accumulate(share), 1.0)
        share[-1] = 1.0
    return list(zip(pop.tolist(), share.tolist()))


@dataclass
class DistributionReport:
    n: int
    mean: float
    median: float
    min: float
    max: float
    std: float
    quantiles: dict
    gini: float
    zero_count: int
    lorenz: list

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("lorenz")
        out["gini_note"] = "artifact-level inequality statistic over document accessibility scores"
        return out


def summarize(vector) -> DistributionReport:
    """Summary statistics for an AccessVector (or a plain score array)."""
    x = np.asarray(getattr(vector, "scores", vector), dtype=np.float64)
    if len(x) == 0:
        raise InputError("cannot summarize an empty score vector")
    xs = np.sort(x)
    return DistributionReport(
        n=len(x),
        mean=math.fsum(xs.tolist()) / len(x),
        median=float(np.median(xs)),
        min=float(xs[0]),
        max=float(xs[-1]),
        std=float(np.std(xs)),
        quantiles={f"p{q}": float(np.percentile(xs, q)) for q in QUANTILES},
        gini=gini(xs),
        zero_count=int(np.count_nonzero(xs == 0)),
        lorenz=lorenz_curve(xs),
    )


@dataclass
class GroupComparison:
    labels: list
    sizes: dict
    means: dict
    medians: dict
    # "a/b" -> mean(a) / mean(b); None when mean(b) is 0.
    mean_ratios: dict

    def to_json(self) -> dict:
        return asdict(self)


def compare_groups(vector, groups: dict) -> GroupComparison:
    if not groups:
        raise InputError("no groups given")
    index = {d: i for i, d in enumerate(vector.doc_ids)}
    owner = {}
    means, medians, sizes = {}, {}, {}
    for label, ids in groups.items():
        ids = list(ids)
        if not ids:
            raise InputError(f"group {label!r} is empty")
        for doc_id in ids:
            if doc_id not in index:
                raise InputError(f"group {label!r} lists unknown doc_id {doc_id!r}")
            if doc_id in owner and owner[doc_id] != label:
                raise InputError(f"doc_id {doc_id!r} is in both {owner[doc_id]!r} and {label!r}")
            owner[doc_id] = label
        x = vector.scores[sorted({index[d] for d in ids})]
        sizes[label] = len(x)
        means[label] = math.fsum(x.tolist()) / len(x)
        medians[label] = float(np.median(x))
    labels = list(groups)
    ratios = {}
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            ratios[f"{a}/{b}"] = means[a] / means[b] if means[b] > 0 else None
    return GroupComparison(labels, sizes, means, medians, ratios)


def kendall_tau_b(a, b) -> float:
    """Tie-adjusted Kendall tau; NaN when either input is constant."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) < 2 or np.all(a == a[0]) or np.all(b == b[0]):
        return math.nan
    return float(sps.kendalltau(a, b, variant="b").statistic)


@dataclass
class RunComparison:
    doc_ids: list
    scores_a: np.ndarray
    scores_b: np.ndarray
    deltas: np.ndarray
    tau: float

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["doc_id", "score_a", "score_b", "delta"])
            for row in zip(self.doc_ids, self.scores_a.tolist(), self.scores_b.tolist(), self.deltas.tolist()):
                writer.writerow([row[0], *map(format_score, row[1:])])


def compare_runs(vector_a, vector_b) -> RunComparison:
    """Per-document ``b - a`` deltas and Kendall tau-b of the two orderings."""
    if vector_a.checksum != vector_b.checksum or vector_a.doc_ids != vector_b.doc_ids:
        raise InputError("runs were computed over different corpora (checksum mismatch)")
    deltas = vector_b.scores - vector_a.scores
    return RunComparison(
        list(vector_a.doc_ids),
        vector_a.scores,
        vector_b.scores,
        deltas,
        kendall_tau_b(vector_a.scores, vector_b.scores),
    )


def write_lorenz_csv(points, path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pop_share", "score_share"])
        for p, s in points:
            writer.writerow([repr(p), repr(s)])
