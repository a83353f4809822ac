"""Acceptance criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py`` to get a PASS/FAIL line per
criterion in the terminal summary.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from accessaudit import (
    Collection,
    MeasureConfig,
    RankingModel,
    accumulate_scores,
    build_index,
    generate_universe,
)
from accessaudit.accessibility import f_gravity, query_contributions
from accessaudit.analysis import gini
from accessaudit.cli import main
from accessaudit.query_universe import Query, QueryUniverse
from accessaudit.ranking import RankedList, Scorer

from oracle import (
    brute_access,
    exhaustive_universe,
    gini_pairwise_np,
    random_corpus,
    reciprocal_rank,
    zipf_corpus,
)

GOLDEN = Path(__file__).parent / "golden"
MODELS = [RankingModel("tfidf"), RankingModel("bm25")]


def _build(docs):
    collection = Collection.from_texts(docs)
    return collection, build_index(collection)


@pytest.fixture(scope="module")
def corpus_100():
    return _build(zipf_corpus(np.random.default_rng(100), 100, 300, 5, 60))


@pytest.fixture(scope="module")
def corpus_1000():
    collection, index = _build(zipf_corpus(np.random.default_rng(1000), 1000, 3000, 20, 150))
    universe = generate_universe(collection, index, max_len=2, max_queries=4000)
    return collection, index, universe


@pytest.mark.criterion(1, "oracle equivalence with brute-force triple loop (1e-12 abs, < 5 s)")
def test_ac1_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    measures = [
        MeasureConfig("cumulative", c=3, depth=8),
        MeasureConfig("cumulative", c=20, depth=20),
        MeasureConfig("gravity", beta=1.0, depth=20),
        MeasureConfig("gravity", beta=0.5, depth=6),
        MeasureConfig("gravity", beta=2.0, depth=3),
    ]
    corpora = 0
    for trial in range(6):
        docs = random_corpus(rng, int(rng.integers(3, 21)), vocab_size=int(rng.integers(3, 10)))
        collection, index = _build(docs)
        if not index.vocabulary:
            continue
        corpora += 1
        tokens = [d.tokens for d in collection]
        pairs = exhaustive_universe(tokens, rng)
        universe = QueryUniverse(tuple(Query(t, w) for t, w in pairs), True)
        # The generator enumerates the same exhaustive unigram+bigram set.
        generated = generate_universe(collection, index, max_len=2, weighting="uniform")
        assert {q.terms for q in generated} == {t for t, _ in pairs}
        for model in MODELS:
            for m in measures:
                got = accumulate_scores(index, model, universe, m).scores
                want = brute_access(tokens, pairs, model.kind, m.kind, c=m.c, beta=m.beta, depth=m.depth)
                np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)
    assert corpora >= 5
    assert time.perf_counter() - start < 5.0


@pytest.mark.criterion(2, "beta=1 contribution equals o_q x reciprocal rank exactly (1000 pairs)")
def test_ac2_reciprocal_rank_identity():
    rng = np.random.default_rng(2)
    depth = 100
    measure = MeasureConfig("gravity", beta=1.0, depth=depth)
    for _ in range(1000):
        rank = int(rng.integers(1, depth + 1))
        o_q = float(rng.uniform(0, 1))
        order = rng.permutation(500)[: int(rng.integers(rank, depth + 1))]
        ranked = RankedList(0, order, np.zeros(len(order)), depth)
        ords, contrib = query_contributions(ranked, o_q, measure)
        doc = int(order[rank - 1])
        assert ords[rank - 1] == doc
        assert contrib[rank - 1] == o_q * reciprocal_rank(order.tolist(), doc)
        assert o_q * f_gravity(rank, 1.0) == o_q * (1.0 / rank)


@pytest.mark.criterion(3, "gravity beta=0 equals cumulative c=depth bit for bit (100 docs)")
def test_ac3_degeneracy_bridge(corpus_100):
    collection, index = corpus_100
    universe = generate_universe(collection, index, max_len=2)
    for model in MODELS:
        for depth in (10, 100):
            g = accumulate_scores(index, model, universe, MeasureConfig("gravity", beta=0.0, depth=depth))
            c = accumulate_scores(index, model, universe, MeasureConfig("cumulative", c=depth, depth=depth))
            assert g.scores.tobytes() == c.scores.tobytes()


@pytest.mark.criterion(4, "cumulative mass conservation within 1e-9 relative (1000 docs)")
def test_ac4_mass_conservation(corpus_1000):
    _, index, universe = corpus_1000
    model = RankingModel("bm25")
    depth = 100
    scorer = Scorer(index, model)
    sizes = [len(scorer.topk(q.terms, depth)) for q in universe]
    for c in (1, 10, 100):
        vector = accumulate_scores(index, model, universe, MeasureConfig("cumulative", c=c, depth=depth))
        expected = math.fsum(q.likelihood * min(c, n) for q, n in zip(universe, sizes))
        assert abs(math.fsum(vector.scores.tolist()) - expected) <= 1e-9 * expected


@pytest.mark.criterion(5, "monotonicity sweeps over c and beta, zero violations")
def test_ac5_monotonicity(corpus_1000):
    _, index, universe = corpus_1000
    for model in MODELS:
        cum = [
            accumulate_scores(index, model, universe, MeasureConfig("cumulative", c=c, depth=100)).scores
            for c in (1, 5, 10, 50)
        ]
        grav = [
            accumulate_scores(index, model, universe, MeasureConfig("gravity", beta=b, depth=100)).scores
            for b in (0.0, 0.5, 1.0, 2.0)
        ]
        violations = sum(int((hi < lo).sum()) for lo, hi in zip(cum, cum[1:]))
        violations += sum(int((hi > lo).sum()) for lo, hi in zip(grav, grav[1:]))
        assert violations == 0


@pytest.mark.criterion(6, "scaling all o_q by 3.7 scales every A(d) by 3.7 (1e-12 relative)")
def test_ac6_linearity(corpus_1000):
    _, index, universe = corpus_1000
    for model in MODELS:
        for measure in (MeasureConfig("gravity", beta=1.0), MeasureConfig("cumulative", c=10)):
            base = accumulate_scores(index, model, universe, measure).scores
            scaled = accumulate_scores(index, model, universe.scaled(3.7), measure).scores
            np.testing.assert_allclose(scaled, 3.7 * base, rtol=1e-12, atol=0)


@pytest.mark.criterion(7, "Gini sorted formula vs O(n^2) definition (1e-9); gini([0,0,0,1]) = 0.75")
def test_ac7_gini():
    assert gini([0, 0, 0, 1]) == 0.75
    rng = np.random.default_rng(7)
    for i in range(100):
        n = int(rng.integers(1, 1001))
        kind = i % 4
        if kind == 0:
            x = rng.uniform(0, 1, n)
        elif kind == 1:
            x = rng.pareto(1.5, n)
        elif kind == 2:
            x = np.where(rng.uniform(size=n) < 0.7, 0.0, rng.exponential(1.0, n))
        else:
            x = rng.integers(0, 5, n).astype(float)
        assert abs(gini(x) - gini_pairwise_np(x)) <= 1e-9


def _audit_files(tmp_path, corpus, workers):
    out = tmp_path / f"w{workers}"
    argv = ["audit", "--corpus", corpus, "--max-len", "2", "--max-queries", "3000", "--depth", "50",
            "--workers", str(workers), "--out-dir", out]
    assert main([str(a) for a in argv]) == 0
    assert main(["report", "--run", str(out)]) == 0
    return (out / "scores.csv").read_bytes(), (out / "report.json").read_bytes()


@pytest.mark.criterion(8, "audit with 1, 2 and 8 workers gives byte-identical scores CSV and report JSON")
def test_ac8_determinism(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    docs = zipf_corpus(np.random.default_rng(8), 300, 1500, 10, 120)
    corpus.write_text("".join(json.dumps({"id": i, "text": t}) + "\n" for i, t in docs), encoding="utf-8")
    results = [_audit_files(tmp_path, corpus, w) for w in (1, 2, 8)]
    assert results[0] == results[1] == results[2]
    assert len(results[0][0].splitlines()) == 301


@pytest.mark.criterion(9, "1,000 docs x 10,000 queries at depth 100, gravity, in < 60 s")
def test_ac9_throughput():
    docs = zipf_corpus(np.random.default_rng(9), 1000, 5000, 50, 300)
    start = time.perf_counter()
    collection, index = _build(docs)
    universe = generate_universe(collection, index, max_len=2, max_queries=10_000)
    vector = accumulate_scores(index, RankingModel("bm25"), universe, MeasureConfig("gravity", beta=1.0, depth=100))
    elapsed = time.perf_counter() - start
    assert len(universe) == 10_000 and len(vector) == 1000
    print(f"throughput: {elapsed:.2f} s")
    assert elapsed < 60.0


@pytest.mark.criterion(10, "worked 2-doc example: oracle-confirmed golden files reproduced end to end")
def test_ac10_worked_example(tmp_path):
    tokens = [("cat", "sat"), ("cat", "cat", "mat")]
    queries = [(("cat",), 0.5), (("mat",), 0.5)]
    cases = [
        (["--measure", "gravity", "--beta", "1"], "worked_gravity_beta1.csv", dict(measure="gravity", beta=1.0)),
        (["--measure", "cumulative", "--c", "1"], "worked_cumulative_c1.csv", dict(measure="cumulative", c=1)),
    ]
    expected = {"worked_gravity_beta1.csv": [0.25, 1.0], "worked_cumulative_c1.csv": [0.0, 1.0]}
    for flags, golden, oracle_args in cases:
        assert brute_access(tokens, queries, "tfidf", depth=10, **oracle_args) == expected[golden]
        golden_rows = (GOLDEN / golden).read_text().splitlines()[1:]
        assert [float(r.split(",")[1]) for r in golden_rows] == expected[golden]
        out = tmp_path / golden
        argv = ["audit", "--corpus", GOLDEN / "worked_corpus.jsonl", "--universe", GOLDEN / "worked_universe.tsv",
                "--model", "tfidf", "--depth", "10", *flags, "--out-dir", out]
        assert main([str(a) for a in argv]) == 0
        assert (out / "scores.csv").read_bytes() == (GOLDEN / golden).read_bytes()
