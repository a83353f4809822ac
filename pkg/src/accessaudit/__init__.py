"""Document accessibility audits for retrieval systems.

Scores every document in a collection by its opportunity of being
retrieved: a likelihood-weighted sum, over a query universe, of a
rank-based cost function (cumulative cutoff or gravity decay).
"""

from accessaudit.accessibility import AccessVector, MeasureConfig, accumulate_scores
from accessaudit.analysis import compare_groups, compare_runs, summarize
from accessaudit.corpus import Collection, Document, load_collection, tokenize
from accessaudit.errors import InputError, InvariantError
from accessaudit.index import InvertedIndex, build_index
from accessaudit.query_universe import Query, QueryUniverse, generate_universe
from accessaudit.ranking import RankedList, RankingModel, retrieve_topk

__version__ = "0.1.0"

__all__ = [
    "AccessVector",
    "Collection",
    "Document",
    "InputError",
    "InvariantError",
    "InvertedIndex",
    "MeasureConfig",
    "Query",
    "QueryUniverse",
    "RankedList",
    "RankingModel",
    "accumulate_scores",
    "build_index",
    "compare_groups",
    "compare_runs",
    "generate_universe",
    "load_collection",
    "retrieve_topk",
    "summarize",
    "tokenize",
]
