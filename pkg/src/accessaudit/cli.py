"""Command-line driver: ``index``, ``queries``, ``audit``, ``report``.

Every option can also come from a ``--config`` file of ``key=value``
lines whose keys are the long flag names (``depth=50``,
``max-queries=1000``). Precedence: command line, then config file, then
built-in defaults.

Exit codes: 0 success, 2 input or configuration error, 3 internal
invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from accessaudit import __version__
from accessaudit.accessibility import (
    MEASURES,
    MeasureConfig,
    accumulate_scores,
    read_run,
    run_metadata,
    write_run,
)
from accessaudit.analysis import compare_groups, compare_runs, summarize, write_lorenz_csv
from accessaudit.corpus import load_collection, load_stopwords
from accessaudit.errors import InputError, InvariantError
from accessaudit.index import InvertedIndex, build_index
from accessaudit.query_universe import (
    WEIGHTINGS,
    check_vocabulary,
    generate_universe,
    load_universe,
    save_universe,
)
from accessaudit.ranking import MODELS, RankingModel

log = logging.getLogger("accessaudit")


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# name -> (type, default, choices, help)
OPTIONS = {
    "corpus": (str, None, None, "corpus path (JSONL file or directory)"),
    "format": (str, "jsonl", ("jsonl", "plaintext-dir"), "corpus format"),
    "stopwords": (str, None, None, "stopword file, one word per line"),
    "index": (str, None, None, "index snapshot path"),
    "out": (str, None, None, "output file"),
    "max-len": (int, 1, (1, 2), "longest query in terms"),
    "min-df": (int, 1, None, "minimum document frequency of a query"),
    "weighting": (str, "cf-proportional", WEIGHTINGS, "query likelihood weighting"),
    "max-queries": (int, None, None, "keep only the N most likely queries"),
    "universe": (str, None, None, "query universe TSV (generated from the corpus if omitted)"),
    "model": (str, "bm25", MODELS, "ranking model"),
    "k1": (float, 1.2, None, "BM25 k1"),
    "b": (float, 0.75, None, "BM25 b"),
    "depth": (int, 100, None, "retrieval depth"),
    "measure": (str, "gravity", MEASURES, "accessibility measure"),
    "c": (int, 10, None, "rank cutoff for the cumulative measure"),
    "beta": (float, 1.0, None, "dampening factor for the gravity measure"),
    "workers": (int, 1, None, "worker processes for query evaluation"),
    "normalize": (_bool, True, None, "normalize query likelihoods to sum to 1"),
    "out-dir": (str, None, None, "output directory"),
    "run": (str, None, None, "audit output directory to report on"),
    "groups": (str, None, None, "JSON file mapping group label to doc_ids"),
    "compare": (str, None, None, "second audit output directory to compare against"),
}

CORPUS_OPTS = ["corpus", "format", "stopwords"]
UNIVERSE_OPTS = ["max-len", "min-df", "weighting", "max-queries"]
MODEL_OPTS = ["model", "k1", "b"]
MEASURE_OPTS = ["measure", "c", "beta", "depth"]

COMMANDS = {
    "index": CORPUS_OPTS + ["out"],
    "queries": CORPUS_OPTS + UNIVERSE_OPTS + ["out"],
    "audit": CORPUS_OPTS + ["index", "universe"] + UNIVERSE_OPTS + MODEL_OPTS + MEASURE_OPTS
    + ["workers", "normalize", "out-dir"],
    "report": ["run", "out-dir", "groups", "compare"],
}


def read_config(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such config file: {path}")
    values = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("_", "-")
        if not sep:
            raise InputError(f"{path}:{lineno}: expected key=value")
        if key not in OPTIONS:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="accessaudit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command, names in COMMANDS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="key=value config file")
        p.add_argument("-v", "--verbose", action="store_true")
        for name in names:
            typ, default, choices, help_ = OPTIONS[name]
            # Defaults are applied after merging with the config file.
            p.add_argument(
                f"--{name}",
                type=typ,
                choices=choices,
                default=None,
                help=f"{help_} (default: {default})",
            )
    return parser


def effective_config(args) -> dict:
    """Merge command line, config file and defaults for this subcommand."""
    file_values = read_config(args.config) if args.config else {}
    config = {}
    for name in COMMANDS[args.command]:
        typ, default, choices, _ = OPTIONS[name]
        value = getattr(args, name.replace("-", "_"))
        if value is None and name in file_values:
            try:
                value = typ(file_values[name])
            except ValueError:
                raise InputError(f"config key {name!r}: bad value {file_values[name]!r}") from None
            if choices and value not in choices:
                raise InputError(f"config key {name!r}: {value!r} not in {choices}")
        config[name] = default if value is None else value
    return config


def _require(config, *names):
    for name in names:
        if config.get(name) is None:
            raise InputError(f"--{name} is required")


def _stopwords(config):
    path = config["stopwords"]
    if not path:
        return None
    if not Path(path).is_file():
        raise InputError(f"no such stopword file: {path}")
    return load_stopwords(path)


def _collection(config):
    return load_collection(config["corpus"], config["format"], _stopwords(config))


def _generate(collection, index, config):
    return generate_universe(
        collection,
        index,
        max_len=config["max-len"],
        min_df=config["min-df"],
        weighting=config["weighting"],
        max_queries=config["max-queries"],
    )


def cmd_index(config) -> None:
    _require(config, "corpus")
    collection = _collection(config)
    index = build_index(collection)
    out = config["out"] or "index.npz"
    index.save(out)
    log.info("wrote index snapshot %s", out)
    print(f"documents: {index.n_docs}")
    print(f"vocabulary: {len(index.vocabulary)}")
    print(f"avg_doc_length: {index.stats.avg_doc_length:.12g}")


def cmd_queries(config) -> None:
    _require(config, "corpus")
    collection = _collection(config)
    index = build_index(collection)
    universe = _generate(collection, index, config)
    out = config["out"] or "universe.tsv"
    save_universe(universe, out)
    log.info("wrote %d queries to %s (truncated=%s)", len(universe), out, universe.meta["truncated"])


def cmd_audit(config) -> None:
    _require(config, "out-dir")
    if config["workers"] < 1:
        raise InputError(f"workers must be >= 1, got {config['workers']}")
    measure = MeasureConfig(
        kind=config["measure"], c=config["c"], beta=config["beta"], depth=config["depth"]
    )
    model = RankingModel(config["model"], config["k1"], config["b"])

    collection = _collection(config) if config["corpus"] else None
    if config["index"]:
        index = InvertedIndex.load(config["index"])
        if collection is not None and collection.checksum() != index.checksum:
            raise InputError("index snapshot was built from a different corpus")
    elif collection is not None:
        index = build_index(collection)
    else:
        raise InputError("one of --corpus or --index is required")

    if config["universe"]:
        universe = load_universe(config["universe"])
    elif collection is not None:
        universe = _generate(collection, index, config)
    else:
        raise InputError("--universe is required when auditing from an index snapshot alone")
    check_vocabulary(universe, index)

    raw_sum = universe.total_likelihood()
    if config["normalize"] and not universe.normalized:
        universe = universe.normalize()
    log.info(
        "auditing %d documents over %d queries (%s, %s)",
        index.n_docs, len(universe), model.kind, measure.kind,
    )
    vector = accumulate_scores(index, model, universe, measure, workers=config["workers"])
    write_run(vector, config["out-dir"], run_metadata(vector, universe, raw_sum, config))
    log.info("wrote %s", config["out-dir"])


def _read_groups(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"no such groups file: {path}")
    try:
        groups = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg})") from None
    if not isinstance(groups, dict) or not all(isinstance(v, list) for v in groups.values()):
        raise InputError(f"{path}: expected an object mapping label -> list of doc_ids")
    return groups


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_json_safe(v) for v in value]
    return value


def cmd_report(config) -> None:
    _require(config, "run")
    vector = read_run(config["run"])
    out_dir = Path(config["out-dir"] or config["run"])
    out_dir.mkdir(parents=True, exist_ok=True)

    summary = summarize(vector)
    report = {
        "run": {
            "measure": vector.measure.describe(),
            "model": vector.model,
            "universe_size": vector.universe_size,
            "corpus_checksum": vector.checksum,
        },
        "distribution": summary.to_json(),
    }
    if config["groups"]:
        report["groups"] = compare_groups(vector, _read_groups(config["groups"])).to_json()
    if config["compare"]:
        other = read_run(config["compare"])
        comparison = compare_runs(vector, other)
        comparison.write_csv(out_dir / "compare.csv")
        report["comparison"] = {"kendall_tau_b": comparison.tau, "changed_docs": int((comparison.deltas != 0).sum())}

    with open(out_dir / "report.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_json_safe(report), fh, indent=2)
        fh.write("\n")
    write_lorenz_csv(summary.lorenz, out_dir / "lorenz.csv")
    log.info("wrote report to %s", out_dir)


HANDLERS = {"index": cmd_index, "queries": cmd_queries, "audit": cmd_audit, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        HANDLERS[args.command](effective_config(args))
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
