import json

import pytest

from accessaudit import Collection, build_index
from accessaudit.query_universe import Query, QueryUniverse

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA[number] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"[{status}] AC{number:<2} {title}")


@pytest.fixture
def tiny():
    """The two-document corpus used throughout: d1="cat sat", d2="cat cat mat"."""
    collection = Collection.from_texts([("d1", "cat sat"), ("d2", "cat cat mat")])
    return collection, build_index(collection)


@pytest.fixture
def tiny_universe():
    return QueryUniverse((Query(("cat",), 0.5), Query(("mat",), 0.5)), True)


@pytest.fixture
def tiny_jsonl(tmp_path):
    path = tmp_path / "corpus.jsonl"
    records = [{"id": "d1", "text": "Cat sat"}, {"id": "d2", "text": "cat cat mat"}]
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path
