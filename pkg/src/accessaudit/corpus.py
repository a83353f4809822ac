"""Document ingestion and tokenization."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from accessaudit.errors import InputError

# Unicode letters and digits; underscore and everything else separates.
_TOKEN = re.compile(r"[^\W_]+")


def tokenize(text: str, stopwords: Optional[frozenset] = None) -> list[str]:
    """Lowercase ``text`` and split it on every non-alphanumeric character.

    >>> tokenize("The cat's mat!")
    ['the', 'cat', 's', 'mat']
    """
    tokens = _TOKEN.findall(text.lower())
    if stopwords:
        tokens = [t for t in tokens if t not in stopwords]
    return tokens


def load_stopwords(path) -> frozenset:
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    tokens: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Collection:
    """An ordered, immutable set of documents.

    Ordinals follow ingestion order and run 0..N-1.
    """

    documents: tuple[Document, ...]
    doc_index: dict = field(repr=False)

    @classmethod
    def from_documents(cls, documents: Iterable[Document]) -> "Collection":
        documents = tuple(documents)
        if not documents:
            raise InputError("empty collection")
        doc_index = {}
        for i, doc in enumerate(documents):
            if not doc.doc_id:
                raise InputError(f"document at position {i} has an empty id")
            if doc.doc_id in doc_index:
                raise InputError(f"duplicate doc_id {doc.doc_id!r}")
            doc_index[doc.doc_id] = i
        return cls(documents, doc_index)

    @classmethod
    def from_texts(cls, items, stopwords: Optional[frozenset] = None) -> "Collection":
        """Build from ``(doc_id, text)`` pairs."""
        return cls.from_documents(
            Document(doc_id, text, tuple(tokenize(text, stopwords))) for doc_id, text in items
        )

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __getitem__(self, ordinal: int) -> Document:
        return self.documents[ordinal]

    def get(self, doc_id: str) -> Document:
        return self.documents[self.doc_index[doc_id]]

    @property
    def doc_ids(self) -> list[str]:
        return [d.doc_id for d in self.documents]

    def checksum(self) -> str:
        """SHA-256 over the ordered (doc_id, text) records."""
        h = hashlib.sha256()
        for doc in self.documents:
            for part in (doc.doc_id, doc.text):
                data = part.encode("utf-8")
                h.update(len(data).to_bytes(8, "little"))
                h.update(data)
        return h.hexdigest()


def _read_jsonl(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(record, dict):
                raise InputError(f"{path}:{lineno}: record is not an object")
            doc_id, text = record.get("id"), record.get("text")
            if not isinstance(doc_id, str) or not doc_id:
                raise InputError(f"{path}:{lineno}: missing or empty string field 'id'")
            if not isinstance(text, str):
                raise InputError(f"{path}:{lineno}: missing string field 'text'")
            yield doc_id, text


def _read_dir(path: Path):
    for entry in sorted(path.iterdir(), key=lambda p: p.name):
        if entry.is_file():
            yield entry.name, entry.read_text(encoding="utf-8")


def load_collection(path, format: str = "jsonl", stopwords: Optional[frozenset] = None) -> Collection:
    """Read a corpus from a JSONL file or a directory of plain-text files.

    JSONL documents keep file order; directory documents are ordered by
    filename, and the filename is the doc_id.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file or directory: {path}")
    if format == "jsonl":
        if not path.is_file():
            raise InputError(f"not a file: {path}")
        records = _read_jsonl(path)
    elif format == "plaintext-dir":
        if not path.is_dir():
            raise InputError(f"not a directory: {path}")
        records = _read_dir(path)
    else:
        raise InputError(f"unknown corpus format {format!r}")
    return Collection.from_texts(records, stopwords)
