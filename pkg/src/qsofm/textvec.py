"""Bag-of-words binarization of text corpora into fixed-width bit vectors.

Words are kept when their document frequency falls inside a [min_df, max_df]
band and they are not stoplisted; the top ``n`` by total frequency (ties
alphabetical) form the vocabulary, and each document maps to one bit per
vocabulary word marking presence.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .hamming import BinaryVector

DEFAULT_SIZE = 9
DEFAULT_MIN_DF = 2
DEFAULT_MAX_DF = 4
DEFAULT_STOPLIST = ("level",)

_TOKEN_RE = re.compile(r"[a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercased alphabetic tokens; punctuation and digits split or vanish."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    tag: str | None = None


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "documents", tuple(self.documents))
        if not self.documents:
            raise ValueError("corpus must contain at least one document")
        ids = [d.doc_id for d in self.documents]
        if len(set(ids)) != len(ids):
            raise ValueError("document ids must be unique")

    def __len__(self) -> int:
        return len(self.documents)

    def ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.documents)

    def tags(self) -> tuple[str | None, ...]:
        return tuple(d.tag for d in self.documents)


@dataclass(frozen=True)
class Vocabulary:
    """Selected words in rank order with their corpus statistics."""

    words: tuple[str, ...]
    document_frequency: dict[str, int]
    total_frequency: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.words)


def build_vocabulary(
    corpus: Corpus,
    size: int = DEFAULT_SIZE,
    min_df: int = DEFAULT_MIN_DF,
    max_df: int = DEFAULT_MAX_DF,
    stoplist: Iterable[str] = DEFAULT_STOPLIST,
) -> Vocabulary:
    """Filter words by document frequency and keep the ``size`` most frequent.

    Words with document frequency outside [min_df, max_df] and stoplisted
    words are dropped; survivors rank by total occurrence count, ties broken
    alphabetically.
    """
    if size < 1:
        raise ValueError("vocabulary size must be >= 1")
    if min_df > max_df:
        raise ValueError(f"min_df {min_df} exceeds max_df {max_df}")
    stopset = {w.lower() for w in stoplist}
    document_frequency: Counter = Counter()
    total_frequency: Counter = Counter()
    for document in corpus.documents:
        tokens = tokenize(document.text)
        total_frequency.update(tokens)
        document_frequency.update(set(tokens))
    candidates = [
        word
        for word in total_frequency
        if min_df <= document_frequency[word] <= max_df and word not in stopset
    ]
    if len(candidates) < size:
        raise ValueError(
            f"only {len(candidates)} candidate words survive the document-frequency "
            f"filter [{min_df}, {max_df}] minus the stoplist; {size} requested"
        )
    ranked = sorted(candidates, key=lambda word: (-total_frequency[word], word))
    chosen = tuple(ranked[:size])
    return Vocabulary(
        words=chosen,
        document_frequency={w: document_frequency[w] for w in chosen},
        total_frequency={w: total_frequency[w] for w in chosen},
    )


def vectorize(corpus: Corpus, vocabulary: Vocabulary) -> list[BinaryVector]:
    """One bit per vocabulary word: set iff the word occurs in the document."""
    vectors = []
    for document in corpus.documents:
        present = set(tokenize(document.text))
        vectors.append(BinaryVector(tuple(1 if w in present else 0 for w in vocabulary.words)))
    return vectors


def corpus_from_records(records: Sequence[dict]) -> Corpus:
    documents = []
    for record in records:
        if not isinstance(record, dict) or "id" not in record or "text" not in record:
            raise ValueError("each corpus record needs at least 'id' and 'text'")
        documents.append(
            Document(doc_id=str(record["id"]), text=str(record["text"]), tag=record.get("tag"))
        )
    return Corpus(tuple(documents))


def load_corpus(path: str | Path) -> Corpus:
    """Load a corpus from a directory of .txt files or a JSON array."""
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.txt"))
        if not files:
            raise ValueError(f"no .txt files in directory {p}")
        return Corpus(tuple(Document(doc_id=f.stem, text=f.read_text()) for f in files))
    if p.suffix == ".json":
        records = json.loads(p.read_text())
        if not isinstance(records, list):
            raise ValueError(f"{p} must contain a JSON array of documents")
        return corpus_from_records(records)
    raise ValueError(f"corpus path must be a directory of .txt files or a .json file: {p}")


def sample_corpus() -> Corpus:
    """The bundled 9-document corpus: three topics, three documents each."""
    text = resources.files("qsofm").joinpath("data/sample_corpus.json").read_text()
    return corpus_from_records(json.loads(text))


def vocabulary_to_json(vocabulary: Vocabulary) -> str:
    payload = {
        "size": vocabulary.size,
        "words": [
            {
                "word": w,
                "document_frequency": vocabulary.document_frequency[w],
                "total_frequency": vocabulary.total_frequency[w],
            }
            for w in vocabulary.words
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def vocabulary_to_csv(vocabulary: Vocabulary) -> str:
    lines = ["word,document_frequency,total_frequency"]
    for w in vocabulary.words:
        lines.append(f"{w},{vocabulary.document_frequency[w]},{vocabulary.total_frequency[w]}")
    return "\n".join(lines) + "\n"


def vectors_to_csv(corpus: Corpus, vectors: Sequence[BinaryVector]) -> str:
    if len(vectors) != len(corpus):
        raise ValueError("one vector per document required")
    lines = ["id,tag,vector"]
    for document, vector in zip(corpus.documents, vectors):
        lines.append(f"{document.doc_id},{document.tag or ''},{vector}")
    return "\n".join(lines) + "\n"


def vectors_to_json(corpus: Corpus, vectors: Sequence[BinaryVector]) -> str:
    if len(vectors) != len(corpus):
        raise ValueError("one vector per document required")
    payload = [
        {"id": d.doc_id, "tag": d.tag, "vector": str(v)}
        for d, v in zip(corpus.documents, vectors)
    ]
    return json.dumps(payload, indent=2) + "\n"


def load_vectors_csv(path: str | Path) -> tuple[list[str], list[str | None], list[BinaryVector]]:
    """Read back the id,tag,vector layout written by :func:`vectors_to_csv`."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != "id,tag,vector":
        raise ValueError(f"{path} is not an id,tag,vector CSV")
    ids: list[str] = []
    tags: list[str | None] = []
    vectors: list[BinaryVector] = []
    for line in lines[1:]:
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"malformed vector row: {line!r}")
        ids.append(parts[0])
        tags.append(parts[1] or None)
        vectors.append(BinaryVector.from_string(parts[2]))
    if not vectors:
        raise ValueError(f"{path} contains no vectors")
    return ids, tags, vectors
