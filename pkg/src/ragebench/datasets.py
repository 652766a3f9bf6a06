"""QA corpus loading, normalization, and reproducible sampling.

Corpora use the three-field schema: ``context``, ``question``, ``answer``.
JSON files are a top-level array of objects; CSV files carry those three
column names in the header with RFC-4180 quoting. Documents carrying
``questions``/``answers`` lists are expanded to one record per question with
the context duplicated.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import EmptyCorpusError, IngestError, NotFoundError
from .rng import SplitMix64

REQUIRED_FIELDS = ("context", "question", "answer")


@dataclass(frozen=True)
class QARecord:
    context: str
    question: str
    answer: str
    source_id: str

    def to_payload(self) -> dict:
        return {
            "context": self.context,
            "question": self.question,
            "answer": self.answer,
            "source_id": self.source_id,
        }


@dataclass(frozen=True)
class Corpus:
    name: str
    records: tuple[QARecord, ...]

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class DatasetRegistryEntry:
    name: str
    source: str
    train_size: int
    access_url: str


REGISTRY = {
    "NaturalQuestions": DatasetRegistryEntry(
        name="NaturalQuestions",
        source="Wikipedia (Google Search)",
        train_size=307_373,
        access_url="ai.google.com/research/NaturalQuestions/dataset",
    ),
    "NewsQA": DatasetRegistryEntry(
        name="NewsQA",
        source="CNN News Articles",
        train_size=380_000,
        access_url="cs.nyu.edu/~kcho/DMQA/",
    ),
    "TriviaQA": DatasetRegistryEntry(
        name="TriviaQA",
        source="Trivia / Web / Wikipedia",
        train_size=650_000,
        access_url="nlp.cs.washington.edu/triviaqa/#data",
    ),
}

# Desk-scale fixture files bundled in place of the full public datasets.
_FIXTURE_FILES = {
    "NaturalQuestions": "naturalquestions_fixture.json",
    "NewsQA": "newsqa_fixture.json",
    "TriviaQA": "triviaqa_fixture.json",
}


def _canonical_name(name: str) -> str | None:
    for key in REGISTRY:
        if key.lower() == name.lower():
            return key
    return None


def registry_lookup(name: str) -> DatasetRegistryEntry:
    key = _canonical_name(name)
    if key is None:
        raise NotFoundError(f"unknown dataset {name!r}")
    return REGISTRY[key]


def fixture_path(name: str) -> Path:
    """Path of the bundled 50-row fixture for a registry dataset."""
    key = _canonical_name(name)
    if key is None or key not in _FIXTURE_FILES:
        raise NotFoundError(f"no bundled fixture for dataset {name!r}")
    return Path(str(resources.files("ragebench") / "fixtures" / "datasets" / _FIXTURE_FILES[key]))


def _expand_row(row: dict, index: int) -> list[dict]:
    """One row per question; multi-question documents duplicate the context."""
    if "questions" in row or "answers" in row:
        questions = row.get("questions") or []
        answers = row.get("answers") or []
        if len(questions) != len(answers):
            raise IngestError(
                f"row {index}: questions/answers length mismatch "
                f"({len(questions)} vs {len(answers)})",
                rows=[index],
            )
        return [
            {"context": row.get("context"), "question": q, "answer": a}
            for q, a in zip(questions, answers)
        ]
    return [row]


def _rows_to_records(name: str, rows: list[dict]) -> Corpus:
    records: list[QARecord] = []
    bad_rows: list[int] = []
    expanded: list[tuple[int, dict]] = []
    for i, row in enumerate(rows):
        for sub in _expand_row(row, i):
            expanded.append((i, sub))
    for ordinal, (row_index, row) in enumerate(expanded):
        values = {}
        ok = True
        for fieldname in REQUIRED_FIELDS:
            value = row.get(fieldname)
            if not isinstance(value, str) or not value.strip():
                ok = False
                break
            values[fieldname] = value.strip()
        if not ok:
            bad_rows.append(row_index)
            continue
        records.append(
            QARecord(
                context=values["context"],
                question=values["question"],
                answer=values["answer"],
                source_id=f"{name}:{ordinal}",
            )
        )
    if bad_rows:
        raise IngestError(
            f"rows missing required fields: {sorted(set(bad_rows))}",
            rows=sorted(set(bad_rows)),
        )
    if not records:
        raise EmptyCorpusError(f"corpus {name!r} has no valid rows")
    return Corpus(name=name, records=tuple(records))


def load_corpus(path: str | Path, format: str = "json", name: str | None = None) -> Corpus:
    path = Path(path)
    name = name or path.stem
    text = path.read_text(encoding="utf-8")
    if format == "json":
        data = json.loads(text)
        if not isinstance(data, list):
            raise IngestError("JSON dataset must be a top-level array of objects")
        rows = data
    elif format == "csv":
        reader = csv.DictReader(io.StringIO(text))
        rows = [dict(row) for row in reader]
    else:
        raise IngestError(f"unknown format {format!r} (expected 'json' or 'csv')")
    return _rows_to_records(name, rows)


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    payload = [
        {"context": r.context, "question": r.question, "answer": r.answer}
        for r in corpus.records
    ]
    Path(path).write_text(
        json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )


def sample_corpus(corpus: Corpus, n: int, seed: int) -> Corpus:
    """Draw n records without replacement with a seeded SplitMix64.

    n >= len(corpus) returns the corpus unchanged. Identical
    (corpus, n, seed) always yields the identical sample, machine-independent.
    """
    if n < 1:
        raise ValueError("sample size must be >= 1")
    if n >= len(corpus):
        return corpus
    rng = SplitMix64(seed)
    pool = list(range(len(corpus)))
    chosen: list[int] = []
    for _ in range(n):
        index = rng.below(len(pool))
        chosen.append(pool.pop(index))
    return Corpus(name=corpus.name, records=tuple(corpus.records[i] for i in chosen))
