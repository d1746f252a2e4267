"""Immutable visual-question corpora and precomputed image-saliency tables.

Two corpus formats are supported: the paired questions/annotations JSON
layout used by the large public VQA releases, and a flat JSONL record
format convenient for synthetic or desk-scale corpora. Image saliency
comes in as a CSV of five per-image probabilities (0, 1, 2, 3, or 4+
salient objects).
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import (
    AnswerCountMismatch,
    InvalidProbability,
    MissingAnnotation,
    ParseError,
)

log = logging.getLogger(__name__)

ANSWER_TYPES = ("yes/no", "number", "other")
CORPUS_FORMATS = ("jsonl", "vqa_v1_json")
DEFAULT_ANSWERS_PER_QUESTION = 10

#: Saliency fallback for images absent from a feature table.
UNIFORM_SALIENCY = (0.2, 0.2, 0.2, 0.2, 0.2)

_SALIENCY_HEADER = ["image_id", "p0", "p1", "p2", "p3", "p4"]
_SUM_BAND = 1e-3


@dataclass(frozen=True)
class VisualQuestion:
    """One question about one image plus its stored crowd answers."""

    question_id: int
    image_id: int
    question_text: str
    raw_answers: tuple[str, ...]
    answer_type: str | None = None


@dataclass(frozen=True)
class Corpus:
    """Ordered, immutable collection of visual questions sharing one answer count."""

    questions: tuple[VisualQuestion, ...]
    answers_per_question: int
    source_tag: str = field(default="", compare=False)
    _index: dict[int, int] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        for pos, vq in enumerate(self.questions):
            self._index[vq.question_id] = pos

    @classmethod
    def from_questions(
        cls,
        questions: Iterable[VisualQuestion],
        source_tag: str = "",
        skip_malformed: bool = False,
    ) -> "Corpus":
        """Validate, sort by question id, and freeze a corpus.

        The answer count A is taken from the first question; later questions
        with a different count raise AnswerCountMismatch, or are dropped and
        counted when skip_malformed is set. Duplicate question ids and
        unknown answer types raise ParseError.
        """
        ordered = sorted(questions, key=lambda vq: vq.question_id)
        a = len(ordered[0].raw_answers) if ordered else DEFAULT_ANSWERS_PER_QUESTION
        kept: list[VisualQuestion] = []
        seen: set[int] = set()
        dropped = 0
        for vq in ordered:
            if vq.question_id in seen:
                raise ParseError(f"duplicate question_id {vq.question_id}")
            seen.add(vq.question_id)
            if vq.answer_type is not None and vq.answer_type not in ANSWER_TYPES:
                raise ParseError(
                    f"question {vq.question_id}: unknown answer_type "
                    f"{vq.answer_type!r} (expected one of {ANSWER_TYPES})"
                )
            if len(vq.raw_answers) != a:
                if skip_malformed:
                    dropped += 1
                    continue
                raise AnswerCountMismatch(
                    f"question {vq.question_id} has {len(vq.raw_answers)} answers, "
                    f"expected {a}"
                )
            kept.append(vq)
        if dropped:
            log.warning("dropped %d questions with != %d answers", dropped, a)
        return cls(tuple(kept), a, source_tag)

    def __len__(self) -> int:
        return len(self.questions)

    def __iter__(self) -> Iterator[VisualQuestion]:
        return iter(self.questions)

    def get(self, question_id: int) -> VisualQuestion:
        return self.questions[self._index[question_id]]

    def __contains__(self, question_id: int) -> bool:
        return question_id in self._index

    def question_ids(self) -> tuple[int, ...]:
        return tuple(vq.question_id for vq in self.questions)

    def subset(self, question_ids: Iterable[int]) -> "Corpus":
        """New corpus restricted to the given ids (re-sorted ascending)."""
        picked = [self.get(qid) for qid in question_ids]
        picked.sort(key=lambda vq: vq.question_id)
        return Corpus(tuple(picked), self.answers_per_question, self.source_tag)


def load_corpus(
    questions_source: str | Path,
    annotations_source: str | Path | None = None,
    format: str = "jsonl",
    *,
    skip_malformed: bool = False,
    source_tag: str = "",
) -> Corpus:
    """Load a corpus from disk.

    format "jsonl" reads one record per line with keys question_id,
    image_id, question, answers and optional answer_type. format
    "vqa_v1_json" reads the paired questions/annotations JSON files and
    requires annotations_source.

    Raises ParseError for malformed input, MissingAnnotation when a
    question has no answer record, and AnswerCountMismatch for uneven
    answer lists (dropped instead when skip_malformed is set).
    """
    if format not in CORPUS_FORMATS:
        raise ParseError(f"unknown corpus format {format!r} (expected {CORPUS_FORMATS})")
    if format == "jsonl":
        questions = _read_jsonl(Path(questions_source))
    else:
        if annotations_source is None:
            raise MissingAnnotation(
                "vqa_v1_json needs both a questions file and an annotations file"
            )
        questions = _read_vqa_v1(Path(questions_source), Path(annotations_source))
    return Corpus.from_questions(
        questions, source_tag=source_tag, skip_malformed=skip_malformed
    )


def _require(record: Mapping, key: str, where: str):
    if key not in record:
        raise ParseError(f"{where}: missing key {key!r}")
    return record[key]


def _read_jsonl(path: Path) -> list[VisualQuestion]:
    questions = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{where}: {exc}") from exc
            if not isinstance(record, dict):
                raise ParseError(f"{where}: record is not an object")
            answers = _require(record, "answers", where)
            if not isinstance(answers, list):
                raise ParseError(f"{where}: answers is not a list")
            questions.append(
                VisualQuestion(
                    question_id=int(_require(record, "question_id", where)),
                    image_id=int(_require(record, "image_id", where)),
                    question_text=str(_require(record, "question", where)),
                    raw_answers=tuple(str(ans) for ans in answers),
                    answer_type=record.get("answer_type"),
                )
            )
    return questions


def _read_vqa_v1(questions_path: Path, annotations_path: Path) -> list[VisualQuestion]:
    questions_doc = _load_json_doc(questions_path)
    annotations_doc = _load_json_doc(annotations_path)
    if "questions" not in questions_doc:
        raise ParseError(f"{questions_path}: missing top-level 'questions'")
    if "annotations" not in annotations_doc:
        raise ParseError(f"{annotations_path}: missing top-level 'annotations'")

    by_id: dict[int, dict] = {}
    for ann in annotations_doc["annotations"]:
        by_id[int(_require(ann, "question_id", str(annotations_path)))] = ann

    questions = []
    for q in questions_doc["questions"]:
        where = str(questions_path)
        qid = int(_require(q, "question_id", where))
        ann = by_id.get(qid)
        if ann is None:
            raise MissingAnnotation(f"question {qid} has no annotation record")
        answers = tuple(
            str(_require(entry, "answer", f"{annotations_path} question {qid}"))
            for entry in _require(ann, "answers", f"{annotations_path} question {qid}")
        )
        questions.append(
            VisualQuestion(
                question_id=qid,
                image_id=int(_require(q, "image_id", where)),
                question_text=str(_require(q, "question", where)),
                raw_answers=answers,
                answer_type=ann.get("answer_type"),
            )
        )
    return questions


def _load_json_doc(path: Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object")
    return doc


def save_corpus_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the flat JSONL record format (round-trips with load_corpus)."""
    with open(path, "w", encoding="utf-8") as fh:
        for vq in corpus:
            record: dict = {
                "question_id": vq.question_id,
                "image_id": vq.image_id,
                "question": vq.question_text,
                "answers": list(vq.raw_answers),
            }
            if vq.answer_type is not None:
                record["answer_type"] = vq.answer_type
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class ImageFeatureTable:
    """image_id -> five salient-object-count probabilities summing to 1."""

    probabilities: Mapping[int, tuple[float, ...]]

    def get(self, image_id: int) -> tuple[float, ...]:
        """Stored 5-vector, or the uniform fallback for unknown images."""
        return self.probabilities.get(image_id, UNIFORM_SALIENCY)

    def __contains__(self, image_id: int) -> bool:
        return image_id in self.probabilities

    def __len__(self) -> int:
        return len(self.probabilities)


def load_image_features(path: str | Path) -> ImageFeatureTable:
    """Read the saliency CSV (header image_id,p0,p1,p2,p3,p4).

    Rows whose components are non-negative and sum to 1 within 1e-3 are
    renormalized to sum exactly 1; anything else raises InvalidProbability.
    """
    table: dict[int, tuple[float, ...]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _SALIENCY_HEADER:
            raise ParseError(
                f"{path}: expected header {','.join(_SALIENCY_HEADER)}, got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}:{lineno}"
            if len(row) != 6:
                raise ParseError(f"{where}: expected 6 columns, got {len(row)}")
            try:
                image_id = int(row[0])
                probs = [float(cell) for cell in row[1:]]
            except ValueError as exc:
                raise ParseError(f"{where}: {exc}") from exc
            if image_id in table:
                raise ParseError(f"{where}: duplicate image_id {image_id}")
            if any(p < 0.0 for p in probs):
                raise InvalidProbability(f"{where}: negative probability component")
            total = sum(probs)
            if abs(total - 1.0) > _SUM_BAND:
                raise InvalidProbability(
                    f"{where}: probabilities sum to {total}, outside 1 +/- {_SUM_BAND}"
                )
            table[image_id] = tuple(p / total for p in probs)
    return ImageFeatureTable(table)
