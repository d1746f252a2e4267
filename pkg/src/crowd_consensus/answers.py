"""Answer normalization, valid-answer sets, and crowd agreement statistics."""

from __future__ import annotations

import enum
import re
import string
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Corpus
from .errors import AnswerCountMismatch, InvalidThreshold

#: Whole-token number words converted to digits during normalization.
NUMBER_WORDS = {
    "zero": "0",
    "one": "1",
    "two": "2",
    "three": "3",
    "four": "4",
    "five": "5",
    "six": "6",
    "seven": "7",
    "eight": "8",
    "nine": "9",
    "ten": "10",
}

#: Articles dropped when they appear as standalone tokens.
ARTICLES = frozenset({"a", "an", "the"})

# The 32 ASCII punctuation characters, removed outright.
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)
_DIGIT_COMMA = re.compile(r"(?<=\d),(?=\d)")

_TYPE_ORDER = ("yes/no", "number", "other", "unknown", "all")


class AgreementLabel(enum.Enum):
    """Whether a crowd converges on a single answer for a question."""

    AGREEMENT = "agreement"
    DISAGREEMENT = "disagreement"


def _normalize_pass(text: str) -> str:
    # Order matters: articles and number words are matched token-wise, so
    # case folding and digit-comma stripping must come first.
    text = text.lower()
    text = _DIGIT_COMMA.sub("", text)
    text = " ".join(NUMBER_WORDS.get(tok, tok) for tok in text.split())
    text = text.translate(_PUNCT_TABLE)
    return " ".join(tok for tok in text.split() if tok not in ARTICLES)


def normalize_answer(raw: str) -> str:
    """Canonicalize one crowd answer for exact-string comparison.

    A pass lowercases, strips commas between digits, maps whole-token
    number words ("zero".."ten") to digits, removes ASCII punctuation,
    drops standalone articles, and collapses whitespace. Because removing
    punctuation can expose new article or number-word tokens ("o!ne" ->
    "one"), the pass repeats until the string stops changing; the result
    is therefore always a fixed point of normalization.
    """
    out = _normalize_pass(raw)
    while True:
        again = _normalize_pass(out)
        if again == out:
            return out
        out = again


def _tally(raw_answers: Sequence[str]) -> Counter:
    return Counter(normalize_answer(ans) for ans in raw_answers)


@dataclass(frozen=True)
class ValidAnswerSet:
    """Normalized answers given by at least ``m`` people, with all tallies."""

    answers: frozenset[str]
    m: int
    counts: Mapping[str, int]


def valid_answers(raw_answers: Sequence[str], m: int) -> ValidAnswerSet:
    """Normalize, tally, and keep answers observed at least ``m`` times."""
    a = len(raw_answers)
    if m < 1 or m > a:
        raise InvalidThreshold(f"m must be in [1, {a}], got {m}")
    counts = _tally(raw_answers)
    kept = frozenset(ans for ans, c in counts.items() if c >= m)
    return ValidAnswerSet(answers=kept, m=m, counts=dict(counts))


def agreement_label(raw_answers: Sequence[str]) -> AgreementLabel:
    """Agreement iff all but at most one of the answers match exactly.

    With A stored answers the rule is: modal normalized-answer count
    >= A - 1, which tolerates a single careless or spam response.
    """
    a = len(raw_answers)
    if a < 2:
        raise AnswerCountMismatch(f"need at least 2 answers, got {a}")
    modal = max(_tally(raw_answers).values())
    if modal >= a - 1:
        return AgreementLabel.AGREEMENT
    return AgreementLabel.DISAGREEMENT


def diversity_histogram(corpus: Corpus, m: int) -> dict[int, int]:
    """Count questions by number of unique valid answers, k = 0..A."""
    a = corpus.answers_per_question
    if m < 1 or m > a:
        raise InvalidThreshold(f"m must be in [1, {a}], got {m}")
    hist = {k: 0 for k in range(a + 1)}
    for vq in corpus:
        hist[len(valid_answers(vq.raw_answers, m).answers)] += 1
    return hist


@dataclass(frozen=True)
class AgreementRates:
    """Share of questions at each agreement level within one stratum."""

    unanimous_rate: float
    exactly_one_disagreement_rate: float
    at_most_one_disagreement_rate: float
    n: int


def agreement_by_answer_type(corpus: Corpus) -> dict[str, AgreementRates]:
    """Agreement rates per answer-type stratum plus a pooled "all" stratum.

    Questions without an answer type fall into the "unknown" stratum.
    Unanimous means every answer matches; exactly-one means the modal
    answer covers all but one.
    """
    a = corpus.answers_per_question
    tallies: dict[str, list[int]] = {}  # stratum -> [unanimous, exactly_one, n]
    for vq in corpus:
        modal = max(_tally(vq.raw_answers).values()) if vq.raw_answers else 0
        for stratum in (vq.answer_type or "unknown", "all"):
            bucket = tallies.setdefault(stratum, [0, 0, 0])
            bucket[0] += modal == a
            bucket[1] += modal == a - 1
            bucket[2] += 1

    report = {}
    for stratum in _TYPE_ORDER:
        if stratum not in tallies:
            continue
        unanimous, exactly_one, n = tallies[stratum]
        report[stratum] = AgreementRates(
            unanimous_rate=unanimous / n,
            exactly_one_disagreement_rate=exactly_one / n,
            at_most_one_disagreement_rate=(unanimous + exactly_one) / n,
            n=n,
        )
    return report
