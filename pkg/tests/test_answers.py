import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowd_consensus import (
    AgreementLabel,
    Corpus,
    agreement_by_answer_type,
    agreement_label,
    diversity_histogram,
    normalize_answer,
    valid_answers,
)
from crowd_consensus.errors import AnswerCountMismatch, InvalidThreshold

from conftest import vq

# Raw answer -> canonical form, covering case folding, articles, number
# words, punctuation, digit commas, and whitespace.
NORMALIZATION_TABLE = [
    ("The Cat!", "cat"),
    ("Two", "2"),
    ("  YES  ", "yes"),
    ("1,000", "1000"),
    ("yes", "yes"),
    ("YES", "yes"),
    ("YeS", "yes"),
    ("No", "no"),
    ("", ""),
    ("   ", ""),
    ("!!!", ""),
    ("a", ""),
    ("an", ""),
    ("the", ""),
    ("a dog", "dog"),
    ("an apple", "apple"),
    ("the the the", ""),
    ("theater", "theater"),
    ("animal", "animal"),
    ("A1", "a1"),
    ("zero", "0"),
    ("one", "1"),
    ("three", "3"),
    ("four", "4"),
    ("five", "5"),
    ("six", "6"),
    ("seven", "7"),
    ("eight", "8"),
    ("nine", "9"),
    ("ten", "10"),
    ("Ten", "10"),
    ("someone", "someone"),
    ("bone", "bone"),
    ("twenty one", "twenty 1"),
    ("one dog", "1 dog"),
    ("no one", "no 1"),
    ("12,345,678", "12345678"),
    ("1, 2", "1 2"),
    ("3.14", "314"),
    ("don't", "dont"),
    ("DON'T KNOW", "dont know"),
    ("black-and-white", "blackandwhite"),
    ("st. patrick's day", "st patricks day"),
    ("What?!", "what"),
    ("  multiple   spaces  here ", "multiple spaces here"),
    ("tab\there", "tab here"),
    ("The  Quick   Brown Fox", "quick brown fox"),
    ("o!ne", "1"),  # punctuation removal exposes a number word; re-normalized
    ("t;he cat", "cat"),
    ("café", "café"),
]

RANDOM_ALPHABET = (
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~ \t"
    "onetwthrfsixane"  # over-weight number-word fragments
)


@pytest.mark.parametrize("raw,expected", NORMALIZATION_TABLE)
def test_normalization_table(raw, expected):
    assert normalize_answer(raw) == expected


def test_normalization_idempotent_on_random_strings():
    rng = random.Random(1234)
    for _ in range(10_000):
        s = "".join(rng.choices(RANDOM_ALPHABET, k=rng.randrange(25)))
        once = normalize_answer(s)
        assert normalize_answer(once) == once


@given(st.text(max_size=40))
@settings(max_examples=200, deadline=None)
def test_normalization_idempotent_property(s):
    once = normalize_answer(s)
    assert normalize_answer(once) == once


def test_valid_answers_thresholds():
    pool = ["yes"] * 5 + ["no"] * 3 + ["maybe"] * 2
    assert valid_answers(pool, m=2).answers == {"yes", "no", "maybe"}
    assert valid_answers(pool, m=3).answers == {"yes", "no"}
    assert valid_answers(pool, m=1).answers == {"yes", "no", "maybe"}


def test_valid_answers_all_distinct_empty_at_two():
    pool = [f"word{i}" for i in range(10)]
    assert valid_answers(pool, m=2).answers == frozenset()


def test_valid_answers_counts_cover_all_answers():
    pool = ["yes"] * 5 + ["no"] * 3 + ["maybe"] * 2
    result = valid_answers(pool, m=3)
    assert sum(result.counts.values()) == len(pool)
    assert result.counts["maybe"] == 2  # invalid answers still tallied


def test_valid_answers_threshold_validation():
    pool = ["yes"] * 10
    with pytest.raises(InvalidThreshold):
        valid_answers(pool, m=0)
    with pytest.raises(InvalidThreshold):
        valid_answers(pool, m=11)


def test_agreement_label_rule():
    assert agreement_label(["yes"] * 9 + ["no"]) is AgreementLabel.AGREEMENT
    assert agreement_label(["yes"] * 8 + ["no"] * 2) is AgreementLabel.DISAGREEMENT
    assert agreement_label(["2"] * 10) is AgreementLabel.AGREEMENT


def test_agreement_label_normalizes_before_matching():
    assert agreement_label(["Yes!", "yes"] * 5) is AgreementLabel.AGREEMENT


def test_agreement_label_needs_two_answers():
    with pytest.raises(AnswerCountMismatch):
        agreement_label(["yes"])


@given(
    st.lists(st.sampled_from(["yes", "no", "maybe", "2"]), min_size=2, max_size=10),
    st.randoms(use_true_random=False),
)
@settings(max_examples=100, deadline=None)
def test_agreement_and_valid_answers_permutation_invariant(pool, rnd):
    shuffled = list(pool)
    rnd.shuffle(shuffled)
    assert agreement_label(shuffled) is agreement_label(pool)
    assert valid_answers(shuffled, 2).answers == valid_answers(pool, 2).answers


@given(st.lists(st.sampled_from(["a1", "b2", "c3", "d4"]), min_size=4, max_size=10))
@settings(max_examples=100, deadline=None)
def test_valid_answers_monotone_in_threshold(pool):
    previous = None
    for m in range(1, len(pool) + 1):
        current = valid_answers(pool, m).answers
        if previous is not None:
            assert current <= previous
        previous = current


@given(st.lists(st.sampled_from(["x", "y"]), min_size=10, max_size=10))
@settings(max_examples=100, deadline=None)
def test_agreement_implies_single_valid_answer_at_two(pool):
    if agreement_label(pool) is AgreementLabel.AGREEMENT:
        assert len(valid_answers(pool, 2).answers) == 1


def _three_question_corpus():
    return Corpus.from_questions(
        [
            vq(1, "is it day", ["yes"] * 10),
            vq(2, "is it night", ["no"] * 9 + ["dusk"]),
            vq(3, "what color", ["red", "red", "blue", "blue", "green", "green",
                                 "cyan", "pink", "gray", "tan"]),
        ]
    )


def test_diversity_histogram_hand_count():
    hist = diversity_histogram(_three_question_corpus(), m=2)
    assert hist[1] == 2
    assert hist[3] == 1
    assert sum(hist.values()) == 3
    assert set(hist) == set(range(11))


def test_diversity_histogram_conservation(mixed_corpus):
    for m in (1, 2, 3):
        assert sum(diversity_histogram(mixed_corpus, m).values()) == len(mixed_corpus)


def test_diversity_histogram_threshold_validation(mixed_corpus):
    with pytest.raises(InvalidThreshold):
        diversity_histogram(mixed_corpus, 0)


def test_agreement_by_answer_type_hand_count():
    corpus = Corpus.from_questions(
        [
            vq(1, "is it sunny", ["yes"] * 10, "yes/no"),
            vq(2, "is it pretty", ["yes"] * 5 + ["no"] * 5, "yes/no"),
        ]
    )
    rates = agreement_by_answer_type(corpus)
    assert rates["yes/no"].unanimous_rate == 0.5
    assert rates["yes/no"].exactly_one_disagreement_rate == 0.0
    assert rates["yes/no"].at_most_one_disagreement_rate == 0.5
    assert rates["yes/no"].n == 2
    assert rates["all"].n == 2


def test_agreement_by_answer_type_strata(mixed_corpus):
    rates = agreement_by_answer_type(mixed_corpus)
    assert set(rates) == {"yes/no", "number", "other", "unknown", "all"}
    assert rates["all"].n == len(mixed_corpus)
    for r in rates.values():
        for value in (r.unanimous_rate, r.exactly_one_disagreement_rate,
                      r.at_most_one_disagreement_rate):
            assert 0.0 <= value <= 1.0
        assert r.at_most_one_disagreement_rate == pytest.approx(
            r.unanimous_rate + r.exactly_one_disagreement_rate
        )
