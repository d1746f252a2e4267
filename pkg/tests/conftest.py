import json

import pytest

from crowd_consensus import Corpus, VisualQuestion


def vq(qid, text, answers, answer_type=None, image_id=None):
    return VisualQuestion(
        question_id=qid,
        image_id=image_id if image_id is not None else qid,
        question_text=text,
        raw_answers=tuple(answers),
        answer_type=answer_type,
    )


@pytest.fixture
def mixed_corpus():
    """Six questions mixing agreement outcomes and answer types."""
    return Corpus.from_questions(
        [
            vq(1, "is the sky blue", ["yes"] * 10, "yes/no"),
            vq(2, "is this picture scary", ["yes"] * 5 + ["no"] * 5, "yes/no"),
            vq(3, "how many dogs are there", ["2"] * 9 + ["3"], "number"),
            vq(4, "what color is the car", ["red"] * 4 + ["blue"] * 3 + ["maroon"] * 3, "other"),
            vq(5, "why is the man sad", [f"reason {i}" for i in range(10)], "other"),
            vq(6, "what is on the table", ["lamp"] * 8 + ["light", "bulb"]),
        ],
        source_tag="toy",
    )


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return path
