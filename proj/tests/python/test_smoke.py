import os
import pathlib

import pytest

import kconflict

TOY = pathlib.Path(os.environ.get("KCONFLICT_SOURCE_DIR", pathlib.Path(__file__).parents[2])) / "data" / "toy"


def passage(pid, text, mentions, retrieval=1.0, attention=0.5):
    spans = []
    for surface, kind in mentions:
        start = text.find(surface)
        spans.append({"start": start, "end": start + len(surface), "type": kind})
    return {"qid": "q", "pid": pid, "title": pid, "text": text, "rank": 1,
            "retrieval_score": retrieval, "attention_score": attention,
            "entities": spans, "sentences": []}


QUESTION = {"qid": "q", "question": "When did the Bills win?", "answers": ["1995"],
            "answer_type": "date"}


def test_normalize_and_exact_match():
    assert kconflict.normalize_answer("The U.S.") == "us"
    assert kconflict.exact_match("the 1995", ["1995"])
    assert kconflict.selection_count(0.5, 3) == 2


def test_memorization_ratio_undefined_raises():
    assert kconflict.memorization_ratio(0.3, 0.1) == pytest.approx(0.75)
    with pytest.raises(kconflict.KconflictError):
        kconflict.memorization_ratio(0.0, 0.0)


def test_substitute_replaces_answer():
    passages = [passage("p1", "the 1995 Bills won the AFC East", [("1995", "date")])]
    out, record = kconflict.substitute(QUESTION, passages, "random", fraction=1.0,
                                       substitute="1936", seed=1)
    assert out[0]["text"] == "the 1936 Bills won the AFC East"
    assert record["answer_passages_after"] == 0


def test_simulate_and_mix():
    a = [passage("a1", "It was 1995.", [("1995", "date")], 2.0)]
    b = [passage("b1", "It was 1936.", [("1936", "date")], 1.0)]
    pred = kconflict.simulate(QUESTION, a, {"focus_k": 1})
    assert pred["prediction"] == "1995"
    mixed = kconflict.mix("q", a, ["1995"], b, ["1936"], 2)
    assert [p["pid"] for p in mixed["passages"]] == ["a1", "b1"]


def test_calibrator_round_trip():
    features = [[x / 20.0] for x in range(20)]
    labels = [int(x >= 10) for x in range(20)]
    model, losses = kconflict.train_calibrator(features, labels, rounds=10, seed=3)
    assert losses[-1] < losses[0]
    scores = kconflict.predict_calibrator(model, features)
    assert kconflict.binary_accuracy(scores, labels) == 1.0
    assert kconflict.auroc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == pytest.approx(0.75)


def test_confidence_drop():
    stats = kconflict.confidence_drop([(0.9, 0.5), (0.3, 0.4)])
    assert stats["dropped"] == 1


def test_toy_corpus_and_study():
    toy = kconflict.toy_corpus()
    assert len(toy["questions"]) == len(toy["passages"]) > 0
    result = kconflict.entity_study({
        "questions": str(TOY / "questions.jsonl"),
        "passages": str(TOY / "passages.jsonl"),
        "train_questions": str(TOY / "train_questions.jsonl"),
        "seed": 13,
    })
    assert len(result["cells"]) == 12
