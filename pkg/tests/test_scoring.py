import json
import random

import pytest

from genex.corpus import Span, parse_corpus_line
from genex.errors import CorpusValidationError
from genex.scoring import (
    Metrics,
    argument_items,
    check_alignment,
    corpus_argument_items,
    corpus_trigger_items,
    f1,
    score_arguments,
    score_corpora,
    score_report,
    score_triggers,
    trigger_items,
)


def sent(sid, tokens, records):
    return parse_corpus_line(json.dumps({"id": sid, "tokens": tokens, "records": records}))


def test_hand_worked_counts():
    # 2 predicted, 1 correct, 4 gold: P=1/2, R=1/4, F1=1/3
    pred = [("s", "T", Span(0, 1)), ("s", "T", Span(2, 3))]
    gold = [
        ("s", "T", Span(0, 1)),
        ("s", "T", Span(4, 5)),
        ("s", "U", Span(2, 3)),
        ("s2", "T", Span(2, 3)),
    ]
    metrics = score_triggers(pred, gold)
    assert metrics.precision == pytest.approx(0.5, abs=1e-12)
    assert metrics.recall == pytest.approx(0.25, abs=1e-12)
    assert metrics.f1 == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert metrics.counts == (1, 2, 4)


def test_empty_against_empty_is_perfect():
    metrics = score_triggers([], [])
    assert (metrics.precision, metrics.recall, metrics.f1) == (1.0, 1.0, 1.0)


def test_empty_prediction_against_gold_scores_zero():
    metrics = score_triggers([], [("s", "T", Span(0, 1))])
    assert metrics.precision == 0.0
    assert metrics.recall == 0.0
    assert metrics.f1 == 0.0


def test_prediction_against_empty_gold_scores_zero():
    metrics = score_triggers([("s", "T", Span(0, 1))], [])
    assert metrics.precision == 0.0
    assert metrics.recall == 0.0


def test_duplicate_predictions_consume_gold_once():
    item = ("s", "T", Span(0, 1))
    metrics = score_triggers([item, item, item], [item])
    assert metrics.correct == 1
    assert metrics.precision == pytest.approx(1.0 / 3.0)
    assert metrics.recall == 1.0


def test_duplicate_gold_needs_duplicate_predictions():
    item = ("s", "T", Span(0, 1))
    metrics = score_triggers([item], [item, item])
    assert metrics.correct == 1
    assert metrics.recall == 0.5
    metrics = score_triggers([item, item], [item, item])
    assert metrics.correct == 2
    assert metrics.f1 == 1.0


def test_argument_key_includes_role():
    base = ("s", "T")
    metrics = score_arguments(
        [base + ("agent", Span(0, 1))], [base + ("place", Span(0, 1))]
    )
    assert metrics.correct == 0


def test_f1_helper():
    assert f1(0.0, 0.0) == 0.0
    assert f1(1.0, 1.0) == 1.0
    assert f1(0.5, 0.25) == pytest.approx(1.0 / 3.0)


def test_correct_bounded_by_both_sides():
    rng = random.Random(4)
    universe = [("s", "T", Span(i, i + 1)) for i in range(6)]
    for _ in range(200):
        pred = [rng.choice(universe) for _ in range(rng.randrange(8))]
        gold = [rng.choice(universe) for _ in range(rng.randrange(8))]
        metrics = score_triggers(pred, gold)
        assert metrics.correct <= min(len(pred), len(gold))
        assert 0.0 <= metrics.precision <= 1.0
        assert 0.0 <= metrics.recall <= 1.0
        assert min(metrics.precision, metrics.recall) <= metrics.f1
        assert metrics.f1 <= max(metrics.precision, metrics.recall)


def test_item_extraction_from_sentences():
    annotated = sent(
        "a",
        ["x", "y", "z"],
        [
            {
                "type": "T",
                "triggers": [[0, 1], [1, 2]],
                "arguments": [{"role": "r", "span": [2, 3]}],
            }
        ],
    )
    triggers = trigger_items(annotated)
    assert len(triggers) == 2
    assert triggers[0][0] == "a"
    assert triggers[0][2] == Span(0, 1)
    arguments = argument_items(annotated)
    assert len(arguments) == 1
    assert arguments[0][2].name == "r"


def test_corpus_items_concatenate_in_order():
    one = sent("a", ["x"], [{"type": "T", "triggers": [[0, 1]], "arguments": []}])
    two = sent("b", ["y"], [{"type": "T", "triggers": [[0, 1]], "arguments": []}])
    items = corpus_trigger_items([one, two])
    assert [i[0] for i in items] == ["a", "b"]
    assert corpus_argument_items([one, two]) == []


def test_alignment_check_names_offenders():
    one = sent("a", ["x"], [])
    two = sent("b", ["y"], [])
    with pytest.raises(CorpusValidationError) as excinfo:
        check_alignment([one], [two])
    assert "a" in str(excinfo.value)
    assert "b" in str(excinfo.value)
    check_alignment([one, two], [two, one])  # order-insensitive


def test_score_corpora_end_to_end():
    gold = sent(
        "a",
        ["x", "y"],
        [
            {
                "type": "T",
                "triggers": [[0, 1]],
                "arguments": [{"role": "r", "span": [1, 2]}],
            }
        ],
    )
    pred_right = sent(
        "a",
        ["x", "y"],
        [
            {
                "type": "T",
                "triggers": [[0, 1]],
                "arguments": [{"role": "r", "span": [0, 1]}],
            }
        ],
    )
    trigger, argument = score_corpora([pred_right], [gold])
    assert trigger.f1 == 1.0
    assert argument.f1 == 0.0


def test_score_report_shape():
    trigger = Metrics.from_counts(1, 2, 4)
    argument = Metrics.from_counts(0, 0, 0)
    report = score_report(trigger, argument)
    assert set(report) == {"trigger", "argument", "counts"}
    assert report["trigger"] == {"p": 0.5, "r": 0.25, "f1": pytest.approx(1 / 3)}
    assert report["argument"]["f1"] == 1.0
    assert report["counts"]["trigger"] == {"correct": 1, "predicted": 2, "gold": 4}
    json.dumps(report)  # must serialize as-is


def test_from_counts_rejects_nothing_but_matches_definitions():
    metrics = Metrics.from_counts(3, 4, 6)
    assert metrics.precision == 0.75
    assert metrics.recall == 0.5
    assert metrics.f1 == pytest.approx(0.6)
