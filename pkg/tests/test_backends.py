import pytest

from genex.backends import (
    FuzzBackend,
    GoldCorpusBackend,
    GoldTargetBackend,
    PromptRoutedBackend,
    ScoreQuery,
    UniformBackend,
    fuzz_backend,
    oracle_from_gold,
)
from genex.corpus import load_corpus
from genex.errors import BackendError
from genex.paren import ParenList
from genex.schema import parse_schema

QUERY = ScoreQuery(("p",), (), ("(", ")", "a"))


def test_query_requires_allowed_tokens():
    with pytest.raises(ValueError):
        ScoreQuery(("p",), (), ())


def test_query_normalizes_to_tuples():
    query = ScoreQuery(["p"], ["("], ["a", "b"])
    assert query.prompt == ("p",)
    assert query.allowed == ("a", "b")


def test_uniform_scores_zero():
    assert UniformBackend().score(QUERY) == [0.0, 0.0, 0.0]


def test_fuzz_same_seed_same_scores():
    assert FuzzBackend(4).score(QUERY) == FuzzBackend(4).score(QUERY)
    assert fuzz_backend(4).score(QUERY) == FuzzBackend(4).score(QUERY)


def test_fuzz_seeds_differ_somewhere():
    queries = [ScoreQuery(("p", str(i)), (), ("a", "b")) for i in range(100)]
    a = [FuzzBackend(1).score(q) for q in queries]
    b = [FuzzBackend(2).score(q) for q in queries]
    assert a != b


def test_fuzz_order_independent_across_queries():
    # per-query seeding: asking other queries first changes nothing
    backend = FuzzBackend(8)
    first = backend.score(QUERY)
    backend.score(ScoreQuery(("other",), (), ("x",)))
    assert backend.score(QUERY) == first


def test_oracle_scores_gold_token_highest():
    backend = oracle_from_gold(ParenList((("a",),)))
    # stream is ( ( a ) ); after "( (" the gold token is "a"
    scores = backend.score(ScoreQuery(("p",), ("(", "("), (")", "a", "b")))
    assert scores == [0.0, 1.0, 0.0]


def test_oracle_off_path_penalizes_everything_but_close():
    backend = oracle_from_gold(ParenList((("a",),)))
    scores = backend.score(ScoreQuery(("p",), ("(", "(", "b"), (")", "c")))
    assert scores == [0.0, -1.0]


def test_oracle_accepts_plain_item_lists():
    assert isinstance(oracle_from_gold([("a",)]), GoldTargetBackend)
    assert isinstance(oracle_from_gold(ParenList()), GoldTargetBackend)


def test_prompt_routed_dispatch():
    table = {("p1",): UniformBackend()}
    backend = PromptRoutedBackend(table.get)
    assert backend.score(ScoreQuery(("p1",), (), ("a",))) == [0.0]
    with pytest.raises(BackendError):
        backend.score(ScoreQuery(("p2",), (), ("a",)))


CORPUS_JSONL = b"""
{"id": "s1", "tokens": ["Police", "arrested", "him", "in", "Boston"], "records": [{"type": "ARREST_JAIL", "triggers": [[1, 2]], "arguments": [{"role": "person", "span": [2, 3]}, {"role": "place", "span": [4, 5]}]}]}
{"id": "s2", "tokens": ["Nothing", "happened"], "records": []}
"""

SCHEMA = parse_schema("ARREST_JAIL: person, agent, place\nMEET: entity\n")


@pytest.fixture()
def corpus_backend():
    return GoldCorpusBackend(load_corpus(CORPUS_JSONL, SCHEMA), SCHEMA)


def test_corpus_backend_etd_items(corpus_backend):
    sentence = ("Police", "arrested", "him", "in", "Boston")
    assert corpus_backend.gold_items(sentence) == [("ARREST_JAIL",)]
    assert corpus_backend.gold_items(("Nothing", "happened")) == []


def test_corpus_backend_trigger_items(corpus_backend):
    prompt = ("ARREST_JAIL", "</s>", "Police", "arrested", "him", "in", "Boston")
    assert corpus_backend.gold_items(prompt) == [("arrested",)]
    negative = ("MEET", "</s>", "Police", "arrested", "him", "in", "Boston")
    assert corpus_backend.gold_items(negative) == []


def test_corpus_backend_argument_items(corpus_backend):
    prompt = (
        "ARREST_JAIL", "</s>", "person", "</s>",
        "Police", "arrested", "him", "in", "Boston",
    )
    assert corpus_backend.gold_items(prompt) == [("him",)]
    unfilled = (
        "ARREST_JAIL", "</s>", "agent", "</s>",
        "Police", "arrested", "him", "in", "Boston",
    )
    assert corpus_backend.gold_items(unfilled) == []


def test_corpus_backend_unknown_sentence(corpus_backend):
    with pytest.raises(BackendError):
        corpus_backend.gold_items(("No", "such", "sentence"))


def test_corpus_backend_scores_like_target_oracle(corpus_backend):
    prompt = ("ARREST_JAIL", "</s>", "Police", "arrested", "him", "in", "Boston")
    scores = corpus_backend.score(ScoreQuery(prompt, ("(", "("), ("arrested", ")")))
    assert scores == [1.0, 0.0]
