import random

import pytest

from genex.errors import TrieError
from genex.trie import TokenTrie, build_trie, span_candidates


def test_allowed_next_at_root():
    trie = build_trie([("a",), ("a", "b"), ("c",)])
    allowed = trie.allowed_next(())
    assert allowed.tokens == frozenset({"a", "c"})
    assert allowed.may_terminate is False


def test_allowed_next_mid_candidate():
    trie = build_trie([("a",), ("a", "b")])
    allowed = trie.allowed_next(("a",))
    assert allowed.tokens == frozenset({"b"})
    assert allowed.may_terminate is True  # ("a",) is itself a candidate


def test_allowed_next_off_trie_prefix():
    trie = build_trie([("a", "b")])
    allowed = trie.allowed_next(("z",))
    assert allowed.tokens == frozenset()
    assert allowed.may_terminate is False


def test_contains():
    trie = build_trie([("a", "b")])
    assert ("a", "b") in trie
    assert ("a",) not in trie
    assert () not in trie


def test_len_counts_distinct_candidates():
    trie = build_trie([("a",), ("a",), ("b",)])
    assert len(trie) == 2


def test_max_candidate_len():
    assert build_trie([("a",), ("b", "c", "d")]).max_candidate_len == 3
    assert build_trie([]).max_candidate_len == 0


def test_candidates_iteration():
    items = [("a",), ("a", "b"), ("c", "d")]
    trie = build_trie(items)
    assert sorted(trie.candidates()) == sorted(items)


def test_invalid_candidates_rejected():
    with pytest.raises(TrieError):
        build_trie([()])
    with pytest.raises(TrieError):
        build_trie([("(",)])


def brute_force_allowed(candidates, prefix):
    nexts = {c[len(prefix)] for c in candidates if len(c) > len(prefix) and c[: len(prefix)] == prefix}
    terminal = prefix in candidates
    return nexts, terminal


def test_matches_brute_force_on_random_sets():
    rng = random.Random(11)
    alphabet = ["a", "b", "c", "d"]
    for _ in range(50):
        candidates = {
            tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 4)))
            for _ in range(rng.randint(1, 20))
        }
        trie = build_trie(candidates)
        prefixes = {c[:k] for c in candidates for k in range(len(c) + 1)}
        prefixes |= {("z",), ("a", "z"), ()}
        for prefix in prefixes:
            nexts, terminal = brute_force_allowed(candidates, prefix)
            allowed = trie.allowed_next(prefix)
            assert allowed.tokens == frozenset(nexts)
            assert allowed.may_terminate == terminal


def test_span_candidates_enumeration():
    spans = span_candidates(("a", "b", "a"), 2)
    assert spans == {("a",), ("b",), ("a", "b"), ("b", "a")}


def test_span_candidates_cap_exceeding_sentence():
    spans = span_candidates(("a", "b"), 10)
    assert ("a", "b") in spans


def test_span_candidates_requires_positive_max_len():
    with pytest.raises(ValueError):
        span_candidates(("a",), 0)


def test_empty_trie_is_falsy():
    assert not build_trie([])
    assert bool(build_trie([("a",)]))
    assert isinstance(build_trie([]), TokenTrie)
