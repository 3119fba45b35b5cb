import pytest

from bugexplain.automata import Dfa, Label, word
from bugexplain.extract import extract_explanation
from bugexplain.fixtures import random_fixture
from bugexplain.oracle import (
    OracleBudgetError,
    brute_early_detect,
    brute_may_pass,
    enumerate_classify,
    exhaustive_min_consistent,
)
from bugexplain.relabel import ExplanationKind, check_consistency, relabel_for

K = ExplanationKind


def test_enumerate_classify_unr(unr):
    table = enumerate_classify(unr, 3)
    assert len(table) == 15
    assert table[()] is Label.DONT
    assert table[word("00")] is Label.ACC
    assert table[word("1")] is Label.REJ
    assert table[word("10")] is Label.ACC
    assert table[word("11")] is Label.REJ
    assert table[word("01")] is Label.DONT


def test_enumerate_classify_fdr_short_words(example):
    # with cex "10" every word of length <= 1 misses a letter
    table = enumerate_classify(example.scenario("fdr"), 1)
    assert set(table.values()) == {Label.DONT}


def test_enumerate_classify_budget(unr):
    with pytest.raises(OracleBudgetError):
        enumerate_classify(unr, 20, budget=1000)


def test_may_pass_examples(example):
    s, b = example.s_dfa, example.b_dfa
    assert brute_may_pass(s, b, word("1"))  # 1 1 1 ... passes forever
    assert brute_may_pass(s, b, ())
    assert not brute_may_pass(s, b, word("0"))  # only 00Σ* remains
    assert not brute_may_pass(s, b, word("10"))
    with pytest.raises(ValueError):
        brute_may_pass(s, b, word("01"))


def test_may_pass_maximal_test():
    # S = {a}, B = {}: "a" passes and has no proper extension in S
    s = Dfa(("a",), 0, [[1], [2], [2]], {1})
    b = Dfa(("a",), 0, [[0]], set())
    assert brute_may_pass(s, b, word("a"))


def test_early_detect_examples(example):
    s, b = example.s_dfa, example.b_dfa
    assert brute_early_detect(s, b, word("0"))
    assert not brute_early_detect(s, b, word("1"))
    assert not brute_early_detect(s, b, ())
    assert brute_early_detect(s, b, word("10"))
    assert not brute_early_detect(s, b, word("01"))  # reaches nothing valid


def test_exhaustive_fe(unr, fe3):
    spec = relabel_for(K.FE, unr.capture())
    assert exhaustive_min_consistent(spec, max_states=2) is None
    found = exhaustive_min_consistent(spec, max_states=3)
    assert found.num_states == 3
    assert check_consistency(found, spec, K.FE) is None


def test_exhaustive_edfe(unr):
    spec = relabel_for(K.EDFE, unr.capture())
    assert exhaustive_min_consistent(spec, max_states=3) is None
    found = exhaustive_min_consistent(spec, max_states=4)
    assert found.num_states == 4
    assert check_consistency(found, spec, K.EDFE) is None


def test_exhaustive_budget(unr):
    spec = relabel_for(K.EDFE, unr.capture())
    with pytest.raises(OracleBudgetError):
        exhaustive_min_consistent(spec, max_states=4, budget=3)


@pytest.mark.parametrize("seed", range(12))
def test_exhaustive_is_a_lower_bound(seed):
    cap = random_fixture(seed).scenario("unr").capture()
    for kind in (K.FE, K.EDFE):
        spec = relabel_for(kind, cap)
        size = extract_explanation(cap, kind).num_states
        best = exhaustive_min_consistent(spec, max_states=size)
        assert best is not None and best.num_states <= size
        assert check_consistency(best, spec, kind) is None
