import pytest
from hypothesis import given, settings

from bugexplain.automata import (
    Dfa,
    Label,
    ThreeDfa,
    backward_reachability,
    minimize3,
    word,
    words_up_to,
)
from bugexplain.fixtures import random_fixture
from bugexplain.oracle import brute_may_pass
from bugexplain.relabel import (
    ExplanationKind,
    RelabelError,
    check_consistency,
    ed_relabel,
    efe_relabel,
    relabel_for,
)
from bugexplain.sut import capture_automaton
from bugexplain.testmodel import sigma_star

from conftest import three_dfas


def doomed_fixture():
    """S = {a, ab, abb}, B = {ab, abb}: the passing test "a" can only grow into failures."""
    s = Dfa.from_table(("a", "b"), "e", {"1", "2", "3"},
                       {("e", "a"): "1", ("1", "b"): "2", ("2", "b"): "3"})
    b = Dfa.from_table(("a", "b"), "e", {"2", "3"},
                       {("e", "a"): "1", ("1", "b"): "2", ("2", "b"): "3"})
    return s, b


def test_efe_demotes_doomed_passing_state():
    s, b = doomed_fixture()
    cap = minimize3(capture_automaton(sigma_star(s.alphabet).dfa, s, b))
    assert cap.num_states == 5
    assert cap.classify(("a",)) is Label.REJ
    assert not brute_may_pass(s, b, ("a",))
    out = efe_relabel(cap)
    assert out.classify(("a",)) is Label.DONT
    assert out.labels.count(Label.ACC) == cap.labels.count(Label.ACC)


def test_efe_keeps_self_looping_rej():
    t = ThreeDfa(("a", "b"), 0, [[0, 1], [1, 1]], [Label.REJ, Label.ACC])
    assert efe_relabel(t) == t


def test_efe_keeps_maximal_passing_test():
    # "a" passes and has no valid extension at all
    t = ThreeDfa(("a",), 0, [[1], [2], [2]], [Label.DONT, Label.REJ, Label.DONT])
    assert efe_relabel(t).classify(("a",)) is Label.REJ


def test_efe_on_running_example(unr):
    cap = unr.capture()
    out = efe_relabel(cap)
    assert out == cap  # "1(1Σ)*" passes forever along 111...


def test_ed_running_example(unr):
    out = ed_relabel(unr.capture())
    assert out.classify(word("0")) is Label.ACC
    assert out.classify(word("1")) is Label.REJ
    assert out.classify(()) is Label.DONT  # reaches both 00 and 1


def test_ed_without_acc_is_identity():
    t = ThreeDfa(("a",), 0, [[1], [1]], [Label.DONT, Label.REJ])
    assert ed_relabel(t) == t


def test_ed_rejects_acc_reaching_rej():
    t = ThreeDfa(("a",), 0, [[1], [1]], [Label.ACC, Label.REJ])
    with pytest.raises(RelabelError):
        ed_relabel(t)


def test_check_consistency_examples(unr, fe3, edfe4):
    cap = unr.capture()
    assert check_consistency(fe3, cap, ExplanationKind.FE) is None
    everything = Dfa(("0", "1"), 0, [[0, 0]], {0})
    assert check_consistency(everything, cap, ExplanationKind.FE) == ("1",)
    assert check_consistency(cap.view(Label.ACC), cap) is None
    ed = relabel_for(ExplanationKind.EDFE, cap)
    assert check_consistency(edfe4, ed, ExplanationKind.EDFE) is None
    assert check_consistency(fe3, ed, ExplanationKind.EDFE) == ("0",)


def test_kind_parse():
    assert ExplanationKind.parse("EDEFE") is ExplanationKind.EDEFE
    with pytest.raises(ValueError, match="unknown kind"):
        ExplanationKind.parse("bogus")


def closed_three_dfas():
    # random 3DFAs can have Acc states reaching Rej; keep those that do not
    return three_dfas().filter(
        lambda t: not any(q in t.states_labeled(Label.ACC) for q in _reaching_rej(t)))


def _reaching_rej(t):
    return backward_reachability(t, t.states_labeled(Label.REJ))


@settings(max_examples=80, deadline=None)
@given(three_dfas())
def test_efe_shape_and_idempotence(t):
    t = minimize3(t)
    out = efe_relabel(t)
    assert out.transitions == t.transitions and out.initial == t.initial
    assert out.states_labeled(Label.REJ) <= t.states_labeled(Label.REJ)
    assert out.states_labeled(Label.ACC) == t.states_labeled(Label.ACC)
    assert t.states_labeled(Label.DONT) <= out.states_labeled(Label.DONT)
    assert efe_relabel(out) == out


@settings(max_examples=80, deadline=None)
@given(closed_three_dfas())
def test_ed_shape_and_idempotence(t):
    out = ed_relabel(t)
    assert out.transitions == t.transitions and out.initial == t.initial
    assert t.states_labeled(Label.ACC) <= out.states_labeled(Label.ACC)
    assert out.states_labeled(Label.REJ) == t.states_labeled(Label.REJ)
    assert ed_relabel(out) == out


@pytest.mark.parametrize("seed", range(30))
def test_efe_matches_definition(seed):
    sc = random_fixture(seed).scenario("unr")
    cap = sc.capture()
    out = efe_relabel(cap)
    for w in words_up_to(cap.alphabet, 5):
        if cap.classify(w) is Label.REJ:
            assert (out.classify(w) is Label.REJ) == brute_may_pass(sc.s_dfa, sc.b_dfa, w)
