import io
import json

import pytest

from bugexplain.automata import (
    Dfa,
    Label,
    ThreeDfa,
    canonicalize,
    minimize3,
    word,
    words_up_to,
)
from bugexplain.fixtures import random_fixture, shop_fixture
from bugexplain.lstar import (
    EquivalenceConfig,
    LearningBudgetError,
    Teacher,
    Transcript,
    equivalence_query,
    learn,
    membership_query,
    random_w_method,
)
from bugexplain.oracle import enumerate_classify
from bugexplain.sut import Outcome, SimulatedSut, TestRepo
from bugexplain.testmodel import TestModel, contains_all_letters, sigma_star


def teacher_for(scenario, exact=True, **cfg):
    ref = scenario.capture() if exact else None
    return Teacher(scenario.test_model, scenario.sut, EquivalenceConfig(**cfg), reference=ref)


def test_membership_examples(unr):
    t = teacher_for(unr)
    assert membership_query(t, word("00")) is Label.ACC
    assert membership_query(t, ()) is Label.DONT
    assert membership_query(t, word("1")) is Label.REJ


def test_membership_outside_t_never_executes(example):
    fdr = example.scenario("fdr")
    t = teacher_for(fdr)
    assert membership_query(t, word("11")) is Label.DONT
    assert t.sut.executions == 0
    assert membership_query(t, word("10")) is Label.ACC
    assert t.sut.executions == 1


def test_membership_uses_repo_first(unr):
    repo = TestRepo()
    repo.record(word("1"), Outcome.PASSED)
    t = Teacher(unr.test_model, unr.sut, repo=repo)
    assert t.membership_query(word("1")) is Label.REJ
    assert t.sut.executions == 0
    t.membership_query(word("00"))
    t.membership_query(word("00"))
    assert t.sut.executions == 1
    assert len(repo) == 2


def test_equivalence_true_capture(unr):
    t = teacher_for(unr)
    assert equivalence_query(t, unr.capture()) is None
    walks = teacher_for(unr, exact=False, seed=3)
    assert equivalence_query(walks, unr.capture()) is None


def test_equivalence_finds_wrong_acc(unr):
    cap = unr.capture()
    q0 = cap.run(word("0"))
    labels = list(cap.labels)
    labels[q0] = Label.ACC
    wrong = cap.relabel(labels)
    for exact in (True, False):
        t = teacher_for(unr, exact=exact, seed=1)
        w = equivalence_query(t, wrong)
        assert w is not None
        assert wrong.classify(w) is not t.membership_query(w)
    assert equivalence_query(teacher_for(unr), wrong) == ("0",)


def test_equivalence_subset_check_hits_outside_t(example):
    fdr = example.scenario("fdr")
    # a hypothesis calling every word starting with 1 Acc, including 11...
    hyp = ThreeDfa(("0", "1"), 0, [[1, 2], [1, 1], [2, 2]], [Label.DONT, Label.DONT, Label.ACC])
    t = teacher_for(fdr)
    w = equivalence_query(t, hyp)
    assert not fdr.test_model.contains(w)
    assert t.transcript.events[-1]["source"] == "test-model"


def test_equivalence_repo_scan_first(unr):
    repo = TestRepo()
    repo.record(word("01"), Outcome.INVALID)
    repo.record(word("1"), Outcome.PASSED)
    everything_acc = ThreeDfa(("0", "1"), 0, [[0, 0]], [Label.ACC])
    t = Teacher(unr.test_model, unr.sut, repo=repo)
    assert equivalence_query(t, everything_acc) == word("01")


def test_random_w_method_edge_cases(unr):
    cap = unr.capture()
    view = cap.view(Label.ACC)
    cfg = EquivalenceConfig(seed=0, walks_per_view=200)
    assert random_w_method(view, cap.classify, Label.ACC, cfg) is None
    assert random_w_method(view, lambda w: Label.ACC, Label.ACC,
                           EquivalenceConfig(walks_per_view=0)) is None


def test_random_w_method_finds_missing_00(unr):
    cap = unr.capture()
    # accept only 1(1Σ)*0Σ*, missing the 00Σ* part
    partial = Dfa(("0", "1"), 0, [[3, 1], [2, 4], [2, 2], [3, 3], [1, 1]], {2})
    cfg = EquivalenceConfig(seed=42, walks_per_view=500)
    w = random_w_method(partial, cap.classify, Label.ACC, cfg)
    assert w is not None
    assert cap.classify(w) is Label.ACC and not partial.accepts(w)
    assert random_w_method(partial, cap.classify, Label.ACC, cfg) == w


def test_learn_running_example_exact(unr):
    t = teacher_for(unr)
    result = learn(t)
    truth = enumerate_classify(unr, 8)
    assert all(result.classify(w) is lab for w, lab in truth.items())
    assert result.num_states == 6
    assert result == canonicalize(minimize3(result))


def test_learn_without_bugs_has_no_acc():
    s = Dfa(("a", "b"), 0, [[1, 0], [1, 1]], {1})
    b = Dfa(("a", "b"), 0, [[0, 0]], set())
    sut = SimulatedSut(s, b)
    result = learn(Teacher(sigma_star(("a", "b")), sut, EquivalenceConfig(walks_per_view=300)))
    assert not result.states_labeled(Label.ACC)
    assert result.classify(("b", "a")) is Label.REJ


def test_learn_single_word_test_model(example):
    only = Dfa(("0", "1"), 0, [[3, 1], [2, 3], [3, 3], [3, 3]], {2})  # T = {"10"}
    t = Teacher(TestModel(only), example.sut(), EquivalenceConfig(seed=5))
    result = learn(t)
    acc = [w for w in words_up_to("01", 2) if result.classify(w) is Label.ACC]
    assert acc == [word("10")]


@pytest.mark.parametrize("setup", ["unr", "fdr", "adr"])
def test_learn_walks_on_running_example(example, setup):
    sc = example.scenario(setup)
    result = learn(teacher_for(sc, exact=False, seed=11))
    truth = canonicalize(minimize3(sc.capture()))
    assert result == truth


def test_learn_is_label_minimal():
    for seed in range(10):
        sc = random_fixture(seed).scenario("unr")
        result = learn(teacher_for(sc))
        assert result.num_states == minimize3(sc.capture()).num_states


def test_learn_deterministic_transcript(example):
    outs = []
    for _ in range(2):
        buf = io.StringIO()
        sc = example.scenario("fdr")
        t = Teacher(sc.test_model, sc.sut, EquivalenceConfig(seed=9), transcript=Transcript(buf))
        outs.append((learn(t), buf.getvalue()))
    assert outs[0] == outs[1]
    events = [json.loads(line) for line in outs[0][1].splitlines()]
    assert events[-1]["event"] == "done"
    assert {e["event"] for e in events} >= {"execute", "hypothesis", "counterexample"}


def test_learn_concurrent_views():
    sc = shop_fixture().scenario("unr")
    t = Teacher(sc.test_model, sc.sut, EquivalenceConfig(seed=2, concurrent=True,
                                                        walks_per_view=3000))
    result = learn(t)
    # racing views may stop early, but every executed word ran once
    assert t.sut.executions == len(t.repo)
    for w, outcome in t.repo.items():
        assert result.classify(w) is outcome.label


def test_learn_round_budget(unr):
    with pytest.raises(LearningBudgetError):
        learn(teacher_for(unr), max_rounds=1)


def test_config_validation():
    with pytest.raises(ValueError):
        EquivalenceConfig(walks_per_view=-1)
    with pytest.raises(ValueError):
        EquivalenceConfig(exact_subset_threshold=0)


def test_sampled_subset_check(example):
    fdr = example.scenario("fdr")
    hyp = ThreeDfa(("0", "1"), 0, [[1, 2], [1, 1], [2, 2]], [Label.DONT, Label.DONT, Label.ACC])
    t = Teacher(fdr.test_model, fdr.sut, EquivalenceConfig(exact_subset_threshold=1, seed=4),
                reference=fdr.capture())
    w = t.equivalence_query(hyp)
    assert w is not None and hyp.classify(w) is not t.membership_query(w)
    assert any(e.get("mode") == "sampled" for e in t.transcript.events)


def test_alphabet_mismatch(unr):
    t = teacher_for(unr)
    with pytest.raises(ValueError):
        t.equivalence_query(ThreeDfa(("x",), 0, [[0]], [Label.DONT]))
    with pytest.raises(ValueError):
        Teacher(contains_all_letters(("x",), ()), unr.sut)
