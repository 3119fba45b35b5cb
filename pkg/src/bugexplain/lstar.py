"""Active learning of a 3-valued automaton that captures a SUT.

The teacher answers membership queries from the test repository, the test
model, or by executing the SUT (in that order). Equivalence queries check the
repository, then that the hypothesis only classifies words of T as Acc/Rej,
then search each label view separately for a disagreement.
"""
from __future__ import annotations

import json
import random
import threading
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, TextIO

from .automata import (
    Dfa,
    Label,
    ProductTooLargeError,
    ThreeDfa,
    Word,
    access_words,
    canonicalize,
    minimize3,
    shortest_witness,
    subset_counterexample,
)
from .sut import RepoBackedSut, Sut, TestRepo
from .testmodel import TestModel


class LearningBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class EquivalenceConfig:
    seed: int = 0
    walks_per_view: int = 1000
    expected_walk_extra_depth: int = 4
    exact_subset_threshold: int = 100_000
    concurrent: bool = False

    def __post_init__(self):
        if self.walks_per_view < 0:
            raise ValueError("walks_per_view must be >= 0")
        if self.exact_subset_threshold < 1:
            raise ValueError("exact_subset_threshold must be >= 1")
        if self.expected_walk_extra_depth < 0:
            raise ValueError("expected_walk_extra_depth must be >= 0")


class Transcript:
    """Structured learning log, one JSON object per line.

    Records carry no timestamps so that equal runs produce equal files.
    """

    def __init__(self, stream: TextIO | None = None):
        self.stream = stream
        self.events: list[dict] = []
        self._lock = threading.Lock()

    def event(self, kind: str, **data) -> None:
        rec = {"event": kind, **data}
        with self._lock:
            self.events.append(rec)
            if self.stream is not None:
                self.stream.write(json.dumps(rec, sort_keys=True) + "\n")

    @classmethod
    def to_file(cls, path: str | Path) -> "Transcript":
        return cls(open(path, "w"))

    def close(self):
        if self.stream is not None:
            self.stream.close()


def _geometric(rng: random.Random, mean: float) -> int:
    if mean <= 0:
        return 0
    p = 1.0 / (mean + 1.0)
    n = 0
    while rng.random() >= p:
        n += 1
    return n


def separating_suffixes(m: ThreeDfa | Dfa) -> list[Word]:
    """ε plus a shortest word separating each pair of distinguishable states."""
    if isinstance(m, ThreeDfa):
        color = m.labels
    else:
        color = [q in m.accepting for q in range(m.num_states)]
    states = list(access_words(m))
    found: dict[Word, None] = {(): None}
    for i, p in enumerate(states):
        for q in states[i + 1:]:
            w = shortest_witness(
                [_start_at(m, p), _start_at(m, q)], lambda s: color[s[0]] != color[s[1]]
            )
            if w is not None:
                found.setdefault(w, None)
    return list(found)


def _start_at(m, q):
    return Dfa(m.alphabet, q, m.transitions, frozenset())


def random_w_method(view: Dfa, truth: Callable[[Word], Label], label: Label,
                    config: EquivalenceConfig, rng: random.Random | None = None,
                    suffixes: Sequence[Word] | None = None,
                    stop: threading.Event | None = None) -> Word | None:
    """Randomized W-method search for a word on which ``view`` is wrong about ``label``.

    Each candidate is the access word of a uniformly chosen state, a random
    infix of geometric length, and a separating suffix.
    """
    if config.walks_per_view == 0:
        return None
    rng = rng if rng is not None else random.Random(config.seed)
    access = list(access_words(view).values())
    if suffixes is None:
        suffixes = separating_suffixes(view)
    alphabet = view.alphabet
    for _ in range(config.walks_per_view):
        if stop is not None and stop.is_set():
            return None
        infix = tuple(rng.choice(alphabet)
                      for _ in range(_geometric(rng, config.expected_walk_extra_depth)))
        w = rng.choice(access) + infix + tuple(rng.choice(suffixes))
        if (truth(w) is label) != view.accepts(w):
            return w
    return None


class Teacher:
    """Answers membership and equivalence queries about a SUT within a test model.

    With ``reference`` (the true capture 3DFA, known for simulated SUTs) the
    per-view searches are exact product checks instead of random walks.
    """

    def __init__(self, test_model: TestModel, sut: Sut,
                 config: EquivalenceConfig | None = None, repo: TestRepo | None = None,
                 reference: ThreeDfa | None = None, transcript: Transcript | None = None):
        self.test_model = test_model
        self.sut = sut if isinstance(sut, RepoBackedSut) else RepoBackedSut(sut, repo)
        if tuple(self.sut.alphabet) != test_model.alphabet:
            raise ValueError("SUT and test model alphabets differ")
        self.config = config or EquivalenceConfig()
        self.reference = reference
        self.transcript = transcript or Transcript()
        self.rng = random.Random(self.config.seed)
        self.membership_queries = 0
        self.equivalence_queries = 0
        self.suffixes: Sequence[Word] | None = None

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.test_model.alphabet

    @property
    def repo(self) -> TestRepo:
        return self.sut.repo

    def membership_query(self, w: Sequence[str]) -> Label:
        w = tuple(w)
        self.membership_queries += 1
        hit = self.repo.lookup(w)
        if hit is not None:
            return hit.label
        if not self.test_model.contains(w):
            for a in w:
                self.test_model.dfa.letter_index(a)
            return Label.DONT
        outcome = self.sut.execute(w)
        self.transcript.event("execute", word=list(w), outcome=outcome.value)
        return outcome.label

    def _confirm(self, hyp: ThreeDfa, w: Word | None, source: str) -> Word | None:
        if w is None:
            return None
        truth = self.membership_query(w)
        assert truth is not hyp.classify(w), f"{source} returned a non-counterexample"
        self.transcript.event("counterexample", source=source, word=list(w),
                              hypothesis=hyp.classify(w).value, truth=truth.value)
        return w

    def equivalence_query(self, hyp: ThreeDfa) -> Word | None:
        if hyp.alphabet != self.alphabet:
            raise ValueError("hypothesis alphabet differs from the teacher's")
        self.equivalence_queries += 1

        for w, outcome in self.repo.items():
            if hyp.classify(w) is not outcome.label:
                return self._confirm(hyp, w, "repo")

        w = self._outside_test_model(hyp)
        if w is not None:
            return self._confirm(hyp, w, "test-model")

        views = (Label.ACC, Label.REJ, Label.DONT)
        if self.reference is not None:
            for lab in views:
                w = _view_difference(hyp, self.reference, lab)
                if w is not None:
                    return self._confirm(hyp, w, f"exact-{lab.value}")
            return None
        if self.config.concurrent:
            return self._race_views(hyp, views)
        for lab in views:
            w = random_w_method(hyp.view(lab), self.membership_query, lab, self.config,
                                self.rng, self.suffixes)
            if w is not None:
                return self._confirm(hyp, w, f"walk-{lab.value}")
        return None

    def _outside_test_model(self, hyp: ThreeDfa) -> Word | None:
        """A word the hypothesis labels Acc or Rej although it lies outside T."""
        decided = hyp.view(Label.ACC, Label.REJ)
        t = self.test_model.dfa
        try:
            w = subset_counterexample(decided, t, self.config.exact_subset_threshold)
            candidates = [] if w is None else [w]
        except ProductTooLargeError:
            self.transcript.event("subset-check", mode="sampled")
            candidates = self._sample_accepted(decided)
        for w in candidates:
            if not t.accepts(w) and self.membership_query(w) is not hyp.classify(w):
                return w
        return None

    def _sample_accepted(self, d: Dfa) -> list[Word]:
        access = list(access_words(d).values())
        out = []
        for _ in range(self.config.walks_per_view):
            infix = tuple(self.rng.choice(d.alphabet)
                          for _ in range(_geometric(self.rng, self.config.expected_walk_extra_depth)))
            w = self.rng.choice(access) + infix
            if d.accepts(w):
                out.append(w)
        return out

    def _race_views(self, hyp: ThreeDfa, views) -> Word | None:
        # results depend on thread timing; the repo wrapper keeps executions unique
        stop = threading.Event()
        with ThreadPoolExecutor(max_workers=len(views)) as pool:
            futures = {
                pool.submit(random_w_method, hyp.view(lab), self.membership_query, lab,
                            self.config, random.Random(self.rng.random()), self.suffixes,
                            stop): lab
                for lab in views
            }
            pending = set(futures)
            while pending:
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done:
                    w = fut.result()
                    if w is not None:
                        stop.set()
                        return self._confirm(hyp, w, f"walk-{futures[fut].value}")
        return None


def _view_difference(hyp: ThreeDfa, ref: ThreeDfa, label: Label) -> Word | None:
    return shortest_witness(
        [hyp, ref], lambda s: (hyp.labels[s[0]] is label) != (ref.labels[s[1]] is label)
    )


def membership_query(teacher: Teacher, w: Sequence[str]) -> Label:
    return teacher.membership_query(w)


def equivalence_query(teacher: Teacher, hypothesis: ThreeDfa) -> Word | None:
    return teacher.equivalence_query(hypothesis)


class ObservationTable:
    """Angluin's table with 3-valued cells.

    ``prefixes`` (short rows) is prefix closed and ``suffixes`` is suffix
    closed; both keep insertion order so hypotheses are reproducible.
    """

    def __init__(self, alphabet: Sequence[str], query: Callable[[Word], Label]):
        self.alphabet = tuple(alphabet)
        self.query = query
        self.prefixes: list[Word] = [()]
        self._prefix_set = {()}
        self.suffixes: list[Word] = [()]
        self.cells: dict[Word, Label] = {}

    def cell(self, u: Word) -> Label:
        lab = self.cells.get(u)
        if lab is None:
            lab = self.cells[u] = self.query(u)
        return lab

    def row(self, u: Word) -> tuple[Label, ...]:
        return tuple(self.cell(u + e) for e in self.suffixes)

    def add_prefix(self, u: Word) -> None:
        if u not in self._prefix_set:
            self._prefix_set.add(u)
            self.prefixes.append(u)

    def add_prefixes_of(self, w: Word) -> None:
        for i in range(len(w) + 1):
            self.add_prefix(tuple(w[:i]))

    def add_suffix(self, e: Word) -> None:
        if e not in self.suffixes:
            self.suffixes.append(e)

    def unclosed_row(self) -> Word | None:
        short = {self.row(s) for s in self.prefixes}
        for s in list(self.prefixes):
            for a in self.alphabet:
                u = s + (a,)
                if u not in self._prefix_set and self.row(u) not in short:
                    return u
        return None

    def inconsistency(self) -> Word | None:
        """A new suffix separating two short rows that currently look equal."""
        by_row: dict[tuple, Word] = {}
        for s in self.prefixes:
            r = self.row(s)
            other = by_row.setdefault(r, s)
            if other is s:
                continue
            for a in self.alphabet:
                for e in self.suffixes:
                    if self.cell(s + (a,) + e) is not self.cell(other + (a,) + e):
                        return (a,) + e
        return None

    def make_closed_and_consistent(self) -> None:
        while True:
            u = self.unclosed_row()
            if u is not None:
                self.add_prefix(u)
                continue
            e = self.inconsistency()
            if e is not None:
                self.add_suffix(e)
                continue
            return

    def hypothesis(self) -> ThreeDfa:
        states: dict[tuple, int] = {}
        reps: list[Word] = []
        for s in self.prefixes:
            r = self.row(s)
            if r not in states:
                states[r] = len(reps)
                reps.append(s)
        rows = [[states[self.row(s + (a,))] for a in self.alphabet] for s in reps]
        labels = tuple(self.cell(s) for s in reps)
        return ThreeDfa(self.alphabet, states[self.row(())], rows, labels)


def learn(teacher: Teacher, max_rounds: int = 1000) -> ThreeDfa:
    """Run L* until an equivalence query finds no counterexample."""
    table = ObservationTable(teacher.alphabet, teacher.membership_query)
    log = teacher.transcript
    for rnd in range(1, max_rounds + 1):
        table.make_closed_and_consistent()
        hyp = table.hypothesis()
        teacher.suffixes = list(table.suffixes)
        log.event("hypothesis", round=rnd, states=hyp.num_states,
                  prefixes=len(table.prefixes), suffixes=len(table.suffixes),
                  membership_queries=teacher.membership_queries,
                  executions=teacher.sut.executions)
        cex = teacher.equivalence_query(hyp)
        if cex is None:
            result = canonicalize(minimize3(hyp))
            log.event("done", rounds=rnd, states=result.num_states,
                      membership_queries=teacher.membership_queries,
                      equivalence_queries=teacher.equivalence_queries,
                      executions=teacher.sut.executions)
            return result
        table.add_prefixes_of(cex)
    raise LearningBudgetError(f"no stable hypothesis after {max_rounds} rounds")
