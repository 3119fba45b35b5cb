"""Ready-made systems under test and the benchmark setups built around them.

A fixture is a pair of automata (valid tests S, failing tests B) with one
designated failing word. A scenario adds a test model and fixes the SUT the
learner talks to, following one of the UNR / FDR / ADR setups.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .automata import (
    Dfa,
    Label,
    ThreeDfa,
    Word,
    difference,
    intersection,
    make_extension_closed,
    minimize,
    shortest_accepted,
)
from .formats import parse_dfa, serialize
from .sut import SimulatedSut, Sut, adr_languages, adr_wrap, capture_automaton
from .testmodel import (
    TestModel,
    contains_all_letters,
    ends_with,
    shop_alphabet,
    shop_test_model,
    sigma_star,
)

SETUPS = ("unr", "fdr", "adr")
ASSERT = "assert"
ADR_DELAY = 3


@dataclass(frozen=True)
class Fixture:
    name: str
    s_dfa: Dfa
    b_dfa: Dfa
    cex: Word

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.s_dfa.alphabet

    def sut(self) -> SimulatedSut:
        return SimulatedSut(self.s_dfa, self.b_dfa)

    def scenario(self, setup: str) -> "Scenario":
        if setup == "unr":
            return Scenario(self.name, setup, sigma_star(self.alphabet), self.s_dfa,
                            self.b_dfa, self.sut(), self.cex)
        if setup == "fdr":
            return Scenario(self.name, setup, contains_all_letters(self.alphabet, self.cex),
                            self.s_dfa, self.b_dfa, self.sut(), self.cex)
        if setup == "adr":
            s2, b2 = adr_languages(self.s_dfa, self.b_dfa, ADR_DELAY, ASSERT)
            sut = adr_wrap(self.sut(), ADR_DELAY, ASSERT)
            return Scenario(self.name, setup, ends_with(s2.alphabet, ASSERT), s2, b2, sut,
                            self.cex + (ASSERT,) * ADR_DELAY)
        raise ValueError(f"unknown setup {setup!r}; expected one of {', '.join(SETUPS)}")


@dataclass(frozen=True)
class Scenario:
    """Everything a learning run needs, plus direct S/B/T membership for oracles."""

    name: str
    setup: str
    test_model: TestModel
    s_dfa: Dfa
    b_dfa: Dfa
    sut: Sut
    cex: Word

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.test_model.alphabet

    def classify(self, w) -> Label:
        if not (self.test_model.contains(w) and self.s_dfa.accepts(w)):
            return Label.DONT
        return Label.ACC if self.b_dfa.accepts(w) else Label.REJ

    def capture(self) -> ThreeDfa:
        return capture_automaton(self.test_model.dfa, self.s_dfa, self.b_dfa)

    @property
    def effective_s(self) -> Dfa:
        return minimize(intersection(self.s_dfa, self.test_model.dfa))

    @property
    def effective_b(self) -> Dfa:
        return minimize(intersection(self.b_dfa, self.test_model.dfa))


def running_example() -> Fixture:
    """Σ={0,1}, S = 00Σ* + 1Σ*, B = 00Σ* + 1(1Σ)*0Σ*."""
    s = Dfa.from_table(("0", "1"), "i", {"ok"}, {
        ("i", "0"): "z", ("i", "1"): "ok",
        ("z", "0"): "ok", ("z", "1"): "dead",
        ("ok", "0"): "ok", ("ok", "1"): "ok",
        ("dead", "0"): "dead", ("dead", "1"): "dead",
    })
    b = Dfa.from_table(("0", "1"), "i", {"bug"}, {
        ("i", "0"): "z", ("i", "1"): "odd",
        ("z", "0"): "bug", ("z", "1"): "dead",
        ("odd", "0"): "bug", ("odd", "1"): "even",
        ("even", "0"): "odd", ("even", "1"): "odd",
        ("bug", "0"): "bug", ("bug", "1"): "bug",
        ("dead", "0"): "dead", ("dead", "1"): "dead",
    })
    return Fixture("running-ex", s, b, ("1", "0"))


def example_fe() -> Dfa:
    """The three-state failure explanation for the running example."""
    return Dfa.from_table(("0", "1"), "s", {"r"}, {
        ("s", "0"): "q", ("s", "1"): "q",
        ("q", "0"): "r", ("q", "1"): "s",
        ("r", "0"): "r", ("r", "1"): "r",
    })


def example_edfe() -> Dfa:
    """The four-state early-detection failure explanation for the running example."""
    return Dfa.from_table(("0", "1"), "s", {"r"}, {
        ("s", "0"): "r", ("s", "1"): "q1",
        ("q1", "0"): "r", ("q1", "1"): "q2",
        ("q2", "0"): "q1", ("q2", "1"): "q1",
        ("r", "0"): "r", ("r", "1"): "r",
    })


def random_dfa(rng: random.Random, alphabet, max_states: int, p_accept: float = 0.5) -> Dfa:
    n = rng.randint(1, max_states)
    rows = [[rng.randrange(n) for _ in alphabet] for _ in range(n)]
    acc = {q for q in range(n) if rng.random() < p_accept}
    return Dfa(tuple(alphabet), 0, rows, acc)


def random_fixture(seed: int, alphabet=("0", "1"), max_s_states: int = 5,
                   max_detector_states: int = 3) -> Fixture:
    """Random S with at most ``max_s_states`` states and B = S ∩ (closed detector).

    The detector is made extension closed before intersecting, so B is
    extension closed with respect to S by construction. Draws repeat until
    both B and S∖B are nonempty.
    """
    rng = random.Random(seed)
    while True:
        s = minimize(random_dfa(rng, alphabet, max_s_states))
        detector = make_extension_closed(random_dfa(rng, alphabet, max_detector_states, 0.35))
        b = minimize(intersection(s, detector))
        cex = shortest_accepted(b)
        if cex is not None and shortest_accepted(difference(s, b)) is not None:
            return Fixture(f"random-{seed}", s, b, cex)


def shop_fixture() -> Fixture:
    """One store session where removing a product after adding it twice fails."""
    t = shop_test_model(1, ("u1",), ("p1",))
    alphabet = shop_alphabet(1, ("u1",), ("p1",))
    add, rem = "AddToCart_1(p1)", "RemoveFromCart_1(p1)"
    trans = {}
    for a in alphabet:
        trans[0, a] = 1 if a == add else 0
        trans[1, a] = 2 if a == add else 1
        trans[2, a] = 3 if a == rem else 2
        trans[3, a] = 3
    pattern = Dfa.from_table(alphabet, 0, {3}, trans)
    s = t.dfa
    b = minimize(intersection(s, pattern))
    return Fixture("shop", s, b, shortest_accepted(b) or ())


# --- fixture directories ---------------------------------------------------

def write_fixture(directory: str | Path, fixture: Fixture) -> Path:
    target = Path(directory) / fixture.name
    target.mkdir(parents=True, exist_ok=True)
    (target / "s.dfa").write_text(serialize(fixture.s_dfa))
    (target / "b.dfa").write_text(serialize(fixture.b_dfa))
    (target / "cex").write_text(" ".join(fixture.cex) + "\n")
    return target


def read_fixture(path: str | Path) -> Fixture:
    path = Path(path)
    s = parse_dfa((path / "s.dfa").read_text())
    b = parse_dfa((path / "b.dfa").read_text())
    cex_file = path / "cex"
    cex = tuple(cex_file.read_text().split()) if cex_file.exists() else (shortest_accepted(b) or ())
    return Fixture(path.name, s, b, cex)


def iter_fixture_dir(directory: str | Path) -> Iterator[Path]:
    """Fixture subdirectories (those holding ``s.dfa``) in name order."""
    for p in sorted(Path(directory).iterdir()):
        if p.is_dir() and (p / "s.dfa").exists():
            yield p
