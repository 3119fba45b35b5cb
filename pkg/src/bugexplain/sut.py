"""Systems under test, the test repository, and the external-process client."""
from __future__ import annotations

import enum
import logging
import queue
import subprocess
import threading
from pathlib import Path
from typing import Iterable, Iterator, Protocol, Sequence

from .automata import (
    AlphabetMismatchError,
    Dfa,
    Label,
    ThreeDfa,
    Word,
    forward_reachability,
    intersection,
    minimize,
    minimize3,
    product_combine,
    shortest_witness,
)

log = logging.getLogger(__name__)


class Outcome(enum.Enum):
    PASSED = "passed"
    FAILED = "failed"
    INVALID = "invalid"

    @property
    def label(self) -> Label:
        return _OUTCOME_LABEL[self]


_OUTCOME_LABEL = {Outcome.FAILED: Label.ACC, Outcome.PASSED: Label.REJ, Outcome.INVALID: Label.DONT}


class InvalidSutError(ValueError):
    """The (S, B) pair violates B ⊆ S or extension closure of B within S."""


class RepoIntegrityError(RuntimeError):
    """A word was recorded twice with different outcomes."""


class TransportError(RuntimeError):
    """The external SUT process misbehaved (bad reply, timeout, exit)."""


class Sut(Protocol):
    alphabet: tuple[str, ...]

    def execute(self, w: Sequence[str]) -> Outcome: ...


def _check_letters(alphabet: Sequence[str], w: Sequence[str]) -> Word:
    w = tuple(w)
    bad = [a for a in w if a not in alphabet]
    if bad:
        raise AlphabetMismatchError(f"letter {bad[0]!r} is not in alphabet {' '.join(alphabet)}")
    return w


class SimulatedSut:
    """A SUT whose valid tests are L(s_dfa) and whose failing tests are L(b_dfa)."""

    def __init__(self, s_dfa: Dfa, b_dfa: Dfa):
        if s_dfa.alphabet != b_dfa.alphabet:
            raise InvalidSutError("S and B automata use different alphabets")
        self.s_dfa = s_dfa
        self.b_dfa = b_dfa
        outside = shortest_witness(
            [b_dfa, s_dfa], lambda p: p[0] in b_dfa.accepting and p[1] not in s_dfa.accepting
        )
        if outside is not None:
            raise InvalidSutError(f"B is not contained in S: {outside!r}")
        # states of the product where the word is already a bug
        prod = product_combine(s_dfa, b_dfa, lambda s, b: b)
        passing = product_combine(s_dfa, b_dfa, lambda s, b: s and not b)
        after_bug = forward_reachability(prod, prod.accepting)
        if after_bug & passing.accepting:
            raise InvalidSutError("B is not extension closed with respect to S")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.s_dfa.alphabet

    def execute(self, w: Sequence[str]) -> Outcome:
        w = _check_letters(self.alphabet, w)
        if not self.s_dfa.accepts(w):
            return Outcome.INVALID
        if self.b_dfa.accepts(w):
            return Outcome.FAILED
        q = self.b_dfa.initial
        assert q not in self.b_dfa.accepting
        for a in w:
            q = self.b_dfa.step(q, a)
            assert q not in self.b_dfa.accepting, "failure did not persist"
        return Outcome.PASSED

    def capture(self, test_model: Dfa) -> ThreeDfa:
        """Minimal 3DFA labeling T∩B Acc, T∩(S∖B) Rej and everything else Dont."""
        return capture_automaton(test_model, self.s_dfa, self.b_dfa)


def capture_automaton(t_dfa: Dfa, s_dfa: Dfa, b_dfa: Dfa) -> ThreeDfa:
    alphabet = t_dfa.alphabet
    if not (alphabet == s_dfa.alphabet == b_dfa.alphabet):
        raise AlphabetMismatchError("T, S and B automata use different alphabets")
    start = (t_dfa.initial, s_dfa.initial, b_dfa.initial)
    index = {start: 0}
    order = [start]
    rows = []
    for t, s, b in order:
        row = []
        for i in range(len(alphabet)):
            nxt = (t_dfa.transitions[t][i], s_dfa.transitions[s][i], b_dfa.transitions[b][i])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    labels = []
    for t, s, b in order:
        if t in t_dfa.accepting and s in s_dfa.accepting:
            labels.append(Label.ACC if b in b_dfa.accepting else Label.REJ)
        else:
            labels.append(Label.DONT)
    return minimize3(ThreeDfa(alphabet, 0, rows, tuple(labels)))


class AdrSut:
    """Delays every failure of ``base`` until ``delay`` assert letters have followed it.

    Assert letters never affect validity: a word is valid iff the base SUT
    accepts it with the asserts removed.
    """

    def __init__(self, base: Sut, delay: int = 3, assert_letter: str = "assert"):
        if assert_letter in base.alphabet:
            raise ValueError(f"letter {assert_letter!r} already belongs to the SUT alphabet")
        if delay < 0:
            raise ValueError("delay must be non-negative")
        self.base = base
        self.delay = delay
        self.assert_letter = assert_letter

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(self.base.alphabet) + (self.assert_letter,)

    def execute(self, w: Sequence[str]) -> Outcome:
        w = _check_letters(self.alphabet, w)
        core = tuple(a for a in w if a != self.assert_letter)
        if self.base.execute(core) is Outcome.INVALID:
            return Outcome.INVALID
        prefix: list[str] = []
        asserts_after = None
        if self.base.execute(()) is Outcome.FAILED:
            asserts_after = 0
        for a in w:
            if a == self.assert_letter:
                if asserts_after is not None:
                    asserts_after += 1
                continue
            prefix.append(a)
            if asserts_after is None and self.base.execute(prefix) is Outcome.FAILED:
                asserts_after = 0
        if asserts_after is not None and asserts_after >= self.delay:
            return Outcome.FAILED
        return Outcome.PASSED


def adr_wrap(sut: Sut, delay: int = 3, assert_letter: str = "assert") -> AdrSut:
    return AdrSut(sut, delay, assert_letter)


def adr_languages(s_dfa: Dfa, b_dfa: Dfa, delay: int = 3,
                  assert_letter: str = "assert") -> tuple[Dfa, Dfa]:
    """Automata for the valid and failing tests of ``adr_wrap(SimulatedSut(s, b))``."""
    if assert_letter in s_dfa.alphabet:
        raise ValueError(f"letter {assert_letter!r} already belongs to the SUT alphabet")
    alphabet = s_dfa.alphabet + (assert_letter,)
    s_rows = [row + (q,) for q, row in enumerate(s_dfa.transitions)]
    s_wrapped = Dfa(alphabet, s_dfa.initial, s_rows, s_dfa.accepting)

    # (B state, asserts seen since the first failing core prefix; -1 before it)
    def enter(b):
        return (b, 0 if b in b_dfa.accepting else -1)

    start = enter(b_dfa.initial)
    index = {start: 0}
    order = [start]
    rows = []
    for b, c in order:
        row = []
        for i, a in enumerate(alphabet):
            if a == assert_letter:
                nxt = (b, c if c < 0 else min(c + 1, delay))
            else:
                b2 = b_dfa.transitions[b][i]
                nxt = (b2, c) if c >= 0 else enter(b2)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    counted = Dfa(alphabet, 0, rows, frozenset(i for i, (_, c) in enumerate(order) if c >= delay))
    return minimize(s_wrapped), minimize(intersection(s_wrapped, counted))


class TestRepo:
    """Append-only map from executed words to outcomes.

    With a backing file every record is appended as ``<outcome> <letters...>``
    and flushed immediately.
    """

    __test__ = False

    def __init__(self, path: str | Path | None = None):
        self.entries: dict[Word, Outcome] = {}
        self.path = Path(path) if path is not None else None
        if self.path is not None and self.path.exists():
            for lineno, line in enumerate(self.path.read_text().splitlines(), 1):
                if not line.strip():
                    continue
                head, *letters = line.split()
                try:
                    outcome = Outcome(head)
                except ValueError:
                    raise RepoIntegrityError(
                        f"{self.path}:{lineno}: unknown outcome {head!r}"
                    ) from None
                self._put(tuple(letters), outcome)

    def _put(self, w: Word, outcome: Outcome) -> bool:
        old = self.entries.get(w)
        if old is not None:
            if old is not outcome:
                raise RepoIntegrityError(
                    f"word {' '.join(w) or 'ε'} recorded as {old.value}, now {outcome.value}"
                )
            return False
        self.entries[w] = outcome
        return True

    def lookup(self, w: Sequence[str]) -> Outcome | None:
        return self.entries.get(tuple(w))

    def record(self, w: Sequence[str], outcome: Outcome) -> None:
        w = tuple(w)
        if self._put(w, outcome) and self.path is not None:
            with self.path.open("a") as fh:
                fh.write(" ".join((outcome.value,) + w) + "\n")
                fh.flush()

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, w) -> bool:
        return tuple(w) in self.entries

    def items(self) -> Iterator[tuple[Word, Outcome]]:
        return iter(list(self.entries.items()))


def repo_record(repo: TestRepo, w: Sequence[str], outcome: Outcome) -> None:
    repo.record(w, outcome)


def repo_lookup(repo: TestRepo, w: Sequence[str]) -> Outcome | None:
    return repo.lookup(w)


class RepoBackedSut:
    """Consults the repository first; each word reaches the inner SUT at most once.

    Cache misses are serialized by a lock, so the wrapper may be shared by
    several querying threads.
    """

    def __init__(self, sut: Sut, repo: TestRepo | None = None):
        self.sut = sut
        self.repo = repo if repo is not None else TestRepo()
        self.executions = 0
        self._lock = threading.Lock()

    @property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(self.sut.alphabet)

    def execute(self, w: Sequence[str]) -> Outcome:
        w = tuple(w)
        hit = self.repo.lookup(w)
        if hit is not None:
            return hit
        with self._lock:
            hit = self.repo.lookup(w)
            if hit is not None:
                return hit
            outcome = self.sut.execute(w)
            self.executions += 1
            self.repo.record(w, outcome)
            return outcome


_REPLIES = {"PASS": Outcome.PASSED, "FAIL": Outcome.FAILED, "INVALID": Outcome.INVALID}


def parse_reply(line: str | None) -> Outcome:
    if line is None:
        raise TransportError("SUT process closed its output")
    try:
        return _REPLIES[line.strip()]
    except KeyError:
        raise TransportError(f"malformed reply {line.strip()!r}") from None


class ExternalSut:
    """Drives a SUT process over stdin/stdout.

    Protocol: the harness sends ``RESET`` and expects ``OK``, then sends
    ``RUN <letter> <letter> ...`` and expects ``PASS``, ``FAIL`` or
    ``INVALID``. A reset precedes every test, including a handshake reset
    when the process starts.
    """

    def __init__(self, command: Sequence[str], alphabet: Iterable[str], timeout: float = 10.0):
        self.command = list(command)
        self.alphabet = tuple(alphabet)
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()

    def start(self) -> "ExternalSut":
        try:
            self._proc = subprocess.Popen(
                self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, bufsize=1,
            )
        except OSError as exc:
            raise TransportError(f"cannot start SUT process: {exc}") from exc
        threading.Thread(target=self._pump, daemon=True).start()
        self._reset()
        return self

    def _pump(self):
        assert self._proc is not None and self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def _send(self, text: str) -> str | None:
        if self._proc is None:
            raise TransportError("SUT process not started")
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(text + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise TransportError(f"SUT process is gone: {exc}") from exc
        try:
            return self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise TransportError(f"no reply within {self.timeout}s to {text.split()[0]}") from None

    def _reset(self):
        reply = self._send("RESET")
        if reply is None or reply.strip() != "OK":
            raise TransportError(f"expected OK after RESET, got {reply!r}")

    def execute(self, w: Sequence[str]) -> Outcome:
        w = _check_letters(self.alphabet, w)
        self._reset()
        return parse_reply(self._send(" ".join(("RUN",) + w)))

    def close(self):
        if self._proc is not None:
            try:
                if self._proc.stdin:
                    self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                self._proc.kill()
            self._proc = None

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.close()


def external_execute(client: ExternalSut, w: Sequence[str]) -> Outcome:
    return client.execute(w)
