"""From a (relabeled) capture 3DFA to a small DFA consistent with it."""
from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automata import (
    Dfa,
    Label,
    ThreeDfa,
    Word,
    access_words,
    backward_reachability,
    make_extension_closed,
    minimize,
    minimize3,
    words_up_to,
)
from .relabel import ExplanationKind, check_consistency, relabel_for

log = logging.getLogger(__name__)


class SampleConflictError(ValueError):
    pass


@dataclass(frozen=True)
class SamplePair:
    positives: tuple[Word, ...]
    negatives: tuple[Word, ...]

    def __post_init__(self):
        both = set(self.positives) & set(self.negatives)
        if both:
            w = min(both, key=lambda x: (len(x), x))
            raise SampleConflictError(f"word {' '.join(w) or 'ε'} is both positive and negative")


def _nearest_decided(t: ThreeDfa) -> dict[int, Word | None]:
    """Shortest word leading from each state to an Acc or Rej state."""
    out: dict[int, Word | None] = {}
    for q in range(t.num_states):
        seen = {q: ()}
        queue = deque([q])
        found = None
        while queue:
            p = queue.popleft()
            if t.labels[p] is not Label.DONT:
                found = seen[p]
                break
            for a, r in zip(t.alphabet, t.transitions[p]):
                if r not in seen:
                    seen[r] = seen[p] + (a,)
                    queue.append(r)
        out[q] = found
    return out


def sample_words(t: ThreeDfa, extra_depth: int = 4) -> SamplePair:
    """Labeled words drawn from ``t``: access words, a transition cover, and all short words."""
    pos: dict[Word, None] = {}
    neg: dict[Word, None] = {}

    def put(w: Word):
        lab = t.classify(w)
        if lab is Label.ACC:
            pos.setdefault(w, None)
        elif lab is Label.REJ:
            neg.setdefault(w, None)

    access = access_words(t)
    for w in access.values():
        put(w)
    completion = _nearest_decided(t)
    for q, w in access.items():
        for a, r in zip(t.alphabet, t.transitions[q]):
            tail = completion[r]
            if tail is not None:
                put(w + (a,) + tail)
    for w in words_up_to(t.alphabet, extra_depth):
        put(w)
    return SamplePair(tuple(pos), tuple(neg))


def rpni(sample: SamplePair, alphabet: Sequence[str]) -> Dfa:
    """Red-blue RPNI over a prefix tree acceptor.

    Blue states are tried in breadth-first order of their prefix and merged
    into the first red state (same order) whose fold causes no
    accept/reject clash; otherwise they turn red. Unlabeled states and
    missing transitions reject.
    """
    alphabet = tuple(alphabet)
    SamplePair(sample.positives, sample.negatives)
    index = {a: i for i, a in enumerate(alphabet)}
    prefixes: set[tuple[int, ...]] = {()}
    labeled: dict[tuple[int, ...], bool] = {}
    for w, mark in [(w, True) for w in sample.positives] + [(w, False) for w in sample.negatives]:
        try:
            code = tuple(index[a] for a in w)
        except KeyError as exc:
            raise ValueError(f"sample letter {exc.args[0]!r} not in alphabet") from None
        labeled[code] = mark
        for i in range(len(code)):
            prefixes.add(code[:i])
        prefixes.add(code)
    order = sorted(prefixes, key=lambda c: (len(c), c))
    node = {c: i for i, c in enumerate(order)}
    delta: list[dict[int, int]] = [dict() for _ in order]
    mark: list[bool | None] = [labeled.get(c) for c in order]
    for c in order[1:]:
        delta[node[c[:-1]]][c[-1]] = node[c]

    red = [0]
    red_set = {0}

    def blues():
        # blue state -> the red (state, letter) edge entering it
        out = {}
        for q in red:
            for a, r in sorted(delta[q].items()):
                if r not in red_set:
                    out.setdefault(r, (q, a))
        return dict(sorted(out.items()))

    def fold(q: int, q2: int, undo: list) -> bool:
        stack = [(q, q2)]
        while stack:
            q, q2 = stack.pop()
            if mark[q2] is not None:
                if mark[q] is not None and mark[q] != mark[q2]:
                    return False
                if mark[q] is None:
                    undo.append(("mark", q, None))
                    mark[q] = mark[q2]
            for a, child in sorted(delta[q2].items()):
                if a in delta[q]:
                    stack.append((delta[q][a], child))
                else:
                    undo.append(("edge", q, a))
                    delta[q][a] = child
        return True

    def rollback(undo: list):
        for entry in reversed(undo):
            if entry[0] == "mark":
                mark[entry[1]] = entry[2]
            elif entry[0] == "edge":
                del delta[entry[1]][entry[2]]
            else:
                _, p, a, old = entry
                delta[p][a] = old

    pending = blues()
    while pending:
        b, (p, a) = next(iter(pending.items()))
        merged = False
        for r in red:
            undo: list = [("redirect", p, a, b)]
            delta[p][a] = r
            if fold(r, b, undo):
                merged = True
                break
            rollback(undo)
        if not merged:
            red.append(b)
            red_set.add(b)
        pending = blues()

    local = {q: i for i, q in enumerate(red)}
    sink = len(red)
    rows = []
    for q in red:
        rows.append([local[delta[q][i]] if i in delta[q] else sink for i in range(len(alphabet))])
    rows.append([sink] * len(alphabet))
    acc = frozenset(local[q] for q in red if mark[q])
    d = minimize(Dfa(alphabet, 0, rows, acc))
    assert all(d.accepts(w) for w in sample.positives)
    assert not any(d.accepts(w) for w in sample.negatives)
    return d


@dataclass(frozen=True)
class ExtractOptions:
    extra_depth: int = 4
    extension_closed: bool = False
    max_iterations: int = 200


@dataclass
class Extraction:
    kind: ExplanationKind
    dfa: Dfa
    spec: ThreeDfa
    rpni_size: int | None = None
    iterations: int = 0
    fallback: bool = False
    extension_closed: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.dfa.num_states


def acc_reaches_rej(t: ThreeDfa) -> bool:
    return bool(t.states_labeled(Label.ACC) & backward_reachability(t, t.states_labeled(Label.REJ)))


def explain(capture: ThreeDfa, kind: ExplanationKind,
            opts: ExtractOptions | None = None) -> Extraction:
    """Extract an explanation DFA of ``kind`` and report how it was obtained."""
    opts = opts or ExtractOptions()
    if kind is ExplanationKind.B:
        spec = minimize3(capture)
        return Extraction(kind, minimize(spec.view(Label.ACC)), spec)

    spec = relabel_for(kind, capture)
    baseline = minimize(spec.view(Label.ACC))
    sample = sample_words(spec, opts.extra_depth)
    pos, neg = list(sample.positives), list(sample.negatives)
    result = Extraction(kind, baseline, spec)
    candidate = None
    for it in range(1, opts.max_iterations + 1):
        result.iterations = it
        candidate = rpni(SamplePair(tuple(pos), tuple(neg)), spec.alphabet)
        bad = check_consistency(candidate, spec, kind)
        if bad is None:
            break
        (pos if spec.classify(bad) is Label.ACC else neg).append(bad)
        candidate = None
    if candidate is None:
        result.notes.append(f"no consistent RPNI result after {opts.max_iterations} rounds")
    else:
        result.rpni_size = candidate.num_states
    if candidate is None or candidate.num_states > baseline.num_states:
        result.fallback = True
        candidate = baseline
    result.dfa = candidate

    if opts.extension_closed:
        if acc_reaches_rej(spec):
            result.notes.append("failures do not persist in the capture; closure skipped")
        else:
            closed = minimize(make_extension_closed(candidate))
            if check_consistency(closed, spec, kind) is None:
                result.dfa = closed
                result.extension_closed = True
            else:
                result.notes.append("extension closure broke consistency; kept the open result")
    return result


def extract_explanation(t: ThreeDfa, kind: ExplanationKind,
                        opts: ExtractOptions | None = None) -> Dfa:
    return explain(t, kind, opts).dfa


def classify_all(t: ThreeDfa, words: Iterable[Word]) -> dict[Word, Label]:
    return {w: t.classify(w) for w in words}
