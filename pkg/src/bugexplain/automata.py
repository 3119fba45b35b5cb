"""Deterministic automata over a finite, ordered alphabet.

States are the integers ``0 .. n-1`` and ``transitions[q][i]`` is the successor
of ``q`` on the ``i``-th letter of the alphabet, so every automaton here is
total by construction. Letters are plain strings without whitespace and a word
is a tuple of letters.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence, TypeVar

Word = tuple[str, ...]


class Label(enum.Enum):
    ACC = "Acc"
    REJ = "Rej"
    DONT = "Dont"

    def __str__(self) -> str:
        return self.value


class AlphabetMismatchError(ValueError):
    pass


class ProductTooLargeError(RuntimeError):
    """Raised when a product exploration exceeds its state budget."""


def word(text: str | Sequence[str]) -> Word:
    """Build a word from ``"0 1 assert"`` or, for one-character letters, ``"01"``."""
    if not isinstance(text, str):
        return tuple(text)
    if any(c.isspace() for c in text):
        return tuple(text.split())
    return tuple(text)


def show(w: Sequence[str]) -> str:
    if not w:
        return "ε"
    if all(len(a) == 1 for a in w):
        return "".join(w)
    return " ".join(w)


@dataclass(frozen=True)
class _Machine:
    alphabet: tuple[str, ...]
    initial: int
    transitions: tuple[tuple[int, ...], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "transitions", tuple(tuple(row) for row in self.transitions))
        if len(set(alphabet)) != len(alphabet):
            raise ValueError(f"duplicate letters in alphabet {alphabet}")
        for a in alphabet:
            if not a or any(c.isspace() for c in a):
                raise ValueError(f"letter {a!r} is empty or contains whitespace")
        n = len(self.transitions)
        if not 0 <= self.initial < n:
            raise ValueError(f"initial state {self.initial} not among {n} states")
        k = len(alphabet)
        for q, row in enumerate(self.transitions):
            if len(row) != k:
                raise ValueError(f"state {q} has {len(row)} transitions, expected {k}")
            for r in row:
                if not 0 <= r < n:
                    raise ValueError(f"transition from {q} targets unknown state {r}")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(alphabet)})

    @property
    def num_states(self) -> int:
        return len(self.transitions)

    def __len__(self) -> int:
        return len(self.transitions)

    def letter_index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise AlphabetMismatchError(
                f"letter {letter!r} is not in alphabet {' '.join(self.alphabet)}"
            ) from None

    def step(self, q: int, letter: str) -> int:
        return self.transitions[q][self.letter_index(letter)]

    def run(self, w: Iterable[str], start: int | None = None) -> int:
        q = self.initial if start is None else start
        for a in w:
            q = self.transitions[q][self.letter_index(a)]
        return q

    def successors(self, q: int) -> list[int]:
        """Distinct successors of ``q`` in alphabet order."""
        return list(dict.fromkeys(self.transitions[q]))

    def reachable(self) -> list[int]:
        return list(access_words(self))


@dataclass(frozen=True)
class Dfa(_Machine):
    accepting: frozenset[int] = frozenset()

    def __post_init__(self):
        super().__post_init__()
        acc = frozenset(self.accepting)
        object.__setattr__(self, "accepting", acc)
        if any(not 0 <= q < self.num_states for q in acc):
            raise ValueError("accepting set names unknown states")

    def accepts(self, w: Iterable[str]) -> bool:
        return self.run(w) in self.accepting

    def is_accepting(self, q: int) -> bool:
        return q in self.accepting

    @classmethod
    def from_table(cls, alphabet, initial, accepting, transitions: Mapping[tuple, object],
                   complete: bool = True) -> "Dfa":
        """Build from named states; missing transitions go to a fresh rejecting sink."""
        names, table = _table_from_names(alphabet, initial, transitions, accepting, complete)
        acc = {names[s] for s in accepting}
        return cls(tuple(alphabet), names[initial], table, frozenset(acc))


@dataclass(frozen=True)
class ThreeDfa(_Machine):
    labels: tuple[Label, ...] = ()

    def __post_init__(self):
        super().__post_init__()
        labels = tuple(Label(x) if not isinstance(x, Label) else x for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) != self.num_states:
            raise ValueError(f"{len(labels)} labels for {self.num_states} states")

    def classify(self, w: Iterable[str]) -> Label:
        return self.labels[self.run(w)]

    def states_labeled(self, *labels: Label) -> frozenset[int]:
        return frozenset(q for q, lab in enumerate(self.labels) if lab in labels)

    def view(self, *labels: Label) -> Dfa:
        """The DFA accepting exactly the words whose label is among ``labels``."""
        return Dfa(self.alphabet, self.initial, self.transitions, self.states_labeled(*labels))

    def relabel(self, labels: Sequence[Label]) -> "ThreeDfa":
        return ThreeDfa(self.alphabet, self.initial, self.transitions, tuple(labels))

    @classmethod
    def from_table(cls, alphabet, initial, labels: Mapping[object, Label | str],
                   transitions: Mapping[tuple, object], complete: bool = True) -> "ThreeDfa":
        """Build from named states; missing transitions go to a fresh Dont sink."""
        names, table = _table_from_names(alphabet, initial, transitions, labels, complete)
        out = [Label.DONT] * len(table)
        for s, lab in labels.items():
            out[names[s]] = Label(lab)
        return cls(tuple(alphabet), names[initial], table, tuple(out))


M = TypeVar("M", Dfa, ThreeDfa)


def _table_from_names(alphabet, initial, transitions, extra_states, complete):
    names: dict = {}

    def idx(s):
        if s not in names:
            names[s] = len(names)
        return names[s]

    idx(initial)
    for (s, _a), t in transitions.items():
        idx(s)
        idx(t)
    for s in extra_states:
        idx(s)
    alphabet = tuple(alphabet)
    letters = set(alphabet)
    edges = {}
    for (s, a), t in transitions.items():
        if a not in letters:
            raise AlphabetMismatchError(f"letter {a!r} is not in alphabet {' '.join(alphabet)}")
        edges[names[s], a] = names[t]
    n = len(names)
    sink = None
    table = []
    for q in range(n):
        row = []
        for a in alphabet:
            if (q, a) in edges:
                row.append(edges[q, a])
            elif complete:
                if sink is None:
                    sink = n
                row.append(sink)
            else:
                state = next(s for s, i in names.items() if i == q)
                raise ValueError(f"missing transition for state {state} on letter {a}")
        table.append(row)
    if sink is not None:
        table.append([sink] * len(alphabet))
        names[object()] = sink
    return names, table


# --- traversal -------------------------------------------------------------

def access_words(m: _Machine) -> dict[int, Word]:
    """Shortest access word of every reachable state, ties broken by alphabet order.

    The returned dict iterates in breadth-first discovery order.
    """
    seen = {m.initial: ()}
    queue = deque([m.initial])
    while queue:
        q = queue.popleft()
        for a, r in zip(m.alphabet, m.transitions[q]):
            if r not in seen:
                seen[r] = seen[q] + (a,)
                queue.append(r)
    return seen


def shortest_witness(machines: Sequence[_Machine], bad: Callable[[tuple[int, ...]], bool],
                     max_states: int | None = None) -> Word | None:
    """Shortest word whose tuple of states (one per machine) satisfies ``bad``.

    Breadth-first search over the synchronous product with letters in alphabet
    order, so among shortest witnesses the one earliest in that order wins.
    """
    alphabet = _common_alphabet(machines)
    k = len(alphabet)
    tables = [m.transitions for m in machines]
    start = tuple(m.initial for m in machines)
    parent: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if bad(node):
            out = []
            while parent[node] is not None:
                node, i = parent[node]
                out.append(alphabet[i])
            return tuple(reversed(out))
        for i in range(k):
            nxt = tuple(t[q][i] for t, q in zip(tables, node))
            if nxt not in parent:
                parent[nxt] = (node, i)
                queue.append(nxt)
                if max_states is not None and len(parent) > max_states:
                    raise ProductTooLargeError(f"product exceeds {max_states} states")
    return None


def _common_alphabet(machines: Sequence[_Machine]) -> tuple[str, ...]:
    alphabet = machines[0].alphabet
    for m in machines[1:]:
        if m.alphabet != alphabet:
            raise AlphabetMismatchError(
                f"alphabets differ: {' '.join(alphabet)} vs {' '.join(m.alphabet)}"
            )
    return alphabet


def membership(d: Dfa, w: Sequence[str]) -> bool:
    return d.accepts(w)


# --- boolean operations ----------------------------------------------------

def product_combine(d1: Dfa, d2: Dfa, combiner: Callable[[bool, bool], bool]) -> Dfa:
    """Reachable product automaton accepting ``combiner(w in d1, w in d2)``."""
    alphabet = _common_alphabet([d1, d2])
    k = len(alphabet)
    start = (d1.initial, d2.initial)
    index = {start: 0}
    order = [start]
    rows = []
    for p, q in order:
        row = []
        for i in range(k):
            nxt = (d1.transitions[p][i], d2.transitions[q][i])
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    acc = frozenset(
        i for i, (p, q) in enumerate(order)
        if combiner(p in d1.accepting, q in d2.accepting)
    )
    return Dfa(alphabet, 0, rows, acc)


def intersection(d1: Dfa, d2: Dfa) -> Dfa:
    return product_combine(d1, d2, lambda x, y: x and y)


def union(d1: Dfa, d2: Dfa) -> Dfa:
    return product_combine(d1, d2, lambda x, y: x or y)


def difference(d1: Dfa, d2: Dfa) -> Dfa:
    return product_combine(d1, d2, lambda x, y: x and not y)


def complement(d: Dfa) -> Dfa:
    return Dfa(d.alphabet, d.initial, d.transitions,
               frozenset(range(d.num_states)) - d.accepting)


def shortest_accepted(d: Dfa) -> Word | None:
    return shortest_witness([d], lambda s: s[0] in d.accepting)


def is_empty(d: Dfa) -> bool:
    return shortest_accepted(d) is None


def equivalent(d1: Dfa, d2: Dfa) -> Word | None:
    """Shortest word in the symmetric difference, or ``None`` if the languages agree."""
    return shortest_witness(
        [d1, d2], lambda s: (s[0] in d1.accepting) != (s[1] in d2.accepting)
    )


def subset_counterexample(d1: Dfa, d2: Dfa, max_states: int | None = None) -> Word | None:
    """Shortest word accepted by ``d1`` but not by ``d2``."""
    return shortest_witness(
        [d1, d2], lambda s: s[0] in d1.accepting and s[1] not in d2.accepting, max_states
    )


# --- minimization ----------------------------------------------------------

def _coarsest_stable_partition(transitions, k: int, colors: Sequence) -> list[int]:
    """Hopcroft partition refinement; returns a block id per state."""
    n = len(transitions)
    inverse = [[[] for _ in range(n)] for _ in range(k)]
    for q, row in enumerate(transitions):
        for a, r in enumerate(row):
            inverse[a][r].append(q)

    by_color: dict = {}
    for q in range(n):
        by_color.setdefault(colors[q], set()).add(q)
    blocks = list(by_color.values())
    block_of = [0] * n
    for b, members in enumerate(blocks):
        for q in members:
            block_of[q] = b

    pending = list(range(len(blocks)))
    in_pending = set(pending)
    while pending:
        splitter = pending.pop()
        in_pending.discard(splitter)
        members = list(blocks[splitter])
        for a in range(k):
            touched: dict[int, set[int]] = {}
            for r in members:
                for q in inverse[a][r]:
                    touched.setdefault(block_of[q], set()).add(q)
            for b, hit in touched.items():
                if len(hit) == len(blocks[b]):
                    continue
                new = len(blocks)
                blocks.append(hit)
                blocks[b] -= hit
                for q in hit:
                    block_of[q] = new
                if b in in_pending:
                    pending.append(new)
                    in_pending.add(new)
                else:
                    smaller = new if len(hit) <= len(blocks[b]) else b
                    pending.append(smaller)
                    in_pending.add(smaller)
    return block_of


def _quotient(m: _Machine, colors: Sequence):
    reach = list(access_words(m))
    local = {q: i for i, q in enumerate(reach)}
    trans = [[local[r] for r in m.transitions[q]] for q in reach]
    block_of = _coarsest_stable_partition(trans, len(m.alphabet), [colors[q] for q in reach])
    rows: dict[int, list[int]] = {}
    color_of: dict[int, object] = {}
    for i, q in enumerate(reach):
        b = block_of[i]
        if b not in rows:
            rows[b] = [block_of[j] for j in trans[i]]
            color_of[b] = colors[q]
    renum = {b: i for i, b in enumerate(rows)}
    table = [[renum[b] for b in rows[blk]] for blk in rows]
    return renum[block_of[0]], table, [color_of[b] for b in rows]


def minimize(d: Dfa) -> Dfa:
    """Language-equivalent DFA with the fewest states, in canonical form."""
    colors = [q in d.accepting for q in range(d.num_states)]
    init, table, cols = _quotient(d, colors)
    acc = frozenset(i for i, c in enumerate(cols) if c)
    return canonicalize(Dfa(d.alphabet, init, table, acc))


def minimize3(t: ThreeDfa) -> ThreeDfa:
    """Smallest 3DFA assigning every word the same label, in canonical form."""
    init, table, cols = _quotient(t, t.labels)
    return canonicalize(ThreeDfa(t.alphabet, init, table, tuple(cols)))


def canonicalize(m: M) -> M:
    """Renumber states in breadth-first discovery order; drop unreachable states."""
    order = list(access_words(m))
    local = {q: i for i, q in enumerate(order)}
    table = [[local[r] for r in m.transitions[q]] for q in order]
    if isinstance(m, ThreeDfa):
        return ThreeDfa(m.alphabet, 0, table, tuple(m.labels[q] for q in order))
    return Dfa(m.alphabet, 0, table, frozenset(local[q] for q in order if q in m.accepting))


# --- graph analyses --------------------------------------------------------

def scc(m: _Machine) -> list[frozenset[int]]:
    """Strongly connected components in reverse topological order (Tarjan).

    A component is listed before every component that can reach it.
    """
    n = m.num_states
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    out: list[frozenset[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work: list[tuple[int, Iterator[int]]] = [(root, iter(m.successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(m.successors(w))))
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        x = stack.pop()
                        on_stack[x] = False
                        comp.append(x)
                        if x == v:
                            break
                    out.append(frozenset(comp))
    return out


def is_cyclic_component(m: _Machine, component: frozenset[int]) -> bool:
    """True unless the component is a single state without a self-loop."""
    if len(component) > 1:
        return True
    (q,) = component
    return q in m.transitions[q]


def backward_reachability(m: _Machine, targets: Iterable[int]) -> frozenset[int]:
    """States from which some target is reachable in zero or more steps."""
    preds: list[set[int]] = [set() for _ in range(m.num_states)]
    for q, row in enumerate(m.transitions):
        for r in row:
            preds[r].add(q)
    seen = set(targets)
    queue = deque(seen)
    while queue:
        r = queue.popleft()
        for q in preds[r]:
            if q not in seen:
                seen.add(q)
                queue.append(q)
    return frozenset(seen)


def forward_reachability(m: _Machine, sources: Iterable[int]) -> frozenset[int]:
    seen = set(sources)
    queue = deque(seen)
    while queue:
        q = queue.popleft()
        for r in m.transitions[q]:
            if r not in seen:
                seen.add(r)
                queue.append(r)
    return frozenset(seen)


def make_extension_closed(d: Dfa) -> Dfa:
    """Turn every accepting state into a self-looping trap."""
    k = len(d.alphabet)
    rows = [((q,) * k if q in d.accepting else row) for q, row in enumerate(d.transitions)]
    return Dfa(d.alphabet, d.initial, rows, d.accepting)


def is_extension_closed(d: Dfa) -> bool:
    """No transition leaves the accepting region (among reachable states)."""
    reach = access_words(d)
    return all(
        r in d.accepting
        for q in reach if q in d.accepting
        for r in d.transitions[q]
    )


def words_up_to(alphabet: Sequence[str], max_len: int) -> Iterator[Word]:
    """All words of length ``<= max_len`` by length, then alphabet order."""
    layer: list[Word] = [()]
    for _ in range(max_len + 1):
        yield from layer
        layer = [w + (a,) for w in layer for a in alphabet]
