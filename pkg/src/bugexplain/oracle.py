"""Brute-force ground truth, kept independent of the learning and relabeling code.

Everything here works directly on S/B/T membership or on an explicitly built
product graph; nothing calls the learner, the SCC code or the relabelings.
These are meant for toy-sized inputs only.
"""
from __future__ import annotations

from collections import deque
from itertools import product
from typing import Callable, Sequence

from .automata import Dfa, Label, ThreeDfa, Word


class OracleBudgetError(RuntimeError):
    pass


def enumerate_classify(source, max_len: int, budget: int = 500_000) -> dict[Word, Label]:
    """True label of every word up to ``max_len``.

    ``source`` is anything with a ``classify(word) -> Label`` method (a
    scenario) or a plain callable doing the same.
    """
    classify: Callable[[Word], Label] = getattr(source, "classify", source)
    k = len(source.alphabet)
    total = sum(k ** i for i in range(max_len + 1))
    if total > budget:
        raise OracleBudgetError(f"{total} words up to length {max_len} exceed budget {budget}")
    out = {}
    for n in range(max_len + 1):
        for w in product(source.alphabet, repeat=n):
            out[w] = classify(w)
    return out


def _graph(dfas: Sequence[Dfa], start: tuple[int, ...]):
    """Explicit forward graph of the synchronous product, from ``start``."""
    alphabet = dfas[0].alphabet
    succ: dict[tuple, set] = {}
    queue = deque([start])
    succ[start] = set()
    while queue:
        node = queue.popleft()
        for a in alphabet:
            nxt = tuple(d.step(q, a) for d, q in zip(dfas, node))
            succ[node].add(nxt)
            if nxt not in succ:
                succ[nxt] = set()
                queue.append(nxt)
    return succ


def _strict_reach(succ, node) -> set:
    """Nodes reachable from ``node`` by a path of length at least one."""
    seen = set()
    stack = list(succ[node])
    while stack:
        n = stack.pop()
        if n not in seen:
            seen.add(n)
            stack.extend(succ[n])
    return seen


def brute_may_pass(s_dfa: Dfa, b_dfa: Dfa, w: Sequence[str]) -> bool:
    """Whether the valid-test prefix ``w`` may still pass.

    True when from ``w`` one can reach a passing test (in S, not in B) that
    either has no proper extension in S, or lies on a cycle, so that some
    continuation passes infinitely often.
    """
    if s_dfa.alphabet != b_dfa.alphabet:
        raise ValueError("S and B alphabets differ")
    start = (s_dfa.run(w), b_dfa.run(w))
    succ = _graph([s_dfa, b_dfa], start)

    def valid(n):
        return n[0] in s_dfa.accepting

    def passing(n):
        return valid(n) and n[1] not in b_dfa.accepting

    if not any(valid(n) for n in succ):
        raise ValueError(f"{' '.join(w) or 'ε'} is not a prefix of any valid test")
    for n in succ:
        if not passing(n):
            continue
        later = _strict_reach(succ, n)
        if n in later or not any(valid(m) for m in later):
            return True
    return False


def brute_early_detect(s_dfa: Dfa, b_dfa: Dfa, w: Sequence[str]) -> bool:
    """Whether ``w`` extends to a failing test but to no passing one."""
    succ = _graph([s_dfa, b_dfa], (s_dfa.run(w), b_dfa.run(w)))
    fails = any(n[0] in s_dfa.accepting and n[1] in b_dfa.accepting for n in succ)
    passes = any(n[0] in s_dfa.accepting and n[1] not in b_dfa.accepting for n in succ)
    return fails and not passes


def exhaustive_min_consistent(spec: ThreeDfa, max_states: int = 4,
                              budget: int = 5_000_000) -> Dfa | None:
    """Smallest DFA accepting every Acc word and rejecting every Rej word of ``spec``.

    Candidates are enumerated by increasing size with states numbered in
    order of first use, so isomorphic tables are never revisited. While the
    table is filled in, the pairs (candidate state, spec state) reachable so
    far are tracked; a branch is cut as soon as one candidate state is paired
    with both an Acc and a Rej state. ``budget`` caps the number of
    transition choices tried.

    Two spec states are incompatible when some word leads one to Acc and
    the other to Rej; they can never share a candidate state, which both
    prunes the search and gives a lower bound on the size.
    """
    incompat = _incompatible(spec)
    lower = _greedy_clique(incompat, spec.num_states)
    for n in range(max(1, lower), max_states + 1):
        found = _search(spec, n, [budget], incompat)
        if found is not None:
            return found
    return None


def _incompatible(spec: ThreeDfa) -> list[int]:
    """Bitmask per spec state of the states it is incompatible with."""
    n = spec.num_states
    pred: list[list[list[int]]] = [[[] for _ in spec.alphabet] for _ in range(n)]
    for s, row in enumerate(spec.transitions):
        for i, r in enumerate(row):
            pred[r][i].append(s)
    bad = [[False] * n for _ in range(n)]
    queue = deque()
    for a in range(n):
        for b in range(n):
            la, lb = spec.labels[a], spec.labels[b]
            if {la, lb} == {Label.ACC, Label.REJ}:
                bad[a][b] = True
                queue.append((a, b))
    while queue:
        a, b = queue.popleft()
        for i in range(len(spec.alphabet)):
            for x in pred[a][i]:
                for y in pred[b][i]:
                    if not bad[x][y]:
                        bad[x][y] = bad[y][x] = True
                        queue.append((x, y))
                        queue.append((y, x))
    return [sum(1 << b for b in range(n) if bad[a][b]) for a in range(n)]


def _greedy_clique(incompat: list[int], n: int) -> int:
    best = 0
    for start in range(n):
        clique = [start]
        for v in range(n):
            if v != start and all(incompat[v] >> u & 1 for u in clique):
                clique.append(v)
        best = max(best, len(clique))
    return best


def _search(spec: ThreeDfa, n: int, budget: list[int], incompat: list[int]) -> Dfa | None:
    k = len(spec.alphabet)
    delta = spec.transitions
    table: list[list[int | None]] = [[None] * k for _ in range(n)]
    paired = [0] * n  # bitmask of spec states sharing candidate state p
    log: list[tuple[int, int]] = []

    def add(p: int, s: int) -> bool:
        stack = [(p, s)]
        while stack:
            p, s = stack.pop()
            bit = 1 << s
            if paired[p] & bit:
                continue
            if paired[p] & incompat[s]:
                return False
            paired[p] |= bit
            log.append((p, bit))
            for i in range(k):
                q = table[p][i]
                if q is not None:
                    stack.append((q, delta[s][i]))
        return True

    def undo(mark: int):
        while len(log) > mark:
            p, bit = log.pop()
            paired[p] &= ~bit

    def members(mask: int):
        s = 0
        while mask:
            if mask & 1:
                yield s
            mask >>= 1
            s += 1

    def rec(pos: int, used: int) -> bool:
        if pos == used * k:
            return True
        p, i = divmod(pos, k)
        for q in range(min(used + 1, n)):
            budget[0] -= 1
            if budget[0] < 0:
                raise OracleBudgetError("exhaustive search budget exhausted")
            mark = len(log)
            table[p][i] = q
            ok = all(add(q, delta[s][i]) for s in list(members(paired[p])))
            if ok and rec(pos + 1, max(used, q + 1)):
                return True
            table[p][i] = None
            undo(mark)
        return False

    if not add(0, spec.initial):
        return None
    if not rec(0, 1):
        return None
    used = sum(1 for row in table if row[0] is not None)
    rows = [list(row) for row in table[:used]]
    acc = {p for p in range(used)
           if any(spec.labels[s] is Label.ACC for s in members(paired[p]))}
    return Dfa(spec.alphabet, 0, rows, acc)
