"""Test-space languages: what counts as an expressible test."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .automata import AlphabetMismatchError, Dfa, backward_reachability, canonicalize


@dataclass(frozen=True)
class TestModel:
    __test__ = False

    dfa: Dfa
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "dfa", canonicalize(self.dfa))

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.dfa.alphabet

    def contains(self, w: Sequence[str]) -> bool:
        return self.dfa.accepts(w)


def sigma_star(alphabet: Sequence[str]) -> TestModel:
    alphabet = tuple(alphabet)
    if not alphabet:
        raise ValueError("alphabet must be nonempty")
    return TestModel(Dfa(alphabet, 0, [[0] * len(alphabet)], {0}), "sigma-star")


def contains_all_letters(alphabet: Sequence[str], cex: Sequence[str]) -> TestModel:
    """Words containing every distinct letter of ``cex`` at least once.

    States track the subset of required letters seen so far, so there are at
    most ``2**k`` of them for ``k`` distinct letters.
    """
    alphabet = tuple(alphabet)
    for a in cex:
        if a not in alphabet:
            raise AlphabetMismatchError(f"letter {a!r} of cex is not in the alphabet")
    required = tuple(dict.fromkeys(cex))
    bit = {a: 1 << i for i, a in enumerate(required)}
    full = (1 << len(required)) - 1
    # state index = bitmask of letters seen
    rows = [[mask | bit.get(a, 0) for a in alphabet] for mask in range(full + 1)]
    desc = "contains:" + ",".join(required)
    return TestModel(Dfa(alphabet, 0, rows, {full}), desc)


def ends_with(alphabet: Sequence[str], letter: str) -> TestModel:
    alphabet = tuple(alphabet)
    if letter not in alphabet:
        raise AlphabetMismatchError(f"letter {letter!r} is not in the alphabet")
    rows = [[1 if a == letter else 0 for a in alphabet]] * 2
    return TestModel(Dfa(alphabet, 0, rows, {1}), f"ends-with:{letter}")


def interleave(components: Sequence[Dfa]) -> Dfa:
    """Asynchronous composition: each letter moves only the component owning it.

    A composite state accepts when at least one component accepts. A letter
    that sends its owner into a state from which acceptance is impossible
    blocks the whole run, mirroring an undefined transition in the component.
    """
    if not components:
        raise ValueError("need at least one component")
    owner: dict[str, int] = {}
    alphabet: list[str] = []
    for i, d in enumerate(components):
        for a in d.alphabet:
            if a in owner:
                raise ValueError(f"letter {a!r} is owned by more than one component")
            owner[a] = i
            alphabet.append(a)
    live = [backward_reachability(d, d.accepting) for d in components]

    start = tuple(d.initial for d in components)
    dead = None
    if any(q not in lv for q, lv in zip(start, live)):
        start = dead
    index = {start: 0}
    order = [start]
    rows = []
    for node in order:
        row = []
        for a in alphabet:
            if node is dead:
                nxt = dead
            else:
                i = owner[a]
                d = components[i]
                q = d.step(node[i], a)
                nxt = dead if q not in live[i] else node[:i] + (q,) + node[i + 1:]
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        rows.append(row)
    acc = {
        n for n, node in enumerate(order)
        if node is not dead and any(q in d.accepting for q, d in zip(node, components))
    }
    return canonicalize(Dfa(tuple(alphabet), 0, rows, acc))


def shop_alphabet(session_id, users: Sequence[str], products: Sequence[str]) -> tuple[str, ...]:
    i = session_id
    return (
        (f"StartSession_{i}",)
        + tuple(f"Login_{i}({u})" for u in users)
        + (f"Logout_{i}",)
        + tuple(f"AddToCart_{i}({p})" for p in products)
        + tuple(f"RemoveFromCart_{i}({p})" for p in products)
        + (f"Checkout_{i}",)
    )


def shop_session(session_id, users: Sequence[str], products: Sequence[str]) -> Dfa:
    """Main flow of one online-store session, completed with a dead sink.

    q0 -start-> q1 -login-> q2; logout returns to q1 from q2 and q3; adding
    loops on q2 and leads q3 back to q2; removing leads q2 to q3 and loops on
    q3; checkout goes from q2 or q3 to q4. q3 and q4 accept.
    """
    if not users or not products:
        raise ValueError("users and products must be nonempty")
    i = session_id
    alphabet = shop_alphabet(i, users, products)
    t = {("q0", f"StartSession_{i}"): "q1"}
    for u in users:
        t["q1", f"Login_{i}({u})"] = "q2"
    t["q2", f"Logout_{i}"] = "q1"
    t["q3", f"Logout_{i}"] = "q1"
    for p in products:
        t["q2", f"AddToCart_{i}({p})"] = "q2"
        t["q2", f"RemoveFromCart_{i}({p})"] = "q3"
        t["q3", f"RemoveFromCart_{i}({p})"] = "q3"
        t["q3", f"AddToCart_{i}({p})"] = "q2"
    t["q2", f"Checkout_{i}"] = "q4"
    t["q3", f"Checkout_{i}"] = "q4"
    return Dfa.from_table(alphabet, "q0", {"q3", "q4"}, t)


def shop_test_model(sessions: int = 1, users: Sequence[str] = ("u1",),
                    products: Sequence[str] = ("p1",)) -> TestModel:
    parts = [shop_session(i, users, products) for i in range(1, sessions + 1)]
    return TestModel(interleave(parts), f"shop:{sessions}x{len(users)}x{len(products)}")


def parse_test_model(spec: str, alphabet: Sequence[str]) -> TestModel:
    """Resolve ``sigma-star``, ``contains:<letters>``, ``ends-with:<letter>`` or ``file:<path>``.

    Letters in ``contains:`` are comma separated; without commas each
    character is a letter.
    """
    from .formats import parse_dfa

    alphabet = tuple(alphabet)
    kind, _, arg = spec.partition(":")
    if kind == "sigma-star" and not arg:
        return sigma_star(alphabet)
    if kind == "contains":
        letters = arg.split(",") if "," in arg else ([arg] if arg in alphabet else list(arg))
        return contains_all_letters(alphabet, [a for a in letters if a])
    if kind == "ends-with" and arg:
        return ends_with(alphabet, arg)
    if kind == "file" and arg:
        d = parse_dfa(Path(arg).read_text())
        if d.alphabet != alphabet:
            raise AlphabetMismatchError(
                f"test model alphabet {' '.join(d.alphabet)} differs from SUT alphabet"
            )
        return TestModel(d, spec)
    raise ValueError(f"unknown test model spec {spec!r}")
