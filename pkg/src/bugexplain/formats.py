"""Plain-text and DOT encodings of automata.

Text format, one automaton per file::

    # comments and blank lines are ignored
    alphabet: 0 1
    initial: q0
    accepting: q2            (DFA)   or   labels: q0=Dont q1=Rej q2=Acc   (3DFA)
    complete: sink           (optional; see below)
    q0 0 -> q1
    q0 1 -> q0
    ...

Every state needs one transition per letter. With ``complete: sink`` missing
rows are routed to an implicit sink that rejects (DFA) or is labeled Dont
(3DFA). In a 3DFA file, states absent from ``labels:`` are Dont.
See docs/formats.md for the grammar.
"""
from __future__ import annotations

from pathlib import Path

from .automata import Dfa, Label, ThreeDfa, canonicalize


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


def serialize(m: Dfa | ThreeDfa) -> str:
    c = canonicalize(m)
    lines = [f"alphabet: {' '.join(c.alphabet)}", "initial: q0"]
    if isinstance(c, ThreeDfa):
        lines.append("labels: " + " ".join(f"q{q}={lab.value}" for q, lab in enumerate(c.labels)))
    else:
        lines.append("accepting: " + " ".join(f"q{q}" for q in sorted(c.accepting)))
    for q, row in enumerate(c.transitions):
        for a, r in zip(c.alphabet, row):
            lines.append(f"q{q} {a} -> q{r}")
    return "\n".join(lines) + "\n"


def parse(text: str, complete: bool = False) -> Dfa | ThreeDfa:
    """Parse either kind of automaton; the header decides which."""
    alphabet = None
    initial = None
    accepting = None
    labels = None
    edges: dict[tuple[str, str], str] = {}
    mentioned: list[str] = []

    def note(state):
        if state not in mentioned:
            mentioned.append(state)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        line = line.strip()
        head, sep, rest = line.partition(":")
        if sep and " " not in head and "->" not in line:
            key, values = head.strip(), rest.split()
            if key == "alphabet":
                if alphabet is not None:
                    raise FormatError("duplicate alphabet header", lineno, col)
                if not values:
                    raise FormatError("empty alphabet", lineno, col)
                if len(set(values)) != len(values):
                    raise FormatError("duplicate letters in alphabet", lineno, col)
                alphabet = tuple(values)
            elif key == "initial":
                if len(values) != 1:
                    raise FormatError("initial needs exactly one state", lineno, col)
                initial = values[0]
                note(initial)
            elif key == "accepting":
                accepting = list(values)
                for s in values:
                    note(s)
            elif key == "labels":
                labels = {}
                for item in values:
                    state, eq, lab = item.partition("=")
                    if not eq or not state:
                        raise FormatError(f"expected state=Label, got {item!r}", lineno, col)
                    try:
                        labels[state] = Label(lab)
                    except ValueError:
                        raise FormatError(f"unknown label {lab!r}", lineno, col) from None
                    note(state)
            elif key == "complete":
                if values not in (["sink"], ["no"]):
                    raise FormatError("complete must be 'sink' or 'no'", lineno, col)
                complete = values == ["sink"]
            else:
                raise FormatError(f"unknown header {key!r}", lineno, col)
            continue
        parts = line.split()
        if len(parts) != 4 or parts[2] != "->":
            raise FormatError(f"expected 'state letter -> state', got {line!r}", lineno, col)
        src, letter, _, dst = parts
        if alphabet is None:
            raise FormatError("transition before alphabet header", lineno, col)
        if letter not in alphabet:
            raise FormatError(f"unknown letter {letter!r} in transition", lineno, col)
        if (src, letter) in edges and edges[src, letter] != dst:
            raise FormatError(f"nondeterministic transition for ({src}, {letter})", lineno, col)
        edges[src, letter] = dst
        note(src)
        note(dst)

    if alphabet is None:
        raise FormatError("missing alphabet header")
    if initial is None:
        raise FormatError("missing initial header")
    if (accepting is None) == (labels is None):
        raise FormatError("exactly one of 'accepting:' or 'labels:' is required")
    if not complete:
        for s in mentioned:
            for a in alphabet:
                if (s, a) not in edges:
                    raise FormatError(f"missing transition for state {s} on letter {a}")

    if labels is not None:
        full = {s: labels.get(s, Label.DONT) for s in mentioned}
        return ThreeDfa.from_table(alphabet, initial, full, edges, complete=True)
    return Dfa.from_table(alphabet, initial, accepting, edges, complete=True)


def parse_dfa(text: str, complete: bool = False) -> Dfa:
    m = parse(text, complete)
    if not isinstance(m, Dfa):
        raise FormatError("expected a DFA (accepting:), found a 3DFA (labels:)")
    return m


def parse_three_dfa(text: str, complete: bool = False) -> ThreeDfa:
    m = parse(text, complete)
    if not isinstance(m, ThreeDfa):
        raise FormatError("expected a 3DFA (labels:), found a DFA (accepting:)")
    return m


def load(path: str | Path, complete: bool = False) -> Dfa | ThreeDfa:
    return parse(Path(path).read_text(), complete)


def dump(m: Dfa | ThreeDfa, path: str | Path) -> None:
    Path(path).write_text(serialize(m))


def to_dot(m: Dfa | ThreeDfa, name: str = "automaton") -> str:
    """Graphviz rendering. Accepting (or Acc) states get a double circle.

    The initial state is drawn bold with an ``xlabel`` instead of an extra
    invisible start node, so node declarations map one-to-one onto states.
    """
    c = canonicalize(m)
    out = [f'digraph "{name}" {{', "  rankdir=LR;"]
    for q in range(c.num_states):
        if isinstance(c, ThreeDfa):
            lab = c.labels[q]
            shape = "doublecircle" if lab is Label.ACC else "circle"
            attrs = [f'label="q{q}\\n{lab.value}"', f"shape={shape}"]
            if lab is Label.DONT:
                attrs.append("style=dashed")
        else:
            shape = "doublecircle" if q in c.accepting else "circle"
            attrs = [f'label="q{q}"', f"shape={shape}"]
        if q == c.initial:
            attrs += ["penwidth=2", 'xlabel="start"']
        out.append(f"  q{q} [{', '.join(attrs)}];")
    for q, row in enumerate(c.transitions):
        grouped: dict[int, list[str]] = {}
        for a, r in zip(c.alphabet, row):
            grouped.setdefault(r, []).append(a)
        for r, letters in grouped.items():
            text = ", ".join(letters).replace('"', '\\"')
            out.append(f'  q{q} -> q{r} [label="{text}"];')
    out.append("}")
    return "\n".join(out) + "\n"
