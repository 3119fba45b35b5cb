"""Relabelings of a capture 3DFA for the different explanation kinds."""
from __future__ import annotations

import enum

from .automata import (
    Dfa,
    Label,
    ThreeDfa,
    Word,
    backward_reachability,
    is_cyclic_component,
    minimize3,
    scc,
    shortest_witness,
)


class ExplanationKind(enum.Enum):
    B = "b"
    FE = "fe"
    EFE = "efe"
    EDFE = "edfe"
    EDEFE = "edefe"

    @classmethod
    def parse(cls, text: str) -> "ExplanationKind":
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(
                f"unknown kind {text!r}; expected one of {', '.join(k.value for k in cls)}"
            ) from None


class RelabelError(ValueError):
    pass


def efe_relabel(t: ThreeDfa) -> ThreeDfa:
    """Demote to Dont every Rej state whose words will eventually fail.

    A Rej state stays Rej when it can reach either a Rej state all of whose
    successors are the Dont sink (a passing test with no longer valid
    continuation) or a cyclic component holding a Rej state (a continuation
    passing infinitely often). Expects a minimal 3DFA, where all hopeless
    words share one self-looping Dont sink.
    """
    n = t.num_states
    sink_dont = {q for q in range(n)
                 if t.labels[q] is Label.DONT and all(r == q for r in t.transitions[q])}
    rej = t.states_labeled(Label.REJ)
    may_pass = {q for q in rej if all(r in sink_dont for r in t.transitions[q])}
    may_pass = set(backward_reachability(t, may_pass))
    for comp in scc(t):
        # a component without a cycle gives no infinite continuation
        if comp & rej and is_cyclic_component(t, comp):
            may_pass |= comp
    may_pass = backward_reachability(t, may_pass)
    labels = [
        Label.DONT if lab is Label.REJ and q not in may_pass else lab
        for q, lab in enumerate(t.labels)
    ]
    return t.relabel(labels)


def ed_relabel(t: ThreeDfa) -> ThreeDfa:
    """Mark Acc every state that can reach Acc but cannot reach Rej."""
    acc = t.states_labeled(Label.ACC)
    reach_acc = backward_reachability(t, acc)
    reach_rej = backward_reachability(t, t.states_labeled(Label.REJ))
    if acc & reach_rej:
        raise RelabelError("an Acc state reaches a Rej state; failures do not persist")
    new_acc = reach_acc - reach_rej
    labels = [Label.ACC if q in new_acc else lab for q, lab in enumerate(t.labels)]
    return t.relabel(labels)


def relabel_for(kind: ExplanationKind, capture: ThreeDfa) -> ThreeDfa:
    """The constraint 3DFA an explanation of ``kind`` must be consistent with."""
    t = minimize3(capture)
    if kind in (ExplanationKind.EFE, ExplanationKind.EDEFE):
        t = efe_relabel(t)
    if kind in (ExplanationKind.EDFE, ExplanationKind.EDEFE):
        t = ed_relabel(t)
    return t


def check_consistency(candidate: Dfa, capture: ThreeDfa,
                      kind: ExplanationKind | None = None) -> Word | None:
    """Shortest word the candidate gets wrong: an Acc word it rejects or a Rej word it accepts.

    ``capture`` must already be relabeled for ``kind``; the kind only
    annotates errors.
    """
    acc = candidate.accepting

    def wrong(s):
        lab = capture.labels[s[1]]
        return (lab is Label.ACC and s[0] not in acc) or (lab is Label.REJ and s[0] in acc)

    try:
        return shortest_witness([candidate, capture], wrong)
    except ValueError as exc:
        raise type(exc)(f"{kind.value if kind else 'consistency'} check: {exc}") from exc
