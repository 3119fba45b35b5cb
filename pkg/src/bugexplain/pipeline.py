"""learn → relabel → extract, with the bookkeeping a report needs."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .automata import Dfa, ThreeDfa, canonicalize, minimize3
from .extract import Extraction, ExtractOptions, explain
from .lstar import EquivalenceConfig, Teacher, Transcript, learn
from .relabel import ExplanationKind
from .sut import Sut, TestRepo
from .testmodel import TestModel

# explanation kinds reported per benchmark setup
SETUP_KINDS = {
    "unr": (ExplanationKind.FE, ExplanationKind.B),
    "fdr": (ExplanationKind.FE, ExplanationKind.EDFE, ExplanationKind.B),
    "adr": (ExplanationKind.FE, ExplanationKind.EFE, ExplanationKind.B),
}


@dataclass
class PipelineResult:
    capture: ThreeDfa
    explanations: dict[ExplanationKind, Extraction]
    stats: dict = field(default_factory=dict)

    def dfa(self, kind: ExplanationKind) -> Dfa:
        return self.explanations[kind].dfa


def run_pipeline(test_model: TestModel, sut: Sut, kinds: Sequence[ExplanationKind],
                 config: EquivalenceConfig | None = None,
                 extract_opts: ExtractOptions | None = None,
                 reference: ThreeDfa | None = None,
                 repo: TestRepo | None = None,
                 transcript: Transcript | None = None,
                 max_rounds: int = 1000) -> PipelineResult:
    """Learn a capture of ``sut`` within ``test_model`` and extract each requested kind.

    The B explanation is always computed since its size is part of every
    summary.
    """
    config = config or EquivalenceConfig()
    start = time.perf_counter()
    teacher = Teacher(test_model, sut, config, repo=repo, reference=reference,
                      transcript=transcript)
    capture = learn(teacher, max_rounds)
    return finish_pipeline(capture, kinds, extract_opts, teacher=teacher, started=start)


def finish_pipeline(capture: ThreeDfa, kinds: Sequence[ExplanationKind],
                    extract_opts: ExtractOptions | None = None,
                    teacher: Teacher | None = None,
                    started: float | None = None) -> PipelineResult:
    started = time.perf_counter() if started is None else started
    capture = canonicalize(minimize3(capture))
    wanted = list(dict.fromkeys(list(kinds) + [ExplanationKind.B]))
    explanations = {k: explain(capture, k, extract_opts) for k in wanted}
    stats = {
        "alphabet_size": len(capture.alphabet),
        "capture_size": capture.num_states,
        "b_size": explanations[ExplanationKind.B].size,
    }
    for k in kinds:
        ex = explanations[k]
        stats[f"{k.value}_size"] = ex.size
        if k is not ExplanationKind.B:
            stats[f"{k.value}_rpni_size"] = ex.rpni_size
            stats[f"{k.value}_fallback"] = ex.fallback
    if teacher is not None:
        stats.update(
            membership_queries=teacher.membership_queries,
            equivalence_queries=teacher.equivalence_queries,
            executions=teacher.sut.executions,
            seed=teacher.config.seed,
        )
    stats["wall_time"] = round(time.perf_counter() - started, 4)
    return PipelineResult(capture, explanations, stats)
