"""Command-line front end.

Exit codes: 0 success, 1 a benchmark fixture or verification failed,
2 usage/file/parse errors, 3 budget exhausted, 4 SUT transport errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import shlex
import sys
from pathlib import Path

from .automata import Label, ProductTooLargeError, ThreeDfa, access_words, show
from .extract import ExtractOptions
from .fixtures import ASSERT, ADR_DELAY, SETUPS, iter_fixture_dir, read_fixture
from .formats import FormatError, load, serialize, to_dot
from .lstar import EquivalenceConfig, LearningBudgetError, Transcript
from .oracle import (
    OracleBudgetError,
    brute_may_pass,
    enumerate_classify,
    exhaustive_min_consistent,
)
from .pipeline import SETUP_KINDS, PipelineResult, finish_pipeline, run_pipeline
from .relabel import ExplanationKind, check_consistency, efe_relabel, relabel_for
from .sut import ExternalSut, TestRepo, TransportError, adr_wrap
from .testmodel import ends_with, parse_test_model

log = logging.getLogger("bugexplain")

EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_TRANSPORT = 1, 2, 3, 4

DEFAULTS = {
    "seed": 0,
    "max_len": 8,
    "walks": 1000,
    "log": None,
    "equivalence": None,
    "extra_depth": 4,
    "max_rounds": 1000,
}
INT_KEYS = {"seed", "max_len", "walks", "extra_depth", "max_rounds"}


class UsageError(Exception):
    pass


def read_config(path: str | Path) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys use flag names."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: expected one of {', '.join(DEFAULTS)} = value")
        value = value.strip()
        if key in INT_KEYS:
            try:
                value = int(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: {key} needs an integer") from None
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand's unset flags from clobbering global ones
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, help="random seed (default 0)")
    g.add_argument("--max-len", type=int, help="word length bound for verify (default 8)")
    g.add_argument("--walks", type=int, help="random walks per view and query (default 1000)")
    g.add_argument("--log", help="write the learning transcript (JSON lines) here")
    g.add_argument("--config", help="key=value file; flags override it")
    g.add_argument("-v", "--verbose", action="store_true", default=False)

    sut = argparse.ArgumentParser(add_help=False)
    s = sut.add_argument_group("system under test")
    s.add_argument("--sut", help="fixture directory with s.dfa, b.dfa and optionally cex")
    s.add_argument("--external", help="command line of a SUT process speaking the RESET/RUN protocol")
    s.add_argument("--alphabet", help="letters of an external SUT, space separated")
    s.add_argument("--setup", choices=SETUPS,
                   help="benchmark setup fixing the test model (and the assert wrapper for adr)")
    s.add_argument("--test-model", default="sigma-star",
                   help="sigma-star | contains:LETTERS | ends-with:LETTER | file:PATH")
    s.add_argument("--equivalence", choices=("exact", "walks"),
                   help="exact product check (simulated SUTs only) or random W-method walks; "
                        "defaults to exact when the SUT is simulated")
    s.add_argument("--repo", help="persistent test repository file")
    s.add_argument("--max-rounds", type=int, help="L* round limit (default 1000)")
    s.add_argument("--timeout", type=float, default=10.0, help="external SUT reply timeout")

    ap = argparse.ArgumentParser(prog="bugexplain", parents=[common],
                                 description="Learn small automata explaining SUT failures.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", parents=[common, sut], help="learn the capture 3DFA")
    p.add_argument("-o", "--out", required=True, help="output file for the 3DFA")

    p = sub.add_parser("relabel", parents=[common], help="relabel a 3DFA for an explanation kind")
    p.add_argument("capture", help="3DFA file")
    p.add_argument("--kind", required=True, type=_relabel_kind,
                   help="efe, ed (same as edfe) or edefe; fe and b only minimize")
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("explain", parents=[common, sut], help="learn (or load) a capture and extract")
    p.add_argument("--kind", required=True, type=_kind)
    p.add_argument("--capture", help="use this 3DFA file instead of learning")
    p.add_argument("--extension-closed", action="store_true")
    p.add_argument("--extra-depth", type=int, help="sample all words up to this length (default 4)")
    p.add_argument("-o", "--out", required=True, help="output directory")

    p = sub.add_parser("bench", parents=[common], help="run a setup over a fixture directory")
    p.add_argument("fixtures", help="directory of fixture subdirectories")
    p.add_argument("--setup", required=True, choices=SETUPS)
    p.add_argument("--equivalence", choices=("exact", "walks"), help="default exact")
    p.add_argument("--extra-depth", type=int)
    p.add_argument("--max-rounds", type=int)
    p.add_argument("-o", "--out", required=True, help="output directory")

    p = sub.add_parser("verify", parents=[common],
                       help="check a fixture's learned capture and explanations against brute force")
    p.add_argument("fixture", help="fixture directory")
    p.add_argument("--setup", default="unr", choices=SETUPS)
    p.add_argument("--max-states", type=int, default=6,
                   help="bound for the exhaustive minimal-DFA search")

    p = sub.add_parser("export-dot", parents=[common], help="render an automaton file as DOT")
    p.add_argument("automaton")
    p.add_argument("-o", "--out", help="output file (default stdout)")
    return ap


def _kind(text: str) -> ExplanationKind:
    try:
        return ExplanationKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _relabel_kind(text: str) -> ExplanationKind:
    return ExplanationKind.EDFE if text.lower() == "ed" else _kind(text)


def resolve_options(args) -> None:
    merged = dict(DEFAULTS)
    config = getattr(args, "config", None)
    if config:
        merged.update(read_config(config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    for key, value in merged.items():
        setattr(args, key, value)


def equivalence_config(args) -> EquivalenceConfig:
    return EquivalenceConfig(seed=args.seed, walks_per_view=args.walks)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# --- SUT resolution -------------------------------------------------------

class Subject:
    """Test model, SUT and (if simulated) the true capture for one run."""

    def __init__(self, test_model, sut, reference: ThreeDfa | None, closer=None):
        self.test_model = test_model
        self.sut = sut
        self.reference = reference
        self.closer = closer

    def close(self):
        if self.closer is not None:
            self.closer()


def open_subject(args) -> Subject:
    if bool(args.sut) == bool(args.external):
        raise UsageError("give exactly one of --sut DIR or --external CMD")
    if args.sut:
        fixture = read_fixture(args.sut)
        if args.setup:
            sc = fixture.scenario(args.setup)
            tm, sut = sc.test_model, sc.sut
        else:
            tm = parse_test_model(args.test_model, fixture.alphabet)
            sut = fixture.sut()
        reference = None
        if args.equivalence in (None, "exact"):
            if args.setup:
                reference = sc.capture()
            else:
                reference = fixture.sut().capture(tm.dfa)
        return Subject(tm, sut, reference)

    if args.equivalence == "exact":
        raise UsageError("--equivalence exact needs a simulated SUT")
    if not args.alphabet:
        raise UsageError("--external needs --alphabet")
    alphabet = tuple(args.alphabet.split())
    client = ExternalSut(shlex.split(args.external), alphabet, args.timeout).start()
    sut = client
    if args.setup == "adr":
        sut = adr_wrap(client, ADR_DELAY, ASSERT)
        tm = ends_with(sut.alphabet, ASSERT)
    elif args.setup == "fdr":
        raise UsageError("fdr needs a counterexample; pass --test-model contains:LETTERS")
    else:
        tm = parse_test_model(args.test_model, alphabet)
    return Subject(tm, sut, None, client.close)


def _transcript(args, default: Path | None = None) -> Transcript:
    target = args.log or default
    if target is None:
        return Transcript()
    Path(target).parent.mkdir(parents=True, exist_ok=True)
    return Transcript.to_file(target)


def learn_subject(args, subject: Subject, kinds, transcript: Transcript,
                  extract_opts: ExtractOptions | None = None) -> PipelineResult:
    repo = TestRepo(args.repo) if getattr(args, "repo", None) else None
    return run_pipeline(subject.test_model, subject.sut, kinds, equivalence_config(args),
                        extract_opts, reference=subject.reference, repo=repo,
                        transcript=transcript, max_rounds=args.max_rounds)


# --- subcommands ------------------------------------------------------------

def cmd_learn(args) -> int:
    subject = open_subject(args)
    transcript = _transcript(args)
    try:
        result = learn_subject(args, subject, [], transcript)
    finally:
        subject.close()
        transcript.close()
    _write(Path(args.out), serialize(result.capture))
    print(f"capture: {result.capture.num_states} states, "
          f"{result.stats['executions']} executions -> {args.out}")
    return 0


def cmd_relabel(args) -> int:
    t = load(args.capture)
    if not isinstance(t, ThreeDfa):
        raise UsageError(f"{args.capture} holds a DFA, not a 3DFA")
    out = relabel_for(args.kind, t)
    _write(Path(args.out), serialize(out))
    print(f"{args.kind.value} labels: {out.num_states} states -> {args.out}")
    return 0


def write_explanation(out: Path, result: PipelineResult, kinds) -> None:
    _write(out / "capture.3dfa", serialize(result.capture))
    for k in kinds:
        dfa = result.dfa(k)
        _write(out / f"{k.value}.dfa", serialize(dfa))
        _write(out / f"{k.value}.dot", to_dot(dfa, k.value))


def cmd_explain(args) -> int:
    out = Path(args.out)
    opts = ExtractOptions(extra_depth=args.extra_depth, extension_closed=args.extension_closed)
    kinds = [args.kind]
    if args.capture:
        capture = load(args.capture)
        if not isinstance(capture, ThreeDfa):
            raise UsageError(f"{args.capture} holds a DFA, not a 3DFA")
        result = finish_pipeline(capture, kinds, opts)
    else:
        subject = open_subject(args)
        transcript = _transcript(args, out / "transcript.jsonl")
        try:
            result = learn_subject(args, subject, kinds, transcript, opts)
        finally:
            subject.close()
            transcript.close()
    write_explanation(out, result, kinds)
    summary = dict(result.stats, kind=args.kind.value,
                   explanation_size=result.dfa(args.kind).num_states,
                   extension_closed=result.explanations[args.kind].extension_closed)
    _write(out / "summary.json", json.dumps(summary, sort_keys=True, indent=2) + "\n")
    print(f"{args.kind.value}: {summary['explanation_size']} states "
          f"(capture {summary['capture_size']}, B {summary['b_size']}) -> {out}")
    return 0


REPORT_COLUMNS = [
    ("fixture", "fixture"), ("cex_len", "|cex|"), ("alphabet_size", "|Σ|"),
    ("t_size", "|T|"), ("capture_size", "|3DFA|"), ("fe_size", "|FE|"),
    ("efe_size", "|EFE|"), ("edfe_size", "|EDFE|"), ("b_size", "|B|"),
    ("executions", "runs"), ("wall_time", "time(s)"),
]


def render_table(records: list[dict], setup: str) -> str:
    kinds = {k.value for k in SETUP_KINDS[setup]}
    cols = [(key, title) for key, title in REPORT_COLUMNS
            if not key.endswith("_size") or key.split("_")[0] in kinds
            or key in ("alphabet_size", "t_size", "capture_size")]
    if setup == "unr":
        cols = [c for c in cols if c[0] != "t_size"]
    rows = [[title for _, title in cols]]
    for rec in records:
        if "error" in rec:
            rows.append([rec["fixture"], "error: " + rec["error"]] + [""] * (len(cols) - 2))
        else:
            rows.append([str(rec.get(key, "")) for key, _ in cols])
    widths = [max(len(r[i]) for r in rows) for i in range(len(cols))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    kinds = SETUP_KINDS[args.setup]
    opts = ExtractOptions(extra_depth=args.extra_depth)
    records = []
    failed = False
    for path in iter_fixture_dir(args.fixtures):
        name = path.name
        try:
            fixture = read_fixture(path)
            sc = fixture.scenario(args.setup)
            reference = sc.capture() if args.equivalence in (None, "exact") else None
            transcript = Transcript.to_file(_mkdir(out / name) / "transcript.jsonl")
            try:
                result = run_pipeline(sc.test_model, sc.sut, kinds, equivalence_config(args),
                                      opts, reference=reference, transcript=transcript,
                                      max_rounds=args.max_rounds)
            finally:
                transcript.close()
            write_explanation(out / name, result, kinds)
            rec = dict(result.stats, fixture=name, setup=args.setup, cex_len=len(fixture.cex))
            if args.setup != "unr":
                rec["t_size"] = sc.test_model.dfa.num_states
        except Exception as exc:  # one bad fixture must not stop the batch
            log.debug("fixture %s failed", name, exc_info=True)
            rec = {"fixture": name, "setup": args.setup, "error": f"{type(exc).__name__}: {exc}"}
            failed = True
        records.append(rec)
        print(f"{name}: " + (rec["error"] if "error" in rec else
                             ", ".join(f"{k.value}={rec[k.value + '_size']}" for k in kinds)))
    with (out / "report.jsonl").open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    (out / "report.txt").write_text(render_table(records, args.setup))
    return EXIT_FAIL if failed else 0


def _mkdir(p: Path) -> Path:
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_verify(args) -> int:
    """Learn the fixture through the SUT and compare everything against brute force."""
    fixture = read_fixture(args.fixture)
    sc = fixture.scenario(args.setup)
    problems = []
    result = run_pipeline(sc.test_model, sc.sut, list(ExplanationKind),
                          equivalence_config(args), reference=sc.capture(),
                          max_rounds=args.max_rounds)
    truth = enumerate_classify(sc, args.max_len)
    bad = [w for w, lab in truth.items() if result.capture.classify(w) is not lab]
    print(f"capture labels up to length {args.max_len}: {len(truth) - len(bad)}/{len(truth)} agree")
    if bad:
        problems.append(f"capture mislabels {show(bad[0])}")

    relabeled = efe_relabel(result.capture)
    s_eff, b_eff = sc.effective_s, sc.effective_b
    access = access_words(result.capture)
    mismatched = [q for q in result.capture.states_labeled(Label.REJ)
                  if (relabeled.labels[q] is Label.REJ) != brute_may_pass(s_eff, b_eff, access[q])]
    print(f"may-pass relabeling: {len(mismatched)} disagreements")
    if mismatched:
        problems.append(f"efe relabeling disagrees on {show(access[mismatched[0]])}")

    for kind, ex in result.explanations.items():
        spec = relabel_for(kind, result.capture)
        if check_consistency(ex.dfa, spec, kind) is not None:
            problems.append(f"{kind.value} explanation is inconsistent")
        if kind is ExplanationKind.B:
            # B is the minimized Acc view itself, not a search over Dont words
            print(f"b: {ex.size} states (minimal Acc view)")
            continue
        try:
            best = exhaustive_min_consistent(spec, args.max_states)
            lower = "?" if best is None else best.num_states
        except OracleBudgetError:
            lower = "budget"
        if isinstance(lower, int) and lower > ex.size:
            problems.append(f"{kind.value}: extracted {ex.size} below the minimum {lower}")
        print(f"{kind.value}: extracted {ex.size}, minimal {lower}")
    for p in problems:
        print("FAIL:", p)
    return EXIT_FAIL if problems else 0


def cmd_export_dot(args) -> int:
    m = load(args.automaton)
    text = to_dot(m, Path(args.automaton).stem.replace("-", "_"))
    if args.out:
        _write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "learn": cmd_learn,
    "relabel": cmd_relabel,
    "explain": cmd_explain,
    "bench": cmd_bench,
    "verify": cmd_verify,
    "export-dot": cmd_export_dot,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        resolve_options(args)
        return COMMANDS[args.command](args)
    except (UsageError, FormatError, OSError, ValueError) as exc:
        print(f"bugexplain: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LearningBudgetError, OracleBudgetError, ProductTooLargeError) as exc:
        print(f"bugexplain: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except TransportError as exc:
        print(f"bugexplain: SUT transport failed: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    sys.exit(main())
