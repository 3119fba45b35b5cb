import json
import shlex
import sys
from pathlib import Path

import pytest

from bugexplain.automata import Dfa, ThreeDfa, equivalent
from bugexplain.cli import main, read_config, UsageError
from bugexplain.fixtures import example_fe, write_fixture
from bugexplain.formats import load

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
EX = str(FIXTURES / "running-ex")


def run(*argv):
    return main([str(a) for a in argv])


def test_explain_running_example(tmp_path, capsys):
    out = tmp_path / "out"
    assert run("explain", "--sut", EX, "--kind", "fe", "-o", out) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["explanation_size"] == 3
    assert summary["b_size"] == 6 and summary["capture_size"] == 6
    fe = load(out / "fe.dfa")
    assert isinstance(fe, Dfa) and equivalent(fe, example_fe()) is None
    assert isinstance(load(out / "capture.3dfa"), ThreeDfa)
    assert (out / "fe.dot").read_text().startswith("digraph")
    assert (out / "transcript.jsonl").stat().st_size > 0
    assert "fe: 3 states" in capsys.readouterr().out


def test_explain_from_capture_file(tmp_path):
    run("explain", "--sut", EX, "--kind", "fe", "-o", tmp_path / "a")
    assert run("explain", "--capture", tmp_path / "a" / "capture.3dfa", "--kind", "edfe",
               "-o", tmp_path / "b") == 0
    assert json.loads((tmp_path / "b" / "summary.json").read_text())["explanation_size"] == 4


def test_bogus_kind_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("explain", "--sut", EX, "--kind", "bogus", "-o", tmp_path)
    assert exc.value.code == 2


def test_missing_fixture(tmp_path):
    assert run("explain", "--sut", tmp_path / "nope", "--kind", "fe", "-o", tmp_path / "o") == 2


def test_seed_determinism(tmp_path):
    for name in ("a", "b"):
        run("--seed", 7, "explain", "--sut", FIXTURES / "random-1", "--setup", "fdr",
            "--equivalence", "walks", "--kind", "edfe", "-o", tmp_path / name)
    for f in ("edfe.dfa", "capture.3dfa", "transcript.jsonl"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_bench_outputs(tmp_path):
    out = tmp_path / "bench"
    assert run("bench", FIXTURES, "--setup", "adr", "-o", out) == 0
    records = [json.loads(x) for x in (out / "report.jsonl").read_text().splitlines()]
    assert {r["fixture"] for r in records} == {p.name for p in FIXTURES.iterdir() if p.is_dir()}
    assert all("error" not in r for r in records)
    table = (out / "report.txt").read_text()
    assert "|EFE|" in table and "|T|" in table
    assert (out / "running-ex" / "efe.dfa").exists()


def test_bench_empty_dir(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run("bench", tmp_path / "empty", "--setup", "unr", "-o", tmp_path / "o") == 0
    assert (tmp_path / "o" / "report.jsonl").read_text() == ""


def test_bench_bad_fixture_marks_failure(tmp_path):
    bad = tmp_path / "fx" / "broken"
    bad.mkdir(parents=True)
    (bad / "s.dfa").write_text("garbage\n")
    (bad / "b.dfa").write_text("garbage\n")
    assert run("bench", tmp_path / "fx", "--setup", "unr", "-o", tmp_path / "o") == 1
    rec = json.loads((tmp_path / "o" / "report.jsonl").read_text())
    assert "error" in rec


def test_verify(capsys):
    assert run("verify", EX, "--setup", "unr") == 0
    out = capsys.readouterr().out
    assert "fe: extracted 3, minimal 3" in out
    assert "edfe: extracted 4, minimal 4" in out


def test_relabel_and_export_dot(tmp_path, capsys):
    run("learn", "--sut", EX, "-o", tmp_path / "cap.3dfa")
    assert run("relabel", tmp_path / "cap.3dfa", "--kind", "ed", "-o", tmp_path / "ed.3dfa") == 0
    assert isinstance(load(tmp_path / "ed.3dfa"), ThreeDfa)
    capsys.readouterr()
    assert run("export-dot", tmp_path / "ed.3dfa") == 0
    assert capsys.readouterr().out.startswith("digraph")


def test_relabel_refuses_dfa(tmp_path):
    assert run("relabel", FIXTURES / "running-ex" / "s.dfa", "--kind", "efe",
               "-o", tmp_path / "x") == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# learning limits\nmax-rounds = 1\n")
    assert read_config(cfg) == {"max_rounds": 1}
    # the config's round limit is too small for the example
    assert run("--config", cfg, "explain", "--sut", EX, "--kind", "fe", "-o", tmp_path / "o") == 3
    assert run("--config", cfg, "explain", "--sut", EX, "--kind", "fe", "--max-rounds", 50,
               "-o", tmp_path / "o") == 0
    cfg.write_text("colour = blue\n")
    with pytest.raises(UsageError):
        read_config(cfg)


def test_external_sut(tmp_path):
    cmd = f"{shlex.quote(sys.executable)} -m bugexplain.sut_server {shlex.quote(EX)}"
    repo = tmp_path / "repo.txt"
    args = ["explain", "--external", cmd, "--alphabet", "0 1", "--equivalence", "walks",
            "--repo", repo, "--kind", "fe"]
    assert run(*args, "-o", tmp_path / "a") == 0
    assert json.loads((tmp_path / "a" / "summary.json").read_text())["explanation_size"] == 3
    first = json.loads((tmp_path / "a" / "summary.json").read_text())
    stored = len(repo.read_text().splitlines())
    assert stored == first["executions"]
    assert run(*args, "-o", tmp_path / "b") == 0
    second = json.loads((tmp_path / "b" / "summary.json").read_text())
    # the repo scan changes which counterexamples come first, so a few new
    # words may run, but nothing already stored runs again
    assert second["executions"] < first["executions"] // 10
    assert len(repo.read_text().splitlines()) == stored + second["executions"]


def test_external_transport_error(tmp_path):
    assert run("explain", "--external", "cat", "--alphabet", "0 1", "--kind", "fe",
               "-o", tmp_path / "o") == 4


def test_fixture_roundtrip_through_cli(tmp_path, example):
    path = write_fixture(tmp_path, example)
    assert run("explain", "--sut", path, "--kind", "efe", "-o", tmp_path / "o") == 0
