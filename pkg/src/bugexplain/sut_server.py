"""A simulated SUT speaking the line protocol on stdin/stdout.

    python -m bugexplain.sut_server FIXTURE_DIR

Useful for trying the external-SUT path without a real system.
"""
from __future__ import annotations

import argparse
import sys

from .fixtures import read_fixture
from .sut import Outcome

REPLY = {Outcome.PASSED: "PASS", Outcome.FAILED: "FAIL", Outcome.INVALID: "INVALID"}


def serve(sut, stdin=sys.stdin, stdout=sys.stdout) -> None:
    for line in stdin:
        if not line.strip():
            continue
        cmd, *letters = line.split()
        if cmd == "RESET":
            reply = "OK"
        elif cmd == "RUN":
            try:
                reply = REPLY[sut.execute(letters)]
            except ValueError:
                reply = "ERROR unknown letter"
        else:
            reply = f"ERROR unknown command {cmd}"
        stdout.write(reply + "\n")
        stdout.flush()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bugexplain-sut", description=__doc__.splitlines()[0])
    ap.add_argument("fixture", help="directory holding s.dfa and b.dfa")
    args = ap.parse_args(argv)
    serve(read_fixture(args.fixture).sut())
    return 0


if __name__ == "__main__":
    sys.exit(main())
