"""Exit status of the command-line tool: 0 solved, 1 bad configuration, 2 budget spent."""

import subprocess
import sys
import tempfile


def run(cli, *args):
    with tempfile.TemporaryDirectory() as out:
        return subprocess.run([cli, "--out", out, *args], capture_output=True, text=True).returncode


def main():
    cli = sys.argv[1]
    cases = [
        (("synth", "--gate-set", "no-such-set"), 1),
        (("synth", "--budget", "1"), 2),
        (("synth", "--seed", "1"), 0),
        (("synth", "--set", "beta=-1"), 1),
        (("qml", "--data", "/nonexistent/iris.csv"), 1),
        (("bogus-command",), 1),
        (("ca-demo", "--rule", "30"), 0),
    ]
    failed = 0
    for args, want in cases:
        got = run(cli, *args)
        ok = got == want
        failed += not ok
        print(("ok  " if ok else "BAD ") + " ".join(args) + f" -> {got} (want {want})")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
