#!/usr/bin/env python3
"""Populate data/ with the pinned iris, wine and zoo files.

iris.csv and wine_data.csv are the copies shipped inside scikit-learn;
zoo.tab comes from the orange3 wheel (downloaded with pip, not installed).
Every file is checked against its pinned SHA-256.
"""
import argparse
import hashlib
import pathlib
import shutil
import subprocess
import sys
import tempfile
import zipfile

PINS = {
    "iris.csv": "f13ffa8fdd56fd8e6c8d16d4081a3fbd3114bcd0aae4256c43205169cd9d1449",
    "wine_data.csv": "10e8a802908b34f86e5da8ce962f3c806694bc98450a18f61851af59f324bede",
    "zoo.tab": "4cbf8af5bda8edcb35b37a4cae3ac42544abcd84ecfa9e21dd3da94f5f6758ff",
}
ORANGE = "orange3==3.39.0"


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def from_sklearn(dest):
    import sklearn.datasets

    src = pathlib.Path(sklearn.datasets.__file__).parent / "data"
    for name in ("iris.csv", "wine_data.csv"):
        shutil.copyfile(src / name, dest / name)


def from_orange(dest):
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "--only-binary=:all:",
             "-d", tmp, ORANGE],
            check=True,
        )
        wheel = next(pathlib.Path(tmp).glob("orange3-*.whl"))
        with zipfile.ZipFile(wheel) as z:
            (dest / "zoo.tab").write_bytes(z.read("Orange/datasets/zoo.tab"))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dest", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--from-dir", help="copy from a directory holding the three files instead")
    args = ap.parse_args()
    dest = pathlib.Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)

    if args.from_dir:
        for name in PINS:
            shutil.copyfile(pathlib.Path(args.from_dir) / name, dest / name)
    else:
        if not all((dest / n).exists() for n in ("iris.csv", "wine_data.csv")):
            from_sklearn(dest)
        if not (dest / "zoo.tab").exists():
            from_orange(dest)

    bad = [n for n, pin in PINS.items() if sha256(dest / n) != pin]
    for n in PINS:
        print(f"{n}: {'ok' if n not in bad else 'HASH MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
