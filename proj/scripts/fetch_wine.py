#!/usr/bin/env python3
"""Write the class-3 cultivar of the UCI wine data (48 rows, 13 columns) as CSV.

Uses the copy bundled with scikit-learn, so no network access is needed.
    python3 scripts/fetch_wine.py [output]   (default: data/wine_class3.csv)
"""
import hashlib
import json
import pathlib
import sys

from sklearn.datasets import load_wine

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "data" / "wine_class3.csv"
    wine = load_wine()
    rows = wine.data[wine.target == 2]
    lines = [",".join(wine.feature_names)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    meta = json.loads((ROOT / "tests" / "fixtures" / "wine_class3.json").read_text())
    digest = hashlib.sha256(text.encode()).hexdigest()
    if digest != meta["sha256"]:
        sys.exit(f"checksum mismatch: got {digest}, expected {meta['sha256']}")
    print(f"wrote {out} ({rows.shape[0]} x {rows.shape[1]})")


if __name__ == "__main__":
    main()
