"""Run each CLI suite twice and compare the reports byte for byte."""

from __future__ import annotations

import filecmp
import sys
import tempfile
from pathlib import Path

from hkmodel import cli

RUNS = [
    ["build", "--preset", "diag3", "--n", "1"],
    ["verify", "fujiki", "--preset", "diag5", "--n", "2"],
    ["verify", "gtot", "--preset", "diag5", "--n", "2"],
    ["verify", "so41", "--n", "1"],
    ["verify", "transport", "--preset", "k3type5", "--n", "2", "--seed", "1"],
    ["verify", "spinor", "--preset", "k3type5", "--seed", "1"],
]


def main() -> int:
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, args in enumerate(RUNS):
            outs = [Path(tmp) / f"{i}_{r}.json" for r in (0, 1)]
            codes = [cli.main(args + ["--no-wall-time", "--out", str(p)]) for p in outs]
            same = filecmp.cmp(*outs, shallow=False)
            bad += not same or any(codes)
            print(f"{'identical' if same else 'DIFFERENT':9}  exit {codes}  {' '.join(args)}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
