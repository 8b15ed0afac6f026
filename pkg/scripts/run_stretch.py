"""Build the d = 23 model at n = 2 and verify the total Lie algebra (a few minutes).

    python3 scripts/run_stretch.py [--out report.json]
"""

from __future__ import annotations

import argparse
import time

from hkmodel import cli, lefschetz
from hkmodel.verbitsky import build_model


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--preset", default="hyperbolic-u3e8")
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--out")
    args = parser.parse_args()

    cfg = cli.make_config("gtot", preset=args.preset, n=args.n, allow_large=True)
    t0 = time.perf_counter()
    model = build_model(cfg.space(), cfg.n)
    print(f"model dims {model.dims} built in {time.perf_counter() - t0:.1f}s")

    t1 = time.perf_counter()
    gens = lefschetz.gtot_generators(model)
    print(f"{len(gens)} generators in {time.perf_counter() - t1:.1f}s")
    t1 = time.perf_counter()
    basis = lefschetz.lie_closure(model, gens)
    d = model.d
    print(f"closure dim {basis.dim} (expected {(d + 2) * (d + 1) // 2}) in {time.perf_counter() - t1:.1f}s")

    report, code = cli.run_suite(cfg)
    print(f"full gtot suite: exit {code}, failed {report['failed']}, {report['wall_time']}s")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(cli.dumps(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
