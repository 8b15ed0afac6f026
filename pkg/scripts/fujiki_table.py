"""Print computed Fujiki constants next to the closed form for a grid of (d, n)."""

from __future__ import annotations

import argparse
import time

from hkmodel.quadspace import QuadraticSpace
from hkmodel.verbitsky import build_model, fujiki_constant_closed_form, fujiki_verify


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dmax", type=int, default=6)
    parser.add_argument("--nmax", type=int, default=3)
    parser.add_argument("--signature", type=int, default=3, help="number of positive entries")
    args = parser.parse_args()

    print(f"{'d':>3} {'n':>3} {'dims':<34} {'C_n':>10} {'closed form':>12} {'ok':>4} {'sec':>6}")
    bad = 0
    for d in range(2, args.dmax + 1):
        for n in range(1, args.nmax + 1):
            pos = min(d, args.signature)
            space = QuadraticSpace.diagonal([1] * pos + [-1] * (d - pos))
            t0 = time.perf_counter()
            m = build_model(space, n)
            rep = fujiki_verify(m)
            expected = fujiki_constant_closed_form(d, n)
            ok = rep.passed and rep.C_n == expected
            bad += not ok
            dims = ",".join(map(str, m.dims))
            print(f"{d:>3} {n:>3} {dims:<34} {str(rep.C_n):>10} {str(expected):>12} "
                  f"{'yes' if ok else 'NO':>4} {time.perf_counter() - t0:6.2f}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
