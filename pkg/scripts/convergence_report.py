"""Observed convergence orders of the vector minimum across presets.

    python scripts/convergence_report.py --grids 256 512 1024 2048
"""

import argparse
import sys

from cohomlab import OperatorKind, convergence_study, make_preset

PRESETS = [("Round", {"n": 2, "k": 1.0}),
           ("Round", {"n": 3, "k": 2.0}),
           ("Bump", {"n": 3, "eps": 0.1}),
           ("PeriodicProduct", {"n": 3, "c": 1.0, "a": 0.3})]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grids", type=int, nargs="+",
                    default=[256, 512, 1024, 2048])
    args = ap.parse_args(argv)
    if len(args.grids) < 3:
        ap.error("need at least 3 doubling grids to observe an order")

    for kind, params in PRESETS:
        prof = make_preset(kind, **params)
        study = convergence_study(prof, OperatorKind.ROUGH_VECTOR, args.grids)
        tag = f"{kind}({', '.join(f'{p}={v}' for p, v in params.items())})"
        lams = "  ".join(f"{lam:.10f}" for lam in study.lambdas)
        orders = ", ".join("exact" if p is None else f"{p:.3f}"
                           for p in study.orders)
        print(tag)
        print(f"  lambda: {lams}")
        print(f"  orders: {orders}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
