"""Verify every catalog instance and write one JSON report per instance.

Usage: python3 scripts/run_catalog.py [OUTDIR] [--grid N]
"""

import argparse
import math
import pathlib
import time

from pmcv import analysis, catalog, cli
from pmcv.geometry import SpaceForm

INSTANCES = {
    "example_4_1": lambda: catalog.example_4_1(n=4, p=2, mu=math.sqrt(2.0)),
    "example_4_2": lambda: catalog.example_4_2(n=4, p=3, mu=math.sqrt(2.0)),
    "example_4_3": lambda: catalog.example_4_3(n=4, p=2, cot=2.0),
    "example_4_4": lambda: catalog.example_4_4(n=4, p=3, cot=2.0),
    "umbilical_mu2": lambda: catalog.build_umbilical(SpaceForm(5, 1, 1.0), 2.0),
    "umbilical_minimal": lambda: catalog.build_umbilical(SpaceForm(5, 1, 1.0), 0.0),
    "product_s1_s2": lambda: catalog.build_product(3, 1, 0.6),
    "example_4_3_perturbed": lambda: catalog.perturbed(catalog.example_4_3(n=4, p=2, cot=2.0), 1e-2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="reports")
    ap.add_argument("--grid", type=int, default=5)
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    print(f"{'instance':<24} {'lambda':>14} {'spread':>9} {'seconds':>8}  result")
    for name, build in INSTANCES.items():
        t0 = time.perf_counter()
        rep = analysis.full_report(build(), counts=args.grid)
        dt = time.perf_counter() - t0
        (out / f"{name}.json").write_text(cli.dumps(cli.report_to_dict(rep)))
        lam = "minimal" if rep.minimal else f"{rep.lambda_estimate:.9f}"
        verdict = "pass" if rep.passed else "FAIL " + ",".join(rep.failures())
        print(f"{name:<24} {lam:>14} {rep.lambda_spread:9.1e} {dt:8.2f}  {verdict}")


if __name__ == "__main__":
    main()
