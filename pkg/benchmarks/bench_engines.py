#!/usr/bin/env python3
"""Compare the compiled satisfaction kernel against the pure-Python evaluator.

Times the workloads that dominate real runs: full definability tables
(every parameter tuple against the measure's support) and sup-error
verification grids. Results from the two backends are asserted equal before
any timing is reported.

Usage: python benchmarks/bench_engines.py [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

from keislerlab.engine import have_native, satisfaction_rows
from keislerlab.fol import parse_formula
from keislerlab.structures import cyclic_group, paley


def workloads():
    p53 = paley(53)
    p101 = paley(101)
    z24 = cyclic_group(24)
    return [
        (
            "edge table, paley(101), 101 x 101",
            p101,
            parse_formula("x ; y :: R(x,y)", p101.signature),
        ),
        (
            "two-parameter pattern, paley(53), 53 x 53^2",
            p53,
            parse_formula("x ; y, z :: !R(x,y) & R(x,z)", p53.signature),
        ),
        (
            "quantified neighbor test, paley(53), 53 x 53",
            p53,
            parse_formula("x ; y :: exists u. R(x,u) & R(u,y)", p53.signature),
        ),
        (
            "group equation, Z24, 24 x 24^2",
            z24,
            parse_formula("x ; y, z :: mul(x,y) = z | mul(y,x) = e", z24.signature),
        ),
    ]


def run_case(structure, pf, backend: str) -> tuple[float, list]:
    xs = list(structure.tuples(len(pf.obj_vars)))
    ys = list(structure.tuples(len(pf.param_vars)))
    start = time.perf_counter()
    rows = satisfaction_rows(structure, pf.formula, pf.obj_vars, pf.param_vars, xs, ys, backend=backend)
    return time.perf_counter() - start, rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if not have_native():
        print("compiled kernel not available; only the pure backend can run")
        for label, structure, pf in workloads():
            best = min(run_case(structure, pf, "pure")[0] for _ in range(args.repeats))
            print(f"  {label}: pure {best * 1000:9.2f} ms")
        return

    print(f"{'workload':<48} {'pure':>10} {'native':>10} {'speedup':>8}")
    for label, structure, pf in workloads():
        t_pure, rows_pure = run_case(structure, pf, "pure")
        for _ in range(args.repeats - 1):
            t_pure = min(t_pure, run_case(structure, pf, "pure")[0])
        t_native, rows_native = run_case(structure, pf, "native")
        for _ in range(args.repeats - 1):
            t_native = min(t_native, run_case(structure, pf, "native")[0])
        assert rows_pure == rows_native, f"backend mismatch on {label}"
        print(f"{label:<48} {t_pure * 1000:8.2f}ms {t_native * 1000:8.2f}ms {t_pure / t_native:7.1f}x")


if __name__ == "__main__":
    main()
