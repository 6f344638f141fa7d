#!/usr/bin/env python3
"""Measure bad-state closure cost against product size.

Builds pairs of hidden cycles whose product is an n*m torus where every
state is bad, runs the closure with an operation counter, and fits a
straight line through (transitions, operations).  The closure is a
backward reachability pass, so the fit should be near-perfectly linear;
anything superlinear here would point at a regression in the worklist.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

import iacompat as ia

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from randgen import cycle_pair  # noqa: E402


@dataclass(frozen=True)
class ScalingConfig:
    sizes: tuple[int, ...] = (8, 11, 16, 22, 32, 45, 64, 71)
    r2_floor: float = 0.98
    repeats: int = 1


def measure(cfg: ScalingConfig) -> int:
    rows: list[tuple[int, int, int, int, float]] = []
    print(f"{'n':>4} {'states':>7} {'trans':>7} {'ops':>8} {'ops/trans':>9} {'secs':>8}")
    for n in cfg.sizes:
        a, b = cycle_pair(n, n)
        prod = ia.product(a, b)
        ill = ia.illegal_states(prod, a, b)
        best = None
        for _ in range(cfg.repeats):
            ctr = ia.OpCounter()
            t0 = time.perf_counter()
            bad = ia.bad_states(prod, ill, counter=ctr)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        auto = prod.automaton
        assert len(bad) == len(auto.states), "cycle product must be fully bad"
        rows.append((n, len(auto.states), len(auto.transitions), ctr.ops, best))
        print(f"{n:>4} {len(auto.states):>7} {len(auto.transitions):>7} "
              f"{ctr.ops:>8} {ctr.ops / len(auto.transitions):>9.3f} {best:>8.4f}")

    xs = np.array([r[2] for r in rows], dtype=float)
    ys = np.array([r[3] for r in rows], dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    r2 = float(np.corrcoef(xs, ys)[0, 1] ** 2)
    print(f"\nops ~= {slope:.3f} * transitions + {intercept:.1f}   (R^2 = {r2:.6f})")
    ok = r2 >= cfg.r2_floor
    print(f"linearity check (R^2 >= {cfg.r2_floor}): {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=None,
                    metavar="N", help="cycle lengths (product has N*N states)")
    ap.add_argument("--repeats", type=int, default=1,
                    help="timing repetitions per size (best is kept)")
    args = ap.parse_args()
    cfg = ScalingConfig(sizes=tuple(args.sizes) if args.sizes else
                        ScalingConfig.sizes, repeats=args.repeats)
    return measure(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
