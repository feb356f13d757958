"""Success rate on K_n as the list size grows, next to the coverage bound.

On a clique every colour of the palette must show up in some list, so the
exact coverage probability caps the success rate.  At ell = ln n about one
colour is missing on average and the cap is close to 1/e.

    python demos/threshold_sweep.py --n 256 --trials 200
"""

import argparse
import math

from pspark import GeneratorSpec, TrialConfig, coverage_probability, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    n = args.n
    cs = [0.6, 0.8, 1.0, 1.2, 1.5, 2.0]
    grid = [TrialConfig(GeneratorSpec("complete", {"m": n}), c=c) for c in cs]
    summary = run_experiment(grid, args.trials, master_seed=args.seed)

    print(f"K_{n}, {args.trials} trials per c, ln n = {math.log(n):.3f}")
    print(f"{'c':>5} {'ell':>4} {'success':>8} {'cover bound':>12}  failures")
    for cell in summary.cells:
        bound = coverage_probability(n, n, cell.ell)
        fails = ", ".join(f"{k}={v}" for k, v in sorted(cell.failures.items())) or "-"
        print(f"{cell.c:>5} {cell.ell:>4} {cell.rate:>8.3f} {bound:>12.4f}  {fails}")


if __name__ == "__main__":
    main()
