"""Time each phase of one trial on a large random regular graph.

    python demos/large_trial.py --n 100000 --D 500
"""

import argparse
import resource
import time

from pspark import (GeneratorSpec, PhaseFailure, RngStream, color_dense, color_sparse, decompose,
                    generate, list_size, sample_lists, verify_coloring)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=20000)
    ap.add_argument("--D", type=int, default=200)
    ap.add_argument("--c", type=float, default=1.5)
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    clock = time.perf_counter()

    def lap(label):
        nonlocal clock
        now = time.perf_counter()
        print(f"  {label:<12} {now - clock:7.2f} s")
        clock = now

    print(f"random {args.D}-regular graph on {args.n} vertices, c={args.c}")
    g = generate(GeneratorSpec("random-regular", {"n": args.n, "D": args.D}, seed=args.seed))
    lap("generate")
    ell = list_size(g.n, args.c - 1, args.D)
    stream = RngStream(args.seed)
    lists = sample_lists(g.n, args.D + 1, ell, stream)
    lap("lists")
    dec = decompose(g, args.D, args.eps)
    lap("decompose")
    print(f"  ell={ell}, sparse={len(dec.sparse)}, clusters={len(dec.clusters)}")
    try:
        sigma, diag = color_sparse(g, dec, lists, stream, eps=args.eps)
        lap("sparse")
        print(f"  bad={len(diag.bad)}, greedy attempts={diag.attempts}, restarts={diag.restarts}")
        color_dense(g, dec, lists, sigma, args.D, args.eps, args.c - 1)
        lap("dense")
        print(f"  valid colouring: {verify_coloring(g, lists, sigma)}")
    except PhaseFailure as exc:
        print(f"  failed: {exc}")
    peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    print(f"  peak memory {peak:.0f} MB")


if __name__ == "__main__":
    main()
