"""Why stars of non-edges defeat the pairing process while a matching does not.

Both clusters are K_{D+1} minus a similar number of non-edges.  With stars
every non-edge touches a centre, and once a centre is coloured its leaves
have nobody left to pair with.  The matching has no such interference, so
the process reaches its target of eta*D pairs noticeably more often.

    python demos/dense_obstruction.py --D 200 --seeds 100
"""

import argparse

import numpy as np

from pspark import (GeneratorSpec, PartialColoring, RngStream, cluster_state, generate,
                    list_size, order_colors, run_pairing_process, sample_lists)


def run(kind, params, D, eps, seeds):
    g = generate(GeneratorSpec(kind, params))
    cluster = np.arange(D + 1)
    ell = list_size(g.n, 0.5, D)
    st = cluster_state(g, cluster, D, eps, ell)
    p = st.params
    pairs, s3 = [], 0
    for s in range(seeds):
        L = sample_lists(g.n, D + 1, ell, RngStream(s))
        sigma = PartialColoring(g.n)
        out = run_pairing_process(st, g, sigma, L, order_colors(st, g, sigma), 0.5)
        pairs.append(len(out.pairs))
        s3 += out.s3
    print(f"{kind:<22} zeta={st.zeta:.5f} m={p.m:<3} target eta*D={p.eta * D:.2f}  "
          f"mean pairs={sum(pairs) / seeds:.2f}  reached target {s3}/{seeds}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--D", type=int, default=200)
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--seeds", type=int, default=100)
    args = ap.parse_args()
    D = args.D
    run("star-union", {"D": D, "stars": 5, "leaves": 10}, D, args.eps, args.seeds)
    run("matching-plus-clique", {"D": D, "pairs": 60}, D, args.eps, args.seeds)


if __name__ == "__main__":
    main()
