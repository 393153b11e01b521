"""Homomorphism densities of sampled graphs against their graphon limits."""

import argparse

from exchgraph.graph_io import to_edgelist_text
from exchgraph.sampling_verify import BlockModel, Constant, convergence_report

GRAPHONS = {
    "constant": Constant("1/2"),
    "two-block": BlockModel(("1/2", "1/2"), (("4/5", "1/10"), ("1/10", "4/5"))),
    "bipartite": BlockModel(("1/2", "1/2"), (("0", "1"), ("1", "0"))),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphon", choices=list(GRAPHONS), default="two-block")
    ap.add_argument("--motifs", default="edge,triangle,2K2,P3")
    ap.add_argument("--n-grid", default="10,50,200")
    ap.add_argument("--reps", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    r = convergence_report(GRAPHONS[a.graphon], a.motifs.split(","),
                           [int(x) for x in a.n_grid.split(",")], a.reps, seed=a.seed)
    print(f"{'motif':<22} {'n':>5} {'mean':>9} {'target':>9} {'|gap|':>9} {'allowed':>9}")
    for x in r.rows:
        gap = abs(x.mean - float(x.target))
        allowed = float(x.bound) + 4 * x.se
        print(f"{to_edgelist_text(x.motif):<22} {x.n:>5} {x.mean:>9.5f} {float(x.target):>9.5f} "
              f"{gap:>9.5f} {allowed:>9.5f}")
    print("all within bound:", r.ok)


if __name__ == "__main__":
    main()
