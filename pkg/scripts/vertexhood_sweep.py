"""Which vertices of E_m extend to n nodes, and which n-node vertices stay extreme after marginalizing."""

import argparse

from exchgraph.exch_geometry import enumerate_vertices, extendable, marginal_polytope_vertices, vertexhood
from exchgraph.graph_core import build_catalog, class_name
from exchgraph.mobius import marginal_map


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-m", type=int, default=4)
    ap.add_argument("-n", type=int, nargs="+", default=[5, 6])
    a = ap.parse_args()
    cat = build_catalog(a.m)

    for n in a.n:
        print(f"== m={a.m}, n={n}")
        ext = [class_name(v.cls) for v in enumerate_vertices(a.m) if extendable(v.dist, n).member]
        print(f"vertices of E_{a.m} that extend: {', '.join(ext)}")
        imgs = marginal_polytope_vertices(n, a.m, dedup=False)
        verts = marginal_polytope_vertices(n, a.m)
        extreme = 0
        for c, q in zip(build_catalog(n), imgs):
            if vertexhood(q, verts):
                extreme += 1
                support = {class_name(cat[i]): str(x) for i, x in enumerate(q.mass) if x}
                print(f"  {class_name(c):<28} -> {support}")
        print(f"{extreme} of {len(imgs)} images are vertices of the marginal polytope")


if __name__ == "__main__":
    main()
