"""Smallest weight on ER(1/2) for which the dissociated two-component mixture on 4 nodes extends.

The second component is 1/8 empty + 1/2 triangle-plus-isolated + 3/8 four-cycle.
Extendable weights form an interval containing 1, so bisection over exact
rationals finds its left end.
"""

import argparse
from fractions import Fraction

from exchgraph.dissociated import is_dissociated
from exchgraph.exch_geometry import extendable
from exchgraph.graph_core import named_class_index
from exchgraph.mobius import ExchDist, mobius_transform


def mixture(alpha: Fraction) -> ExchDist:
    m = [Fraction(0)] * 11
    m[named_class_index("empty")] = Fraction(1, 8)
    m[named_class_index("K3")] = Fraction(1, 2)
    m[named_class_index("C4")] = Fraction(3, 8)
    return ExchDist.mixture([alpha, 1 - alpha], [ExchDist.erdos_renyi(4, Fraction(1, 2)), ExchDist(4, tuple(m))])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=5, help="number of nodes to extend to")
    ap.add_argument("--steps", type=int, default=30)
    ap.add_argument("--max-den", type=int, default=100)
    a = ap.parse_args()
    lo, hi = Fraction(0), Fraction(1)
    assert extendable(mixture(hi), a.n).member and not extendable(mixture(lo), a.n).member
    for _ in range(a.steps):
        mid = (lo + hi) / 2
        if extendable(mixture(mid), a.n).member:
            hi = mid
        else:
            lo = mid
    guess = hi.limit_denominator(a.max_den)
    exact = extendable(mixture(guess), a.n).member and not extendable(
        mixture(guess - Fraction(1, 10 ** 9)), a.n).member
    print(f"n={a.n}: threshold in [{float(lo):.9f}, {float(hi):.9f}]; "
          f"candidate {guess} {'confirmed' if exact else 'not confirmed'}")
    print("dissociated at candidate:", is_dissociated(mobius_transform(mixture(guess)))[0])


if __name__ == "__main__":
    main()
