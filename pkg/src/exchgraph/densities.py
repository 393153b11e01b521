"""Exact subgraph densities (hom, inj, iso, ind) by enumerating node maps.

All four densities count maps ``phi: [m] -> [n]`` from the motif F into the host
G.  ``hom``/``inj`` only require edges of F to land on edges of G; ``iso``/``ind``
also require non-edges to land on non-edges (a collapsed pair counts as a
non-edge).  ``inj``/``ind`` restrict to injective maps and are normalized by the
falling factorial (n)_m instead of n^m.

For ``hom`` and ``inj`` the motif is first reduced to its core: isolated motif
nodes multiply the count and the denominator by the same factor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph_core import IsoClass, LabeledGraph, build_catalog, delete_isolated_core


class DensityKind(str, enum.Enum):
    HOM = "hom"
    INJ = "inj"
    ISO = "iso"
    IND = "ind"

    @property
    def injective(self) -> bool:
        return self in (DensityKind.INJ, DensityKind.IND)

    @property
    def induced(self) -> bool:
        return self in (DensityKind.ISO, DensityKind.IND)


@dataclass(frozen=True)
class DensityValue:
    count: int
    denominator: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.count, self.denominator)

    def __str__(self) -> str:
        return f"{self.count}/{self.denominator}"


def _count_maps(f: LabeledGraph, g: LabeledGraph, injective: bool, induced: bool) -> int:
    m = f.n
    fadj = f.adjacency()
    gadj = g.adjacency()
    # constraints of node v against earlier nodes u < v
    earlier = [[(u, u in fadj[v]) for u in range(v)] for v in range(m)]
    phi = [0] * m
    used = [False] * g.n

    def extend(v: int) -> int:
        if v == m:
            return 1
        total = 0
        for x in range(g.n):
            if injective and used[x]:
                continue
            ok = True
            for u, is_edge in earlier[v]:
                adj = phi[u] in gadj[x]
                if is_edge and not adj or induced and not is_edge and adj:
                    ok = False
                    break
            if not ok:
                continue
            phi[v] = x
            used[x] = True
            total += extend(v + 1)
            used[x] = False
        return total

    return extend(0)


def density(kind: DensityKind | str, f: LabeledGraph, g: LabeledGraph) -> DensityValue:
    kind = DensityKind(kind)
    if kind.injective and f.n > g.n:
        raise ValueError(f"motif has {f.n} nodes, more than the host's {g.n}: no injective maps")
    if not kind.induced:
        f = delete_isolated_core(f)
    m, n = f.n, g.n
    denom = math.perm(n, m) if kind.injective else n ** m
    return DensityValue(_count_maps(f, g, kind.injective, kind.induced), denom)


def density_class(kind: DensityKind | str, f: IsoClass, g: IsoClass) -> DensityValue:
    return density(kind, f.canonical, g.canonical)


@lru_cache(maxsize=None)
def _class_density_table(kind: DensityKind, f_code: tuple[int, int], n: int) -> tuple[Fraction, ...]:
    f = LabeledGraph.from_code(*f_code)
    return tuple(density(kind, f, c.canonical).value for c in build_catalog(n))


def class_densities(kind: DensityKind | str, f: LabeledGraph, n: int) -> tuple[Fraction, ...]:
    """Density of ``f`` in every class of the n-node catalog, in catalog order."""
    kind = DensityKind(kind)
    return _class_density_table(kind, (f.n, f.code), n)


def injective_noninjective_gap_bound(m: int, n: int) -> Fraction:
    """1 - (n)_m / n^m: the largest gap between injective and non-injective densities."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    return 1 - Fraction(math.perm(n, m), n ** m)


def weak_gap_bound(m: int, n: int) -> Fraction:
    """The coarser bound C(m,2)/n."""
    return Fraction(math.comb(m, 2), n)


def adjacency_matrix(g: LabeledGraph) -> np.ndarray:
    A = np.zeros((g.n, g.n), dtype=bool)
    for i, j in g.edge_list:
        A[i - 1, j - 1] = A[j - 1, i - 1] = True
    return A


def sample_containment(A: np.ndarray, f: LabeledGraph, samples: int,
                       rng: np.random.Generator, replace: bool = True) -> np.ndarray:
    """Indicators of F ⊆ H for ``samples`` random node draws from the host with adjacency A.

    H joins i and j iff the i-th and j-th drawn nodes are adjacent; a repeated
    draw is never adjacent to itself.
    """
    n = A.shape[0]
    m = f.n
    if replace:
        U = rng.integers(0, n, size=(samples, m))
    else:
        if m > n:
            raise ValueError("cannot draw more nodes than the host has without replacement")
        U = np.argsort(rng.random((samples, n)), axis=1)[:, :m]
    hit = np.ones(samples, dtype=bool)
    for i, j in f.edge_list:
        hit &= A[U[:, i - 1], U[:, j - 1]]
    return hit


def sampled_density(kind: DensityKind | str, f: LabeledGraph, g: LabeledGraph | np.ndarray,
                    samples: int, seed=None) -> tuple[float, float]:
    """Monte Carlo estimate and standard error of t_hom (with replacement) or t_inj (without)."""
    kind = DensityKind(kind)
    if kind not in (DensityKind.HOM, DensityKind.INJ):
        raise ValueError("sampling is implemented for hom and inj only")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    A = g if isinstance(g, np.ndarray) else adjacency_matrix(g)
    rng = np.random.default_rng(seed)
    hits = sample_containment(A, f, samples, rng, replace=kind is DensityKind.HOM)
    est = float(hits.mean())
    return est, math.sqrt(est * (1 - est) / samples)
