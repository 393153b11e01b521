"""Vertices of the exchangeable simplex and exact membership in marginal polytopes.

Points live in class-mass coordinates: an exchangeable law on m nodes is the
vector of its masses on the classes of the m-node catalog.  The marginal polytope
of n-node exchangeable laws is the convex hull of the images of the simplex
vertices, so every question here reduces to exact LP feasibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .graph_core import IsoClass, LabeledGraph, build_catalog, disjoint_union
from .lp import MembershipCertificate, hull_membership
from .mobius import ExchDist, marginal_map


@dataclass(frozen=True)
class ExchVertex:
    cls: IsoClass
    dist: ExchDist


def enumerate_vertices(n: int) -> list[ExchVertex]:
    return [ExchVertex(c, ExchDist.vertex(n, c.index)) for c in build_catalog(n)]


@lru_cache(maxsize=None)
def _images(n: int, m: int) -> tuple[ExchDist, ...]:
    return tuple(marginal_map(v.dist, m) for v in enumerate_vertices(n))


def marginal_polytope_vertices(n: int, m: int, dedup: bool = True) -> list[ExchDist]:
    """Images of the n-node simplex vertices under the marginal map to m nodes."""
    if not 2 <= m < n:
        raise ValueError(f"need 2 <= m < n, got m={m}, n={n}")
    imgs = list(_images(n, m))
    if not dedup:
        return imgs
    seen, out = set(), []
    for d in imgs:
        if d.mass not in seen:
            seen.add(d.mass)
            out.append(d)
    return out


def _coords(points: Sequence[ExchDist | Sequence[Fraction]]) -> list[tuple[Fraction, ...]]:
    return [tuple(p.mass) if isinstance(p, ExchDist) else tuple(p) for p in points]


def membership(q: ExchDist | Sequence[Fraction], vertex_images: Sequence) -> MembershipCertificate:
    """Exact certificate of whether q is in the convex hull of ``vertex_images``."""
    (qc,) = _coords([q])
    pts = _coords(vertex_images)
    if any(len(p) != len(qc) for p in pts):
        raise ValueError("query and hull points live in different class spaces")
    return hull_membership(qc, pts)


def vertexhood(q, vertex_images: Sequence) -> bool:
    """True iff q is a member but not in the hull of the other image points."""
    (qc,) = _coords([q])
    pts = _coords(vertex_images)
    if not membership(qc, pts).member:
        raise ValueError("query point is not in the hull")
    others = [p for p in pts if p != qc]
    if not others:
        return True
    return not hull_membership(qc, others).member


def extendable(q: ExchDist, n: int) -> MembershipCertificate:
    """Is q (on m nodes) the m-marginal of some exchangeable law on n nodes?"""
    if n == q.n:
        return MembershipCertificate(True, weights=(Fraction(1),))
    return membership(q, marginal_polytope_vertices(n, q.n))


@dataclass
class InclusionWitness:
    m: int
    n1: int
    n2: int
    witness: ExchDist  # vertex of the n1-simplex
    not_extendable: MembershipCertificate  # witness vs the n1-marginals of n2-node laws
    marginal: ExchDist  # witness pushed down to m nodes
    marginal_is_vertex: bool
    marginal_outside: MembershipCertificate  # marginal vs the m-marginals of n2-node laws

    @property
    def certified(self) -> bool:
        return (not self.not_extendable.member and self.marginal_is_vertex
                and not self.marginal_outside.member)


def clique_plus_isolated(n: int) -> LabeledGraph:
    return disjoint_union(LabeledGraph.complete(n - 1), LabeledGraph.empty(1))


def strict_inclusion_witness(m: int, n1: int, n2: int) -> InclusionWitness:
    """Certify that n2-extendable laws on m nodes are a strict subset of n1-extendable ones.

    The witness is the uniform law on K_{n1-1} plus an isolated node.
    """
    if not 4 <= m < n1 < n2 <= 7:
        raise ValueError(f"need 4 <= m < n1 < n2 <= 7, got ({m}, {n1}, {n2})")
    cat = build_catalog(n1)
    p = ExchDist.vertex(n1, cat.class_of(clique_plus_isolated(n1)))
    cert_ext = extendable(p, n2)
    pm = marginal_map(p, m)
    is_vertex = vertexhood(pm, marginal_polytope_vertices(n1, m))
    cert_m = extendable(pm, n2)
    return InclusionWitness(m, n1, n2, p, cert_ext, pm, is_vertex, cert_m)
