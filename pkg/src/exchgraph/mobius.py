"""Möbius parameters, marginals and the finite deFinetti identities.

Distributions are exact (``Fraction``).  A labeled distribution on n nodes is a
vector over all 2^C(n,2) graph codes; an exchangeable one is stored as total mass
per isomorphism class.  The Möbius parameter of a graph F is the probability
that F is a subgraph of the random graph, and in class space it is indexed by the
class whose core is F (the empty class stands for the empty core, z = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

from .densities import DensityKind, class_densities, injective_noninjective_gap_bound
from .graph_core import (ClassCatalog, LabeledGraph, build_catalog, induced_on, num_pairs,
                         pad, pair_index, pairs)

# class-space containment counts need every orbit expanded; keep it to n <= 6
MAX_CLASS_TRANSFORM_N = 6


class OutsideMobiusSimplex(ValueError):
    """Inverse Möbius transform produced a negative probability."""

    def __init__(self, graph: LabeledGraph, value: Fraction):
        self.graph = graph
        self.value = value
        super().__init__(
            f"facet inequality fails at {graph}: inverse-Möbius value {value} < 0")


class IdentityViolation(AssertionError):
    pass


def _check_normalized(values: Sequence[Fraction], what: str):
    if any(v < 0 for v in values):
        raise ValueError(f"{what} has negative entries")
    total = sum(values, Fraction(0))
    if total != 1:
        raise ValueError(f"{what} sums to {total}, not 1")


@dataclass(frozen=True)
class ProbVector:
    """Distribution over labeled graphs on n nodes, indexed by graph code."""

    n: int
    p: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.p) != 1 << num_pairs(self.n):
            raise ValueError(f"expected {1 << num_pairs(self.n)} entries for n={self.n}")

    def validate(self) -> "ProbVector":
        _check_normalized(self.p, "probability vector")
        return self

    def __getitem__(self, g: LabeledGraph) -> Fraction:
        return self.p[g.code]

    @classmethod
    def point_mass(cls, g: LabeledGraph) -> "ProbVector":
        p = [Fraction(0)] * (1 << num_pairs(g.n))
        p[g.code] = Fraction(1)
        return cls(g.n, tuple(p))

    def is_exchangeable(self) -> bool:
        cat = build_catalog(self.n)
        for c in cat:
            vals = {self.p[int(k)] for k in cat.orbit_codes(c.index)}
            if len(vals) > 1:
                return False
        return True

    def to_exchangeable(self) -> "ExchDist":
        if not self.is_exchangeable():
            raise ValueError("distribution is not exchangeable")
        cat = build_catalog(self.n)
        return ExchDist(self.n, tuple(self.p[c.canonical.code] * c.orbit_size for c in cat))


@dataclass(frozen=True)
class ExchDist:
    """Exchangeable distribution: total mass per isomorphism class (catalog order)."""

    n: int
    mass: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.mass) != len(build_catalog(self.n)):
            raise ValueError(f"expected {len(build_catalog(self.n))} class masses for n={self.n}")

    def validate(self) -> "ExchDist":
        _check_normalized(self.mass, "class mass vector")
        return self

    @property
    def catalog(self) -> ClassCatalog:
        return build_catalog(self.n)

    def per_graph(self, i: int) -> Fraction:
        """Probability of each single labeled graph in class i."""
        return self.mass[i] / self.catalog[i].orbit_size

    def prob_of(self, g: LabeledGraph) -> Fraction:
        return self.per_graph(self.catalog.class_of(g))

    def to_labeled(self) -> ProbVector:
        cat = self.catalog
        per = [self.per_graph(i) for i in range(len(cat))]
        return ProbVector(self.n, tuple(per[int(k)] for k in cat.class_of_code))

    @classmethod
    def vertex(cls, n: int, i: int) -> "ExchDist":
        """Uniform distribution over class i."""
        k = len(build_catalog(n))
        return cls(n, tuple(Fraction(int(j == i)) for j in range(k)))

    @classmethod
    def erdos_renyi(cls, n: int, q: Fraction) -> "ExchDist":
        q = Fraction(q)
        N = num_pairs(n)
        return cls(n, tuple(c.orbit_size * q ** c.edge_count * (1 - q) ** (N - c.edge_count)
                            for c in build_catalog(n)))

    @classmethod
    def mixture(cls, weights: Sequence[Fraction], dists: Sequence["ExchDist"]) -> "ExchDist":
        n = dists[0].n
        if any(d.n != n for d in dists):
            raise ValueError("mixture components must share n")
        k = len(dists[0].mass)
        return cls(n, tuple(sum((Fraction(w) * d.mass[j] for w, d in zip(weights, dists)), Fraction(0))
                            for j in range(k)))

    def __add__(self, other: "ExchDist") -> "ExchDist":
        return ExchDist(self.n, tuple(a + b for a, b in zip(self.mass, other.mass)))

    def scale(self, a: Fraction) -> "ExchDist":
        return ExchDist(self.n, tuple(a * x for x in self.mass))


@dataclass(frozen=True)
class MobiusVector:
    """Möbius parameters in class space: ``z[i]`` is z(core of class i)."""

    n: int
    z: tuple = field()

    @property
    def catalog(self) -> ClassCatalog:
        return build_catalog(self.n)

    def of_core(self, core: LabeledGraph):
        return self.z[self.catalog.index_of_core(core)]

    def by_core(self) -> dict[LabeledGraph, object]:
        return {c.core: self.z[c.index] for c in self.catalog}


# -- labeled lattice transforms --------------------------------------------------

def _lattice_transform(values: Sequence[Fraction], N: int, inverse: bool) -> list[Fraction]:
    """Superset-sum (zeta) transform over the Boolean lattice of N pairs, or its inverse."""
    values = [Fraction(v) for v in values]
    D = 1
    for v in values:
        D = D * v.denominator // math.gcd(D, v.denominator)
    ints = [v.numerator * (D // v.denominator) for v in values]
    big = max((abs(x) for x in ints), default=0) << (N + 1)
    arr = np.array(ints, dtype=np.int64 if big < (1 << 62) else object)
    if N:
        arr = arr.reshape((2,) * N)
        for axis in range(N):
            lo = [slice(None)] * N
            hi = [slice(None)] * N
            lo[axis], hi[axis] = 0, 1
            if inverse:
                arr[tuple(lo)] -= arr[tuple(hi)]
            else:
                arr[tuple(lo)] += arr[tuple(hi)]
    return [Fraction(int(x), D) for x in arr.reshape(-1)]


def mobius_transform_labeled(p: ProbVector, check: bool = True) -> tuple[Fraction, ...]:
    """z(F) = P(F ⊆ G) for every labeled F, by the fast superset-sum transform."""
    if check:
        p.validate()
    return tuple(_lattice_transform(p.p, num_pairs(p.n), inverse=False))


def inverse_mobius_labeled(n: int, z: Sequence[Fraction], check: bool = True) -> ProbVector:
    """p(G) = Σ_{F ⊇ G} (-1)^{|F∖G|} z(F); raises at the first negative entry."""
    if len(z) != 1 << num_pairs(n):
        raise ValueError("labeled Möbius vector has the wrong length")
    if z[0] != 1:
        raise ValueError(f"z(empty) must be 1, got {z[0]}")
    p = _lattice_transform(z, num_pairs(n), inverse=True)
    if check:
        for code, v in enumerate(p):
            if v < 0:
                raise OutsideMobiusSimplex(LabeledGraph.from_code(n, code), v)
    return ProbVector(n, tuple(p))


def mobius_matrix(n: int) -> list[list[int]]:
    """Dense M_n(F, G) = 1(F ⊆ G); only for small n, as a test oracle."""
    if n > 4:
        raise ValueError("dense Möbius matrix is only exposed for n <= 4")
    K = 1 << num_pairs(n)
    return [[int(F & G == F) for G in range(K)] for F in range(K)]


# -- class-space transforms ------------------------------------------------------

@lru_cache(maxsize=None)
def containment_counts(n: int) -> np.ndarray:
    """``C[f, c]``: number of labeled graphs in class c containing the canonical rep of class f."""
    if n > MAX_CLASS_TRANSFORM_N:
        raise MemoryError(f"class containment counts supported for n <= {MAX_CLASS_TRANSFORM_N}")
    cat = build_catalog(n)
    reps = np.array([c.canonical.code for c in cat], dtype=np.int64)
    out = np.zeros((len(cat), len(cat)), dtype=np.int64)
    for c in cat:
        members = cat.orbit_codes(c.index).astype(np.int64)
        out[:, c.index] = ((members[:, None] & reps[None, :]) == reps[None, :]).sum(axis=0)
    return out


def _as_exch(p) -> ExchDist:
    if isinstance(p, ExchDist):
        return p
    if isinstance(p, ProbVector):
        return p.to_exchangeable()
    raise TypeError(f"expected ExchDist or ProbVector, got {type(p).__name__}")


def mobius_transform(p: ExchDist | ProbVector, check: bool = True) -> MobiusVector:
    """Möbius parameters of an exchangeable distribution, one per class of U_n."""
    p = _as_exch(p)
    if check:
        p.validate()
    cat = p.catalog
    C = containment_counts(p.n)
    per = [p.per_graph(i) for i in range(len(cat))]
    z = tuple(sum((per[c] * int(C[f, c]) for c in range(len(cat)) if C[f, c]), Fraction(0))
              for f in range(len(cat)))
    return MobiusVector(p.n, z)


def inverse_mobius(z: MobiusVector, check: bool = True) -> ExchDist:
    """Class masses from class-space Möbius parameters.

    Raises ``OutsideMobiusSimplex`` naming the class whose facet inequality fails.
    """
    cat = z.catalog
    if z.z[cat.empty_index] != 1:
        raise ValueError(f"z(empty) must be 1, got {z.z[cat.empty_index]}")
    C = containment_counts(z.n)
    mass = []
    for g in cat:
        acc = Fraction(0)
        for d in cat:
            cnt = int(C[g.index, d.index])
            if cnt:
                term = cnt * Fraction(z.z[d.index])
                acc += term if (d.edge_count - g.edge_count) % 2 == 0 else -term
        if check and acc < 0:
            raise OutsideMobiusSimplex(g.canonical, acc)
        mass.append(acc * g.orbit_size)
    return ExchDist(z.n, tuple(mass))


def facet_values(z: MobiusVector) -> list[Fraction]:
    """Per-labeled-graph inverse-Möbius values for each class; all >= 0 inside the simplex."""
    d = inverse_mobius(z, check=False)
    return [d.per_graph(i) for i in range(len(d.mass))]


def is_monotone(z: MobiusVector) -> bool:
    """z(F) >= z(F') whenever F ⊆ F' (up to isomorphism)."""
    cat = z.catalog
    C = containment_counts(z.n)
    for f in cat:
        for g in cat:
            if C[f.index, g.index] and z.z[f.index] < z.z[g.index]:
                return False
    return True


# -- marginals ---------------------------------------------------------------------

@lru_cache(maxsize=None)
def _restriction_codes(n: int, m: int) -> np.ndarray:
    """Code of G[m] for every code G on n nodes."""
    N = num_pairs(n)
    idx = pair_index(n)
    keep = [idx[p] for p in pairs(m)]
    codes = np.arange(1 << N, dtype=np.int64)
    out = np.zeros_like(codes)
    M = len(keep)
    for t, k in enumerate(keep):
        bit = (codes >> (N - 1 - k)) & 1
        out |= bit << (M - 1 - t)
    return out


@lru_cache(maxsize=None)
def subset_counts(n: int, m: int) -> np.ndarray:
    """``S[c, k]``: number of m-subsets of nodes of the rep of class c (n nodes) inducing class k."""
    cn, cm = build_catalog(n), build_catalog(m)
    S = np.zeros((len(cn), len(cm)), dtype=np.int64)
    for c in cn:
        for sub in combinations(range(1, n + 1), m):
            S[c.index, cm.class_of(induced_on(c.canonical, sub))] += 1
    return S


def marginal_map(p: ExchDist | ProbVector, m: int):
    """Law of G[m] (nodes 1..m) for G ~ p; same representation as the input."""
    if not 2 <= m <= p.n:
        raise ValueError(f"m={m} outside 2..{p.n}")
    if isinstance(p, ProbVector):
        out = [Fraction(0)] * (1 << num_pairs(m))
        restrict = _restriction_codes(p.n, m)
        for code, v in enumerate(p.p):
            if v:
                out[int(restrict[code])] += v
        return ProbVector(m, tuple(out))
    if m == p.n:
        return p
    S = subset_counts(p.n, m)
    total = math.comb(p.n, m)
    k = S.shape[1]
    return ExchDist(m, tuple(
        sum((p.mass[c] * int(S[c, j]) for c in range(len(p.mass)) if S[c, j] and p.mass[c]), Fraction(0))
        / total for j in range(k)))


def embed_code(code: int, m: int, n: int) -> int:
    return pad(LabeledGraph.from_code(m, code), n).code


@dataclass
class BackwardReport:
    ok: bool
    witness: LabeledGraph | None = None
    marginal_value: Fraction | None = None
    full_value: Fraction | None = None


def check_backward_compatibility(p: ExchDist | ProbVector, m: int) -> BackwardReport:
    """Check z of the m-marginal equals z of the full law on every graph over nodes 1..m."""
    if not 2 <= m <= p.n:
        raise ValueError(f"m={m} outside 2..{p.n}")
    if isinstance(p, ProbVector):
        z_full = mobius_transform_labeled(p)
        z_marg = mobius_transform_labeled(marginal_map(p, m))
        for code in range(len(z_marg)):
            full = z_full[embed_code(code, m, p.n)]
            if full != z_marg[code]:
                return BackwardReport(False, LabeledGraph.from_code(m, code), z_marg[code], full)
        return BackwardReport(True)
    z_full = mobius_transform(p)
    z_marg = mobius_transform(marginal_map(p, m))
    cat_m, cat_n = build_catalog(m), p.catalog
    for k in cat_m:
        full = z_full.z[cat_n.index_of_core(k.core)]
        if full != z_marg.z[k.index]:
            return BackwardReport(False, k.canonical, z_marg.z[k.index], full)
    return BackwardReport(True)


# -- finite deFinetti checks --------------------------------------------------------

@dataclass
class DeFinettiReport:
    n: int
    m: int
    z_marginal: dict[LabeledGraph, Fraction]
    inj_mixture: dict[LabeledGraph, Fraction]
    hom_mixture: dict[LabeledGraph, Fraction]
    identity_holds: bool
    max_hom_gap: Fraction
    bound: Fraction
    vertex_identity_holds: bool | None

    @property
    def bound_holds(self) -> bool:
        return self.max_hom_gap <= self.bound

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.bound_holds and self.vertex_identity_holds is not False


def finite_definetti_check(p: ExchDist, m: int, strict: bool = True) -> DeFinettiReport:
    """Compare z of the m-marginal with mixtures of injective and plain hom densities.

    The injective identity is exact; the hom mixture must lie within
    1 - (n)_m/n^m.  Densities are counted directly, independently of the
    containment counts used by the transforms.
    """
    if not 2 <= m <= p.n:
        raise ValueError(f"m={m} outside 2..{p.n}")
    p.validate()
    n = p.n
    z_m = mobius_transform(marginal_map(p, m))
    cat_m = build_catalog(m)
    w = p.mass
    vertex = [i for i, x in enumerate(w) if x] if sum(1 for x in w if x) == 1 else None
    zd, inj, hom = {}, {}, {}
    identity = True
    vertex_ok = None if vertex is None else True
    for k in cat_m:
        F = k.core
        t_inj = class_densities(DensityKind.INJ, F, n)
        t_hom = class_densities(DensityKind.HOM, F, n)
        a = sum((wc * t for wc, t in zip(w, t_inj) if wc), Fraction(0))
        b = sum((wc * t for wc, t in zip(w, t_hom) if wc), Fraction(0))
        zd[F], inj[F], hom[F] = z_m.z[k.index], a, b
        identity &= z_m.z[k.index] == a
        if vertex is not None:
            vertex_ok &= z_m.z[k.index] == t_inj[vertex[0]]
    gap = max(abs(zd[F] - hom[F]) for F in zd)
    rep = DeFinettiReport(n, m, zd, inj, hom, identity, gap, injective_noninjective_gap_bound(m, n),
                          vertex_ok)
    if strict and not (identity and vertex_ok is not False):
        bad = next(F for F in zd if zd[F] != inj[F]) if not identity else None
        raise IdentityViolation(f"z of the marginal differs from the injective-density mixture at {bad}")
    return rep


@dataclass
class TVReport:
    n: int
    m: int
    marginal_mass: tuple[Fraction, ...]
    iso_mass: tuple[Fraction, ...]
    distance: Fraction
    bound: Fraction
    identity_holds: bool

    @property
    def bound_holds(self) -> bool:
        return self.distance <= self.bound

    @property
    def ok(self) -> bool:
        return self.identity_holds and self.bound_holds


def tv_distance_check(p: ExchDist, m: int, strict: bool = True) -> TVReport:
    """Total variation between the m-marginal and its sampling-with-replacement analogue.

    The analogue puts mass Σ_G t_iso(F, G) p(G) on each labeled F.  Also checks
    the exact identity marginal(F) = Σ_G t_ind(F, G) p(G).
    """
    if not 2 <= m <= p.n:
        raise ValueError(f"m={m} outside 2..{p.n}")
    p.validate()
    n = p.n
    marg = marginal_map(p, m)
    cat_m = build_catalog(m)
    iso_mass, identity = [], True
    for k in cat_m:
        t_ind = class_densities(DensityKind.IND, k.canonical, n)
        t_iso = class_densities(DensityKind.ISO, k.canonical, n)
        ind_per = sum((wc * t for wc, t in zip(p.mass, t_ind) if wc), Fraction(0))
        identity &= ind_per * k.orbit_size == marg.mass[k.index]
        iso_mass.append(k.orbit_size * sum((wc * t for wc, t in zip(p.mass, t_iso) if wc), Fraction(0)))
    dist = sum((abs(a - b) for a, b in zip(marg.mass, iso_mass)), Fraction(0)) / 2
    rep = TVReport(n, m, marg.mass, tuple(iso_mass), dist, injective_noninjective_gap_bound(m, n), identity)
    if strict and not identity:
        raise IdentityViolation("marginal differs from the induced-density mixture")
    return rep


def random_exch_dist(n: int, rng: np.random.Generator, max_weight: int = 20,
                     zero_prob: float = 0.3) -> ExchDist:
    """Random exchangeable distribution with small integer weights (some classes empty)."""
    k = len(build_catalog(n))
    while True:
        wts = rng.integers(1, max_weight + 1, size=k) * (rng.random(k) >= zero_prob)
        if wts.sum():
            break
    tot = int(wts.sum())
    return ExchDist(n, tuple(Fraction(int(x), tot) for x in wts))


def random_prob_vector(n: int, rng: np.random.Generator, max_weight: int = 20) -> ProbVector:
    K = 1 << num_pairs(n)
    wts = rng.integers(0, max_weight + 1, size=K)
    wts[rng.integers(0, K)] += 1
    tot = int(wts.sum())
    return ProbVector(n, tuple(Fraction(int(x), tot) for x in wts))
