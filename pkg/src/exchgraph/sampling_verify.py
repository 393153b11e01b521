"""Graphon sampling and Monte Carlo checks of the infinite-exchangeability side.

A graphon W draws latent uniforms x_1..x_n and joins i, j with probability
W(x_i, x_j).  For step-function graphons (constant, block models, grids) the
Möbius parameter z(F), the integral of the product of W over the edges of F,
is a finite sum and is computed exactly.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .densities import DensityKind, density, sample_containment
from .graph_core import (EMPTY_CORE, LabeledGraph, build_catalog, core_key, disjoint_union,
                         named_class_index)
from .graph_io import FormatError, frac_str, parse_frac, parse_graph


def _frac(v) -> Fraction:
    # floats go through their shortest repr so 0.8 becomes 4/5, not a binary expansion
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v) if isinstance(v, (int, Fraction)) else parse_frac(v)


@dataclass(frozen=True)
class Constant:
    p: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", _frac(self.p))
        if not 0 <= self.p <= 1:
            raise ValueError(f"edge probability {self.p} outside [0, 1]")

    def as_blocks(self):
        return (Fraction(1),), ((self.p,),)


@dataclass(frozen=True)
class BlockModel:
    """Stochastic block model: block weights and a symmetric connection matrix."""

    weights: tuple[Fraction, ...]
    B: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        w = tuple(_frac(v) for v in self.weights)
        B = tuple(tuple(_frac(v) for v in row) for row in self.B)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "B", B)
        k = len(w)
        if k == 0 or any(v < 0 for v in w) or sum(w) != 1:
            raise ValueError("block weights must be nonnegative and sum to 1")
        if len(B) != k or any(len(r) != k for r in B):
            raise ValueError(f"connection matrix must be {k}x{k}")
        _check_kernel(B)

    def as_blocks(self):
        return self.weights, self.B


@dataclass(frozen=True)
class Grid:
    """Symmetric step function constant on the cells of a k x k grid of [0,1]^2."""

    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        V = tuple(tuple(_frac(v) for v in row) for row in self.values)
        object.__setattr__(self, "values", V)
        k = len(V)
        if k == 0 or any(len(r) != k for r in V):
            raise ValueError("grid values must form a square matrix")
        _check_kernel(V)

    def as_blocks(self):
        k = len(self.values)
        return (Fraction(1, k),) * k, self.values


@dataclass(frozen=True)
class Mixture:
    """Finite mixture of graphons: a non-extremal exchangeable law."""

    weights: tuple[Fraction, ...]
    components: tuple["GraphonSpec", ...]

    def __post_init__(self):
        w = tuple(_frac(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", tuple(self.components))
        if len(w) != len(self.components) or not w:
            raise ValueError("one weight per mixture component")
        if any(v < 0 for v in w) or sum(w) != 1:
            raise ValueError("mixture weights must be nonnegative and sum to 1")


GraphonSpec = Union[Constant, BlockModel, Grid, Mixture]


def _check_kernel(B) -> None:
    k = len(B)
    for a in range(k):
        for b in range(k):
            if not 0 <= B[a][b] <= 1:
                raise ValueError(f"kernel value {B[a][b]} outside [0, 1]")
            if B[a][b] != B[b][a]:
                raise ValueError(f"kernel is not symmetric at ({a}, {b})")


def graphon_from_json(obj: Mapping) -> GraphonSpec:
    try:
        kind = obj["kind"]
        if kind == "constant":
            return Constant(obj["p"])
        if kind == "blockmodel":
            return BlockModel(tuple(obj["weights"]), tuple(tuple(r) for r in obj["B"]))
        if kind == "grid":
            return Grid(tuple(tuple(r) for r in obj["values"]))
        if kind == "mixture":
            return Mixture(tuple(obj["weights"]),
                           tuple(graphon_from_json(c) for c in obj["components"]))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed graphon spec: {e!r}") from e
    raise FormatError(f"unknown graphon kind {kind!r}")


def graphon_to_json(w: GraphonSpec) -> dict:
    if isinstance(w, Constant):
        return {"kind": "constant", "p": frac_str(w.p)}
    if isinstance(w, BlockModel):
        return {"kind": "blockmodel", "weights": [frac_str(v) for v in w.weights],
                "B": [[frac_str(v) for v in r] for r in w.B]}
    if isinstance(w, Grid):
        return {"kind": "grid", "values": [[frac_str(v) for v in r] for r in w.values]}
    return {"kind": "mixture", "weights": [frac_str(v) for v in w.weights],
            "components": [graphon_to_json(c) for c in w.components]}


# -- sampling -----------------------------------------------------------------------

def _edge_probs(w: GraphonSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(w, Mixture):
        comp = rng.choice(len(w.components), p=[float(v) for v in w.weights])
        return _edge_probs(w.components[comp], n, rng)
    weights, B = w.as_blocks()
    x = rng.random(n)
    edges = np.cumsum([float(v) for v in weights])
    edges[-1] = 1.0
    blocks = np.minimum(np.searchsorted(edges, x, side="right"), len(weights) - 1)
    Bf = np.array([[float(v) for v in r] for r in B])
    return Bf[blocks[:, None], blocks[None, :]]


def sample_adjacency(w: GraphonSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Boolean adjacency matrix of G[n] drawn from W."""
    P = _edge_probs(w, n, rng)
    U = rng.random((n, n))
    A = np.triu(U < P, k=1)
    return A | A.T


def sample_graphon(w: GraphonSpec, n: int, seed=None) -> LabeledGraph:
    if n < 2:
        raise ValueError("n must be >= 2")
    A = sample_adjacency(w, n, np.random.default_rng(seed))
    i, j = np.nonzero(np.triu(A, k=1))
    return LabeledGraph.from_edges(n, zip((i + 1).tolist(), (j + 1).tolist()))


# -- Möbius parameters ---------------------------------------------------------------

MOTIF_NAMES = {
    "empty": "empty", "edge": "K2", "K2": "K2", "P3": "P3", "2-star": "P3", "cherry": "P3",
    "2K2": "2K2", "triangle": "K3", "K3": "K3", "star": "K1,3", "K1,3": "K1,3", "P4": "P4",
    "C4": "C4", "4-cycle": "C4", "paw": "paw", "diamond": "diamond", "K4": "K4",
}


def motif_from_name(name: str) -> LabeledGraph:
    """Core of a named small motif ("edge", "triangle", "2K2", ...) or a graph literal."""
    if name in MOTIF_NAMES:
        return core_key(build_catalog(4)[named_class_index(MOTIF_NAMES[name])].canonical)
    return core_key(parse_graph(name))


def motif_set(motifs: Sequence[LabeledGraph | str]) -> list[LabeledGraph]:
    """Canonical cores with duplicates removed, order kept."""
    out: list[LabeledGraph] = []
    for f in motifs:
        key = motif_from_name(f) if isinstance(f, str) else core_key(f)
        if key not in out:
            out.append(key)
    return out


def _blockmodel_z(weights, B, f: LabeledGraph) -> Fraction:
    f = core_key(f)
    if f.n == 0:
        return Fraction(1)
    k = len(weights)
    edges = [(i - 1, j - 1) for i, j in f.edge_list]
    total = Fraction(0)
    for a in itertools.product(range(k), repeat=f.n):
        term = Fraction(1)
        for v in a:
            term *= weights[v]
        for i, j in edges:
            term *= B[a[i]][a[j]]
            if not term:
                break
        total += term
    return total


def graphon_mobius(w: GraphonSpec, motifs: Sequence[LabeledGraph | str],
                   quad_points: int | None = None) -> dict[LabeledGraph, Fraction]:
    """Exact z(F) for each motif.

    Every supported graphon is a step function, so the integral is a finite sum
    and ``quad_points`` is not needed; it is accepted for interface symmetry.
    """
    fs = motif_set(motifs)
    if any(f.n > 8 for f in fs):
        raise ValueError("motifs are limited to 8 nodes")
    if isinstance(w, Mixture):
        parts = [graphon_mobius(c, fs) for c in w.components]
        return {f: sum((a * p[f] for a, p in zip(w.weights, parts)), Fraction(0)) for f in fs}
    weights, B = w.as_blocks()
    return {f: _blockmodel_z(weights, B, f) for f in fs}


# -- convergence of homomorphism densities ------------------------------------------

@dataclass
class ConvergenceRow:
    motif: LabeledGraph
    n: int
    mean: float
    se: float
    target: Fraction
    bound: Fraction  # 1 - (n)_m / n^m
    exact: bool  # densities counted exactly (True) or by map sampling

    @property
    def deviation(self) -> float:
        return abs(self.mean - float(self.target))

    @property
    def ok(self) -> bool:
        return self.deviation <= float(self.bound) + 4 * self.se


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)


EXACT_MAX_N = 7


def _hom_density(f: LabeledGraph, A: np.ndarray, samples: int, rng) -> float:
    n = A.shape[0]
    if n <= EXACT_MAX_N:
        i, j = np.nonzero(np.triu(A, k=1))
        g = LabeledGraph.from_edges(n, zip((i + 1).tolist(), (j + 1).tolist()))
        return float(density(DensityKind.HOM, f, g).value)
    return float(sample_containment(A, f, samples, rng, replace=True).mean())


def convergence_report(w: GraphonSpec, motifs: Sequence[LabeledGraph | str], n_grid: Sequence[int],
                       reps: int, seed=0, samples: int = 100_000, threads: int = 1) -> ConvergenceReport:
    """Mean and SE of t_hom(F, G[n]) over reps, against z(F) within the finite-n bound + 4 SE."""
    if reps < 2:
        raise ValueError("need at least 2 reps for a standard error")
    fs = motif_set(motifs)
    targets = graphon_mobius(w, fs)
    report = ConvergenceReport()
    for n_idx, n in enumerate(n_grid):
        if n < 2:
            raise ValueError("n must be >= 2")
        seqs = np.random.SeedSequence([seed, n_idx]).spawn(reps)

        def one_rep(r: int) -> np.ndarray:
            g_seq, *m_seqs = seqs[r].spawn(1 + len(fs))
            A = sample_adjacency(w, n, np.random.default_rng(g_seq))
            return np.array([_hom_density(f, A, samples, np.random.default_rng(s))
                             for f, s in zip(fs, m_seqs)])

        with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
            vals = np.array(list(ex.map(one_rep, range(reps))))
        for k, f in enumerate(fs):
            m = f.n
            bound = 1 - Fraction(math.perm(n, m), n ** m) if m <= n else Fraction(1)
            report.rows.append(ConvergenceRow(
                f, n, float(vals[:, k].mean()), float(vals[:, k].std(ddof=1) / math.sqrt(reps)),
                targets[f], bound, n <= EXACT_MAX_N))
    return report


# -- reflection positivity ------------------------------------------------------------

class MissingUnions(KeyError):
    def __init__(self, missing: list[str]):
        super().__init__(f"z is missing the disjoint unions: {', '.join(missing)}")
        self.missing = missing


@dataclass
class PsdReport:
    ok: bool
    min_eigenvalue: float
    matrix: np.ndarray
    motifs: list[LabeledGraph]


def _motif_label(f: LabeledGraph) -> str:
    from .graph_io import to_edgelist_text
    return "empty" if f.n == 0 else to_edgelist_text(f)


def reflection_positivity_check(z: Mapping[LabeledGraph, object], motifs: Sequence[LabeledGraph | str],
                                tol: float = 1e-10) -> PsdReport:
    """Minimum eigenvalue of the matrix z(F_i + F_j) over the motif list."""
    fs = motif_set(motifs)
    zc = {core_key(k): v for k, v in z.items()}
    zc.setdefault(EMPTY_CORE, Fraction(1))
    k = len(fs)
    M = np.zeros((k, k))
    missing = []
    for i in range(k):
        for j in range(i, k):
            u = core_key(disjoint_union(fs[i], fs[j]))
            if u not in zc:
                label = f"{_motif_label(fs[i])} + {_motif_label(fs[j])}"
                if label not in missing:
                    missing.append(label)
                continue
            M[i, j] = M[j, i] = float(zc[u])
    if missing:
        raise MissingUnions(missing)
    lam = float(np.linalg.eigvalsh(M).min()) if k else 0.0
    return PsdReport(lam >= -tol, lam, M, fs)


def union_closure(motifs: Sequence[LabeledGraph | str]) -> list[LabeledGraph]:
    """Motifs plus every pairwise disjoint union: the index set a PSD check needs."""
    fs = motif_set(motifs)
    out = list(fs)
    for a in fs:
        for b in fs:
            u = core_key(disjoint_union(a, b))
            if u not in out:
                out.append(u)
    return out
