"""The dissociated manifold and maximum likelihood from a single observed graph.

A dissociated Möbius vector is fixed by its values on connected classes (the
free coordinates); every other class gets the product of its components'
values.  The likelihood of an observed labeled graph G is the inverse-Möbius
probability of G, a polynomial in the free coordinates.

Free coordinates that appear in some product ("nonlinear" ones; only z(edge)
when n = 4) make the problem non-convex.  With them held fixed, the likelihood
and every feasibility constraint are linear in the rest, which is how flat
optima are located and their extent certified.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.spatial import ConvexHull
from scipy.optimize import linprog, minimize, minimize_scalar
from scipy.stats import qmc

from .exch_geometry import marginal_polytope_vertices
from .graph_core import LabeledGraph, build_catalog, core_components, pad
from .lp import MembershipCertificate, hull_membership
from .mobius import ExchDist, MobiusVector, containment_counts

FEAS_TOL = 1e-10
ACTIVE_TOL = 1e-9
FLOOR_SLACK = 1e-11
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class DissociatedModel:
    """Index bookkeeping for the dissociated manifold on n nodes."""

    n: int
    free: tuple[int, ...]  # class indices of connected classes, catalog order
    exponents: np.ndarray  # [class, free coordinate] multiplicity of component
    signed: np.ndarray  # [g, d] = (-1)^{e(d)-e(g)} * #graphs in d containing rep of g
    signed_exact: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.free)

    @property
    def nonlinear(self) -> tuple[int, ...]:
        """Free positions that occur in some product of two or more factors."""
        deg = self.exponents.sum(axis=1)
        return tuple(j for j in range(self.dim) if np.any(self.exponents[deg >= 2, j] > 0))

    @property
    def linear(self) -> tuple[int, ...]:
        nl = set(self.nonlinear)
        return tuple(j for j in range(self.dim) if j not in nl)

    def z(self, x: np.ndarray) -> np.ndarray:
        """Full class-space Möbius vector (floats) from free values."""
        return np.prod(np.power(x[None, :], self.exponents), axis=1)

    def z_jac(self, x: np.ndarray) -> np.ndarray:
        E = self.exponents
        J = np.zeros(E.shape, dtype=float)
        for j in range(self.dim):
            Ej = E[:, j]
            rows = Ej > 0
            if not rows.any():
                continue
            others = np.prod(np.power(x[None, :], np.where(np.arange(self.dim) == j, 0, E[rows])), axis=1)
            J[rows, j] = Ej[rows] * np.power(x[j], Ej[rows] - 1) * others
        return J

    def probs(self, x: np.ndarray) -> np.ndarray:
        """Per-labeled-graph probability of each class."""
        return self.signed @ self.z(x)


@lru_cache(maxsize=None)
def dissociated_model(n: int) -> DissociatedModel:
    cat = build_catalog(n)
    free = cat.connected_indices
    pos = {c: j for j, c in enumerate(free)}
    E = np.zeros((len(cat), len(free)), dtype=np.int64)
    for c in cat:
        for comp in core_components(c.canonical):
            E[c.index, pos[cat.class_of(pad(comp, n))]] += 1
    C = containment_counts(n)
    sign = np.array([[(-1) ** ((d.edge_count - g.edge_count) % 2) for d in cat] for g in cat])
    S = sign * C
    return DissociatedModel(n, free, E, S.astype(float), tuple(tuple(int(v) for v in row) for row in S))


def connected_class_count(n: int) -> int:
    """Dimension of the dissociated manifold: connected unlabeled graphs on at most n nodes."""
    return len(build_catalog(n).connected_indices)


def _free_vector(free, n: int) -> list:
    model = dissociated_model(n)
    cat = build_catalog(n)
    if isinstance(free, Mapping):
        out = [None] * model.dim
        for key, v in free.items():
            idx = key if isinstance(key, (int, np.integer)) else cat.index_of_core(key)
            if idx not in model.free:
                raise ValueError(f"class {cat[idx].core} is not connected; it is not a free coordinate")
            out[model.free.index(idx)] = v
        if any(v is None for v in out):
            raise ValueError("missing free coordinates")
        return out
    vals = list(free)
    if len(vals) != model.dim:
        raise ValueError(f"expected {model.dim} free values for n={n}, got {len(vals)}")
    return vals


def lift_free_to_full(free, n: int) -> MobiusVector:
    """Möbius vector with z(F) = product of the free values of F's components (z(empty) = 1).

    ``free`` is a sequence in the order of the catalog's connected classes or a
    mapping keyed by class index or core graph.  Exact if the values are.
    """
    vals = _free_vector(free, n)
    model = dissociated_model(n)
    one = Fraction(1) if all(isinstance(v, (int, Fraction)) for v in vals) else 1.0
    z = []
    for row in model.exponents:
        acc = one
        for j, e in enumerate(row):
            if e:
                acc = acc * vals[j] ** int(e)
        z.append(acc)
    return MobiusVector(n, tuple(z))


def free_of(z: MobiusVector) -> tuple:
    return tuple(z.z[i] for i in dissociated_model(z.n).free)


def is_dissociated(z: MobiusVector, tol: float = 0) -> tuple[bool, float | Fraction]:
    """Max over disconnected classes of |z(F) - Π z(components)|, compared with ``tol``."""
    cat = z.catalog
    worst = 0
    for c in cat:
        comps = core_components(c.canonical)
        if len(comps) < 2:
            continue
        prod = 1
        for comp in comps:
            prod = prod * z.z[cat.class_of(pad(comp, z.n))]
        worst = max(worst, abs(z.z[c.index] - prod))
    return worst <= tol, worst


def supergraph_counts(observed: LabeledGraph) -> tuple[int, ...]:
    """r_U(G): number of graphs in each class U containing the observed labeled graph."""
    cat = build_catalog(observed.n)
    C = containment_counts(observed.n)
    return tuple(int(v) for v in C[cat.class_of(observed)])


def likelihood(z_free, observed: LabeledGraph):
    """Inverse-Möbius probability of the observed labeled graph under the lifted z."""
    n = observed.n
    z = lift_free_to_full(z_free, n)
    cat = build_catalog(n)
    r = supergraph_counts(observed)
    e0 = observed.edge_count
    acc = 0
    for d in cat:
        if r[d.index]:
            term = r[d.index] * z.z[d.index]
            acc = acc + term if (d.edge_count - e0) % 2 == 0 else acc - term
    return acc


# -- maximum likelihood ------------------------------------------------------------

@dataclass
class Family:
    """Segment of maximizers base + t * direction, t in [lo, hi]."""

    direction: tuple[float, ...]  # free coordinates, max |component| = 1
    lo: float
    hi: float

    def point(self, base: Sequence[float], t: float) -> np.ndarray:
        return np.asarray(base) + t * np.asarray(self.direction)


@dataclass
class MleResult:
    observed: LabeledGraph
    observed_class: int
    free_hat: tuple[float, ...]
    z_hat: MobiusVector
    p_mass: tuple[float, ...]  # class masses of the estimate
    likelihood: float
    family: Family | None
    active_constraints: tuple[int, ...]  # classes with zero probability
    starts_used: int
    converged_fraction: float
    alternatives: list[tuple[float, ...]] = field(default_factory=list)
    face_vertices: list[tuple[float, ...]] = field(default_factory=list)  # extreme maximizers
    face_dim: int = 0  # dimension of the optimal set at the estimate's z(edge)

    @property
    def log_likelihood(self) -> float:
        return math.log(self.likelihood) if self.likelihood > 0 else -math.inf

    @property
    def n(self) -> int:
        return self.observed.n

    def points(self) -> list[np.ndarray]:
        """Estimate(s) to check: the point, a family's endpoints and midpoint, or a face's corners and centroid."""
        base = np.array(self.free_hat)
        if self.face_dim >= 2:
            V = [np.array(v) for v in self.face_vertices]
            return V + [np.mean(V, axis=0)]
        if self.family is None:
            return [base]
        f = self.family
        return [f.point(base, f.lo), f.point(base, (f.lo + f.hi) / 2), f.point(base, f.hi)]


def _feasible(model: DissociatedModel, x: np.ndarray, tol: float = FEAS_TOL) -> bool:
    return bool(np.all(model.probs(x) >= -tol) and np.all(x >= -tol) and np.all(x <= 1 + tol))


def _starts(model: DissociatedModel, k: int, rng: np.random.Generator) -> np.ndarray:
    """Latin-hypercube starts, repaired so a class never exceeds its connected subgraphs."""
    X = qmc.LatinHypercube(d=model.dim, seed=rng).random(k)
    C = containment_counts(model.n)
    cat = build_catalog(model.n)
    order = sorted(range(model.dim), key=lambda j: cat[model.free[j]].edge_count)
    subs = {j: [i for i in range(model.dim) if i != j and C[model.free[i], model.free[j]]]
            for j in range(model.dim)}
    for x in X:
        for j in order:
            for i in subs[j]:
                x[j] = min(x[j], x[i])
    return X


def _local_solve(model: DissociatedModel, g: int, x0: np.ndarray):
    a = model.signed[g]

    def obj(x):
        return -a @ model.z(x), -(a @ model.z_jac(x))

    cons = {"type": "ineq", "fun": lambda x: model.probs(x),
            "jac": lambda x: model.signed @ model.z_jac(x)}
    res = minimize(obj, x0, jac=True, method="SLSQP", bounds=[(0, 1)] * model.dim,
                   constraints=[cons], options={"maxiter": 500, "ftol": 1e-14})
    x = np.clip(res.x, 0, 1)
    return x, float(a @ model.z(x)), bool(res.success) and _feasible(model, x, 1e-8)


def _linear_parts(model: DissociatedModel, x: np.ndarray):
    """z = z0 + S @ x_lin with the nonlinear coordinates of x held fixed."""
    lin = model.linear
    z_full = model.z(x)
    S = np.zeros((len(z_full), len(lin)))
    for k, j in enumerate(lin):
        S[model.free[j], k] = 1.0
    z0 = z_full - S @ x[list(lin)]
    return z0, S


def _profile_lp(model: DissociatedModel, g: int, x: np.ndarray, c_extra=None, floor=None):
    """Max likelihood over the linear coordinates (nonlinear ones fixed at x)."""
    lin = list(model.linear)
    z0, S = _linear_parts(model, x)
    a = model.signed[g]
    A_ub = -(model.signed @ S)
    b_ub = model.signed @ z0
    c = -(a @ S) if c_extra is None else -np.asarray(c_extra)
    if floor is not None:
        A_ub = np.vstack([A_ub, -(a @ S)])
        b_ub = np.append(b_ub, a @ z0 - floor)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(0, 1)] * len(lin), method="highs",
                  options=_HIGHS)
    if res.status != 0:
        return None, -math.inf
    y = x.copy()
    y[lin] = res.x
    return y, float(a @ model.z(y))


def _polish(model: DissociatedModel, g: int, x: np.ndarray) -> tuple[np.ndarray, float]:
    """Re-solve the linear part exactly and, with one nonlinear coordinate, refine it by 1-D search."""
    nl = model.nonlinear
    best_x, best_L = _profile_lp(model, g, x)
    if best_x is None:
        return x, float(model.signed[g] @ model.z(x))
    if len(nl) == 1:
        j = nl[0]
        lo, hi = max(0.0, x[j] - 1e-3), min(1.0, x[j] + 1e-3)

        def neg_profile(t):
            y = x.copy()
            y[j] = t
            return -_profile_lp(model, g, y)[1]

        r = minimize_scalar(neg_profile, bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-13})
        y = x.copy()
        y[j] = r.x
        y, L = _profile_lp(model, g, y)
        if y is not None and L >= best_L:
            best_x, best_L = y, L
    return best_x, best_L


def _face_vertices(model: DissociatedModel, g: int, x: np.ndarray, L: float,
                   rng: np.random.Generator, probes: int = 24) -> np.ndarray:
    """Extreme points of the optimal set with the nonlinear coordinates held at x."""
    lin = list(model.linear)
    dirs = [rng.standard_normal(len(lin)) for _ in range(probes)]
    dirs += [s * e for e in np.eye(len(lin)) for s in (1, -1)]
    pts = [x]
    for c in dirs:
        y, _ = _profile_lp(model, g, x, c_extra=c, floor=L - FLOOR_SLACK)
        if y is not None and not any(np.abs(y - p).max() < 1e-7 for p in pts):
            pts.append(y)
    return np.array(pts)


def _affine_dim(pts: np.ndarray, tol: float = 1e-6) -> tuple[int, np.ndarray]:
    if len(pts) < 2:
        return 0, np.zeros((0, pts.shape[1]))
    _, s, Vt = np.linalg.svd(pts[1:] - pts[0])
    k = int(np.sum(s > tol))
    return k, Vt[:k]


def _face(model: DissociatedModel, g: int, x: np.ndarray, L: float,
          rng: np.random.Generator):
    """Base point, 1-parameter family (if the optimal face is a segment) and face vertices."""
    if not model.linear:
        return x, None, np.array([x])
    V = _face_vertices(model, g, x, L, rng)
    k, _ = _affine_dim(V)
    if k == 0:
        return V[0], None, V[:1]
    if k > 1:
        if k == 2:  # keep only the corners of the polygon
            _, basis = _affine_dim(V)
            V = V[ConvexHull((V - V[0]) @ basis.T).vertices]
        # report the corner with the lexicographically smallest class masses
        orbit = np.array([c.orbit_size for c in build_catalog(model.n)])
        key = [tuple(np.round(model.probs(v) * orbit, 9)) for v in V]
        V = V[sorted(range(len(V)), key=key.__getitem__)]
        return V[0], None, V
    # a segment: its two farthest vertices are the endpoints
    D = np.abs(V[:, None, :] - V[None, :, :]).max(axis=2)
    i, j = np.unravel_index(np.argmax(D), D.shape)
    a, b = V[i], V[j]
    d = b - a
    scale = np.abs(d).max()
    d = d / scale
    nz = np.flatnonzero(np.abs(d) > 1e-9)
    if d[nz[-1]] < 0:
        d, a, b = -d, b, a
    d[np.abs(d) < 1e-9] = 0.0
    base = (a + b) / 2
    half = scale / 2
    return base, Family(tuple(float(v) for v in d), -half, half), np.array([a, b])


def mle(observed: LabeledGraph, starts: int = 256, seed: int = 0, tol: float = 1e-9,
        threads: int = 1) -> MleResult:
    """Multi-start maximum likelihood over the dissociated manifold."""
    n = observed.n
    if n > 5:
        raise ValueError("MLE is supported for n <= 5 (n = 5 is experimental)")
    model = dissociated_model(n)
    cat = build_catalog(n)
    g = cat.class_of(observed)
    ss = np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss.spawn(1)[0])
    X0 = _starts(model, starts, rng)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        runs = list(ex.map(lambda x0: _local_solve(model, g, x0), X0))
    ok = [(x, L) for x, L, good in runs if good]
    if not ok:
        raise RuntimeError(f"no feasible local optimum found from {starts} starts")
    best_L = max(L for _, L in ok)
    near = sorted((x for x, L in ok if L >= best_L - max(tol, 1e-7)),
                  key=lambda x: tuple(x[list(model.nonlinear)]))
    # cluster on the nonlinear coordinates; the linear ones are resolved exactly below
    nl = list(model.nonlinear)
    clusters: list[np.ndarray] = []
    for x in near:
        if not any(np.abs(x[nl] - c[nl]).max() < 1e-4 for c in clusters):
            clusters.append(x)
    polished = []
    for x in clusters:
        y, L = _polish(model, g, x)
        polished.append((y, L))
    best_L = max(L for _, L in polished)
    optima = [(y, L) for y, L in polished if L >= best_L - tol]
    optima.sort(key=lambda t: t[0][0])
    x_best, L_best = max(optima, key=lambda t: t[1])
    base, fam, verts = _face(model, g, x_best, L_best, np.random.default_rng(ss.spawn(2)[1]))
    probs = model.probs(base)
    L_final = float(probs[g])
    if L_final < best_L - 1e-8:
        raise RuntimeError("face recentering lost likelihood")
    z = model.z(base)
    active = tuple(i for i, v in enumerate(probs) if v <= ACTIVE_TOL)
    if fam is not None:
        # a class is active along a family only if it stays zero at both ends
        ends = [model.probs(fam.point(base, t)) for t in (fam.lo, fam.hi)]
        active = tuple(i for i in active if all(e[i] <= ACTIVE_TOL for e in ends))
    return MleResult(
        observed=observed, observed_class=g,
        free_hat=tuple(float(v) for v in base),
        z_hat=MobiusVector(n, tuple(float(v) for v in z)),
        p_mass=tuple(float(probs[c.index] * c.orbit_size) for c in cat),
        likelihood=L_final, family=fam, active_constraints=active,
        starts_used=starts, converged_fraction=len(ok) / starts,
        alternatives=[tuple(float(v) for v in y) for y, _ in optima if y is not x_best],
        face_vertices=[tuple(float(v) for v in y) for y in verts],
        face_dim=_affine_dim(verts)[0],
    )


# -- extendability of estimates -----------------------------------------------------

def rationalize_masses(mass: Sequence[float], max_den: int = 10 ** 7) -> tuple[tuple[Fraction, ...], float]:
    """Nearby exact distribution and the largest per-coordinate rounding error."""
    q = [max(Fraction(v).limit_denominator(max_den), Fraction(0)) for v in mass]
    tot = sum(q)
    q = [v / tot for v in q]
    err = max(abs(float(a) - b) for a, b in zip(q, mass))
    return tuple(q), err


@dataclass
class ExtensionCheck:
    certificate: MembershipCertificate
    rounding_error: float

    @property
    def robust(self) -> bool:
        """A separation that survives the rounding of the float estimate."""
        c = self.certificate
        if c.member:
            return False
        h1 = sum(abs(float(v)) for v in c.separating_functional)
        return float(c.separation_value) > h1 * (self.rounding_error + 1e-8)


def extension_checks(result: MleResult, to_n: int | None = None) -> list[ExtensionCheck]:
    n = result.n
    to_n = n + 1 if to_n is None else to_n
    model = dissociated_model(n)
    cat = build_catalog(n)
    imgs = [d.mass for d in marginal_polytope_vertices(to_n, n)]
    out = []
    for x in result.points():
        probs = model.probs(x)
        mass = [max(float(probs[c.index]) * c.orbit_size, 0.0) for c in cat]
        q, err = rationalize_masses(mass)
        out.append(ExtensionCheck(hull_membership(q, imgs), err))
    return out


def verify_non_extendable_mle(result: MleResult) -> bool:
    """True when no estimate (every checked point of a family) extends to n+1 nodes."""
    if result.n != 4:
        raise ValueError("extendability of estimates is checked for n = 4")
    return all(not c.certificate.member for c in extension_checks(result))
