"""Labeled graphs, relabeling, canonical forms and isomorphism-class catalogs.

A graph on nodes 1..n is an indicator vector over the node pairs in
lexicographic order (1,2),(1,3),...,(n-1,n).  The same vector read as a binary
number, first pair most significant, is the graph's *code*; the canonical form
of a graph is the relabeling with the smallest code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice, permutations
from typing import Iterable, Sequence

import numpy as np

# largest n for which a whole catalog (a table over all 2^C(n,2) codes) is built
MAX_CATALOG_N = 7
# largest n whose full permutation table is kept in memory
_MAX_TABLE_N = 8
_CHUNK = 40320


@lru_cache(maxsize=None)
def pairs(n: int) -> tuple[tuple[int, int], ...]:
    """Node pairs of K_n, 1-based, in lexicographic order."""
    return tuple(combinations(range(1, n + 1), 2))


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict[tuple[int, int], int]:
    return {p: k for k, p in enumerate(pairs(n))}


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def _weights(n: int) -> np.ndarray:
    N = num_pairs(n)
    return (np.int64(1) << np.arange(N - 1, -1, -1, dtype=np.int64)).astype(np.int64)


@dataclass(frozen=True, order=True)
class LabeledGraph:
    """Simple undirected graph on nodes 1..n.

    ``n = 0`` is reserved for the empty core (the graph with no nodes), which is
    what deleting isolated nodes from an edgeless graph produces.
    """

    n: int
    edges: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"node count must be non-negative, got {self.n}")
        if len(self.edges) != num_pairs(self.n):
            raise ValueError(
                f"edge vector has length {len(self.edges)}, expected {num_pairs(self.n)} for n={self.n}")
        if any(b not in (0, 1) for b in self.edges):
            raise ValueError("edge vector must be 0/1")

    @classmethod
    def from_edges(cls, n: int, edge_list: Iterable[tuple[int, int]]) -> "LabeledGraph":
        idx = pair_index(n)
        bits = [0] * num_pairs(n)
        for i, j in edge_list:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            a, b = min(i, j), max(i, j)
            if a < 1 or b > n:
                raise ValueError(f"edge ({i},{j}) outside nodes 1..{n}")
            bits[idx[(a, b)]] = 1
        return cls(n, tuple(bits))

    @classmethod
    def from_code(cls, n: int, code: int) -> "LabeledGraph":
        N = num_pairs(n)
        if not 0 <= code < (1 << N) or (N == 0 and code != 0):
            raise ValueError(f"code {code} out of range for n={n}")
        return cls(n, tuple((code >> (N - 1 - k)) & 1 for k in range(N)))

    @classmethod
    def empty(cls, n: int) -> "LabeledGraph":
        return cls(n, (0,) * num_pairs(n))

    @classmethod
    def complete(cls, n: int) -> "LabeledGraph":
        return cls(n, (1,) * num_pairs(n))

    @property
    def code(self) -> int:
        c = 0
        for b in self.edges:
            c = (c << 1) | b
        return c

    @property
    def edge_count(self) -> int:
        return sum(self.edges)

    @property
    def edge_list(self) -> list[tuple[int, int]]:
        return [p for p, b in zip(pairs(self.n), self.edges) if b]

    def adjacency(self) -> list[set[int]]:
        """Neighbour sets indexed 0..n-1 (0-based nodes)."""
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for i, j in self.edge_list:
            adj[i - 1].add(j - 1)
            adj[j - 1].add(i - 1)
        return adj

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adjacency()]

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return bool(self.edges[pair_index(self.n)[(min(i, j), max(i, j))]])

    def is_subgraph_of(self, other: "LabeledGraph") -> bool:
        """Edge-set inclusion between graphs on the same nodes."""
        if other.n != self.n:
            raise ValueError("graphs must have the same node count")
        return all(b <= c for b, c in zip(self.edges, other.edges))

    def __str__(self) -> str:
        from .graph_io import to_edgelist_text
        return to_edgelist_text(self)


EMPTY_CORE = LabeledGraph(0, ())


def apply_permutation(g: LabeledGraph, sigma: Sequence[int]) -> LabeledGraph:
    """Relabel node i as sigma[i-1]; ``sigma`` is a 1-based bijection on 1..n."""
    if len(sigma) != g.n:
        raise ValueError(f"permutation has length {len(sigma)}, graph has {g.n} nodes")
    if sorted(sigma) != list(range(1, g.n + 1)):
        raise ValueError(f"{list(sigma)} is not a permutation of 1..{g.n}")
    return LabeledGraph.from_edges(g.n, ((sigma[i - 1], sigma[j - 1]) for i, j in g.edge_list))


def induced_subgraph(g: LabeledGraph, m: int) -> LabeledGraph:
    """G[m]: the subgraph induced by nodes 1..m."""
    if not 1 <= m <= g.n:
        raise ValueError(f"m={m} outside 1..{g.n}")
    return LabeledGraph.from_edges(m, ((i, j) for i, j in g.edge_list if j <= m))


def induced_on(g: LabeledGraph, nodes: Sequence[int]) -> LabeledGraph:
    """Subgraph induced by ``nodes`` (1-based), relabeled 1..k in the given order."""
    pos = {v: k + 1 for k, v in enumerate(nodes)}
    return LabeledGraph.from_edges(
        len(nodes), ((pos[i], pos[j]) for i, j in g.edge_list if i in pos and j in pos))


def delete_isolated_core(g: LabeledGraph) -> LabeledGraph:
    """Drop isolated nodes, keeping the relative order of the rest."""
    keep = [v + 1 for v, d in enumerate(g.degrees()) if d > 0]
    if not keep:
        return EMPTY_CORE
    return induced_on(g, keep)


def pad(g: LabeledGraph, n: int) -> LabeledGraph:
    """Add isolated nodes g.n+1..n."""
    if n < g.n:
        raise ValueError(f"cannot pad a {g.n}-node graph to {n} nodes")
    return LabeledGraph.from_edges(n, g.edge_list)


def disjoint_union(g1: LabeledGraph, g2: LabeledGraph) -> LabeledGraph:
    s = g1.n
    return LabeledGraph.from_edges(
        g1.n + g2.n, g1.edge_list + [(i + s, j + s) for i, j in g2.edge_list])


def connected_components(g: LabeledGraph) -> list[list[int]]:
    """Node sets (1-based, sorted) of the connected components, isolated nodes included."""
    adj = g.adjacency()
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v + 1)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def core_components(g: LabeledGraph) -> list[LabeledGraph]:
    """Connected components of the core, each as its own graph (isolated nodes dropped)."""
    return [induced_on(g, c) for c in connected_components(g) if len(c) > 1]


def is_connected_core(g: LabeledGraph) -> bool:
    """True iff the core is non-empty and connected; the empty core is not connected."""
    return len(core_components(g)) == 1


# -- permutation tables -------------------------------------------------------

def _perm_block_to_table(n: int, perms_arr: np.ndarray) -> np.ndarray:
    """For each permutation s and pair k=(i,j): index of the pair (s(i), s(j))."""
    N = num_pairs(n)
    if N == 0:
        return np.zeros((len(perms_arr), 0), dtype=np.int64)
    I = np.array([i - 1 for i, _ in pairs(n)])
    J = np.array([j - 1 for _, j in pairs(n)])
    a = perms_arr[:, I]
    b = perms_arr[:, J]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    # lexicographic index of pair (lo, hi), 0-based nodes
    return lo * (2 * n - lo - 1) // 2 + (hi - lo - 1)


@lru_cache(maxsize=None)
def _perm_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    perms_arr = np.array(list(permutations(range(n))), dtype=np.int64).reshape(-1, n)
    return perms_arr, _perm_block_to_table(n, perms_arr)


def _perm_blocks(n: int):
    if n <= _MAX_TABLE_N:
        yield _perm_table(n)
        return
    it = permutations(range(n))
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        arr = np.array(block, dtype=np.int64)
        yield arr, _perm_block_to_table(n, arr)


def relabeling_codes(g: LabeledGraph) -> np.ndarray:
    """Codes of g relabeled by every permutation of its nodes (n! entries, with repeats)."""
    bits = np.array(g.edges, dtype=np.int64)
    w = _weights(g.n)
    return np.concatenate([bits[table] @ w for _, table in _perm_blocks(g.n)])


def canonical_form(g: LabeledGraph) -> tuple[LabeledGraph, int]:
    """Minimum-code relabeling of g and the number of automorphisms of g."""
    if g.n <= 1:
        return g, 1
    codes = relabeling_codes(g)
    own = g.code
    return LabeledGraph.from_code(g.n, int(codes.min())), int(np.count_nonzero(codes == own))


def automorphisms(g: LabeledGraph) -> list[tuple[int, ...]]:
    """All automorphisms as 1-based image tuples."""
    if g.n == 0:
        return [()]
    own = g.code
    w = _weights(g.n)
    bits = np.array(g.edges, dtype=np.int64)
    out = []
    for perms_arr, table in _perm_blocks(g.n):
        hits = np.flatnonzero(bits[table] @ w == own)
        out.extend(tuple(int(v) + 1 for v in perms_arr[h]) for h in hits)
    return out


def is_node_transitive(g: LabeledGraph) -> bool:
    """True iff the automorphism group has a single orbit on the nodes."""
    if g.n <= 1:
        return True
    reach = {sigma[0] for sigma in automorphisms(g)}
    return len(reach) == g.n


def is_isomorphic(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    return g1.n == g2.n and canonical_form(g1)[0] == canonical_form(g2)[0]


def core_key(g: LabeledGraph) -> LabeledGraph:
    """Canonical form of the core: the key of g's class among graphs without isolated nodes."""
    return canonical_form(delete_isolated_core(g))[0]


# -- catalogs -----------------------------------------------------------------

@dataclass(frozen=True)
class IsoClass:
    index: int
    canonical: LabeledGraph
    orbit_size: int
    aut_count: int
    connected: bool
    core: LabeledGraph

    @property
    def n(self) -> int:
        return self.canonical.n

    @property
    def edge_count(self) -> int:
        return self.canonical.edge_count

    @property
    def has_isolated(self) -> bool:
        return self.core.n < self.canonical.n


@dataclass(frozen=True)
class ClassCatalog:
    """All isomorphism classes of graphs on n nodes.

    ``class_of_code[c]`` is the index of the class containing the labeled graph
    with code ``c``.
    """

    n: int
    classes: tuple[IsoClass, ...]
    lookup: dict[int, int]
    no_isolated_index: tuple[int, ...]
    class_of_code: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __getitem__(self, i: int) -> IsoClass:
        return self.classes[i]

    def class_of(self, g: LabeledGraph) -> int:
        if g.n != self.n:
            raise ValueError(f"graph has {g.n} nodes, catalog is for n={self.n}")
        return int(self.class_of_code[g.code])

    def index_of_core(self, core: LabeledGraph) -> int:
        """Index of the class whose core is isomorphic to ``core``."""
        if core.n > self.n:
            raise ValueError(f"core on {core.n} nodes does not fit in n={self.n}")
        return self.class_of(pad(core, self.n))

    def orbit_codes(self, i: int) -> np.ndarray:
        return _orbit_codes(self.n, i)

    @property
    def connected_indices(self) -> tuple[int, ...]:
        return tuple(c.index for c in self.classes if c.connected)

    @property
    def empty_index(self) -> int:
        return self.class_of(LabeledGraph.empty(self.n))

    @property
    def complete_index(self) -> int:
        return self.class_of(LabeledGraph.complete(self.n))


@lru_cache(maxsize=None)
def _orbit_codes(n: int, i: int) -> np.ndarray:
    cat = build_catalog(n)
    return np.flatnonzero(cat.class_of_code == i)


@lru_cache(maxsize=None)
def build_catalog(n: int) -> ClassCatalog:
    """Enumerate every labeled graph on n nodes and bucket them by canonical form.

    Labeled graphs are visited in increasing code order; the first one not yet
    covered is the minimum of its orbit, hence the canonical representative, and
    its whole orbit is marked at once.
    """
    if n < 1:
        raise ValueError("catalogs start at n=1")
    if n > MAX_CATALOG_N:
        raise MemoryError(
            f"catalog for n={n} needs a table over 2^{num_pairs(n)} labeled graphs; "
            f"supported up to n={MAX_CATALOG_N}")
    N = num_pairs(n)
    total = 1 << N
    class_of_code = np.full(total, -1, dtype=np.int32)
    w = _weights(n)
    _, table = _perm_table(n)
    fact = math.factorial(n)
    found: list[tuple[int, int]] = []  # (code, orbit size)
    pos = 0
    while pos < total:
        code = pos
        bits = np.array(LabeledGraph.from_code(n, code).edges, dtype=np.int64)
        orbit = np.unique(bits[table] @ w) if N else np.array([0])
        class_of_code[orbit] = len(found)
        found.append((code, len(orbit)))
        nxt = np.flatnonzero(class_of_code[pos:] < 0)
        pos = total if len(nxt) == 0 else pos + int(nxt[0])

    # order by edge count, then by canonical code
    order = sorted(range(len(found)),
                   key=lambda k: (bin(found[k][0]).count("1"), found[k][0]))
    remap = np.empty(len(found), dtype=np.int32)
    classes = []
    for new, old in enumerate(order):
        remap[old] = new
        code, size = found[old]
        g = LabeledGraph.from_code(n, code)
        core = delete_isolated_core(g)
        classes.append(IsoClass(
            index=new, canonical=g, orbit_size=size, aut_count=fact // size,
            connected=is_connected_core(g), core=canonical_form(core)[0]))
    class_of_code = remap[class_of_code]
    return ClassCatalog(
        n=n,
        classes=tuple(classes),
        lookup={c.canonical.code: c.index for c in classes},
        no_isolated_index=tuple(c.index for c in classes if not c.has_isolated),
        class_of_code=class_of_code,
    )


def connected_class_count(n: int) -> int:
    """Number of connected unlabeled graphs on 2..n nodes."""
    return len(build_catalog(n).connected_indices)


_NAMES4 = {
    # canonical edge lists of the 11 classes on 4 nodes
    (): "empty",
    ((3, 4),): "K2",
    ((2, 4), (3, 4)): "P3",
    ((1, 4), (2, 3)): "2K2",
    ((2, 3), (2, 4), (3, 4)): "K3",
    ((1, 4), (2, 4), (3, 4)): "K1,3",
    ((1, 4), (2, 3), (3, 4)): "P4",
    ((1, 3), (1, 4), (2, 3), (2, 4)): "C4",
    ((1, 4), (2, 3), (2, 4), (3, 4)): "paw",
    ((1, 3), (1, 4), (2, 3), (2, 4), (3, 4)): "diamond",
    ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)): "K4",
}


def class_name(c: IsoClass) -> str:
    """Conventional name for 4-node classes, otherwise the core's edge list."""
    if c.n == 4:
        name = _NAMES4.get(tuple(c.canonical.edge_list))
        if name:
            return name
    from .graph_io import to_edgelist_text
    return to_edgelist_text(c.canonical)


@lru_cache(maxsize=None)
def named_class_index(name: str) -> int:
    """Index in the n=4 catalog of a class named as in ``class_name``."""
    for c in build_catalog(4):
        if class_name(c) == name:
            return c.index
    raise KeyError(name)
