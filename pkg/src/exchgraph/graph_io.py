"""graph6 and edge-list text I/O, plus JSON helpers for exact rationals."""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import networkx as nx

from .graph_core import ClassCatalog, LabeledGraph


class FormatError(ValueError):
    pass


def to_graph6(g: LabeledGraph) -> str:
    G = nx.empty_graph(g.n)
    G.add_edges_from((i - 1, j - 1) for i, j in g.edge_list)
    return nx.to_graph6_bytes(G, header=False).decode("ascii").strip()


def from_graph6(s: str) -> LabeledGraph:
    s = s.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    try:
        G = nx.from_graph6_bytes(s.encode("ascii"))
    except (nx.NetworkXError, ValueError, UnicodeEncodeError) as exc:
        raise FormatError(f"malformed graph6 string {s!r}: {exc}") from None
    return LabeledGraph.from_edges(G.number_of_nodes(), ((i + 1, j + 1) for i, j in G.edges()))


def to_edgelist_text(g: LabeledGraph) -> str:
    """``"n; i-j,i-j,..."`` with 1-based nodes."""
    return f"{g.n}; " + ",".join(f"{i}-{j}" for i, j in g.edge_list)


def from_edgelist_text(s: str) -> LabeledGraph:
    head, sep, body = s.partition(";")
    if not sep:
        raise FormatError(f"expected 'n; i-j,...', got {s!r}")
    try:
        n = int(head)
        edges = []
        for tok in body.split(","):
            tok = tok.strip()
            if not tok:
                continue
            a, b = tok.split("-")
            edges.append((int(a), int(b)))
        return LabeledGraph.from_edges(n, edges)
    except ValueError as exc:
        raise FormatError(f"malformed edge list {s!r}: {exc}") from None


def parse_graph(s: str) -> LabeledGraph:
    """Accept either graph6 or the edge-list text form."""
    return from_edgelist_text(s) if ";" in s else from_graph6(s)


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s: Any) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    if isinstance(s, float):
        raise FormatError(f"expected an exact rational string 'p/q', got float {s!r}")
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"malformed rational {s!r}") from None


def catalog_records(cat: ClassCatalog) -> list[dict]:
    return [
        {
            "canonical_g6": to_graph6(c.canonical),
            "orbit_size": c.orbit_size,
            "aut_count": c.aut_count,
            "connected": c.connected,
            "edge_count": c.edge_count,
        }
        for c in cat
    ]


def catalog_to_json(cat: ClassCatalog) -> str:
    return json.dumps(catalog_records(cat), indent=1)
