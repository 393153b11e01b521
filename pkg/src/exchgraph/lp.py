"""Exact rational phase-one simplex for convex-hull membership.

Solves: find λ >= 0 with Σ λ_j v_j = q and Σ λ_j = 1.  Either returns the
weights or a Farkas certificate: a functional h with h·q > max_j h·v_j.
Bland's rule guarantees termination on degenerate problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Vec = Sequence[Fraction]


@dataclass
class MembershipCertificate:
    member: bool
    weights: tuple[Fraction, ...] | None = None
    separating_functional: tuple[Fraction, ...] | None = None
    separation_value: Fraction | None = None  # h·q - max_j h·v_j when not a member

    def verify(self, q: Vec, points: Sequence[Vec]) -> bool:
        """Re-check the certificate in exact arithmetic."""
        if self.member:
            w = self.weights
            if w is None or len(w) != len(points) or any(x < 0 for x in w) or sum(w) != 1:
                return False
            return all(sum((wj * v[i] for wj, v in zip(w, points) if wj), Fraction(0)) == q[i]
                       for i in range(len(q)))
        h = self.separating_functional
        if h is None:
            return False
        hq = _dot(h, q)
        top = max(_dot(h, v) for v in points)
        return hq > top and hq - top == self.separation_value


def _dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b) if x and y), Fraction(0))


def hull_membership(q: Vec, points: Sequence[Vec]) -> MembershipCertificate:
    """Decide whether q lies in the convex hull of ``points``, with a certificate."""
    if not points:
        raise ValueError("empty point set")
    d = len(q)
    if any(len(v) != d for v in points):
        raise ValueError("dimension mismatch between query and hull points")
    q = [Fraction(x) for x in q]
    pts = [[Fraction(x) for x in v] for v in points]
    nv = len(pts)
    # rows: d coordinates, then the weight-sum row
    rows_A = [[pts[j][i] for j in range(nv)] for i in range(d)] + [[Fraction(1)] * nv]
    b = q + [Fraction(1)]
    sign = []
    for i in range(len(b)):
        if b[i] < 0:
            rows_A[i] = [-x for x in rows_A[i]]
            b[i] = -b[i]
            sign.append(-1)
        else:
            sign.append(1)
    r = len(b)
    ncol = nv + r
    # tableau rows: [A | I | b]
    T = [rows_A[i] + [Fraction(int(k == i)) for k in range(r)] + [b[i]] for i in range(r)]
    basis = [nv + i for i in range(r)]
    # reduced costs for minimizing the sum of artificials
    cost = [Fraction(0)] * nv + [Fraction(1)] * r
    red = [cost[j] - sum((T[i][j] for i in range(r)), Fraction(0)) for j in range(ncol)]
    obj = -sum(b, Fraction(0))  # negative of current objective value

    while True:
        enter = next((j for j in range(ncol) if red[j] < 0), None)  # Bland: lowest index
        if enter is None:
            break
        best, leave = None, None
        for i in range(r):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # cannot happen: phase one is bounded below by 0
            raise RuntimeError("unbounded phase-one problem")
        piv = T[leave][enter]
        row = [x / piv for x in T[leave]]
        T[leave] = row
        nz = [k for k, x in enumerate(row) if x]
        for i in range(r):
            if i != leave:
                f = T[i][enter]
                if f:
                    Ti = T[i]
                    for k in nz:
                        Ti[k] -= f * row[k]
        f = red[enter]
        for k in nz:
            if k < ncol:
                red[k] -= f * row[k]
        obj -= f * row[-1]
        basis[leave] = enter

    value = -obj
    if value == 0:
        lam = [Fraction(0)] * nv
        for i, j in enumerate(basis):
            if j < nv:
                lam[j] = T[i][-1]
        return MembershipCertificate(True, weights=tuple(lam))
    # dual y_i = cost_art - reduced_cost_art = 1 - red[nv + i]; undo row sign flips
    y = [(1 - red[nv + i]) * sign[i] for i in range(r)]
    h = tuple(y[:d])
    hq = _dot(h, q)
    top = max(_dot(h, v) for v in pts)
    return MembershipCertificate(False, separating_functional=h, separation_value=hq - top)
