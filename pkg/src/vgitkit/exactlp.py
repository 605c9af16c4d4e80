"""Exact rational linear feasibility for convex-hull membership.

Phase-1 simplex over Fractions with Bland's rule; no floating point anywhere.
"""

from __future__ import annotations

from fractions import Fraction


def convex_combination(points, target):
    """Exact convex weights reproducing `target`, or None if infeasible.

    `points` is a sequence of equal-length rational vectors; feasibility of
    sum(w_i * p_i) = target, w_i >= 0, sum(w_i) = 1 is decided exactly.
    Returns the weight list on success.
    """
    pts = [tuple(Fraction(x) for x in p) for p in points]
    if not pts:
        return None
    tgt = tuple(Fraction(x) for x in target)
    dim = len(tgt)
    n = len(pts)
    m = dim + 1  # coordinate rows plus the sum-to-one row

    # rows of the standard-form tableau: [A | b] with b >= 0 after sign fix
    rows = []
    for r in range(dim):
        coeffs = [pts[j][r] for j in range(n)]
        rows.append((coeffs, tgt[r]))
    rows.append(([Fraction(1)] * n, Fraction(1)))

    tableau = []
    for coeffs, b in rows:
        if b < 0:
            coeffs = [-c for c in coeffs]
            b = -b
        tableau.append(coeffs + [b])

    # artificial variables get columns n..n+m-1, identity basis
    for r in range(m):
        for j in range(m):
            tableau[r].insert(n + j, Fraction(1 if j == r else 0))
    basis = list(range(n, n + m))
    ncols = n + m

    # phase-1 objective: minimize the sum of artificials
    obj = [Fraction(0)] * (ncols + 1)
    for r in range(m):
        for j in range(ncols + 1):
            obj[j] += tableau[r][j]

    while True:
        enter = next((j for j in range(n) if obj[j] > 0), None)
        if enter is None:
            break
        ratio, leave = None, None
        for r in range(m):
            a = tableau[r][enter]
            if a > 0:
                q = tableau[r][ncols] / a
                if ratio is None or q < ratio or (q == ratio and basis[r] < basis[leave]):
                    ratio, leave = q, r
        if leave is None:
            break  # unbounded cannot happen on a bounded feasibility system
        piv = tableau[leave][enter]
        tableau[leave] = [x / piv for x in tableau[leave]]
        for r in range(m):
            if r != leave and tableau[r][enter]:
                f = tableau[r][enter]
                tableau[r] = [x - f * y for x, y in zip(tableau[r], tableau[leave])]
        f = obj[enter]
        if f:
            obj = [x - f * y for x, y in zip(obj, tableau[leave])]
        basis[leave] = enter

    if obj[ncols] != 0:
        return None
    weights = [Fraction(0)] * n
    for r, v in enumerate(basis):
        if v < n:
            weights[v] = tableau[r][ncols]
    return weights


def in_convex_hull(points, target) -> bool:
    return convex_combination(points, target) is not None
