"""Fundamental sets of normalized one-parameter subgroups.

A one-parameter subgroup of the diagonal maximal torus in SL(n+1) is stored
as its integer weight vector (mu_0 >= ... >= mu_n, sum zero, primitive).  The
fundamental set for k degree-d hypersurfaces is the finite set of such vectors
obtained by solving, inside the affine slice {gamma_0 = 1, sum gamma_i = 0},
all linear systems built from n-1 equation normals, keeping the monotone
solutions and closing under the reversal map mu_i -> -mu_{n-i}.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd, lcm

import numpy as np

from .monomials import exponent_vectors

OneParamSubgroup = tuple  # normalized primitive integer weight vector


def primitive(vec):
    """Scale an integer vector by 1/gcd and fix sign of first nonzero > 0."""
    g = reduce(gcd, (abs(x) for x in vec), 0)
    if g == 0:
        return None
    v = tuple(x // g for x in vec)
    for x in v:
        if x:
            return v if x > 0 else tuple(-y for y in v)
    return None


def is_normalized(weights) -> bool:
    """Non-increasing, sum zero, primitive, nonzero."""
    if sum(weights) != 0 or not any(weights):
        return False
    if any(weights[i] < weights[i + 1] for i in range(len(weights) - 1)):
        return False
    return reduce(gcd, (abs(x) for x in weights)) == 1


def reversal(weights) -> OneParamSubgroup:
    """The reversal mu_i -> -mu_{n-i}, rescaled primitive.

    Maps normalized subgroups to normalized subgroups; underlies the
    equivalence between the min- and max-forms of the HM weight.
    """
    return primitive(tuple(-x for x in reversed(weights)))


def equation_normals(n: int, k: int, d: int) -> list[tuple]:
    """Hyperplane normals for the fundamental-set linear systems.

    The unit differences e_i - e_{i+1} together with all nonzero differences
    of k-fold sums of degree-d exponent vectors, deduplicated up to sign and
    integer scale.
    """
    if n < 1 or k < 1 or d < 1:
        raise ValueError(f"need n,k,d >= 1, got ({n},{k},{d})")
    sums = set()
    for combo in itertools.combinations_with_replacement(exponent_vectors(n, d), k):
        sums.add(tuple(sum(c[i] for c in combo) for i in range(n + 1)))
    normals = set()
    for i in range(n):
        e = [0] * (n + 1)
        e[i], e[i + 1] = 1, -1
        normals.add(tuple(e))
    for a, b in itertools.combinations(sorted(sums), 2):
        v = primitive(tuple(x - y for x, y in zip(a, b)))
        if v is not None:
            normals.add(v)
    return sorted(normals)


def _affine_planes(n: int, normals) -> list[tuple]:
    """Project normals onto the slice {gamma_0=1, sum=0} with unknowns g_1..g_{n-1}.

    Each normal w becomes sum_j (w_j - w_n) g_j = w_n - w_0, encoded as a
    primitive integer tuple (a_1, ..., a_{n-1}, b); trivial rows drop out.
    """
    planes = set()
    for w in normals:
        a = tuple(w[j] - w[n] for j in range(1, n)) + (w[n] - w[0],)
        v = primitive(a)
        if v is None or not any(v[:-1]):
            continue
        planes.add(v)
    return sorted(planes)


def _solve_dim1(planes):
    for a, b in planes:
        if a > 0:
            yield (b,), a
        else:
            yield (-b,), -a


def _solve_dim2_np(planes):
    A = np.array([p[:2] for p in planes], dtype=np.int64)
    b = np.array([p[2] for p in planes], dtype=np.int64)
    N = len(planes)
    out = []
    for i in range(N):
        det = A[i, 0] * A[:, 1] - A[i, 1] * A[:, 0]
        x_num = b[i] * A[:, 1] - A[i, 1] * b
        y_num = A[i, 0] * b - b[i] * A[:, 0]
        jj = np.nonzero(det)[0]
        jj = jj[jj > i]
        for j in jj.tolist():
            dn = int(det[j])
            x, y = int(x_num[j]), int(y_num[j])
            if dn < 0:
                dn, x, y = -dn, -x, -y
            out.append(((x, y), dn))
    return out


def _solve_dim3_np(planes):
    # Cramer via pairwise cross products; integer magnitudes stay far below
    # int64 overflow for the degrees in scope (entry bound checked by caller).
    A = np.array([p[:3] for p in planes], dtype=np.int64)
    b = np.array([p[3] for p in planes], dtype=np.int64)
    N = len(planes)
    CR = np.cross(A[:, None, :], A[None, :, :]).astype(np.int64)
    out = []
    for i in range(N):
        D = CR @ A[i]                      # det(A_i, A_j, A_k) at [j, k]
        CRki = CR[:, i, :]                 # A_k x A_i, indexed by k
        CRij = CR[i, :, :]                 # A_i x A_j, indexed by j
        num = (b[i] * CR
               + b[:, None, None] * CRki[None, :, :]
               + b[None, :, None] * CRij[:, None, :])
        jj, kk = np.nonzero(D)
        mask = (jj > i) & (kk > jj)
        jj, kk = jj[mask], kk[mask]
        dd = D[jj, kk]
        xx = num[jj, kk]
        sgn = np.sign(dd)
        dd = dd * sgn
        xx = xx * sgn[:, None]
        # prune by the monotone prefix before leaving numpy: den >= x1 >= x2 >= x3
        ok = (dd >= xx[:, 0]) & (xx[:, 0] >= xx[:, 1]) & (xx[:, 1] >= xx[:, 2])
        for x, dn in zip(xx[ok].tolist(), dd[ok].tolist()):
            out.append((tuple(x), dn))
    return out


def _solve_general(planes, dim: int):
    """Pure-Fraction DFS over dim-subsets with incremental rank pruning."""
    rows = [tuple(Fraction(x) for x in p) for p in planes]
    width = dim + 1
    out = []

    def rec(start, basis):
        if len(basis) == dim:
            sol = [Fraction(0)] * dim
            for col, row in basis:
                sol[col] = row[dim]
            den = lcm(*(f.denominator for f in sol)) if sol else 1
            out.append((tuple(int(f * den) for f in sol), den))
            return
        for idx in range(start, len(rows)):
            red = list(rows[idx])
            for col, row in basis:
                f = red[col]
                if f:
                    red = [red[c] - f * row[c] for c in range(width)]
            lead = next((c for c in range(dim) if red[c]), None)
            if lead is None:
                continue
            piv = [x / red[lead] for x in red]
            nb = []
            for col, row in basis:
                f = row[lead]
                nb.append((col, [row[c] - f * piv[c] for c in range(width)]))
            nb.append((lead, piv))
            rec(idx + 1, nb)

    rec(0, [])
    return out


def _candidates_to_members(cands, n: int):
    """Filter slice points by the monotone chain and rescale primitive.

    Each candidate is (nums, den) with den > 0 describing the point
    gamma = (1, nums/den..., g_n) where g_n closes the sum to zero.
    """
    members = set()
    for num, den in cands:
        gn = -den - sum(num)
        chain = (den,) + tuple(num) + (gn,)
        if any(chain[i] < chain[i + 1] for i in range(n)):
            continue
        v = primitive(chain)
        if v is not None:
            members.add(v)
    return members


@dataclass(frozen=True)
class FundamentalSet:
    """Finite fundamental set of normalized 1-PS for parameters (n, k, d).

    Independent of the hyperplane count m: the equation pool never mentions
    it (recorded resolution of the spec's open question).
    """

    n: int
    k: int
    d: int
    members: tuple

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, weights) -> bool:
        return tuple(weights) in self.member_set

    @cached_property
    def member_set(self) -> frozenset:
        return frozenset(self.members)

    def digest(self) -> str:
        payload = repr((self.n, self.k, self.d, self.members)).encode()
        return hashlib.sha256(payload).hexdigest()

    def weight_matrix(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)


def fundamental_set(n: int, k: int, d: int, m: int = 1) -> FundamentalSet:
    """Enumerate the fundamental set of normalized one-parameter subgroups.

    Solves every consistent system of n-1 equation normals on the slice
    {gamma_0 = 1, sum = 0}, keeps monotone solutions rescaled to primitive
    integer vectors, and closes under reversal.  The result does not depend
    on m; the argument is accepted for interface parity only.
    """
    if n < 1 or k < 1 or d < 1:
        raise ValueError(f"need n,k,d >= 1, got ({n},{k},{d})")
    if n == 1:
        return FundamentalSet(n=n, k=k, d=d, members=((1, -1),))

    planes = _affine_planes(n, equation_normals(n, k, d))
    dim = n - 1
    max_entry = max(max(abs(x) for x in p) for p in planes)
    if dim == 1:
        cands = _solve_dim1(planes)
    elif dim == 2 and max_entry <= 2 ** 19:
        cands = _solve_dim2_np(planes)
    elif dim == 3 and max_entry <= 2 ** 13:
        cands = _solve_dim3_np(planes)
    else:
        cands = _solve_general(planes, dim)

    members = _candidates_to_members(cands, n)
    members |= {reversal(v) for v in set(members)}
    return FundamentalSet(n=n, k=k, d=d, members=tuple(sorted(members, reverse=True)))
