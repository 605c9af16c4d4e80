"""Candidate stability walls, heuristic false-wall pruning, full pipeline (m=1).

Candidate walls are the rationals t = -(sum_i <I_i,lam>)/<x_j,lam> over the
fundamental set, distinct monomial tuples and variables, clipped to
(0, kd/n] and joined with 0.  A candidate is pruned as a false wall when the
maximal destabilizing families at the wall match those of the preceding
chamber per the comparison rule; pruning is heuristic and every pruned wall
stays in the report.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .destab import (STRICT, WEAK, annihilator_candidates, classify_family,
                     maximal_families)
from .monomials import exponent_vectors
from .oneps import FundamentalSet, fundamental_set


def candidate_walls(n: int, d: int, k: int,
                    fset: Optional[FundamentalSet] = None) -> list:
    """Sorted candidate wall values in [0, kd/n], always containing 0."""
    if fset is None:
        fset = fundamental_set(n, k, d, 1)
    xi_d = exponent_vectors(n, d)
    W = fset.weight_matrix()
    Pd = W @ np.array(xi_d, dtype=np.int64).T
    tmax = Fraction(k * d, n)
    combos = list(itertools.combinations(range(len(xi_d)), k))
    sums = np.stack([Pd[:, list(c)].sum(axis=1) for c in combos], axis=1)

    found = set()
    for j in range(n + 1):
        den = W[:, j][:, None]          # <x_j, lam>
        num = -sums
        ok = (den != 0) & (num != 0) & ((num > 0) == (den > 0))
        nn = np.abs(num)[ok]
        dd = np.abs(np.broadcast_to(den, sums.shape))[ok]
        keep = nn * tmax.denominator <= dd * tmax.numerator
        nn, dd = nn[keep], dd[keep]
        g = np.gcd(nn, dd)
        pairs = np.stack([nn // g, dd // g], axis=1)
        for a, b in np.unique(pairs, axis=0).tolist():
            found.add(Fraction(int(a), int(b)))
    return [Fraction(0)] + sorted(found)


try:
    from numba import njit, prange
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

if _HAVE_NUMBA:
    @njit(cache=True, parallel=True)
    def _sweep_kernel(Pd, P1, prefix, bbits, hbits, q, p, shift, n1,
                      keys_w, keys_s):
        npts, nd = Pd.shape
        nh = P1.shape[1]
        for li in prange(npts):
            qp = np.empty(nd, dtype=np.int64)
            for i in range(nd):
                qp[i] = q * Pd[li, i]
            for j in range(nd):
                bpart = bbits[li, j] << n1
                qpj = qp[j]
                for w in range(nh):
                    base = qpj + p * P1[li, w]
                    cnt_lt = 0
                    cnt_le = 0
                    for i in range(nd):
                        v = qp[i] + base
                        if v < 0:
                            cnt_lt += 1
                            cnt_le += 1
                        elif v == 0:
                            cnt_le += 1
                    tail = bpart | hbits[li, w]
                    if cnt_le:
                        keys_w[li, j, w] = (prefix[li, cnt_le] << shift) | tail
                    else:
                        keys_w[li, j, w] = -1
                    if cnt_lt:
                        keys_s[li, j, w] = (prefix[li, cnt_lt] << shift) | tail
                    else:
                        keys_s[li, j, w] = -1

    @njit(cache=True)
    def _dedup_kernel(keys, table, out):
        cap = table.shape[0]
        mask = cap - 1
        mult = 0x9E3779B97F4A7C15 - (1 << 64)  # same bits as int64
        n = 0
        flat = keys.ravel()
        for idx in range(flat.shape[0]):
            x = flat[idx]
            if x < 0:
                continue
            pos = (x * mult) & mask  # int64 wraparound hashing
            while True:
                cur = table[pos]
                if cur == x:
                    break
                if cur == -1:
                    table[pos] = x
                    out[n] = x
                    n += 1
                    break
                pos = (pos + 1) & mask
        return n


class FamilyKeySweep:
    """Per-slope maximal-family fingerprints for k=2, m=1.

    A family is fingerprinted by integer bitmasks (V, B, H) over the degree-d
    and degree-1 lattices; V-sets are threshold cuts in the pairing order,
    realized through per-1-PS prefix masks.  A jitted kernel evaluates all
    (1-PS, witness) combinations per slope; a numpy path serves as fallback.
    """

    def __init__(self, n: int, d: int, fset: FundamentalSet):
        self.n, self.d = n, d
        xi_d = exponent_vectors(n, d)
        xi_1 = exponent_vectors(n, 1)
        self.nd, self.n1 = len(xi_d), len(xi_1)
        if 2 * self.nd + self.n1 > 62:
            raise ValueError("lattice too large for bitmask fingerprints")
        W = fset.weight_matrix()
        self.Pd = np.ascontiguousarray(W @ np.array(xi_d, dtype=np.int64).T)
        self.P1 = np.ascontiguousarray(W @ np.array(xi_1, dtype=np.int64).T)
        self.pair_bound = int(np.abs(self.Pd).max() + np.abs(self.P1).max())

        pow_d = (1 << np.arange(self.nd, dtype=np.int64))
        pow_1 = (1 << np.arange(self.n1, dtype=np.int64))
        self.bbits = (self.Pd[:, None, :] <= self.Pd[:, :, None]) @ pow_d
        self.hbits = (self.P1[:, None, :] <= self.P1[:, :, None]) @ pow_1

        order = np.argsort(self.Pd, axis=1, kind="stable")
        npts = len(W)
        pm = np.zeros((npts, self.nd + 1), dtype=np.int64)
        for c in range(self.nd):
            pm[:, c + 1] = pm[:, c] | (1 << order[:, c])
        self.prefix = pm
        shape = (npts, self.nd, self.n1)
        self._keys_w = np.empty(shape, dtype=np.int64)
        self._keys_s = np.empty(shape, dtype=np.int64)
        self._table = np.empty(1 << 18, dtype=np.int64)
        self._out = np.empty(1 << 16, dtype=np.int64)

    def families_at(self, t: Fraction):
        """Maximal weak and strict family fingerprints at slope t.

        Returns two sorted tuples of (V, B, H) bitmask triples, the two
        degree-d components slot-sorted, each collection filtered to its
        maximal elements under containment with free CI slot order.
        """
        q, p = t.denominator, t.numerator
        if (q + p) * self.pair_bound >= 2 ** 61:
            raise OverflowError("slope denominator too large for the sweep")
        if _HAVE_NUMBA:
            _sweep_kernel(self.Pd, self.P1, self.prefix, self.bbits,
                          self.hbits, q, p, self.nd + self.n1, self.n1,
                          self._keys_w, self._keys_s)
            out = []
            for keys in (self._keys_w, self._keys_s):
                self._table.fill(-1)
                cnt = _dedup_kernel(keys, self._table, self._out)
                out.append(self._maximal(self._out[:cnt]))
            return tuple(out)
        return (self._maximal(self._numpy_keys(q, p, weak=True)),
                self._maximal(self._numpy_keys(q, p, weak=False)))

    def _numpy_keys(self, q, p, weak: bool):
        npts = self.Pd.shape[0]
        found = []
        chunk = max(1, 2 ** 24 // (self.nd * self.n1 * self.nd))
        lam_idx = np.arange(npts)
        for lo in range(0, npts, chunk):
            hi = min(npts, lo + chunk)
            S = self.Pd[lo:hi, :, None] + self.Pd[lo:hi, None, :]
            X = q * S[:, :, None, :] + p * self.P1[lo:hi, None, :, None]
            cnt = (X <= 0).sum(axis=-1) if weak else (X < 0).sum(axis=-1)
            vbits = self.prefix[lam_idx[lo:hi, None, None], cnt]
            keys = ((vbits << (self.nd + self.n1))
                    | (self.bbits[lo:hi, :, None] << self.n1)
                    | self.hbits[lo:hi, None, :])
            keys[vbits == 0] = -1
            found.append(np.unique(keys))
        return np.unique(np.concatenate(found))

    def _decode_canonical(self, keys):
        keys = np.asarray(keys, dtype=np.int64)
        keys = keys[keys >= 0]
        v = keys >> (self.nd + self.n1)
        b = (keys >> self.n1) & ((1 << self.nd) - 1)
        h = keys & ((1 << self.n1) - 1)
        lo, hi = np.minimum(v, b), np.maximum(v, b)
        trip = np.unique(np.stack([lo, hi, h], axis=1), axis=0)
        return trip

    def _maximal(self, keys):
        trip = self._decode_canonical(keys)
        if len(trip) == 0:
            return tuple()
        v, b, h = trip[:, 0], trip[:, 1], trip[:, 2]
        in_h = (h[:, None] & ~h[None, :]) == 0
        c1 = (((v[:, None] & ~v[None, :]) == 0)
              & ((b[:, None] & ~b[None, :]) == 0))
        c2 = (((v[:, None] & ~b[None, :]) == 0)
              & ((b[:, None] & ~v[None, :]) == 0))
        dom = in_h & (c1 | c2)
        np.fill_diagonal(dom, False)
        keep = ~dom.any(axis=1)
        return tuple(map(tuple, trip[keep].tolist()))


def _triples_leq(fams_a, fams_b) -> bool:
    """Every (V,B,H) triple of a is componentwise inside some triple of b."""
    for (v, b, h) in fams_a:
        hit = False
        for (v2, b2, h2) in fams_b:
            if h & ~h2:
                continue
            if ((v & ~v2) == 0 and (b & ~b2) == 0) or \
               ((v & ~b2) == 0 and (b & ~v2) == 0):
                hit = True
                break
        if not hit:
            return False
    return True


def _prune_rule(wall_fams, chamber_fams) -> Optional[str]:
    """Which pruning sub-rule fires for this wall, if any.

    "identical": wall and preceding chamber emit the same family sets;
    "contained": the two collections contain each other componentwise, so
    crossing the candidate changes no destabilized locus.
    Both weak and strict collections are compared.
    """
    if wall_fams == chamber_fams:
        return "identical"
    (ww, ws), (cw, cs) = wall_fams, chamber_fams
    if (_triples_leq(ww, cw) and _triples_leq(cw, ww)
            and _triples_leq(ws, cs) and _triples_leq(cs, ws)):
        return "contained"
    return None


@dataclass
class TPoint:
    """Families computed at one parameter value (a wall or a chamber rep)."""

    t: Fraction
    kind: str                      # "wall" or "chamber"
    weak: list = field(default_factory=list)
    strict: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    annihilators: list = field(default_factory=list)


@dataclass
class WallChamberDecomposition:
    n: int
    d: int
    k: int
    candidate_walls: list
    surviving_walls: list
    pruned_walls: list             # (t, rule) pairs
    chamber_reps: list
    wall_points: dict              # t -> TPoint for surviving walls
    chamber_points: dict           # t -> TPoint for final chamber reps
    fset_digest: str
    prune_enabled: bool


def _families_at(n, d, k, t, kind_label, fset) -> TPoint:
    weak = maximal_families(n, d, k, 1, [t], WEAK, fset)
    strict = maximal_families(n, d, k, 1, [t], STRICT, fset)
    return TPoint(t=t, kind=kind_label, weak=weak, strict=strict)


def _classify_point(point: TPoint, fset) -> None:
    for fam in point.weak:
        point.verdicts[fam.canonical_key()] = classify_family(fam, fset)
    point.annihilators = annihilator_candidates(point.weak, fset)


def _midpoint(lo: Fraction, hi: Fraction) -> Fraction:
    return (lo + hi) / 2


def pipeline(n: int, d: int, k: int, prune: bool = True,
             chamber_overrides: Optional[dict] = None,
             fset: Optional[FundamentalSet] = None,
             classify: bool = True) -> WallChamberDecomposition:
    """Full m=1 wall-and-chamber computation.

    Candidate walls -> family fingerprints at every candidate and gap
    midpoint -> heuristic pruning -> chamber representatives -> full family
    objects, verdicts and annihilator candidates at the surviving walls and
    chambers.  Deterministic end to end.
    """
    if fset is None:
        fset = fundamental_set(n, k, d, 1)
    cands = candidate_walls(n, d, k, fset)

    pruned, surviving = [], []
    if prune and k == 2 and len(cands) > 1:
        sweep = FamilyKeySweep(n, d, fset)
        surviving.append(cands[0])
        below = sweep.families_at(_midpoint(cands[0], cands[1]))
        for i, t in enumerate(cands[1:], start=1):
            at_wall = sweep.families_at(t)
            rule = _prune_rule(at_wall, below)
            if rule is None:
                surviving.append(t)
            else:
                pruned.append((t, rule))
            if i < len(cands) - 1:
                below = sweep.families_at(_midpoint(t, cands[i + 1]))
    elif prune and len(cands) > 1:
        surviving.append(cands[0])
        below_pt = _families_at(n, d, k, _midpoint(cands[0], cands[1]),
                                "chamber", fset)
        for i, t in enumerate(cands[1:], start=1):
            wall_pt = _families_at(n, d, k, t, "wall", fset)
            rule = _point_rule(wall_pt, below_pt)
            if rule is None:
                surviving.append(t)
            else:
                pruned.append((t, rule))
            if i < len(cands) - 1:
                below_pt = _families_at(n, d, k, _midpoint(t, cands[i + 1]),
                                        "chamber", fset)
    else:
        surviving = list(cands)

    wall_points = {t: _families_at(n, d, k, t, "wall", fset)
                   for t in surviving}
    chamber_reps = []
    chamber_points = {}
    for lo, hi in zip(surviving, surviving[1:]):
        rep = _midpoint(lo, hi)
        if chamber_overrides and (lo, hi) in chamber_overrides:
            rep = Fraction(chamber_overrides[(lo, hi)])
            if not lo < rep < hi:
                raise ValueError(f"override {rep} not inside ({lo}, {hi})")
        chamber_reps.append(rep)
        chamber_points[rep] = _families_at(n, d, k, rep, "chamber", fset)

    if classify:
        for point in wall_points.values():
            _classify_point(point, fset)
        for point in chamber_points.values():
            _classify_point(point, fset)

    return WallChamberDecomposition(
        n=n, d=d, k=k,
        candidate_walls=cands,
        surviving_walls=surviving,
        pruned_walls=pruned,
        chamber_reps=chamber_reps,
        wall_points=wall_points,
        chamber_points=chamber_points,
        fset_digest=fset.digest(),
        prune_enabled=prune,
    )


def _point_rule(wall_pt: TPoint, below_pt: TPoint) -> Optional[str]:
    """Pruning rule on full family objects (general-k fallback path)."""
    def keys(point):
        return ({f.canonical_key() for f in point.weak},
                {f.canonical_key() for f in point.strict})

    def leq(fa, fb):
        return all(any(g.contains_family(f) for g in fb) for f in fa)

    if keys(wall_pt) == keys(below_pt):
        return "identical"
    if (leq(wall_pt.weak, below_pt.weak) and leq(below_pt.weak, wall_pt.weak)
            and leq(wall_pt.strict, below_pt.strict)
            and leq(below_pt.strict, wall_pt.strict)):
        return "contained"
    return None
