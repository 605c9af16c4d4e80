"""Semi-destabilizing families: strict, weak and annihilator Cartesian products.

A family is a product V x B_1 x ... x B_{k-1} x H_1 x ... x H_m of monomial
sets attached to a 1-PS lam and witness monomials: every tuple drawn one from
each component has total slope-weighted pairing < 0 (strict), <= 0 (weak) or
== 0 (annihilator).  Down-sets are pairing-closed: whenever a monomial is
included, so is every monomial of equal pairing, which is what makes the
annihilator product characterization exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .monomials import exponent_vectors, pairing
from .oneps import FundamentalSet, fundamental_set
from .stability import DegenerateWedgeError, Slope, TupleConfig, centroid_criterion

STRICT = "strict"
WEAK = "weak"
ANN = "ann"

_OPS = {STRICT: "<", WEAK: "<="}


@dataclass(frozen=True)
class DestabFamily:
    kind: str
    n: int
    d: int
    k: int
    m: int
    t: Slope
    lam: tuple
    witnesses_d: tuple   # k-1 degree-d monomials
    witnesses_h: tuple   # m degree-1 monomials
    v_set: frozenset
    b_sets: tuple        # k-1 frozensets of degree-d monomials
    h_sets: tuple        # m frozensets of degree-1 monomials

    @property
    def ci_components(self) -> tuple:
        return (self.v_set,) + self.b_sets

    def canonical_key(self):
        comps = tuple(sorted(tuple(sorted(c)) for c in self.ci_components))
        hs = tuple(tuple(sorted(h)) for h in self.h_sets)
        return (self.kind, comps, hs)

    def contains_family(self, other: "DestabFamily") -> bool:
        """Componentwise containment, slot order of the CI components free."""
        if self.m != other.m or self.k != other.k:
            return False
        if any(not oh <= sh for oh, sh in zip(other.h_sets, self.h_sets)):
            return False
        mine = self.ci_components
        for perm in itertools.permutations(range(self.k)):
            if all(other.ci_components[i] <= mine[perm[i]] for i in range(self.k)):
                return True
        return False

    def contains_config(self, config: TupleConfig) -> bool:
        """Does the family contain every tuple with these supports?"""
        if config.k != self.k or config.m != self.m:
            return False
        if any(not hs <= fh for hs, fh in zip(config.hyp_supports, self.h_sets)):
            return False
        comps = self.ci_components
        for perm in itertools.permutations(range(self.k)):
            if all(config.ci_supports[i] <= comps[perm[i]] for i in range(self.k)):
                return True
        return False

    def generic_member(self) -> TupleConfig:
        return TupleConfig.create(self.n, self.d, self.k, self.m,
                                  self.ci_components, self.h_sets)


def build_family(kind: str, lam, witnesses_d, witnesses_h, t,
                 n: int, d: int, k: int, m: int) -> Optional[DestabFamily]:
    """Construct the family attached to (lam, witnesses) at slope t.

    Returns None when the V-set comes out empty (callers discard those).
    Witnesses of equal pairing yield identical families; degree-d witnesses
    must be pairwise distinct.
    """
    if kind not in (STRICT, WEAK, ANN):
        raise ValueError(f"unknown family kind {kind!r}")
    t = Slope(t)
    witnesses_d = tuple(tuple(w) for w in witnesses_d)
    witnesses_h = tuple(tuple(w) for w in witnesses_h)
    if len(witnesses_d) != k - 1 or len(witnesses_h) != m or len(t) != m:
        raise ValueError("witness/slope counts must match k-1 and m")
    if len(set(witnesses_d)) != len(witnesses_d):
        raise ValueError("degree-d witnesses must be pairwise distinct")
    xi_d = exponent_vectors(n, d)
    xi_1 = exponent_vectors(n, 1)
    pd = {mono: pairing(mono, lam) for mono in xi_d}
    p1 = {mono: pairing(mono, lam) for mono in xi_1}

    wsum = sum(pd[w] for w in witnesses_d) + sum(
        tp * p1[x] for tp, x in zip(t, witnesses_h))
    if kind == STRICT:
        v = frozenset(I for I in xi_d if pd[I] + wsum < 0)
    else:
        v = frozenset(I for I in xi_d if pd[I] + wsum <= 0)
    b_sets = tuple(frozenset(J for J in xi_d if pd[J] <= pd[w])
                   for w in witnesses_d)
    h_sets = tuple(frozenset(x for x in xi_1 if p1[x] <= p1[w])
                   for w in witnesses_h)
    if kind == ANN:
        v = frozenset(I for I in v if pd[I] + wsum == 0)
        b_sets = tuple(frozenset(J for J in bs if pd[J] == pd[w])
                       for bs, w in zip(b_sets, witnesses_d))
        h_sets = tuple(frozenset(x for x in hs if p1[x] == p1[w])
                       for hs, w in zip(h_sets, witnesses_h))
    if not v:
        return None
    fam = DestabFamily(kind=kind, n=n, d=d, k=k, m=m, t=t, lam=tuple(lam),
                       witnesses_d=witnesses_d, witnesses_h=witnesses_h,
                       v_set=v, b_sets=b_sets, h_sets=h_sets)
    assert all(w in bs for w, bs in zip(witnesses_d, fam.b_sets))
    assert all(w in hs for w, hs in zip(witnesses_h, fam.h_sets))
    return fam


def annihilator(fam: DestabFamily) -> Optional[DestabFamily]:
    """The annihilator refinement of a weak family; None when empty."""
    if fam.kind != WEAK:
        raise ValueError("annihilators refine weak families")
    ann = build_family(ANN, fam.lam, fam.witnesses_d, fam.witnesses_h, fam.t,
                       fam.n, fam.d, fam.k, fam.m)
    return ann


def _dedupe_keep_first(fams):
    seen = {}
    for fam in fams:
        seen.setdefault(fam.canonical_key(), fam)
    return list(seen.values())


def _maximal_filter(fams) -> list:
    fams = _dedupe_keep_first(fams)
    out = []
    for f in fams:
        if not any(g is not f and g.contains_family(f) and
                   g.canonical_key() != f.canonical_key() for g in fams):
            out.append(f)
    return sorted(out, key=lambda f: f.canonical_key())


def maximal_families(n: int, d: int, k: int, m: int, t, kind: str,
                     fset: Optional[FundamentalSet] = None) -> list:
    """Enumerate families over the fundamental set, keep the maximal ones.

    Families are deduplicated exactly (canonical component order) and
    filtered by componentwise containment with free CI slot order.
    """
    if kind not in (STRICT, WEAK):
        raise ValueError("enumerate strict or weak families; annihilators refine weak")
    t = Slope(t)
    if len(t) != m:
        raise ValueError(f"slope has {len(t)} entries, expected m={m}")
    if fset is None:
        fset = fundamental_set(n, k, d, m)
    xi_d = exponent_vectors(n, d)
    if k == 2 and m == 1 and 2 * len(xi_d) + (n + 1) <= 62:
        fams = _enumerate_k2m1(n, d, t, kind, fset)
    else:
        fams = _enumerate_generic(n, d, k, m, t, kind, fset)
    return _maximal_filter(fams)


def _enumerate_generic(n, d, k, m, t, kind, fset):
    xi_d = exponent_vectors(n, d)
    xi_1 = exponent_vectors(n, 1)
    fams = []
    for lam in fset:
        pd = {mono: pairing(mono, lam) for mono in xi_d}
        p1 = {mono: pairing(mono, lam) for mono in xi_1}
        # witnesses only matter through their pairing class; enumerate class
        # value multisets, realized by distinct lex-top members of each class
        classes_d, classes_1 = {}, {}
        for mono in xi_d:
            classes_d.setdefault(pd[mono], []).append(mono)
        for mono in xi_1:
            classes_1.setdefault(p1[mono], []).append(mono)
        values_d = sorted(classes_d)
        reps_1 = [members[0] for members in classes_1.values()]
        for vals in itertools.combinations_with_replacement(values_d, k - 1):
            counts = {v: vals.count(v) for v in set(vals)}
            if any(c > len(classes_d[v]) for v, c in counts.items()):
                continue
            wd = tuple(itertools.chain.from_iterable(
                classes_d[v][:c] for v, c in sorted(counts.items())))
            for wh in itertools.product(reps_1, repeat=m):
                fam = build_family(kind, lam, wd, wh, t, n, d, k, m)
                if fam is not None:
                    fams.append(fam)
    return fams


def _enumerate_k2m1(n, d, t, kind, fset):
    """Vectorized enumeration for k=2, m=1 over the whole fundamental set."""
    xi_d = exponent_vectors(n, d)
    xi_1 = exponent_vectors(n, 1)
    nd, n1 = len(xi_d), len(xi_1)
    W = fset.weight_matrix()
    Pd = W @ np.array(xi_d, dtype=np.int64).T        # (|P|, nd)
    P1 = W @ np.array(xi_1, dtype=np.int64).T        # (|P|, n1)
    tp = t[0]
    q, p = tp.denominator, tp.numerator

    pow_d = (1 << np.arange(nd, dtype=np.int64))
    pow_1 = (1 << np.arange(n1, dtype=np.int64))

    found = {}
    chunk = max(1, 2 ** 22 // (nd * n1 * nd))
    for lo in range(0, len(W), chunk):
        pd = Pd[lo:lo + chunk]
        p1 = P1[lo:lo + chunk]
        thr = -(q * pd[:, :, None] + p * p1[:, None, :])   # (c, J, w)
        lhs = q * pd                                        # (c, I)
        if kind == STRICT:
            vcond = lhs[:, None, None, :] < thr[:, :, :, None]
        else:
            vcond = lhs[:, None, None, :] <= thr[:, :, :, None]
        vbits = vcond @ pow_d                               # (c, J, w)
        bcond = pd[:, None, :] <= pd[:, :, None]            # (c, J, I)
        bbits = bcond @ pow_d                               # (c, J)
        hcond = p1[:, None, :] <= p1[:, :, None]
        hbits = hcond @ pow_1                               # (c, w)
        keys = ((vbits << (nd + n1))
                | (bbits[:, :, None] << n1)
                | hbits[:, None, :])
        keys[vbits == 0] = -1
        flat = keys.ravel()
        uniq, idx = np.unique(flat, return_index=True)
        for key, pos in zip(uniq.tolist(), idx.tolist()):
            if key < 0 or key in found:
                continue
            li, rem = divmod(pos, nd * n1)
            ji, wi = divmod(rem, n1)
            found[key] = (lo + li, xi_d[ji], xi_1[wi])
    fams = []
    for key, (li, wit_d, wit_h) in sorted(found.items()):
        fam = build_family(kind, fset.members[li], (wit_d,), (wit_h,), t,
                           n, d, 2, 1)
        assert fam is not None
        fams.append(fam)
    return fams


UNSTABLE_FAMILY = "unstable"
STRICTLY_SEMISTABLE_FAMILY = "strictly-semistable"


def classify_family(fam: DestabFamily,
                    fset: Optional[FundamentalSet] = None) -> str:
    """Centroid-criterion verdict of the family's generic member.

    A degenerate wedge (no distinct tuple across components) counts as
    unstable by convention.
    """
    try:
        member = fam.generic_member()
        verdict = centroid_criterion(member, fam.t, fset)
    except DegenerateWedgeError:
        return UNSTABLE_FAMILY
    return STRICTLY_SEMISTABLE_FAMILY if verdict == "semistable" else UNSTABLE_FAMILY


def annihilator_candidates(weak_families, fset: Optional[FundamentalSet] = None):
    """Annihilators of the strictly-semistable weak families, deduplicated.

    These are reported as candidate polystable normal forms only; the
    converse of the closed-orbit theorem can fail.
    """
    anns = []
    for fam in weak_families:
        if classify_family(fam, fset) != STRICTLY_SEMISTABLE_FAMILY:
            continue
        ann = annihilator(fam)
        if ann is not None:
            anns.append(ann)
    return _dedupe_keep_first(anns)


def permutation_orbit_representatives(fams) -> list:
    """Optional quotient by simultaneous variable permutations.

    Keeps the lexicographically least member of each orbit under relabeling
    x_i -> x_{sigma(i)} applied to every component (torus-normalizer dedup).
    """
    def permute_mono(mono, sigma):
        out = [0] * len(mono)
        for i, e in enumerate(mono):
            out[sigma[i]] = e
        return tuple(out)

    def orbit_key(fam):
        nvars = fam.n + 1
        best = None
        for sigma in itertools.permutations(range(nvars)):
            comps = tuple(sorted(
                tuple(sorted(permute_mono(mm, sigma) for mm in c))
                for c in fam.ci_components))
            hs = tuple(tuple(sorted(permute_mono(mm, sigma) for mm in h))
                       for h in fam.h_sets)
            cand = (comps, hs)
            if best is None or cand < best:
                best = cand
        return (fam.kind, best)

    seen = {}
    for fam in fams:
        seen.setdefault(orbit_key(fam), fam)
    return list(seen.values())
