"""Hilbert-Mumford weights and torus stability for CI-plus-hyperplane tuples.

The objects tested are tuples (f_1..f_k, h_1..h_m) of k degree-d forms and m
hyperplanes in P^n, represented by their monomial supports.  All weights are
exact; slopes are rational.  Verdicts are torus-relative: they quantify over
the fundamental set of one-parameter subgroups of the fixed diagonal torus in
the given coordinates, not over the full group orbit.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Optional

import numpy as np

from .exactlp import convex_combination
from .monomials import distinct_tuples, exponent_vectors, mono_mul, pairing
from .oneps import FundamentalSet, fundamental_set

TORUS_STABLE = "torus-stable"
TORUS_STRICTLY_SEMISTABLE = "torus-strictly-semistable"
TORUS_UNSTABLE = "torus-unstable"


class DegenerateWedgeError(ValueError):
    """No pairwise-distinct tuple of support monomials exists; wedge vanishes."""


class Slope(tuple):
    """Componentwise non-negative rational slope vector (t_1..t_m)."""

    def __new__(cls, values):
        if isinstance(values, (int, Fraction, str)):
            values = (values,)
        vals = tuple(Fraction(v) for v in values)
        if any(v < 0 for v in vals):
            raise ValueError(f"slope entries must be >= 0, got {vals}")
        return super().__new__(cls, vals)

    @property
    def total(self) -> Fraction:
        return sum(self, Fraction(0))


def _has_distinct_tuple(supports) -> bool:
    """Hall-style check via greedy matching with backtracking (k is small)."""
    supports = [sorted(s) for s in supports]

    def rec(i, used):
        if i == len(supports):
            return True
        for mono in supports[i]:
            if mono not in used:
                used.add(mono)
                if rec(i + 1, used):
                    return True
                used.discard(mono)
        return False

    return rec(0, set())


@dataclass(frozen=True)
class TupleConfig:
    """Supports (and optional exact coefficients) of (f_1..f_k, h_1..h_m)."""

    n: int
    d: int
    k: int
    m: int
    ci_supports: tuple       # k frozensets of degree-d exponent vectors
    hyp_supports: tuple      # m frozensets of degree-1 exponent vectors
    ci_coeffs: Optional[tuple] = None   # k dicts monomial -> Fraction
    hyp_coeffs: Optional[tuple] = None  # m dicts monomial -> Fraction

    @classmethod
    def create(cls, n, d, k, m, ci_supports, hyp_supports,
               ci_coeffs=None, hyp_coeffs=None) -> "TupleConfig":
        ci = tuple(frozenset(tuple(x) for x in s) for s in ci_supports)
        hyp = tuple(frozenset(tuple(x) for x in s) for s in hyp_supports)
        if len(ci) != k or len(hyp) != m:
            raise ValueError("support counts must match k and m")
        for s in ci:
            if not s:
                raise ValueError("empty CI support")
            for mono in s:
                if len(mono) != n + 1 or sum(mono) != d:
                    raise ValueError(f"bad degree-{d} monomial {mono}")
        for s in hyp:
            if not s:
                raise ValueError("empty hyperplane support")
            for mono in s:
                if len(mono) != n + 1 or sum(mono) != 1:
                    raise ValueError(f"bad degree-1 monomial {mono}")
        return cls(n=n, d=d, k=k, m=m, ci_supports=ci, hyp_supports=hyp,
                   ci_coeffs=ci_coeffs, hyp_coeffs=hyp_coeffs)

    def require_wedge(self) -> None:
        if not _has_distinct_tuple(self.ci_supports):
            raise DegenerateWedgeError(
                "no pairwise-distinct monomial tuple exists across the CI supports"
            )


@dataclass(frozen=True)
class StabilityVerdict:
    klass: str
    witness: Optional[tuple]       # minimizing 1-PS when not torus-stable
    mu_min: Fraction               # minimum of mu_t over the fundamental set

    def __post_init__(self):
        assert (self.witness is None) == (self.klass == TORUS_STABLE)


def mu_ci(config: TupleConfig, weights) -> int:
    """Max of sum_i <I_i, lam> over pairwise-distinct tuples, I_i in support i."""
    config.require_wedge()
    if config.k <= 3:
        best = None
        for tup in distinct_tuples(config.ci_supports):
            val = sum(pairing(mono, weights) for mono in tup)
            if best is None or val > best:
                best = val
        return best
    return _mu_ci_assignment(config.ci_supports, weights)


def _mu_ci_assignment(supports, weights) -> int:
    # distinctness makes this a max-weight assignment: slots x monomials
    from scipy.optimize import linear_sum_assignment

    pool = sorted(set().union(*supports))
    idx = {mono: j for j, mono in enumerate(pool)}
    big = -(10 ** 9)
    cost = np.full((len(supports), len(pool)), big, dtype=np.int64)
    for i, s in enumerate(supports):
        for mono in s:
            cost[i, idx[mono]] = pairing(mono, weights)
    rows, cols = linear_sum_assignment(cost, maximize=True)
    total = int(cost[rows, cols].sum())
    if total <= big // 2:
        raise DegenerateWedgeError("assignment forced a forbidden slot")
    return total


def mu_hyperplane(support, weights) -> int:
    return max(pairing(mono, weights) for mono in support)


def mu_t(config: TupleConfig, weights, t: Slope) -> Fraction:
    """mu(f_1^...^f_k, lam) + sum_p t_p * mu(H_p, lam), exact rational."""
    t = Slope(t)
    if len(t) != config.m:
        raise ValueError(f"slope has {len(t)} entries, config has m={config.m}")
    val = Fraction(mu_ci(config, weights))
    for tp, support in zip(t, config.hyp_supports):
        val += tp * mu_hyperplane(support, weights)
    return val


def _mu_vectors(config: TupleConfig, fset: FundamentalSet):
    """Integer mu_ci and per-hyperplane max pairings over all fundamental 1-PS."""
    W = fset.weight_matrix()
    ci_pairs = []
    for s in config.ci_supports:
        S = np.array(sorted(s), dtype=np.int64)
        ci_pairs.append(W @ S.T)            # (|P|, |s|)
    if config.k <= 3:
        sorted_supports = [sorted(s) for s in config.ci_supports]
        best = None
        for tup in distinct_tuples(sorted_supports):
            total = sum(ci_pairs[i][:, sorted_supports[i].index(mono)]
                        for i, mono in enumerate(tup))
            best = total if best is None else np.maximum(best, total)
        if best is None:
            raise DegenerateWedgeError(
                "no pairwise-distinct monomial tuple exists across the CI supports"
            )
        mu = best
    else:
        mu = np.array([_mu_ci_assignment(config.ci_supports, w) for w in fset],
                      dtype=np.int64)
    hyp = [P.max(axis=1) for P in
           (W @ np.array(sorted(s), dtype=np.int64).T for s in config.hyp_supports)]
    return mu, hyp


def classify_torus(config: TupleConfig, t, fset: Optional[FundamentalSet] = None,
                   probe: int = 0, seed: int = 0) -> StabilityVerdict:
    """Sign of min over the fundamental set of mu_t; torus-relative verdict.

    With probe > 0, that many random invertible rational coordinate changes
    are applied first (instantiating random coefficients when the config
    carries none); probing can only strengthen instability detection, never
    upgrade a verdict towards stability.
    """
    t = Slope(t)
    config.require_wedge()
    if fset is None:
        fset = fundamental_set(config.n, config.k, config.d, config.m)
    verdict = _classify_on_torus(config, t, fset)
    if probe > 0 and verdict.klass != TORUS_UNSTABLE:
        rng = random.Random(seed)
        from .transform import random_coordinate_change, transform_config
        for _ in range(probe):
            g = random_coordinate_change(config.n, rng)
            moved = transform_config(config, g, rng)
            probed = _classify_on_torus(moved, t, fset)
            if probed.klass == TORUS_UNSTABLE:
                return probed
    return verdict


def _classify_on_torus(config, t, fset) -> StabilityVerdict:
    mu, hyp = _mu_vectors(config, fset)
    den = reduce(lcm, (tp.denominator for tp in t), 1)
    scaled = mu * den
    for tp, h in zip(t, hyp):
        scaled = scaled + int(tp * den) * h
    mn = int(scaled.min())
    mu_min = Fraction(mn, den)
    if mn > 0:
        return StabilityVerdict(TORUS_STABLE, None, mu_min)
    minimizers = [fset.members[i] for i in np.nonzero(scaled == mn)[0].tolist()]
    witness = min(minimizers)
    klass = TORUS_STRICTLY_SEMISTABLE if mn == 0 else TORUS_UNSTABLE
    return StabilityVerdict(klass, witness, mu_min)


def stability_interval(config: TupleConfig, fset: Optional[FundamentalSet] = None):
    """Intersection over the fundamental set of {t : mu_t >= 0}, clipped.

    Returns (lo, hi) as exact rationals within [0, kd/n], or None when empty.
    Only defined for m = 1.
    """
    if config.m != 1:
        raise ValueError("stability intervals are defined for m = 1 only")
    config.require_wedge()
    if fset is None:
        fset = fundamental_set(config.n, config.k, config.d, config.m)
    mu, (hyp,) = _mu_vectors(config, fset)
    lo, hi = Fraction(0), Fraction(config.k * config.d, config.n)
    # mu + t*h >= 0 per 1-PS: a half-line in t
    for a, h in zip(mu.tolist(), hyp.tolist()):
        if h > 0:
            lo = max(lo, Fraction(-a, h))
        elif h < 0:
            hi = min(hi, Fraction(-a, h))
        elif a < 0:
            return None
        if lo > hi:
            return None
    return (lo, hi)


def centroid(n: int, d: int, k: int, m: int, t) -> tuple:
    """The constant vector ((kd + sum t_p)/(n+1), ...) on the weight hyperplane."""
    t = Slope(t)
    if len(t) != m:
        raise ValueError(f"slope has {len(t)} entries, expected m={m}")
    c = Fraction(k * d + t.total, n + 1)
    return (c,) * (n + 1)


def hull_points(config: TupleConfig, t) -> list:
    """Exponent-sum points A((I_1..I_k), x_l's) over distinct CI tuples.

    Hyperplane monomials range over the whole support of each h_p (union
    reading of the criterion), each adding t_p at its coordinate.
    """
    t = Slope(t)
    pts = set()
    hyp_choices = [sorted(s) for s in config.hyp_supports]
    for tup in distinct_tuples(config.ci_supports):
        base = reduce(mono_mul, tup)
        for hyp_tup in itertools.product(*hyp_choices):
            pt = list(map(Fraction, base))
            for tp, mono in zip(t, hyp_tup):
                pos = mono.index(1)
                pt[pos] += tp
            pts.add(tuple(pt))
    if not pts:
        raise DegenerateWedgeError(
            "no pairwise-distinct monomial tuple exists across the CI supports"
        )
    return sorted(pts)


def centroid_criterion(config: TupleConfig, t,
                       fset: Optional[FundamentalSet] = None) -> str:
    """Three-way verdict {stable, semistable, unstable} via the hull test.

    Semistability is decided by exact rational feasibility (centroid in the
    convex hull of the exponent points); stability by the strict
    fundamental-set sign test, the two being equivalent on the torus.
    """
    t = Slope(t)
    c = centroid(config.n, config.d, config.k, config.m, t)
    pts = hull_points(config, t)
    if convex_combination(pts, c) is None:
        return "unstable"
    if fset is None:
        fset = fundamental_set(config.n, config.k, config.d, config.m)
    verdict = _classify_on_torus(config, t, fset)
    return "stable" if verdict.klass == TORUS_STABLE else "semistable"
