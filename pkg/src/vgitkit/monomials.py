"""Degree-d monomial lattice over n+1 variables, weight pairings, lambda-order.

A monomial of degree d in variables x0..xn is stored as its exponent vector,
a tuple of n+1 non-negative integers summing to d.  A one-parameter subgroup
weight vector pairs with it via the dot product <I, lam> = sum d_i * mu_i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

Monomial = tuple  # exponent vector, tuple of non-negative ints


class DimensionMismatchError(ValueError):
    """Raised when a monomial and a weight vector have different lengths."""


def exponent_vectors(n: int, d: int) -> list[Monomial]:
    """All degree-d exponent vectors over n+1 variables, lex-sorted descending.

    Lex convention: compare left-to-right, larger exponent first wins, so the
    list starts at x0^d and ends at xn^d.
    """
    if n < 0 or d < 0:
        raise ValueError(f"need n >= 0 and d >= 0, got n={n}, d={d}")

    def rec(nv: int, deg: int):
        if nv == 0:
            yield (deg,)
            return
        for e0 in range(deg, -1, -1):
            for rest in rec(nv - 1, deg - e0):
                yield (e0,) + rest

    return list(rec(n, d))


@dataclass(frozen=True)
class MonomialLattice:
    """The set Xi_d of all degree-d monomials in x0..xn, in canonical order."""

    n: int
    d: int
    members: tuple

    @classmethod
    def create(cls, n: int, d: int) -> "MonomialLattice":
        if n < 1 or d < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
        members = tuple(exponent_vectors(n, d))
        assert len(members) == comb(n + d, d)
        return cls(n=n, d=d, members=members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def index(self, mono: Monomial) -> int:
        return self.members.index(mono)


def pairing(mono: Monomial, weights) -> int:
    """Exact weight pairing <I, lam> = sum_i d_i * mu_i."""
    if len(mono) != len(weights):
        raise DimensionMismatchError(
            f"monomial has {len(mono)} entries, weight vector has {len(weights)}"
        )
    return sum(a * b for a, b in zip(mono, weights))


def lex_key(mono: Monomial):
    """Sort key for the descending lex order (x0^d largest)."""
    return tuple(-e for e in mono)


def lambda_key(weights):
    """Sort key realizing the lambda-order: pairing first, lex tiebreak.

    Returns a callable suitable for sorted(); larger key = larger monomial.
    a <_lam b iff <a,lam> < <b,lam>, or equal pairings and a <_lex b.
    """

    def key(mono: Monomial):
        return (pairing(mono, weights), tuple(mono))

    return key


def lambda_compare(a: Monomial, b: Monomial, weights) -> int:
    """Total-order comparison under the lambda-order: -1, 0 or +1."""
    ka, kb = lambda_key(weights)(a), lambda_key(weights)(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def render_monomial(mono: Monomial) -> str:
    """Canonical text form, e.g. (2,1,0) -> "x0^2*x1"; degree 0 -> "1"."""
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"x{i}")
        elif e > 1:
            parts.append(f"x{i}^{e}")
    return "*".join(parts) if parts else "1"


def distinct_tuples(supports) -> "itertools.product":
    """Iterate over tuples (I_1..I_k), I_i from supports[i], pairwise distinct."""
    for tup in itertools.product(*supports):
        if len(set(tup)) == len(tup):
            yield tup
