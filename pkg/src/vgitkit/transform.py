"""Exact polynomial coordinate changes, used by the instability probing mode."""

from __future__ import annotations

from fractions import Fraction

from .monomials import mono_mul


def poly_mul(p: dict, q: dict) -> dict:
    out = {}
    for ma, ca in p.items():
        for mb, cb in q.items():
            key = mono_mul(ma, mb)
            c = out.get(key, 0) + ca * cb
            if c:
                out[key] = c
            else:
                out.pop(key, None)
    return out


def substitute(poly: dict, matrix) -> dict:
    """Apply x_j -> sum_l matrix[j][l] * x_l to a monomial->coeff dict."""
    nv = len(matrix)
    unit = tuple([0] * nv)
    linear = []
    for j in range(nv):
        row = {}
        for l, c in enumerate(matrix[j]):
            if c:
                mono = tuple(1 if i == l else 0 for i in range(nv))
                row[mono] = Fraction(c)
        linear.append(row)
    out = {}
    for mono, coeff in poly.items():
        term = {unit: Fraction(coeff)}
        for j, e in enumerate(mono):
            for _ in range(e):
                term = poly_mul(term, linear[j])
        for key, c in term.items():
            acc = out.get(key, 0) + c
            if acc:
                out[key] = acc
            else:
                out.pop(key, None)
    return out


def exact_det(matrix) -> Fraction:
    """Fraction-free style Gaussian determinant, exact over the rationals."""
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def random_coordinate_change(n: int, rng):
    """Random invertible (n+1)x(n+1) integer matrix with small entries."""
    while True:
        mat = [[rng.randint(-2, 2) for _ in range(n + 1)] for _ in range(n + 1)]
        if exact_det(mat) != 0:
            return mat


def _instantiate(support, coeffs, rng):
    if coeffs is not None:
        return dict(coeffs)
    return {mono: Fraction(rng.randint(1, 7)) for mono in sorted(support)}


def transform_config(config, matrix, rng):
    """Apply a coordinate change to a config, instantiating coefficients."""
    from .stability import TupleConfig

    new_ci, new_ci_coeffs = [], []
    for i, support in enumerate(config.ci_supports):
        coeffs = config.ci_coeffs[i] if config.ci_coeffs else None
        poly = substitute(_instantiate(support, coeffs, rng), matrix)
        if not poly:
            raise ValueError("coordinate change annihilated a form")
        new_ci.append(frozenset(poly))
        new_ci_coeffs.append(poly)
    new_hyp, new_hyp_coeffs = [], []
    for p, support in enumerate(config.hyp_supports):
        coeffs = config.hyp_coeffs[p] if config.hyp_coeffs else None
        poly = substitute(_instantiate(support, coeffs, rng), matrix)
        if not poly:
            raise ValueError("coordinate change annihilated a hyperplane")
        new_hyp.append(frozenset(poly))
        new_hyp_coeffs.append(poly)
    return TupleConfig.create(
        config.n, config.d, config.k, config.m,
        new_ci, new_hyp,
        ci_coeffs=tuple(new_ci_coeffs), hyp_coeffs=tuple(new_hyp_coeffs),
    )
