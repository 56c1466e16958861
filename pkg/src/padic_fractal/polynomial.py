"""Dense univariate polynomials with exact rational coefficients.

A polynomial is a tuple of :class:`Fraction` in increasing degree order with
no trailing zeros; ``()`` is the zero polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

Poly = tuple


def poly(coeffs: Sequence) -> Poly:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def from_terms(terms) -> Poly:
    """Build from ``[(degree, coeff), ...]`` pairs; repeated degrees add up."""
    terms = [(int(d), Fraction(c)) for d, c in terms]
    if not terms:
        return ()
    if min(d for d, _ in terms) < 0:
        raise ValueError("negative degree")
    c = [Fraction(0)] * (max(d for d, _ in terms) + 1)
    for d, a in terms:
        c[d] += a
    return poly(c)


def degree(a: Poly) -> int:
    return len(a) - 1


def add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, tuple(-x for x in b))


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly(out)


def scale(a: Poly, k) -> Poly:
    return poly([x * k for x in a])


def divmod_poly(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    for shift in range(len(a) - len(b), -1, -1):
        coef = rem[shift + len(b) - 1] / lead
        q[shift] = coef
        if coef:
            for j, y in enumerate(b):
                rem[shift + j] -= coef * y
    return poly(q), poly(rem[: len(b) - 1])


def monic(a: Poly) -> Poly:
    return scale(a, 1 / a[-1]) if a else a


def gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def derivative(a: Poly) -> Poly:
    return poly([i * a[i] for i in range(1, len(a))])


def evaluate(a: Poly, z):
    """Horner evaluation; ``z`` may be a Fraction (exact) or a float/complex."""
    if isinstance(z, (Fraction, int)):
        acc = Fraction(0)
        for c in reversed(a):
            acc = acc * z + c
        return acc
    acc = 0j if isinstance(z, complex) else 0.0
    for c in reversed(a):
        acc = acc * z + float(c)
    return acc


def low_order(a: Poly) -> int:
    """Number of leading zero coefficients, i.e. the multiplicity of the root 0."""
    k = 0
    while k < len(a) and a[k] == 0:
        k += 1
    return k


def squarefree_factors(a: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``a = c * prod(f_i**i)`` with each ``f_i`` squarefree and coprime.

    Returns the nonconstant ``(f_i, i)`` pairs.
    """
    if degree(a) < 1:
        return []
    out = []
    da = derivative(a)
    g = gcd(a, da)
    b = divmod_poly(a, g)[0]
    c = divmod_poly(da, g)[0]
    d = sub(c, derivative(b))
    i = 1
    while degree(b) >= 1:
        f = gcd(b, d)
        if degree(f) >= 1:
            out.append((f, i))
        b = divmod_poly(b, f)[0]
        c = divmod_poly(d, f)[0]
        d = sub(c, derivative(b))
        i += 1
    return out


def simple_roots(a: Poly, newton_steps: int = 8) -> np.ndarray:
    """Roots of a squarefree polynomial: companion-matrix eigenvalues, then Newton polishing."""
    if degree(a) < 1:
        return np.empty(0, dtype=complex)
    coeffs = np.array([float(x) for x in a])
    roots = np.polynomial.polynomial.polyroots(coeffs).astype(complex)
    da = derivative(a)
    polished = []
    for z in roots:
        for _ in range(newton_steps):
            fz = evaluate(a, complex(z))
            dfz = evaluate(da, complex(z))
            if dfz == 0:
                break
            step = fz / dfz
            z = z - step
            if abs(step) <= 1e-17 * max(1.0, abs(z)):
                break
        polished.append(complex(z))
    return np.array(polished, dtype=complex)
