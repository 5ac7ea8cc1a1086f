"""Dense univariate polynomials and truncated power series over an exact field.

Polynomials are plain lists of coefficients in ascending degree; the zero
polynomial is the empty list.  These helpers back the function-field side
(branch expansions, norms, divisor extraction) and binary-form manipulation
for parametrised curves.
"""

from __future__ import annotations

import random
from math import comb
from typing import Sequence


def trim(field, f: Sequence) -> list:
    f = list(f)
    while f and field.is_zero(f[-1]):
        f.pop()
    return f


def degree(field, f) -> int:
    """Degree, with -1 for the zero polynomial."""
    return len(trim(field, f)) - 1


def add(field, f, g) -> list:
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else field.zero
        b = g[i] if i < len(g) else field.zero
        out.append(field.add(a, b))
    return trim(field, out)


def sub(field, f, g) -> list:
    return add(field, f, [field.neg(x) for x in g])


def scale(field, f, c) -> list:
    return trim(field, [field.mul(c, x) for x in f])


def mul(field, f, g) -> list:
    f, g = trim(field, f), trim(field, g)
    if not f or not g:
        return []
    out = [field.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if field.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return trim(field, out)


def divmod_poly(field, f, g):
    g = trim(field, g)
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(trim(field, f))
    q = [field.zero] * max(0, len(r) - len(g) + 1)
    inv_lead = field.inv(g[-1])
    while len(r) >= len(g):
        c = field.mul(r[-1], inv_lead)
        d = len(r) - len(g)
        q[d] = c
        for i, b in enumerate(g):
            r[d + i] = field.sub(r[d + i], field.mul(c, b))
        r = trim(field, r)
        if not r:
            break
    return trim(field, q), r


def gcd(field, f, g) -> list:
    a, b = trim(field, f), trim(field, g)
    while b:
        a, b = b, divmod_poly(field, a, b)[1]
    if a:
        a = scale(field, a, field.inv(a[-1]))
    return a


def evaluate(field, f, x):
    acc = field.zero
    for c in reversed(trim(field, f)):
        acc = field.add(field.mul(acc, x), c)
    return acc


def diff(field, f) -> list:
    return trim(field, [field.mul(field(i), c) for i, c in enumerate(f)][1:])


def monic(field, f) -> list:
    f = trim(field, f)
    if not f:
        return f
    return scale(field, f, field.inv(f[-1]))


def is_squarefree(field, f) -> bool:
    return degree(field, gcd(field, f, diff(field, f))) <= 0


def from_roots(field, roots) -> list:
    out = [field.one]
    for r in roots:
        out = mul(field, out, [field.neg(r), field.one])
    return out


def shift(field, f, x0) -> list:
    """Taylor shift: coefficients of f(x0 + t) as a polynomial in t."""
    f = trim(field, f)
    n = len(f)
    out = [field.zero] * max(n, 1)
    for i, c in enumerate(f):
        if field.is_zero(c):
            continue
        # c * (x0 + t)^i expanded by binomials
        power = field.one
        for k in range(i, -1, -1):
            coef = field.mul(c, field.mul(field(comb(i, k)), power))
            out[k] = field.add(out[k], coef)
            power = field.mul(power, x0)
    return trim(field, out)


def order_at(field, f, x0) -> int:
    """Multiplicity of x0 as a root of f (0 when f(x0) != 0)."""
    f = trim(field, f)
    if not f:
        raise ValueError("order of the zero polynomial")
    shifted = shift(field, f, x0)
    for i, c in enumerate(shifted):
        if not field.is_zero(c):
            return i
    raise AssertionError("non-zero polynomial with no non-zero coefficient")


def powmod(field, f, e: int, modulus) -> list:
    result = [field.one]
    base = divmod_poly(field, f, modulus)[1]
    while e:
        if e & 1:
            result = divmod_poly(field, mul(field, result, base), modulus)[1]
        base = divmod_poly(field, mul(field, base, base), modulus)[1]
        e >>= 1
    return result


def roots_fp(field, f, rng: random.Random) -> list:
    """All roots of f in F_p (each once), by equal-degree splitting."""
    p = field.p
    f = monic(field, f)
    if degree(field, f) <= 0:
        return []
    # product of the distinct linear factors: gcd(f, x^p - x)
    xp = powmod(field, [0, 1], p, f)
    linear_part = gcd(field, f, sub(field, xp, [0, 1]))
    roots = []

    def split(g):
        d = degree(field, g)
        if d == 0:
            return
        if d == 1:
            roots.append(field.mul(field.neg(g[0]), field.inv(g[1])))
            return
        while True:
            a = field(rng.randrange(p))
            h = powmod(field, [a, 1], (p - 1) // 2, g)
            h = sub(field, h, [field.one])
            w = gcd(field, g, h)
            if 0 < degree(field, w) < d:
                split(w)
                split(divmod_poly(field, g, w)[0])
                return

    split(linear_part)
    roots.sort()
    return roots


# ---------------------------------------------------------------------------
# truncated power series (lists of length = number of kept coefficients)


def series_mul(field, f, g, nterms: int) -> list:
    out = [field.zero] * nterms
    for i, a in enumerate(f[:nterms]):
        if field.is_zero(a):
            continue
        for j, b in enumerate(g[: nterms - i]):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return out


def series_sqrt(field, u, y0, nterms: int) -> list:
    """Series y with y^2 = u (mod t^nterms) and y(0) = y0; needs y0^2 = u(0) != 0."""
    u = list(u[:nterms]) + [field.zero] * max(0, nterms - len(u))
    if field.is_zero(y0) or not field.is_zero(field.sub(field.mul(y0, y0), u[0])):
        raise ValueError("series square root needs an invertible consistent start")
    y = [field.zero] * nterms
    y[0] = y0
    inv_2y0 = field.inv(field.add(y0, y0))
    for n in range(1, nterms):
        conv = field.zero
        for i in range(1, n):
            conv = field.add(conv, field.mul(y[i], y[n - i]))
        y[n] = field.mul(field.sub(u[n], conv), inv_2y0)
    return y


# ---------------------------------------------------------------------------
# binary forms: degree-d homogeneous polynomials in (s, t), stored as the
# d+1 coefficients of s^(d-i) t^i


def binary_eval(field, coeffs, s, t):
    d = len(coeffs) - 1
    acc = field.zero
    sp = [field.one]
    tp = [field.one]
    for _ in range(d):
        sp.append(field.mul(sp[-1], s))
        tp.append(field.mul(tp[-1], t))
    for i, c in enumerate(coeffs):
        acc = field.add(acc, field.mul(c, field.mul(sp[d - i], tp[i])))
    return acc


def binary_mul(field, f, g) -> list:
    df, dg = len(f) - 1, len(g) - 1
    out = [field.zero] * (df + dg + 1)
    for i, a in enumerate(f):
        if field.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = field.add(out[i + j], field.mul(a, b))
    return out


def binary_is_zero(field, f) -> bool:
    return all(field.is_zero(c) for c in f)


def binary_order_at_param(field, coeffs, s, t) -> int:
    """Vanishing order of a binary form at the parameter [s : t]."""
    if binary_is_zero(field, coeffs):
        raise ValueError("zero binary form")
    d = len(coeffs) - 1
    if field.is_zero(s):
        # local parameter at [0:1] is s; F(s, 1) = sum c_i s^(d-i)
        top = max(i for i, c in enumerate(coeffs) if not field.is_zero(c))
        return d - top
    # dehomogenise at s: p(t') for t' = t/s, then order at the affine root
    poly = list(coeffs)
    x0 = field.div(t, s)
    return order_at(field, poly, x0)
