"""Homogeneous multivariate forms with dense coefficient vectors.

The monomial order is graded lexicographic and fixed globally, so
coefficient vectors of equal (ambient, degree) are directly comparable
across modules.  Degrees stay small (at most 6) and ambients modest, so
dense vectors of length C(n+d, d) are the right trade-off.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Sequence

from thetamap.exact_core import Matrix, ProjPoint, field_from_tag, proj_point
from thetamap import polys


@lru_cache(maxsize=None)
def monomial_exponents(n: int, d: int) -> tuple:
    """Exponent tuples of the degree-d monomials in x_0..x_n, lex-descending."""
    if n < 0 or d < 0:
        raise ValueError("need n >= 0 and d >= 0")
    if n == 0:
        return ((d,),)
    out = []
    for e in range(d, -1, -1):
        for rest in monomial_exponents(n - 1, d - e):
            out.append((e,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomial_exponents(n, d))}


def monomial_count(n: int, d: int) -> int:
    return comb(n + d, d)


@dataclass(frozen=True)
class Monomial:
    exponents: tuple

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def monomial_basis(n: int, d: int) -> tuple:
    """The ordered monomial basis of degree-d forms on P^n."""
    if n < 1:
        raise ValueError("ambient projective dimension must be at least 1")
    return tuple(Monomial(e) for e in monomial_exponents(n, d))


@dataclass(frozen=True)
class Form:
    """A homogeneous polynomial of fixed degree on P^ambient."""

    field: object
    ambient: int
    degree: int
    coeffs: tuple

    def __post_init__(self):
        expected = monomial_count(self.ambient, self.degree)
        if len(self.coeffs) != expected:
            raise ValueError(
                f"degree-{self.degree} form on P^{self.ambient} needs "
                f"{expected} coefficients, got {len(self.coeffs)}"
            )

    @property
    def is_zero(self) -> bool:
        return all(self.field.is_zero(c) for c in self.coeffs)

    def evaluate(self, point):
        coords = point.coords if isinstance(point, ProjPoint) else tuple(point)
        if len(coords) != self.ambient + 1:
            raise ValueError("point/form ambient mismatch")
        f = self.field
        # shared power table keeps repeated evaluation cheap
        powers = [[f.one] for _ in coords]
        for i, x in enumerate(coords):
            for _ in range(self.degree):
                powers[i].append(f.mul(powers[i][-1], x))
        acc = f.zero
        for c, expo in zip(self.coeffs, monomial_exponents(self.ambient, self.degree)):
            if f.is_zero(c):
                continue
            term = c
            for i, e in enumerate(expo):
                if e:
                    term = f.mul(term, powers[i][e])
            acc = f.add(acc, term)
        return acc

    def partial_derivative(self, i: int) -> "Form":
        if self.degree < 1:
            raise ValueError("cannot differentiate a constant form")
        if not 0 <= i <= self.ambient:
            raise ValueError("variable index out of range")
        f = self.field
        src = monomial_exponents(self.ambient, self.degree)
        dst = monomial_index(self.ambient, self.degree - 1)
        out = [f.zero] * monomial_count(self.ambient, self.degree - 1)
        for c, expo in zip(self.coeffs, src):
            if expo[i] == 0 or f.is_zero(c):
                continue
            lowered = expo[:i] + (expo[i] - 1,) + expo[i + 1 :]
            j = dst[lowered]
            out[j] = f.add(out[j], f.mul(c, f(expo[i])))
        return Form(f, self.ambient, self.degree - 1, tuple(out))

    def scale(self, c) -> "Form":
        f = self.field
        return Form(f, self.ambient, self.degree, tuple(f.mul(c, x) for x in self.coeffs))

    def add(self, other: "Form") -> "Form":
        _check_same_space(self, other)
        f = self.field
        return Form(
            f, self.ambient, self.degree,
            tuple(f.add(a, b) for a, b in zip(self.coeffs, other.coeffs)),
        )

    def mul(self, other: "Form") -> "Form":
        if self.ambient != other.ambient or self.field != other.field:
            raise ValueError("form ambient/field mismatch")
        f = self.field
        d = self.degree + other.degree
        idx = monomial_index(self.ambient, d)
        out = [f.zero] * monomial_count(self.ambient, d)
        src_a = monomial_exponents(self.ambient, self.degree)
        src_b = monomial_exponents(self.ambient, other.degree)
        for ca, ea in zip(self.coeffs, src_a):
            if f.is_zero(ca):
                continue
            for cb, eb in zip(other.coeffs, src_b):
                if f.is_zero(cb):
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                out[idx[e]] = f.add(out[idx[e]], f.mul(ca, cb))
        return Form(f, self.ambient, d, tuple(out))

    def to_jsonable(self) -> dict:
        f = self.field
        return {
            "field": f.tag,
            "ambient": self.ambient,
            "degree": self.degree,
            "coeffs": [f.format_elem(c) for c in self.coeffs],
        }

    @staticmethod
    def from_jsonable(data: dict) -> "Form":
        f = field_from_tag(data["field"])
        return Form(
            f, data["ambient"], data["degree"],
            tuple(f.parse_elem(c) for c in data["coeffs"]),
        )


def _check_same_space(a: Form, b: Form):
    if (a.ambient, a.degree) != (b.ambient, b.degree) or a.field != b.field:
        raise ValueError("forms live in different spaces")


def form_from_coeffs(field, ambient: int, degree: int, coeffs: Sequence) -> Form:
    return Form(field, ambient, degree, tuple(field(c) for c in coeffs))


def zero_form(field, ambient: int, degree: int) -> Form:
    return Form(field, ambient, degree, tuple([field.zero] * monomial_count(ambient, degree)))


def random_form(field, ambient: int, degree: int, rng: random.Random) -> Form:
    return Form(
        field, ambient, degree,
        tuple(field.random(rng) for _ in range(monomial_count(ambient, degree))),
    )


def linear_form(field, coeffs: Sequence) -> Form:
    return form_from_coeffs(field, len(coeffs) - 1, 1, coeffs)


# ---------------------------------------------------------------------------
# substitution


def _expand_monomial_through(field, expo, cols, k: int):
    """Dense coefficients of prod_i (sum_j cols[i][j] s_j)^expo_i on P^k."""
    acc = {(0,) * (k + 1): field.one}
    for i, e in enumerate(expo):
        for _ in range(e):
            nxt = {}
            row = cols[i]
            for mono, c in acc.items():
                if field.is_zero(c):
                    continue
                for j in range(k + 1):
                    b = row[j]
                    if field.is_zero(b):
                        continue
                    m2 = mono[:j] + (mono[j] + 1,) + mono[j + 1 :]
                    prev = nxt.get(m2, field.zero)
                    nxt[m2] = field.add(prev, field.mul(c, b))
            acc = nxt
            if not acc:
                return acc
    return acc


def substitution_rows(field, ambient: int, degree: int, matrix_rows) -> list:
    """The matrix of f -> f(B s) on coefficient vectors.

    ``matrix_rows`` is the (ambient+1) x (k+1) matrix B of a linear map
    P^k -> P^ambient.  Row r of the result gives, for each source monomial,
    the coefficient of the r-th degree-`degree` monomial in s after
    substituting x = B s.
    """
    k = len(matrix_rows[0]) - 1
    src = monomial_exponents(ambient, degree)
    dst_index = monomial_index(k, degree)
    ncols = len(src)
    nrows = monomial_count(k, degree)
    rows = [[field.zero] * ncols for _ in range(nrows)]
    for col, expo in enumerate(src):
        expansion = _expand_monomial_through(field, expo, matrix_rows, k)
        for mono, c in expansion.items():
            if not field.is_zero(c):
                rows[dst_index[mono]][col] = c
    return rows


def compose_with_matrix(form: Form, matrix_rows) -> Form:
    """f(B s) as a form on P^k, for B an (ambient+1) x (k+1) matrix."""
    field = form.field
    if len(matrix_rows) != form.ambient + 1:
        raise ValueError("matrix does not map into the form's ambient space")
    k = len(matrix_rows[0]) - 1
    out = [field.zero] * monomial_count(k, form.degree)
    dst_index = monomial_index(k, form.degree)
    for c, expo in zip(form.coeffs, monomial_exponents(form.ambient, form.degree)):
        if field.is_zero(c):
            continue
        for mono, w in _expand_monomial_through(field, expo, matrix_rows, k).items():
            j = dst_index[mono]
            out[j] = field.add(out[j], field.mul(c, w))
    return Form(field, k, form.degree, tuple(out))


def substitute_linear(form: Form, m: Matrix) -> Form:
    """f composed with an invertible change of coordinates of its own space."""
    if m.nrows != m.ncols or m.nrows != form.ambient + 1:
        raise ValueError("substitution matrix must be square of matching size")
    if not m.is_invertible():
        raise ValueError("substitution matrix is singular")
    return compose_with_matrix(form, [list(r) for r in m.rows])


def substitute_curve(form: Form, components) -> list:
    """f composed with a parametrised curve given by binary forms.

    ``components`` are ambient+1 binary forms of one common degree e; the
    result is the binary form of degree (form.degree * e), identically zero
    exactly when f vanishes on the image of the parametrisation.
    """
    field = form.field
    if len(components) != form.ambient + 1:
        raise ValueError("parametrisation does not match the ambient space")
    e = len(components[0]) - 1
    if any(len(c) - 1 != e for c in components):
        raise ValueError("parametrisation components must share one degree")
    total = form.degree * e
    out = [field.zero] * (total + 1)
    for c, expo in zip(form.coeffs, monomial_exponents(form.ambient, form.degree)):
        if field.is_zero(c):
            continue
        term = [c]
        for i, exp_i in enumerate(expo):
            for _ in range(exp_i):
                term = polys.binary_mul(field, term, list(components[i]))
        term = term + [field.zero] * (total + 1 - len(term))
        for i, v in enumerate(term):
            out[i] = field.add(out[i], v)
    return out


def coefficient_matrix(forms: Sequence[Form]) -> list:
    return [list(f.coeffs) for f in forms]


def evaluate_basis_at(field, ambient: int, degree: int, coords) -> list:
    """Values of every degree-`degree` monomial at the given coordinates."""
    f = field
    powers = [[f.one] for _ in coords]
    for i, x in enumerate(coords):
        for _ in range(degree):
            powers[i].append(f.mul(powers[i][-1], x))
    out = []
    for expo in monomial_exponents(ambient, degree):
        term = f.one
        for i, e in enumerate(expo):
            if e:
                term = f.mul(term, powers[i][e])
        out.append(term)
    return out
