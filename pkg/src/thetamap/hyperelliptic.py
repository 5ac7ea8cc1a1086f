"""Hyperelliptic curves y^2 = f(x), divisors, Riemann-Roch spaces and the
degree-(4g-2) embedding of the curve into P^(3g-2).

The default model is odd: deg f = 2g+1, one rational point at infinity and
canonical divisor (2g-2) * infinity.  Riemann-Roch spaces are computed from
the ansatz (a(x) + b(x) y) / m(x): the denominator is read off the divisor,
degree bounds on a and b come from the allowed pole order at infinity, and
vanishing orders at conjugate branch points become linear conditions through
truncated power-series expansions of y along the branch.  This is complete
for divisors supported on non-Weierstrass affine points plus infinity, which
is exactly what instance generation guarantees.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Optional, Sequence

from thetamap import polys
from thetamap.exact_core import (
    DEFAULT_PRIME,
    PrimeField,
    ProjPoint,
    ProjSubspace,
    derived_rng,
    field_from_tag,
    proj_point,
    span,
)


class UnsupportedDivisorError(ValueError):
    """The divisor shape is outside the supported ansatz (documented)."""


class InstanceGenerationError(RuntimeError):
    """The rejection-sampling budget was exhausted; re-seed and retry."""


@dataclass(frozen=True)
class CurvePoint:
    x: object = None
    y: object = None
    at_infinity: bool = False

    @staticmethod
    def affine(x, y) -> "CurvePoint":
        return CurvePoint(x, y, False)

    @staticmethod
    def infinity() -> "CurvePoint":
        return CurvePoint(None, None, True)

    def __repr__(self) -> str:
        return "oo" if self.at_infinity else f"({self.x}, {self.y})"


INFINITY = CurvePoint.infinity()


def _point_sort_key(p: CurvePoint):
    if p.at_infinity:
        return (1, 0, 0)
    return (0, p.x, p.y)


@dataclass(frozen=True)
class HyperellipticCurve:
    """y^2 = f(x) with f squarefree of degree 2g+1 (odd) or 2g+2 (even)."""

    field: object
    f: tuple
    genus: int

    @staticmethod
    def create(field, f_coeffs: Sequence) -> "HyperellipticCurve":
        f = polys.trim(field, [field(c) for c in f_coeffs])
        deg = len(f) - 1
        if deg < 7:
            raise ValueError("need deg f >= 7, so genus >= 3")
        genus = (deg - 1) // 2
        if not polys.is_squarefree(field, f):
            raise ValueError("f must be squarefree")
        return HyperellipticCurve(field, tuple(f), genus)

    @property
    def is_odd_model(self) -> bool:
        return len(self.f) - 1 == 2 * self.genus + 1

    def f_at(self, x):
        return polys.evaluate(self.field, list(self.f), x)

    def contains(self, p: CurvePoint) -> bool:
        if p.at_infinity:
            return True
        lhs = self.field.mul(p.y, p.y)
        return self.field.is_zero(self.field.sub(lhs, self.f_at(p.x)))

    def point(self, x, y) -> CurvePoint:
        p = CurvePoint.affine(self.field(x), self.field(y))
        if not self.contains(p):
            raise ValueError("point is not on the curve")
        return p

    def involution(self, p: CurvePoint) -> CurvePoint:
        """The hyperelliptic involution (x, y) -> (x, -y); fixes infinity."""
        if p.at_infinity:
            return p
        return CurvePoint.affine(p.x, self.field.neg(p.y))

    def is_weierstrass(self, p: CurvePoint) -> bool:
        if p.at_infinity:
            return self.is_odd_model
        return self.field.is_zero(p.y)

    def random_affine_point(self, rng: random.Random, avoid_x=()) -> CurvePoint:
        """A random non-Weierstrass affine point with x outside `avoid_x`."""
        if not isinstance(self.field, PrimeField):
            raise ValueError("random curve points need a prime-field backend")
        avoid = set(avoid_x)
        for _ in range(10000):
            x = self.field.random(rng)
            if x in avoid:
                continue
            fx = self.f_at(x)
            if self.field.is_zero(fx):
                continue
            y = self.field.sqrt(fx)
            if y is None:
                continue
            if rng.randrange(2):
                y = self.field.neg(y)
            return CurvePoint.affine(x, y)
        raise InstanceGenerationError("could not sample a curve point")

    def canonical_divisor(self) -> "Divisor":
        if not self.is_odd_model:
            raise UnsupportedDivisorError("canonical divisor is provided for the odd model")
        return Divisor.from_pairs([(INFINITY, 2 * self.genus - 2)])

    def to_jsonable(self) -> dict:
        return {
            "field": self.field.tag,
            "f": [self.field.format_elem(c) for c in self.f],
            "genus": self.genus,
        }

    @staticmethod
    def from_jsonable(data: dict) -> "HyperellipticCurve":
        f = field_from_tag(data["field"])
        return HyperellipticCurve.create(f, [f.parse_elem(c) for c in data["f"]])


@dataclass(frozen=True)
class Divisor:
    """A formal integer combination of curve points."""

    entries: tuple  # ((CurvePoint, int), ...), canonical order, no zero terms

    @staticmethod
    def from_pairs(pairs) -> "Divisor":
        acc: dict = {}
        for p, k in pairs:
            acc[p] = acc.get(p, 0) + int(k)
        cleaned = [(p, k) for p, k in acc.items() if k != 0]
        cleaned.sort(key=lambda t: _point_sort_key(t[0]))
        return Divisor(tuple(cleaned))

    @staticmethod
    def of_points(points: Sequence[CurvePoint]) -> "Divisor":
        return Divisor.from_pairs((p, 1) for p in points)

    @property
    def degree(self) -> int:
        return sum(k for _, k in self.entries)

    @property
    def support(self) -> tuple:
        return tuple(p for p, _ in self.entries)

    def coeff(self, p: CurvePoint) -> int:
        for q, k in self.entries:
            if q == p:
                return k
        return 0

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor.from_pairs(self.entries + other.entries)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return Divisor.from_pairs(self.entries + tuple((p, -k) for p, k in other.entries))

    def times(self, k: int) -> "Divisor":
        return Divisor.from_pairs((p, k * m) for p, m in self.entries)

    @property
    def is_effective(self) -> bool:
        return all(k > 0 for _, k in self.entries)


@dataclass(frozen=True)
class RationalFunction:
    """(a(x) + b(x) y) / m(x) on a fixed hyperelliptic curve."""

    curve: HyperellipticCurve
    a: tuple
    b: tuple
    m: tuple

    @property
    def is_zero(self) -> bool:
        return not self.a and not self.b

    def scale(self, c) -> "RationalFunction":
        f = self.curve.field
        return RationalFunction(
            self.curve,
            tuple(polys.scale(f, list(self.a), c)),
            tuple(polys.scale(f, list(self.b), c)),
            self.m,
        )

    def add(self, other: "RationalFunction") -> "RationalFunction":
        if other.m != self.m or other.curve != self.curve:
            raise ValueError("can only add functions with one shared denominator")
        f = self.curve.field
        return RationalFunction(
            self.curve,
            tuple(polys.add(f, list(self.a), list(other.a))),
            tuple(polys.add(f, list(self.b), list(other.b))),
            self.m,
        )

    def evaluate(self, p: CurvePoint):
        if p.at_infinity:
            raise ValueError("evaluation at infinity is a valuation question")
        f = self.curve.field
        mx = polys.evaluate(f, list(self.m), p.x)
        if f.is_zero(mx):
            raise ValueError("evaluation at a pole of the denominator")
        num = f.add(
            polys.evaluate(f, list(self.a), p.x),
            f.mul(polys.evaluate(f, list(self.b), p.x), p.y),
        )
        return f.div(num, mx)

    def valuation(self, p: CurvePoint) -> int:
        """Exact order of vanishing (negative for a pole) at p."""
        curve, f = self.curve, self.curve.field
        if self.is_zero:
            raise ValueError("valuation of the zero function")
        a, b, m = list(self.a), list(self.b), list(self.m)
        g = curve.genus
        if p.at_infinity:
            if not curve.is_odd_model:
                raise UnsupportedDivisorError("infinity valuations need the odd model")
            va = -2 * polys.degree(f, a) if a else None
            vb = -(2 * polys.degree(f, b) + 2 * g + 1) if b else None
            candidates = [v for v in (va, vb) if v is not None]
            # the two candidates have opposite parity, so no cancellation
            return min(candidates) + 2 * polys.degree(f, m)
        em = polys.order_at(f, m, p.x) if polys.degree(f, m) >= 0 else 0
        if f.is_zero(p.y):
            # Weierstrass point: v(x - x0) = 2, v(y) = 1, again distinct parity
            va = 2 * polys.order_at(f, a, p.x) if a else None
            vb = 2 * polys.order_at(f, b, p.x) + 1 if b else None
            candidates = [v for v in (va, vb) if v is not None]
            return min(candidates) - 2 * em
        # non-Weierstrass branch: expand y along the branch through p
        bound = (
            max(
                2 * polys.degree(f, a) if a else 0,
                2 * polys.degree(f, b) + len(curve.f) - 1 if b else 0,
            )
            + 2
        )
        nterms = 8
        while True:
            nterms = min(max(nterms, 4), bound)
            series = _branch_numerator_series(curve, a, b, p, nterms)
            order = next((i for i, c in enumerate(series) if not f.is_zero(c)), None)
            if order is not None:
                return order - em
            if nterms >= bound:
                raise AssertionError("numerator vanishes beyond its zero budget")
            nterms = min(2 * nterms, bound)

    def to_jsonable(self) -> dict:
        f = self.curve.field
        enc = lambda poly: [f.format_elem(c) for c in poly]
        return {"a": enc(self.a), "b": enc(self.b), "m": enc(self.m)}


def function_from_jsonable(curve: HyperellipticCurve, data: dict) -> RationalFunction:
    f = curve.field
    dec = lambda lst: tuple(polys.trim(f, [f.parse_elem(c) for c in lst]))
    return RationalFunction(curve, dec(data["a"]), dec(data["b"]), dec(data["m"]))


def _branch_series(curve: HyperellipticCurve, p: CurvePoint, nterms: int) -> list:
    """Taylor coefficients of y along the branch through p, in t = x - x0."""
    f = curve.field
    u = polys.shift(f, list(curve.f), p.x)
    u = u[:nterms] + [f.zero] * max(0, nterms - len(u))
    return polys.series_sqrt(f, u, p.y, nterms)


def _branch_numerator_series(curve, a, b, p, nterms) -> list:
    f = curve.field
    sa = polys.shift(f, a, p.x) if a else []
    sa = sa[:nterms] + [f.zero] * max(0, nterms - len(sa))
    if b:
        sb = polys.shift(f, b, p.x)
        sb = sb[:nterms] + [f.zero] * max(0, nterms - len(sb))
        ybr = _branch_series(curve, p, nterms)
        prod = polys.series_mul(f, sb, ybr, nterms)
        return [f.add(x, y) for x, y in zip(sa, prod)]
    return sa


# ---------------------------------------------------------------------------
# Riemann-Roch spaces


def _grouped_affine_support(curve: HyperellipticCurve, d: Divisor):
    field = curve.field
    groups: dict = {}
    for p, k in d.entries:
        if p.at_infinity:
            continue
        if not curve.contains(p):
            raise UnsupportedDivisorError("divisor point is not on the curve")
        if field.is_zero(p.y):
            raise UnsupportedDivisorError(
                "Weierstrass points in the divisor support are not supported"
            )
        x_key = p.x
        branch = groups.setdefault(x_key, {})
        branch[p.y] = branch.get(p.y, 0) + k
    return groups


def riemann_roch_basis(curve: HyperellipticCurve, d: Divisor) -> list:
    """A basis of L(d) = {phi : div(phi) + d >= 0}, verified member by member.

    Supported divisor shape: any integer combination of non-Weierstrass
    affine points and the odd-model point at infinity.
    """
    if not curve.is_odd_model:
        raise UnsupportedDivisorError("Riemann-Roch spaces are computed on the odd model")
    field = curve.field
    g = curve.genus
    groups = _grouped_affine_support(curve, d)
    n_inf = d.coeff(INFINITY)

    m = [field.one]
    branch_data = []  # (x0, y0_branch, required_order)
    for x0, branch in groups.items():
        ys = list(branch.items())
        if len(ys) > 2:
            raise UnsupportedDivisorError("more than two points over one x value")
        if len(ys) == 2 and not field.is_zero(field.add(ys[0][0], ys[1][0])):
            raise UnsupportedDivisorError("two non-conjugate points share an x value")
        mult = {y: k for y, k in ys}
        m_exp = max(max(mult.values()), 0)
        for _ in range(m_exp):
            m = polys.mul(field, m, [field.neg(x0), field.one])
        y_any = ys[0][0]
        for y0 in (y_any, field.neg(y_any)):
            need = m_exp - mult.get(y0, 0)
            if need > 0:
                branch_data.append((x0, y0, need))

    deg_m = polys.degree(field, m)
    bound_a = deg_m + (n_inf // 2)
    bound_b = deg_m + ((n_inf - (2 * g + 1)) // 2)
    na = bound_a + 1 if bound_a >= 0 else 0
    nb = bound_b + 1 if bound_b >= 0 else 0
    if na + nb == 0:
        return []

    rows = []
    for x0, y0, need in branch_data:
        pt = CurvePoint.affine(x0, y0)
        ybr = _branch_series(curve, pt, need)
        powers = [field.one]
        for _ in range(max(na, nb) + 1):
            powers.append(field.mul(powers[-1], x0))
        for k in range(need):
            row = [field.zero] * (na + nb)
            for i in range(k, na):
                row[i] = field.mul(field(comb(i, k)), powers[i - k])
            for j in range(nb):
                acc = field.zero
                for ell in range(0, min(k, j) + 1):
                    term = field.mul(field(comb(j, ell)), powers[j - ell])
                    acc = field.add(acc, field.mul(term, ybr[k - ell]))
                row[na + j] = acc
            rows.append(row)

    if rows:
        from thetamap.exact_core import _rref_rows

        kernel = _rref_rows(field, rows).kernel
    else:
        kernel = [
            tuple(field.one if i == j else field.zero for i in range(na + nb))
            for j in range(na + nb)
        ]

    basis = []
    for vec in kernel:
        a = polys.trim(field, list(vec[:na]))
        b = polys.trim(field, list(vec[na:]))
        basis.append(RationalFunction(curve, tuple(a), tuple(b), tuple(m)))

    # post-hoc certification: orders at every support point, and the
    # Riemann-Roch count in the unobstructed range
    for fn in basis:
        for p, k in d.entries:
            if fn.valuation(p) < -k:
                raise AssertionError("Riemann-Roch member violates a pole bound")
    if d.degree > 2 * g - 2 and len(basis) != d.degree - g + 1:
        raise AssertionError("Riemann-Roch dimension mismatch")
    return basis


def linear_system_dim(curve: HyperellipticCurve, d: Divisor) -> int:
    """dim |d| = dim L(d) - 1 (so -1 for the empty linear system)."""
    return len(riemann_roch_basis(curve, d)) - 1


# ---------------------------------------------------------------------------
# the embedding by K + 2D


def embedding_basis(curve: HyperellipticCurve, d_points: Sequence[CurvePoint]) -> list:
    dd = Divisor.of_points(d_points).times(2)
    return riemann_roch_basis(curve, curve.canonical_divisor() + dd)


def embed_point(basis: Sequence[RationalFunction], p: CurvePoint) -> ProjPoint:
    field = basis[0].curve.field
    coords = [fn.evaluate(p) for fn in basis]
    if all(field.is_zero(c) for c in coords):
        raise AssertionError("all embedding coordinates vanish: basis bug")
    return proj_point(field, coords)


def combine_functions(basis: Sequence[RationalFunction], coefficients) -> RationalFunction:
    out = basis[0].scale(coefficients[0])
    for fn, c in zip(basis[1:], coefficients[1:]):
        out = out.add(fn.scale(c))
    return out


def pole_divisor_degree(fn: RationalFunction, candidates: Sequence[CurvePoint]) -> int:
    """Total pole order of fn over the candidate points (plus infinity)."""
    deg = 0
    for p in list(candidates) + [INFINITY]:
        v = fn.valuation(p)
        if v < 0:
            deg -= v
    return deg


# ---------------------------------------------------------------------------
# instances: (curve, D, N in |2D| reduced rational, embedding basis)


@dataclass(frozen=True)
class Instance:
    curve: HyperellipticCurve
    d_points: tuple
    n_points: tuple
    certificate: RationalFunction
    k2d_basis: tuple
    provenance: dict = dc_field(default_factory=dict)

    @property
    def genus(self) -> int:
        return self.curve.genus

    @property
    def field(self):
        return self.curve.field

    def divisor_d(self) -> Divisor:
        return Divisor.of_points(self.d_points)

    def divisor_n(self) -> Divisor:
        return Divisor.of_points(self.n_points)

    def embed(self, p: CurvePoint) -> ProjPoint:
        return embed_point(self.k2d_basis, p)

    def embedded_n(self) -> list:
        return [self.embed(q) for q in self.n_points]

    def n_span(self) -> ProjSubspace:
        return span(self.embedded_n())

    def used_x_values(self) -> set:
        return {p.x for p in self.d_points} | {q.x for q in self.n_points}

    def random_sample(self, rng: random.Random, extra_avoid=()) -> CurvePoint:
        avoid = self.used_x_values() | set(extra_avoid)
        return self.curve.random_affine_point(rng, avoid_x=avoid)

    def to_jsonable(self) -> dict:
        f = self.field
        pt = lambda p: [f.format_elem(p.x), f.format_elem(p.y)]
        return {
            "schema": "thetamap-instance/1",
            "curve": self.curve.to_jsonable(),
            "d_points": [pt(p) for p in self.d_points],
            "n_points": [pt(p) for p in self.n_points],
            "certificate": self.certificate.to_jsonable(),
            "k2d_basis": [fn.to_jsonable() for fn in self.k2d_basis],
            "provenance": dict(self.provenance),
        }

    @staticmethod
    def from_jsonable(data: dict) -> "Instance":
        curve = HyperellipticCurve.from_jsonable(data["curve"])
        f = curve.field
        mk = lambda pair: curve.point(f.parse_elem(pair[0]), f.parse_elem(pair[1]))
        return Instance(
            curve,
            tuple(mk(p) for p in data["d_points"]),
            tuple(mk(p) for p in data["n_points"]),
            function_from_jsonable(curve, data["certificate"]),
            tuple(function_from_jsonable(curve, fd) for fd in data["k2d_basis"]),
            dict(data["provenance"]),
        )


def _random_squarefree_odd(field, genus: int, rng: random.Random) -> list:
    deg = 2 * genus + 1
    while True:
        f = [field.random(rng) for _ in range(deg)] + [field.one]
        if polys.is_squarefree(field, f):
            return f


def _certify_instance(inst: Instance) -> None:
    """Check N = div(certificate) + 2D by explicit local orders."""
    phi = inst.certificate
    curve = inst.curve
    for q in inst.n_points:
        if phi.valuation(q) != 1:
            raise AssertionError("certificate does not vanish simply at an N point")
    for p in inst.d_points:
        if phi.valuation(p) != -2:
            raise AssertionError("certificate pole order at D is wrong")
        if phi.valuation(curve.involution(p)) != 0:
            raise AssertionError("certificate has spurious behaviour at conjugate points")
    if phi.valuation(INFINITY) != 0:
        raise AssertionError("certificate has a zero or pole at infinity")


def generate_instance(
    genus: int,
    seed: int,
    prime: int = DEFAULT_PRIME,
    f_coeffs: Optional[Sequence] = None,
    max_trials: int = 200_000,
) -> Instance:
    """A reproducible instance: curve, effective degree-g divisor D, and a
    reduced rational N in |2D| with 2g distinct pairwise non-conjugate
    non-Weierstrass points disjoint from D, certified by an explicit
    function in L(2D) whose zero divisor is exactly N.

    Sampling strategy: prescribe g random points of N, cut L(2D) down to the
    pencil through them, and accept when the remaining degree-g factor of
    the norm splits into distinct rational roots (expected ~g! trials).
    """
    if genus < 3:
        raise ValueError("genus must be at least 3")
    field = PrimeField(prime)
    rng = derived_rng(seed, f"instance-g{genus}-p{prime}")
    trials = 0
    for _restart in range(60):
        coeffs = list(f_coeffs) if f_coeffs is not None else _random_squarefree_odd(field, genus, rng)
        curve = HyperellipticCurve.create(field, coeffs)
        if curve.genus != genus:
            raise ValueError("f does not have the requested genus")
        # D: g points with pairwise distinct x (so no conjugate pairs)
        d_points = []
        seen_x = set()
        for _ in range(genus):
            p = curve.random_affine_point(rng, avoid_x=seen_x)
            seen_x.add(p.x)
            d_points.append(p)
        try:
            basis_2d = riemann_roch_basis(curve, Divisor.of_points(d_points).times(2))
        except AssertionError:
            continue
        m_shared = basis_2d[0].m
        inner_budget = 400 * max(1, _factorial(genus))
        for _ in range(inner_budget):
            trials += 1
            if trials > max_trials:
                raise InstanceGenerationError(
                    f"exhausted {max_trials} trials at genus {genus}; re-seed"
                )
            result = _try_extend_to_n(curve, d_points, basis_2d, rng)
            if result is None:
                continue
            n_points, phi = result
            k2d = riemann_roch_basis(
                curve, curve.canonical_divisor() + Divisor.of_points(d_points).times(2)
            )
            inst = Instance(
                curve,
                tuple(d_points),
                tuple(n_points),
                phi,
                tuple(k2d),
                {
                    "seed": seed,
                    "prime": prime,
                    "genus": genus,
                    "trials": trials,
                },
            )
            _certify_instance(inst)
            if inst.n_span().dim != 2 * genus - 2:
                continue  # degenerate span; keep sampling
            return inst
    raise InstanceGenerationError("instance generation failed across restarts; re-seed")


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _try_extend_to_n(curve, d_points, basis_2d, rng):
    field = curve.field
    g = curve.genus
    d_xs = {p.x for p in d_points}
    # g prescribed points of N
    q_points = []
    q_xs = set()
    for _ in range(g):
        q = curve.random_affine_point(rng, avoid_x=d_xs | q_xs)
        q_xs.add(q.x)
        q_points.append(q)
    rows = [[fn.evaluate(q) for fn in basis_2d] for q in q_points]
    from thetamap.exact_core import _rref_rows

    kernel = _rref_rows(field, rows).kernel
    if len(kernel) != 1:
        return None
    phi = combine_functions(basis_2d, kernel[0])
    a, b = list(phi.a), list(phi.b)
    if polys.degree(field, a) != 2 * g or not b:
        return None  # want no zero or pole at infinity
    norm = polys.sub(field, polys.mul(field, a, a), polys.mul(field, polys.mul(field, b, b), list(curve.f)))
    # strip the forced double factors at the x values of D
    for p in d_points:
        lin = [field.neg(p.x), field.one]
        for _ in range(2):
            quo, rem = polys.divmod_poly(field, norm, lin)
            if rem:
                return None
            norm = quo
        if field.is_zero(polys.evaluate(field, norm, p.x)):
            return None  # conjugate of a D point would enter N
    # strip the prescribed simple zeros
    for q in q_points:
        quo, rem = polys.divmod_poly(field, norm, [field.neg(q.x), field.one])
        if rem:
            return None
        norm = quo
    for q in q_points:
        if field.is_zero(polys.evaluate(field, norm, q.x)):
            return None  # q would be a double point of N
    if polys.degree(field, norm) != g or not polys.is_squarefree(field, norm):
        return None
    roots = polys.roots_fp(field, norm, rng)
    if len(roots) != g:
        return None
    new_points = []
    for rho in roots:
        if rho in d_xs or rho in q_xs:
            return None
        b_rho = polys.evaluate(field, b, rho)
        if field.is_zero(b_rho):
            return None
        y = field.neg(field.div(polys.evaluate(field, a, rho), b_rho))
        if field.is_zero(y):
            return None
        if not field.is_zero(field.sub(field.mul(y, y), curve.f_at(rho))):
            raise AssertionError("branch solve left the curve")
        new_points.append(CurvePoint.affine(rho, y))
    n_points = q_points + new_points
    if len({p.x for p in n_points}) != 2 * g:
        return None
    return n_points, phi
