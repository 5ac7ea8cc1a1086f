"""Rational normal curves: interpolation through n+3 general points of P^n,
exact membership tests, and the involution-secant curve of an instance.

Interpolation is closed form: normalise the first n+2 points to the standard
frame; the curves through the frame are t -> [prod_{j != i} (t - a_j s)]_i,
and the last point pins the nodes a_j up to reparametrisation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from thetamap import polys
from thetamap.exact_core import (
    DegenerateInputError,
    Matrix,
    PrimeField,
    ProjPoint,
    ProjSubspace,
    SubspaceChart,
    _rref_rows,
    proj_point,
    span,
    intersect_subspaces,
    solve_linear,
)
from thetamap.hyperelliptic import Instance


class GenericityError(RuntimeError):
    """An instance failed one of the recorded open genericity conditions."""


@dataclass(frozen=True)
class RationalNormalCurve:
    """A degree-n parametrised curve in P^n with independent components.

    ``marked_params`` records the parameter [s : t] at which the curve meets
    each interpolation input, in input order.
    """

    field: object
    ambient: int
    components: tuple  # n+1 binary forms of degree n, coefficient tuples
    marked_params: tuple = ()

    def point_at(self, s, t) -> ProjPoint:
        f = self.field
        coords = [polys.binary_eval(f, list(c), s, t) for c in self.components]
        return proj_point(f, coords)

    def sample_points(self, params) -> list:
        return [self.point_at(s, t) for s, t in params]

    def coefficient_matrix(self) -> list:
        return [list(c) for c in self.components]

    def to_jsonable(self) -> dict:
        f = self.field
        return {
            "field": f.tag,
            "ambient": self.ambient,
            "components": [[f.format_elem(c) for c in comp] for comp in self.components],
            "marked_params": [
                [f.format_elem(s), f.format_elem(t)] for s, t in self.marked_params
            ],
        }


def rnc_through_points(points: Sequence[ProjPoint]) -> RationalNormalCurve:
    """The unique rational normal curve through n+3 general points of P^n."""
    if not points:
        raise ValueError("no points given")
    field = points[0].field
    n = points[0].dim
    if len(points) != n + 3:
        raise ValueError(f"interpolation in P^{n} needs exactly {n + 3} points")
    if any(p.dim != n or p.field != field for p in points):
        raise ValueError("points must share one ambient space")

    # frame: send points[0..n] to the coordinate simplex, points[n+1] to the
    # unit point; the frame matrix has columns c_i * points[i]
    base = [list(p.coords) for p in points[: n + 1]]
    cols = [[base[j][i] for j in range(n + 1)] for i in range(n + 1)]  # columns = points
    c = solve_linear(field, cols, list(points[n + 1].coords))
    if c is None or any(field.is_zero(ci) for ci in c):
        raise DegenerateInputError("first n+2 points are not in general position")
    frame = Matrix.from_rows(
        field, [[field.mul(c[j], base[j][i]) for j in range(n + 1)] for i in range(n + 1)]
    )
    frame_inv = frame.inverse()

    last = frame_inv.apply(points[n + 2].coords)
    if any(field.is_zero(x) for x in last):
        raise DegenerateInputError("last point lies on a frame hyperplane")
    nodes = [field.inv(x) for x in last]
    if len({field.format_elem(a) for a in nodes}) != n + 1:
        raise DegenerateInputError("interpolation nodes collide; configuration is degenerate")

    # normalised components: X_i(s, t) = prod_{j != i} (t - a_j s)
    normalised = []
    for i in range(n + 1):
        comp = [field.one]  # degree-0 binary form
        for j in range(n + 1):
            if j == i:
                continue
            # multiply by (t - a_j s): coefficients (s^1, t^1) = (-a_j, 1)
            comp = polys.binary_mul(field, comp, [field.neg(nodes[j]), field.one])
        normalised.append(comp)

    components = []
    for i in range(n + 1):
        row = frame.rows[i]
        acc = [field.zero] * (n + 1)
        for j in range(n + 1):
            if field.is_zero(row[j]):
                continue
            for k in range(n + 1):
                acc[k] = field.add(acc[k], field.mul(row[j], normalised[j][k]))
        components.append(tuple(acc))

    marked = [(field.one, nodes[i]) for i in range(n + 1)]
    marked.append((field.zero, field.one))  # unit point sits at t = infinity
    marked.append((field.one, field.zero))  # the extra point sits at t = 0
    curve = RationalNormalCurve(field, n, tuple(components), tuple(marked))

    if _rref_rows(field, curve.coefficient_matrix()).rank != n + 1:
        raise DegenerateInputError("interpolated curve is degenerate")
    for p, (s, t) in zip(points, marked):
        if curve.point_at(s, t) != p:
            raise AssertionError("interpolated curve misses an input point")
    return curve


def contains_point(curve: RationalNormalCurve, p: ProjPoint):
    """(True, [s:t]) when p lies on the curve, else (False, None); exact."""
    field = curve.field
    if p.dim != curve.ambient or p.field != field:
        raise ValueError("point/curve ambient mismatch")
    comps = [list(c) for c in curve.components]
    # check the parameter [0:1] separately (leading t coefficients)
    lead = [c[-1] for c in comps]
    if any(not field.is_zero(x) for x in lead):
        if proj_point(field, lead) == p:
            return True, (field.zero, field.one)
    anchor = next(i for i, x in enumerate(p.coords) if not field.is_zero(x))
    g = None
    for i in range(curve.ambient + 1):
        if i == anchor:
            continue
        # minor p_anchor * X_i - p_i * X_anchor, as a polynomial in t at s = 1
        poly = polys.trim(
            field,
            [
                field.sub(field.mul(p.coords[anchor], a), field.mul(p.coords[i], b))
                for a, b in zip(comps[i], comps[anchor])
            ],
        )
        if not poly:
            continue  # this minor is identically satisfied
        g = poly if g is None else polys.gcd(field, g, poly)
        if polys.degree(field, g) == 0:
            return False, None
    if g is None:
        raise DegenerateInputError("curve components are proportional to the point")
    deg = polys.degree(field, g)
    if deg == 1:
        t0 = field.neg(field.div(g[0], g[1]))
        if curve.point_at(field.one, t0) == p:
            return True, (field.one, t0)
        return False, None
    if isinstance(field, PrimeField):
        rng = random.Random(17)
        for t0 in polys.roots_fp(field, g, rng):
            if curve.point_at(field.one, t0) == p:
                return True, (field.one, t0)
        return False, None
    raise NotImplementedError("higher-degree membership solving needs a prime field")


def mobius_normalized_profile(field, params: Sequence) -> tuple:
    """Cross-ratio profile of P^1 parameters, invariant under reparametrisation.

    The first three parameters are sent to 0, 1, infinity; the images of the
    rest are returned.  Two configurations agree up to PGL(2) exactly when
    their profiles are equal.  Parameters are (s, t) pairs.
    """
    if len(params) < 4:
        raise ValueError("a cross-ratio profile needs at least 4 parameters")

    def det(a, b):
        return field.sub(field.mul(a[0], b[1]), field.mul(a[1], b[0]))

    a, b, c = params[0], params[1], params[2]
    profile = []
    for d in params[3:]:
        # cross ratio (a, b; c, d) as a point of P^1
        num = field.mul(det(a, c), det(b, d))
        den = field.mul(det(a, d), det(b, c))
        profile.append(proj_point(field, (den, num)).coords)
    return tuple(profile)


# ---------------------------------------------------------------------------
# the involution-secant curve of an instance


@dataclass(frozen=True)
class InvolutionSecantCurve:
    """The trace, inside the span of N, of the secant lines through
    involution-conjugate pairs of curve points.

    ``curve`` lives in the local coordinates of the chart on the span of N;
    ``n_params`` are the parameters of the marked points N on the curve, and
    each sample records (curve point p, trace point, parameter).
    """

    instance: Instance
    chart: SubspaceChart
    rnc: RationalNormalCurve
    n_local: tuple
    n_params: tuple
    samples: tuple  # (CurvePoint, local ProjPoint, (s, t) param)

    @property
    def span_of_n(self) -> ProjSubspace:
        return self.chart.subspace

    def sample_local_points(self) -> list:
        return [q for _, q, _ in self.samples]


def secant_trace_point(instance: Instance, chart: SubspaceChart, p) -> ProjPoint:
    """The intersection of the secant line through p, i(p) with the span of N.

    Inside the ambient P^(3g-2) a general line misses the (2g-2)-plane; that
    these secants always meet it in exactly one point is special geometry,
    and any other outcome is flagged as a genericity failure.
    """
    curve = instance.curve
    q = curve.involution(p)
    if curve.is_weierstrass(p):
        raise GenericityError("Weierstrass points do not span a secant line")
    line = span([instance.embed(p), instance.embed(q)])
    if line.dim != 1:
        raise GenericityError("conjugate points embed to one point")
    inter = intersect_subspaces(line, chart.subspace)
    if inter.is_empty:
        raise GenericityError("secant line misses the span of N")
    if inter.dim != 0:
        raise GenericityError("secant line lies inside the span of N")
    return chart.to_local(inter.basis_points()[0])


def involution_secant_curve(
    instance: Instance, rng: random.Random, n_samples: Optional[int] = None
) -> InvolutionSecantCurve:
    """Sample the secant trace and interpolate it as a rational normal curve.

    The interpolation uses N plus the first sample (2g+1 = (2g-2)+3 points);
    every further sample is then checked to lie on the same curve, so the
    construction certifies both the curve and its degree 2g-2.
    """
    g = instance.genus
    if n_samples is None:
        n_samples = 2 * g + 10
    chart = SubspaceChart(instance.n_span())
    n_local = [chart.to_local(q) for q in instance.embedded_n()]

    raw_samples = []
    seen_points = set(n_local)
    seen_x = set()
    guard = 0
    while len(raw_samples) < n_samples:
        guard += 1
        if guard > 50 * n_samples:
            raise GenericityError("could not collect distinct secant trace points")
        p = instance.random_sample(rng, extra_avoid=seen_x)
        seen_x.add(p.x)
        q_local = secant_trace_point(instance, chart, p)
        if q_local in seen_points:
            continue
        seen_points.add(q_local)
        raw_samples.append((p, q_local))

    first_point = raw_samples[0][1]
    rnc = rnc_through_points(n_local + [first_point])
    samples = []
    for p, q_local in raw_samples:
        ok, param = contains_point(rnc, q_local)
        if not ok:
            raise GenericityError("secant trace point leaves the interpolated curve")
        samples.append((p, q_local, param))

    n_params = tuple(rnc.marked_params[: 2 * g])
    return InvolutionSecantCurve(
        instance, chart, rnc, tuple(n_local), n_params, tuple(samples)
    )


def hyperplane_section_is_marked_points(trace: InvolutionSecantCurve, subset) -> bool:
    """Check that the hyperplane spanned by 2g-2 marked points meets the
    curve exactly at those points (each simply)."""
    field = trace.rnc.field
    chosen = [trace.n_local[i] for i in subset]
    hyper = span(chosen)
    if hyper.dim != len(chosen) - 1:
        return False
    functional_rows = hyper.annihilator_rows()
    if len(functional_rows) != 1:
        return False
    lam = functional_rows[0]
    comps = trace.rnc.components
    restricted = [field.zero] * len(comps[0])
    for c, comp in zip(lam, comps):
        if field.is_zero(c):
            continue
        for k, v in enumerate(comp):
            restricted[k] = field.add(restricted[k], field.mul(c, v))
    if polys.binary_is_zero(field, restricted):
        return False
    total = len(restricted) - 1
    orders = 0
    for i in subset:
        s, t = trace.n_params[i]
        if polys.binary_order_at_param(field, restricted, s, t) != 1:
            return False
        orders += 1
    return orders == total
