"""Rational maps between projective spaces and their factorisation checks.

The cast: Cremona inversions and the contracting composition with a
projection, the GIT-quotient embedding of 2g points on a line by forms of
degree g-1 with base multiplicity g-2, the forgetful map on the span of N
given by degree-g forms through the (g-1)-point spans, the theta-side
system of degree-g forms vanishing doubly-and-more along the curve, its
restriction to the span of N, and the osculating-projection identities
that tie all of them together.

Equality of rational maps is always decided on samples: two maps agree up
to a projective transformation of the target when a matrix M with
f(x) parallel to M g(x) exists on a sample set larger than (t+1)^2, which
over a large prime field is exact with recorded failure probability.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Optional, Sequence

from thetamap import polys
from thetamap.exact_core import (
    DegenerateInputError,
    Matrix,
    ProjPoint,
    ProjSubspace,
    SubspaceChart,
    _rref_rows,
    intersect_subspaces,
    proj_point,
    random_point,
    span,
    span_rows,
    solve_linear,
)
from thetamap.forms import (
    Form,
    compose_with_matrix,
    form_from_coeffs,
    monomial_count,
    monomial_exponents,
)
from thetamap.hyperelliptic import Instance
from thetamap.linsys import (
    LinearSystem,
    find_relations,
    intersect_systems,
    system_fat_points,
    system_on_curve,
    system_on_sampled_subspaces,
    system_on_subspaces,
)
from thetamap.rnc import (
    GenericityError,
    InvolutionSecantCurve,
    RationalNormalCurve,
    contains_point,
    rnc_through_points,
    secant_trace_point,
)


@dataclass(frozen=True)
class RationalMap:
    """A tuple of independent equal-degree forms P^source -> P^target."""

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise ValueError("a rational map needs at least one component")
        f0 = self.components[0]
        if any(
            (g.ambient, g.degree) != (f0.ambient, f0.degree) or g.field != f0.field
            for g in self.components
        ):
            raise ValueError("components must be equidimensional of equal degree")
        rows = [list(g.coeffs) for g in self.components]
        if _rref_rows(f0.field, rows).rank != len(self.components):
            raise DegenerateInputError("map components are linearly dependent")

    @property
    def field(self):
        return self.components[0].field

    @property
    def source_dim(self) -> int:
        return self.components[0].ambient

    @property
    def target_dim(self) -> int:
        return len(self.components) - 1

    @property
    def degree(self) -> int:
        return self.components[0].degree

    def evaluate(self, point: ProjPoint) -> Optional[ProjPoint]:
        f = self.field
        values = [c.evaluate(point) for c in self.components]
        if all(f.is_zero(v) for v in values):
            return None  # base point
        return proj_point(f, values)

    @staticmethod
    def from_system(system: LinearSystem) -> "RationalMap":
        return RationalMap(tuple(system.basis))


@dataclass(frozen=True)
class ComposedMap:
    """Stages evaluated left to right; None propagates from base loci."""

    stages: tuple

    @property
    def field(self):
        return self.stages[0].field

    @property
    def source_dim(self) -> int:
        return self.stages[0].source_dim

    @property
    def target_dim(self) -> int:
        return self.stages[-1].target_dim

    def evaluate(self, point: ProjPoint) -> Optional[ProjPoint]:
        current = point
        for stage in self.stages:
            current = stage.evaluate(current)
            if current is None:
                return None
        return current


def projection_from_point(w: ProjPoint) -> RationalMap:
    """The linear projection with centre w, by a basis of forms through w."""
    field = w.field
    res = _rref_rows(field, [list(w.coords)])
    forms = tuple(form_from_coeffs(field, w.dim, 1, vec) for vec in res.kernel)
    return RationalMap(forms)


# ---------------------------------------------------------------------------
# Cremona inversion and the contracting composition


def projective_frame_matrix(points: Sequence[ProjPoint]) -> Matrix:
    """The matrix sending the standard frame of P^n to n+2 given points
    (coordinate simplex to the first n+1 points, unit point to the last)."""
    field = points[0].field
    n = points[0].dim
    if len(points) != n + 2:
        raise ValueError(f"a frame of P^{n} consists of {n + 2} points")
    cols = [[points[j].coords[i] for j in range(n + 1)] for i in range(n + 1)]
    scale = solve_linear(field, cols, list(points[n + 1].coords))
    if scale is None or any(field.is_zero(c) for c in scale):
        raise DegenerateInputError("frame points are not in general position")
    rows = [
        [field.mul(scale[j], points[j].coords[i]) for j in range(n + 1)]
        for i in range(n + 1)
    ]
    return Matrix.from_rows(field, rows)


def _product_omitting(field, n: int, omit: int) -> Form:
    """The degree-n monomial x_0 ... x_n / x_omit on P^n."""
    expo = tuple(0 if i == omit else 1 for i in range(n + 1))
    coeffs = [field.zero] * monomial_count(n, n)
    from thetamap.forms import monomial_index

    coeffs[monomial_index(n, n)[expo]] = field.one
    return Form(field, n, n, tuple(coeffs))


def cremona_inversion(frame_points: Sequence[ProjPoint]) -> RationalMap:
    """The coordinate inversion [1/x_0 : ... : 1/x_n] in the given frame.

    Components have degree n; the map is an involution away from its base
    locus, which contains the spans of pairs of the first n+1 frame points.
    """
    field = frame_points[0].field
    n = frame_points[0].dim
    frame = projective_frame_matrix(frame_points)
    frame_inv = frame.inverse()
    normalised = [_product_omitting(field, n, i) for i in range(n + 1)]
    pulled = [compose_with_matrix(f, [list(r) for r in frame_inv.rows]) for f in normalised]
    ncoeff = monomial_count(n, n)
    comps = []
    for i in range(n + 1):
        acc = [field.zero] * ncoeff
        for j in range(n + 1):
            a = frame.rows[i][j]
            if field.is_zero(a):
                continue
            for k in range(ncoeff):
                acc[k] = field.add(acc[k], field.mul(a, pulled[j].coeffs[k]))
        comps.append(Form(field, n, n, tuple(acc)))
    return RationalMap(tuple(comps))


@dataclass(frozen=True)
class ContractingProjection:
    """tau_k . Cr_k for a 2g-point configuration spanning P^(2g-2).

    ``marked_images`` are the images of the 2g-1 hyperplanes spanned by all
    points except the k-th and one other, listed by the omitted label in
    increasing order; they land on the standard frame of the target."""

    points: tuple
    k: int
    map: RationalMap
    marked_images: tuple

    @property
    def field(self):
        return self.map.field


def contracting_projection(points: Sequence[ProjPoint], k: int) -> ContractingProjection:
    """Compose the Cremona inversion in the frame where the k-th point is the
    unit point with the linear projection from its own image.

    The composition contracts every rational normal curve through all the
    given points; the 2g-1 marked hyperplane images provide the base points
    of the quotient embedding downstream.
    """
    field = points[0].field
    n = points[0].dim
    if len(points) != n + 2:
        raise ValueError("configuration must consist of (ambient + 2) points")
    if not 0 <= k < len(points):
        raise ValueError("k is out of range")
    others = [points[i] for i in range(len(points)) if i != k]
    frame = projective_frame_matrix(others + [points[k]])
    frame_inv = frame.inverse()
    inv_rows = [list(r) for r in frame_inv.rows]
    # normalised composition: products-omitting minus the last one
    last = compose_with_matrix(_product_omitting(field, n, n), inv_rows)
    comps = []
    for i in range(n):
        head = compose_with_matrix(_product_omitting(field, n, i), inv_rows)
        coeffs = tuple(field.sub(a, b) for a, b in zip(head.coeffs, last.coeffs))
        comps.append(Form(field, n, n, coeffs))
    cmap = RationalMap(tuple(comps))

    marked = []
    for pos in range(n + 1):
        if pos < n:
            coords = [field.one if i == pos else field.zero for i in range(n)]
        else:
            coords = [field.one] * n
        marked.append(proj_point(field, coords))
    return ContractingProjection(tuple(points), k, cmap, tuple(marked))


# ---------------------------------------------------------------------------
# the GIT-quotient embedding systems on P^(2g-3)


def quotient_embedding_system(e_points: Sequence[ProjPoint]):
    """Forms of degree g-1 on P^(2g-3) with multiplicity g-2 at 2g-1 general
    points; the induced map embeds the GIT quotient of 2g points on a line."""
    count = len(e_points)
    if count < 5 or count % 2 == 0:
        raise ValueError("expected 2g-1 base points with g >= 3")
    g = (count + 1) // 2
    ambient = 2 * g - 3
    if any(p.dim != ambient for p in e_points):
        raise ValueError("base points do not span the expected space")
    field = e_points[0].field
    system = system_fat_points(
        field, ambient, g - 1, [(p, g - 2) for p in e_points], {"kind": "quotient-embedding"}
    )
    if system.dim == 0:
        raise DegenerateInputError("empty quotient system: degenerate base points")
    return system, RationalMap.from_system(system)


def double_cover_system(e_points: Sequence[ProjPoint], centre: ProjPoint):
    """The subsystem with multiplicity g-2 at one further general point; the
    induced projection is 2:1 onto its image and ramifies along a Kummer
    variety."""
    g = (len(e_points) + 1) // 2
    field = e_points[0].field
    system = system_fat_points(
        field,
        2 * g - 3,
        g - 1,
        [(p, g - 2) for p in list(e_points) + [centre]],
        {"kind": "double-cover"},
    )
    if system.dim == 0:
        raise DegenerateInputError("empty projected system: degenerate centre")
    return system, RationalMap.from_system(system)


# ---------------------------------------------------------------------------
# the forgetful map on the span of N


def forgetful_system(n_points_local: Sequence[ProjPoint]):
    """Degree-g forms vanishing on every span of g-1 of the 2g marked points.

    The induced map contracts each rational normal curve through the marked
    points to one point, so its image is the GIT quotient of configurations
    of the marked points on such curves."""
    count = len(n_points_local)
    if count < 6 or count % 2:
        raise ValueError("expected 2g marked points with g >= 3")
    g = count // 2
    ambient = 2 * g - 2
    field = n_points_local[0].field
    import itertools

    subspaces = []
    for subset in itertools.combinations(range(count), g - 1):
        sub = span([n_points_local[i] for i in subset])
        if sub.dim != g - 2:
            raise DegenerateInputError("marked points are not in general position")
        subspaces.append(sub)
    system = system_on_subspaces(field, ambient, g, subspaces)
    system.provenance["kind"] = "forgetful"
    return system, RationalMap.from_system(system)


def random_rnc_through(points: Sequence[ProjPoint], rng: random.Random) -> RationalNormalCurve:
    """A random rational normal curve through the given n+2 points of P^n."""
    field = points[0].field
    n = points[0].dim
    if len(points) != n + 2:
        raise ValueError("need (ambient + 2) points; one more is sampled")
    for _ in range(200):
        extra = random_point(field, n, rng)
        try:
            return rnc_through_points(list(points) + [extra])
        except DegenerateInputError:
            continue
    raise DegenerateInputError("no rational normal curve through the points was found")


def map_contracts_curve(
    m, curve: RationalNormalCurve, rng: random.Random, n_params: int = 30
) -> Optional[ProjPoint]:
    """The common image point when the map contracts the curve, else None."""
    field = curve.field
    image = None
    seen = 0
    guard = 0
    while seen < n_params:
        guard += 1
        if guard > 40 * n_params:
            raise GenericityError("could not sample parameters off the base locus")
        t = field.random(rng)
        value = m.evaluate(curve.point_at(field.one, t))
        if value is None:
            continue
        if image is None:
            image = value
        elif value != image:
            return None
        seen += 1
    return image


# ---------------------------------------------------------------------------
# sampled equality of rational maps up to a projective transformation


def compare_maps_up_to_pgl(
    map_f,
    map_g,
    rng: random.Random,
    n_samples: Optional[int] = None,
    margin: int = 20,
):
    """Find M with f(x) parallel to M g(x) on a sample set, or report failure.

    Requires equal target dimensions.  The matching conditions are linear in
    M; the kernel must be one-dimensional and M invertible, and M is then
    re-verified on every sample."""
    if map_f.target_dim != map_g.target_dim:
        raise ValueError("maps have different target dimensions")
    if map_f.source_dim != map_g.source_dim:
        raise ValueError("maps have different source spaces")
    field = map_f.field
    t = map_f.target_dim
    if n_samples is None:
        n_samples = (t + 1) ** 2 + margin
    pairs = []
    guard = 0
    while len(pairs) < n_samples:
        guard += 1
        if guard > 60 * n_samples:
            raise GenericityError("could not sample enough points off both base loci")
        x = random_point(field, map_f.source_dim, rng)
        u = map_f.evaluate(x)
        v = map_g.evaluate(x)
        if u is None or v is None:
            continue
        pairs.append((u.coords, v.coords))
    size = (t + 1) * (t + 1)
    rows = []
    for u, v in pairs:
        for i in range(t + 1):
            for j in range(i + 1, t + 1):
                row = [field.zero] * size
                for b in range(t + 1):
                    row[j * (t + 1) + b] = field.add(
                        row[j * (t + 1) + b], field.mul(u[i], v[b])
                    )
                    row[i * (t + 1) + b] = field.sub(
                        row[i * (t + 1) + b], field.mul(u[j], v[b])
                    )
                rows.append(row)
    kernel = _rref_rows(field, rows).kernel
    if len(kernel) != 1:
        return False, None
    vec = kernel[0]
    m = Matrix.from_rows(field, [vec[i * (t + 1) : (i + 1) * (t + 1)] for i in range(t + 1)])
    if not m.is_invertible():
        return False, None
    for u, v in pairs:
        mv = m.apply(v)
        if proj_point(field, u) != proj_point(field, mv):
            return False, None
    return True, m


# ---------------------------------------------------------------------------
# theta-side systems


def theta_point_samples(instance: Instance, count: int, rng: random.Random) -> list:
    samples = []
    seen_x = set()
    while len(samples) < count:
        p = instance.random_sample(rng, extra_avoid=seen_x)
        seen_x.add(p.x)
        samples.append(instance.embed(p))
    return samples


def theta_system(
    instance: Instance,
    rng: random.Random,
    n_samples: Optional[int] = None,
    margin: int = 10,
) -> LinearSystem:
    """Degree-g forms on P^(3g-2) vanishing with multiplicity g-1 along the
    embedded curve, imposed at sampled points with a saturation certificate.
    An unsaturated first round is retried once with twice the samples."""
    g = instance.genus
    ambient = 3 * g - 2
    ncoeff = monomial_count(ambient, g)
    rows_per_sample = sum(comb(ambient + tot, tot) for tot in range(g - 1))
    if n_samples is None:
        n_samples = max(40, 2 * ((ncoeff + rows_per_sample - 1) // rows_per_sample))
    for attempt in range(2):
        count = n_samples * (attempt + 1)
        samples = theta_point_samples(instance, count + margin, rng)
        system = system_on_curve(
            instance.field,
            ambient,
            g,
            samples,
            g - 1,
            margin=margin,
            provenance={"kind": "theta", "genus": g, **instance.provenance},
        )
        if system.saturated:
            return system
    return system


def secant_line_system(
    instance: Instance,
    rng: random.Random,
    n_lines: Optional[int] = None,
    margin: int = 10,
) -> LinearSystem:
    """Degree-g forms vanishing on sampled secant lines of the embedded curve
    (the genus-3 variant of the theta-side base locus)."""
    g = instance.genus
    ambient = 3 * g - 2
    if n_lines is None:
        n_lines = max(40, monomial_count(ambient, g) // (g + 1))
    lines = []
    seen_x = set()
    while len(lines) < n_lines + margin:
        p = instance.random_sample(rng, extra_avoid=seen_x)
        seen_x.add(p.x)
        q = instance.random_sample(rng, extra_avoid=seen_x)
        seen_x.add(q.x)
        line = span([instance.embed(p), instance.embed(q)])
        if line.dim != 1:
            continue
        lines.append(line)
    system = system_on_sampled_subspaces(instance.field, ambient, g, lines, margin=margin)
    system.provenance["kind"] = "secant-lines"
    return system


def restrict_to_span(system: LinearSystem, chart: SubspaceChart) -> LinearSystem:
    """Substitute the span's parametrisation into every basis form and
    re-extract an independent spanning set on the local P^dim."""
    field = system.field
    basis_matrix = chart.basis_matrix()
    rows = []
    for f in system.basis:
        composed = compose_with_matrix(f, [list(r) for r in basis_matrix.rows])
        rows.append(list(composed.coeffs))
    res = _rref_rows(field, rows)
    local_dim = chart.local_dim
    basis = tuple(Form(field, local_dim, system.degree, tuple(r)) for r in res.rref)
    return LinearSystem(
        field,
        local_dim,
        system.degree,
        basis,
        (),
        {"kind": "restriction", "from": dict(system.provenance), "saturated": system.saturated},
    )


def pullback_span_of_hyperplanes_through(
    hmap: RationalMap, w: ProjPoint
) -> LinearSystem:
    """The span of ell . h over linear forms ell vanishing at w."""
    field = hmap.field
    res = _rref_rows(field, [list(w.coords)])
    rows = []
    for lam in res.kernel:
        acc = [field.zero] * len(hmap.components[0].coeffs)
        for c, comp in zip(lam, hmap.components):
            if field.is_zero(c):
                continue
            for i, v in enumerate(comp.coeffs):
                acc[i] = field.add(acc[i], field.mul(c, v))
        rows.append(acc)
    rref = _rref_rows(field, rows)
    f0 = hmap.components[0]
    basis = tuple(Form(field, f0.ambient, f0.degree, tuple(r)) for r in rref.rref)
    return LinearSystem(field, f0.ambient, f0.degree, basis, (), {"kind": "centre-pullback"})


def gamma_conditions_system(
    trace: InvolutionSecantCurve, forgetful: LinearSystem
) -> LinearSystem:
    """Forms of the forgetful system vanishing with multiplicity g-2 along
    the involution-secant curve (imposed at its samples)."""
    instance = trace.instance
    g = instance.genus
    field = instance.field
    samples = trace.sample_local_points()
    curve_conditions = system_on_curve(
        field,
        2 * g - 2,
        g,
        samples,
        max(1, g - 2),
        margin=min(10, len(samples) - 1),
        provenance={"kind": "secant-trace-conditions"},
    )
    return intersect_systems(forgetful, curve_conditions)


@dataclass(frozen=True)
class OsculatingReport:
    centre: ProjPoint
    pullback_system: LinearSystem
    gamma_system: LinearSystem
    pullback_equals_gamma: bool
    contracted: bool
    profile_consistent: bool


def osculating_center_check(
    trace: InvolutionSecantCurve,
    forgetful: LinearSystem,
    hmap: RationalMap,
    rng: random.Random,
) -> OsculatingReport:
    """Certify that the forgetful map contracts the involution-secant curve
    to one point w and that the hyperplanes through w pull back to exactly
    the forms vanishing on the secant trace (the osculating projection
    identity, stated here at multiplicity one)."""
    field = hmap.field
    images = []
    for q in trace.sample_local_points():
        value = hmap.evaluate(q)
        if value is None:
            continue
        images.append(value)
    if not images:
        raise GenericityError("every secant trace sample hit the base locus")
    contracted = all(v == images[0] for v in images)
    w = images[0]

    pullback = pullback_span_of_hyperplanes_through(hmap, w)
    gamma_sys = gamma_conditions_system(trace, forgetful)
    equal = pullback.same_span(gamma_sys)

    # the marked-point configuration on the trace curve matches the one on
    # the forgetful fiber through any trace point: both are the same curve
    profile_consistent = _fiber_profile_matches(trace, rng)
    return OsculatingReport(w, pullback, gamma_sys, equal, contracted, profile_consistent)


def _fiber_profile_matches(trace: InvolutionSecantCurve, rng: random.Random) -> bool:
    from thetamap.rnc import mobius_normalized_profile

    field = trace.rnc.field
    g = trace.instance.genus
    # re-interpolate through N and a different sample; same curve, so the
    # marked-point cross-ratio profiles must agree up to PGL(2)
    other = trace.samples[1][1]
    recurve = rnc_through_points(list(trace.n_local) + [other])
    for _, q, _ in trace.samples:
        ok, _ = contains_point(recurve, q)
        if not ok:
            return False
    params_a = [tuple(p) for p in trace.n_params]
    params_b = [tuple(p) for p in recurve.marked_params[: 2 * g]]
    return mobius_normalized_profile(field, params_a) == mobius_normalized_profile(
        field, params_b
    )


def pc_dimension(g: int) -> int:
    """Projective dimension of the span of the small-divisor exceptional
    image inside the theta-side P^(2^g - 1): sum_{i<=g-2} C(g, i) - 1."""
    if g < 3:
        raise ValueError("genus must be at least 3")
    return sum(comb(g, i) for i in range(g - 1)) - 1


# ---------------------------------------------------------------------------
# base-locus scans for genus 4, 5, 6


@dataclass(frozen=True)
class BaseLocusTrial:
    kind: str
    span_dim: int
    intersection_dim: int
    on_trace: bool
    on_marked_secants: bool
    secant_params_match: Optional[bool] = None


@dataclass(frozen=True)
class BaseLocusReport:
    genus: int
    trials: tuple

    @property
    def all_on_trace(self) -> bool:
        return all(t.on_trace for t in self.trials)

    @property
    def all_secant_lines(self) -> bool:
        return all(t.secant_params_match for t in self.trials)


def _marked_secant_membership(trace: InvolutionSecantCurve, local_pt: ProjPoint) -> bool:
    import itertools

    g = trace.instance.genus
    pts = trace.n_local
    for subset in itertools.combinations(range(2 * g), g - 1):
        sub = span([pts[i] for i in subset])
        if sub.contains_point(local_pt):
            return True
    return False


def extra_base_locus_scan(
    trace: InvolutionSecantCurve,
    rng: random.Random,
    trials: int = 20,
) -> BaseLocusReport:
    """Sample the special degree-(g-1) divisor families with a moving part,
    intersect their spans with the span of N, and classify the results.

    genus 4 (pair + point) and genus 5 (pair + two points): the intersection
    is a point and must land on the involution-secant curve.  genus 6 (two
    pairs + point): the intersection is a line, and must be the secant of the
    involution-secant curve through the two pair-trace points."""
    instance = trace.instance
    curve = instance.curve
    g = instance.genus
    if g not in (4, 5, 6):
        raise ValueError("the scan covers genus 4, 5 and 6")
    chart = trace.chart
    results = []
    for _ in range(trials):
        seen_x = set()

        def fresh():
            p = instance.random_sample(rng, extra_avoid=seen_x)
            seen_x.add(p.x)
            return p

        if g == 4:
            kind = "pair+point"
            p, q = fresh(), fresh()
            pts = [p, curve.involution(p), q]
            pair_points = [p]
        elif g == 5:
            kind = "pair+two-points"
            p, q, r = fresh(), fresh(), fresh()
            pts = [p, curve.involution(p), q, r]
            pair_points = [p]
        else:
            kind = "two-pairs+point"
            p, q, r = fresh(), fresh(), fresh()
            pts = [p, curve.involution(p), q, curve.involution(q), r]
            pair_points = [p, q]

        divisor_span = span([instance.embed(x) for x in pts])
        inter = intersect_subspaces(divisor_span, chart.subspace)

        if g in (4, 5):
            if divisor_span.dim != g - 2 or inter.dim != 0:
                raise GenericityError("special divisor span has unexpected dimensions")
            local = chart.to_local(inter.basis_points()[0])
            on_trace, _ = contains_point(trace.rnc, local)
            results.append(
                BaseLocusTrial(
                    kind,
                    divisor_span.dim,
                    inter.dim,
                    on_trace,
                    _marked_secant_membership(trace, local),
                )
            )
        else:
            if divisor_span.dim != g - 2 or inter.dim != 1:
                raise GenericityError("special divisor span has unexpected dimensions")
            local_line = span([chart.to_local(pt) for pt in inter.basis_points()])
            expected = []
            for pp in pair_points:
                tp = secant_trace_point(instance, chart, pp)
                ok, param = contains_point(trace.rnc, tp)
                if not ok:
                    raise GenericityError("pair trace point left the interpolated curve")
                expected.append((tp, param))
            on_line = all(local_line.contains_point(tp) for tp, _ in expected)
            line_params = _trace_params_on_line(trace, local_line)
            match = (
                on_line
                and line_params is not None
                and sorted(line_params) == sorted(pr for _, pr in expected)
                and span([tp for tp, _ in expected]) == local_line
            )
            results.append(
                BaseLocusTrial(kind, divisor_span.dim, inter.dim, on_line, False, match)
            )
    return BaseLocusReport(g, tuple(results))


def _trace_params_on_line(trace: InvolutionSecantCurve, local_line: ProjSubspace):
    """Parameters at which the trace curve meets a line of its own span."""
    field = trace.rnc.field
    comps = [list(c) for c in trace.rnc.components]
    functional_rows = local_line.annihilator_rows()
    g = None
    for lam in functional_rows:
        poly = [field.zero] * len(comps[0])
        for c, comp in zip(lam, comps):
            if field.is_zero(c):
                continue
            for i, v in enumerate(comp):
                poly[i] = field.add(poly[i], field.mul(c, v))
        poly = polys.trim(field, poly)
        if not poly:
            continue
        g = poly if g is None else polys.gcd(field, g, poly)
        if polys.degree(field, g) == 0:
            return []
    if g is None:
        return None
    rng = random.Random(23)
    roots = polys.roots_fp(field, g, rng)
    params = []
    for t0 in roots:
        pt = trace.rnc.point_at(field.one, t0)
        if local_line.contains_point(pt):
            params.append((field.one, t0))
    # the parameter at infinity
    lead = [c[-1] for c in comps]
    if any(not field.is_zero(x) for x in lead):
        pt = proj_point(field, lead)
        if local_line.contains_point(pt):
            params.append((field.zero, field.one))
    return params


# ---------------------------------------------------------------------------
# the branch quartic of the double cover at genus 3


@dataclass(frozen=True)
class BranchQuarticReport:
    cubic_relation: Form
    discriminant: Form
    chart_quartic: Form
    degree_ok: bool


def branch_discriminant_quartic(
    omega_map: RationalMap, centre_source: ProjPoint, rng: random.Random
) -> BranchQuarticReport:
    """At genus 3: the image of the quotient embedding is a cubic threefold
    in P^4, and projecting from a smooth point of it is 2:1.  Along the line
    through the centre w and a variable point v, the residual intersection
    is a binary quadratic whose discriminant is a quartic in v; restricted
    to a chart transverse to w this is the branch quartic (a Weddle-type
    surface)."""
    field = omega_map.field
    relations = find_relations(list(omega_map.components), 3, rng)
    if relations.dim != 1:
        raise GenericityError("expected exactly one cubic relation for the image")
    cubic = relations.basis[0]
    w = omega_map.evaluate(centre_source)
    if w is None or not field.is_zero(cubic.evaluate(w)):
        raise GenericityError("centre does not lie on the image cubic")

    t = cubic.ambient
    partials = [cubic.partial_derivative(i) for i in range(t + 1)]
    # F(s w + t v) = s^2 t A(v) + s t^2 B(v) + t^3 F(v) with
    # A = sum v_i dF_i(w) (linear in v), B = sum w_i dF_i(v) (quadratic in v)
    lin = form_from_coeffs(field, t, 1, [p.evaluate(w) for p in partials])
    quad_coeffs = [field.zero] * monomial_count(t, 2)
    for wi, p in zip(w.coords, partials):
        if field.is_zero(wi):
            continue
        for i, c in enumerate(p.coeffs):
            quad_coeffs[i] = field.add(quad_coeffs[i], field.mul(wi, c))
    quad = Form(field, t, 2, tuple(quad_coeffs))
    four = field(4)
    disc = quad.mul(quad).add(lin.mul(cubic).scale(field.neg(four)))

    # restrict to a linear chart transverse to the centre
    res = _rref_rows(field, [list(w.coords)])
    section_cols = [list(vec) for vec in res.kernel]  # t independent directions
    chart_matrix = [[section_cols[j][i] for j in range(len(section_cols))] for i in range(t + 1)]
    chart_quartic = compose_with_matrix(disc, chart_matrix)
    degree_ok = not chart_quartic.is_zero and chart_quartic.degree == 4
    return BranchQuarticReport(cubic, disc, chart_quartic, degree_ok)
