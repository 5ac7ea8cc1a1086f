"""Linear systems of degree-d forms cut out by exact vanishing conditions.

Point-multiplicity and subspace conditions are imposed deterministically.
Conditions along a curve are imposed at finitely many sampled points with a
rank-saturation certificate: the rank must not move when the final `margin`
samples are added, and the provenance block records prime, seed and sample
counts so a run can be replayed bit for bit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from thetamap.exact_core import (
    PrimeField,
    ProjPoint,
    ProjSubspace,
    _rref_rows,
    field_from_tag,
    random_point,
    span_rows,
)
from thetamap.forms import (
    Form,
    evaluate_basis_at,
    monomial_count,
    monomial_exponents,
    substitution_rows,
)

POINT_MULTIPLICITY = "point-multiplicity"
SUBSPACE = "subspace"
CURVE_MULTIPLICITY = "curve-multiplicity"


@dataclass(frozen=True)
class VanishingCondition:
    kind: str
    points: tuple = ()
    multiplicity: int = 1
    subspace: Optional[ProjSubspace] = None

    @staticmethod
    def at_point(point: ProjPoint, multiplicity: int) -> "VanishingCondition":
        if multiplicity < 1:
            raise ValueError("multiplicity must be at least 1")
        return VanishingCondition(POINT_MULTIPLICITY, (point,), multiplicity)

    @staticmethod
    def on_subspace(subspace: ProjSubspace) -> "VanishingCondition":
        if subspace.is_empty:
            raise ValueError("cannot impose vanishing on an empty subspace")
        return VanishingCondition(SUBSPACE, (), 1, subspace)

    @staticmethod
    def on_curve_samples(points: Sequence[ProjPoint], multiplicity: int) -> "VanishingCondition":
        if multiplicity < 1:
            raise ValueError("multiplicity must be at least 1")
        return VanishingCondition(CURVE_MULTIPLICITY, tuple(points), multiplicity)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """A basis of forms satisfying recorded vanishing conditions."""

    field: object
    ambient: int
    degree: int
    basis: tuple
    conditions: tuple = ()
    provenance: dict = dc_field(default_factory=dict)

    @property
    def dim(self) -> int:
        """Vector-space dimension of the system."""
        return len(self.basis)

    @property
    def proj_dim(self) -> int:
        return len(self.basis) - 1

    @property
    def saturated(self) -> bool:
        return bool(self.provenance.get("saturated", True))

    def coefficient_rows(self) -> list:
        return [list(f.coeffs) for f in self.basis]

    def span(self) -> ProjSubspace:
        """The system as a subspace of the projectivised coefficient space."""
        n_coeff = monomial_count(self.ambient, self.degree)
        return span_rows(self.field, n_coeff - 1, self.coefficient_rows())

    def contains_form(self, form: Form) -> bool:
        if self.dim == 0:
            return form.is_zero
        return self.span().contains_point(_coeff_point(form)) if not form.is_zero else True

    def same_span(self, other: "LinearSystem") -> bool:
        return self.span() == other.span()

    def verify(self) -> None:
        """Re-check every condition on every basis member by evaluation.

        Derivative conditions are checked through iterated partial
        derivatives of the basis forms, a code path independent of the
        condition-matrix assembly.
        """
        for f in self.basis:
            for cond in self.conditions:
                if cond.kind == SUBSPACE:
                    rows = _subspace_matrix(cond.subspace)
                    composed = _compose_rows(f, rows)
                    if any(not self.field.is_zero(c) for c in composed):
                        raise AssertionError("basis form does not vanish on a subspace")
                else:
                    for pt in cond.points:
                        _check_point_multiplicity(f, pt, cond.multiplicity)
        # independence
        res = _rref_rows(self.field, self.coefficient_rows()) if self.basis else None
        if res is not None and res.rank != len(self.basis):
            raise AssertionError("basis is linearly dependent")

    def to_jsonable(self) -> dict:
        return {
            "field": self.field.tag,
            "ambient": self.ambient,
            "degree": self.degree,
            "basis": [f.to_jsonable() for f in self.basis],
            "conditions": [_condition_jsonable(c) for c in self.conditions],
            "provenance": dict(self.provenance),
        }

    @staticmethod
    def from_jsonable(data: dict) -> "LinearSystem":
        f = field_from_tag(data["field"])
        basis = tuple(Form.from_jsonable(fd) for fd in data["basis"])
        conds = tuple(_condition_from_jsonable(c) for c in data["conditions"])
        return LinearSystem(f, data["ambient"], data["degree"], basis, conds, dict(data["provenance"]))


def _coeff_point(form: Form) -> ProjPoint:
    from thetamap.exact_core import proj_point

    return proj_point(form.field, form.coeffs)


def _condition_jsonable(c: VanishingCondition) -> dict:
    return {
        "kind": c.kind,
        "points": [p.to_jsonable() for p in c.points],
        "multiplicity": c.multiplicity,
        "subspace": c.subspace.to_jsonable() if c.subspace is not None else None,
    }


def _condition_from_jsonable(data: dict) -> VanishingCondition:
    sub = ProjSubspace.from_jsonable(data["subspace"]) if data["subspace"] else None
    return VanishingCondition(
        data["kind"],
        tuple(ProjPoint.from_jsonable(p) for p in data["points"]),
        data["multiplicity"],
        sub,
    )


def _check_point_multiplicity(f: Form, pt: ProjPoint, mult: int) -> None:
    stack = [(f, 0)]
    field = f.field
    while stack:
        g, order = stack.pop()
        if not field.is_zero(g.evaluate(pt)):
            raise AssertionError("basis form misses a point-multiplicity condition")
        if order + 1 < mult and g.degree >= 1:
            # only one derivative chain per multi-index is needed for the check
            for i in range(g.ambient + 1):
                stack.append((g.partial_derivative(i), order + 1))


# ---------------------------------------------------------------------------
# condition rows


def _falling_factorial_table(p: int, d: int, max_order: int) -> np.ndarray:
    ff = np.zeros((d + 1, max_order + 1), dtype=np.int64)
    ff[:, 0] = 1
    for e in range(d + 1):
        acc = 1
        for a in range(1, max_order + 1):
            if a > e:
                break
            acc = acc * (e - a + 1) % p
            ff[e, a] = acc
    return ff


def _point_rows_fp(field: PrimeField, n: int, d: int, coords, mult: int) -> np.ndarray:
    p = field.p
    E = np.array(monomial_exponents(n, d), dtype=np.int64)
    npow = np.zeros((n + 1, d + 1), dtype=np.int64)
    for i, x in enumerate(coords):
        acc = 1
        npow[i, 0] = 1
        for k in range(1, d + 1):
            acc = acc * int(x) % p
            npow[i, k] = acc
    ff = _falling_factorial_table(p, d, mult - 1)
    rows = []
    for total in range(mult):
        for alpha in monomial_exponents(n, total):
            row = np.ones(len(E), dtype=np.int64)
            valid = np.ones(len(E), dtype=bool)
            for i in range(n + 1):
                ai = alpha[i]
                ei = E[:, i]
                if ai:
                    valid &= ei >= ai
                    row = row * ff[np.minimum(ei, d), ai] % p
                shifted = np.where(ei >= ai, ei - ai, 0)
                row = row * npow[i, shifted] % p
            row[~valid] = 0
            rows.append(row)
    return np.array(rows, dtype=np.int64)


def _point_rows_generic(field, n: int, d: int, coords, mult: int) -> list:
    powers = [[field.one] for _ in coords]
    for i, x in enumerate(coords):
        for _ in range(d):
            powers[i].append(field.mul(powers[i][-1], x))
    exps = monomial_exponents(n, d)
    rows = []
    for total in range(mult):
        for alpha in monomial_exponents(n, total):
            row = []
            for e in exps:
                if any(e[i] < alpha[i] for i in range(n + 1)):
                    row.append(field.zero)
                    continue
                c = field.one
                for i in range(n + 1):
                    for a in range(alpha[i]):
                        c = field.mul(c, field(e[i] - a))
                    c = field.mul(c, powers[i][e[i] - alpha[i]])
                row.append(c)
            rows.append(row)
    return rows


def point_multiplicity_rows(field, n: int, d: int, point: ProjPoint, mult: int):
    """Condition rows: all partials of order < mult vanish at the point."""
    if isinstance(field, PrimeField):
        return _point_rows_fp(field, n, d, point.coords, mult)
    return _point_rows_generic(field, n, d, point.coords, mult)


def _subspace_matrix(subspace: ProjSubspace) -> list:
    # columns of the parametrisation P^k -> P^n are the basis rows
    return [list(col) for col in zip(*subspace.basis)]


def subspace_rows(field, n: int, d: int, subspace: ProjSubspace):
    """Condition rows from substituting the subspace parametrisation."""
    if subspace.ambient != n:
        raise ValueError("subspace/system ambient mismatch")
    return substitution_rows(field, n, d, _subspace_matrix(subspace))


def _compose_rows(f: Form, matrix_rows) -> list:
    from thetamap.forms import compose_with_matrix

    return list(compose_with_matrix(f, matrix_rows).coeffs)


def _stack(field, blocks):
    if not blocks:
        return []
    if isinstance(field, PrimeField) and all(isinstance(b, np.ndarray) for b in blocks):
        return np.vstack(blocks)
    out = []
    for b in blocks:
        out.extend([list(r) for r in b])
    return out


def _rows_rank(field, rows) -> int:
    if isinstance(rows, np.ndarray):
        if rows.shape[0] == 0:
            return 0
        return _rref_rows(field, rows).rank
    if not rows:
        return 0
    return _rref_rows(field, rows).rank


def _kernel_system(field, n, d, rows, conditions, provenance) -> LinearSystem:
    ncoeff = monomial_count(n, d)
    if (isinstance(rows, np.ndarray) and rows.shape[0] == 0) or (
        not isinstance(rows, np.ndarray) and not rows
    ):
        kernel = [tuple(field.one if i == j else field.zero for i in range(ncoeff)) for j in range(ncoeff)]
        rank = 0
    else:
        res = _rref_rows(field, rows)
        kernel, rank = res.kernel, res.rank
    provenance = dict(provenance)
    provenance.setdefault("rank", rank)
    basis = tuple(Form(field, n, d, tuple(field(c) for c in vec)) for vec in kernel)
    return LinearSystem(field, n, d, basis, tuple(conditions), provenance)


# ---------------------------------------------------------------------------
# the public constructors


def system_fat_points(field, n: int, d: int, constraints, provenance=None) -> LinearSystem:
    """Degree-d forms on P^n with prescribed multiplicity at each point.

    ``constraints`` is an iterable of (ProjPoint, multiplicity).  The empty
    system is a valid result.
    """
    conds = []
    blocks = []
    for point, mult in constraints:
        if not 1 <= mult <= d + 1:
            raise ValueError("multiplicity must lie in [1, degree + 1]")
        conds.append(VanishingCondition.at_point(point, mult))
        blocks.append(point_multiplicity_rows(field, n, d, point, mult))
    rows = _stack(field, blocks)
    return _kernel_system(field, n, d, rows, conds, provenance or {})


def system_on_subspaces(field, n: int, d: int, subspaces) -> LinearSystem:
    """Degree-d forms vanishing identically on each listed subspace."""
    conds = []
    blocks = []
    for sub in subspaces:
        conds.append(VanishingCondition.on_subspace(sub))
        rows = subspace_rows(field, n, d, sub)
        if isinstance(field, PrimeField):
            rows = np.array([[int(x) for x in r] for r in rows], dtype=np.int64)
        blocks.append(rows)
    rows = _stack(field, blocks)
    return _kernel_system(field, n, d, rows, conds, {})


def system_on_sampled_subspaces(
    field, n: int, d: int, subspaces, margin: int = 10
) -> LinearSystem:
    """Like system_on_subspaces, but the subspace list is itself a sample of
    a larger family, so the final `margin` subspaces act as a saturation
    certificate."""
    subspaces = list(subspaces)
    if margin < 0 or margin >= len(subspaces):
        raise ValueError("margin must be non-negative and below the sample count")
    conds = []
    blocks = []
    for sub in subspaces:
        conds.append(VanishingCondition.on_subspace(sub))
        rows = subspace_rows(field, n, d, sub)
        if isinstance(field, PrimeField):
            rows = np.array([[int(x) for x in r] for r in rows], dtype=np.int64)
        blocks.append(rows)
    base = _stack(field, blocks[: len(blocks) - margin]) if margin else _stack(field, blocks)
    full = _stack(field, blocks)
    rank_base = _rows_rank(field, base)
    system = _kernel_system(field, n, d, full, conds, {})
    system.provenance["saturated"] = system.provenance["rank"] == rank_base
    system.provenance["samples"] = len(subspaces)
    system.provenance["margin"] = margin
    return system


def system_on_curve(
    field,
    n: int,
    d: int,
    samples: Sequence[ProjPoint],
    mult: int,
    margin: int = 10,
    provenance=None,
) -> LinearSystem:
    """Degree-d forms with multiplicity `mult` at every sampled curve point.

    The final `margin` samples act as a saturation certificate: if they
    still raise the rank the system is flagged unsaturated in provenance.
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    if margin >= len(samples):
        raise ValueError("need more samples than the saturation margin")
    blocks = [point_multiplicity_rows(field, n, d, pt, mult) for pt in samples]
    base = _stack(field, blocks[: len(blocks) - margin]) if margin else _stack(field, blocks)
    full = _stack(field, blocks)
    rank_base = _rows_rank(field, base)
    prov = dict(provenance or {})
    cond = VanishingCondition.on_curve_samples(samples, mult)
    system = _kernel_system(field, n, d, full, [cond], prov)
    rank_full = system.provenance["rank"]
    system.provenance["saturated"] = rank_full == rank_base
    system.provenance["samples"] = len(samples)
    system.provenance["margin"] = margin
    return system


def intersect_systems(a: LinearSystem, b: LinearSystem) -> LinearSystem:
    """The intersection of two systems as coefficient-space row spans."""
    if (a.ambient, a.degree) != (b.ambient, b.degree) or a.field != b.field:
        raise ValueError("systems live in different spaces")
    from thetamap.exact_core import intersect_subspaces

    if a.dim == 0 or b.dim == 0:
        basis = ()
    else:
        inter = intersect_subspaces(a.span(), b.span())
        basis = tuple(
            Form(a.field, a.ambient, a.degree, tuple(row)) for row in inter.basis
        )
    prov = {"intersection": [dict(a.provenance), dict(b.provenance)]}
    sat = a.saturated and b.saturated
    prov["saturated"] = sat
    return LinearSystem(
        a.field, a.ambient, a.degree, basis, a.conditions + b.conditions, prov
    )


def find_relations(
    map_forms: Sequence[Form],
    k: int,
    rng: random.Random,
    margin: int = 10,
) -> LinearSystem:
    """Degree-k forms R in the target coordinates with R(F(x)) identically 0.

    Conditions are sampled: target monomials are evaluated at the images of
    more than C(t+k, k) + margin random source points and the kernel is the
    relation space; the saturation flag is recorded as for curve systems.
    """
    if not map_forms:
        raise ValueError("empty map")
    f0 = map_forms[0]
    field, n = f0.field, f0.ambient
    if any((g.ambient, g.degree) != (n, f0.degree) or g.field != field for g in map_forms):
        raise ValueError("map components must be equidimensional of equal degree")
    t = len(map_forms) - 1
    need = monomial_count(t, k) + margin
    rows = []
    attempts = 0
    while len(rows) < need:
        attempts += 1
        if attempts > 50 * need:
            raise RuntimeError("could not sample enough points off the base locus")
        x = random_point(field, n, rng)
        values = [g.evaluate(x) for g in map_forms]
        if all(field.is_zero(v) for v in values):
            continue  # base point
        rows.append(evaluate_basis_at(field, t, k, values))
    base_rank = _rows_rank(field, rows[: need - margin])
    res = _rref_rows(field, rows)
    basis = tuple(Form(field, t, k, tuple(vec)) for vec in res.kernel)
    prov = {
        "kind": "relations",
        "samples": len(rows),
        "margin": margin,
        "rank": res.rank,
        "saturated": res.rank == base_rank,
    }
    return LinearSystem(field, t, k, basis, (), prov)
