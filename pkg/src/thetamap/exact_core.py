"""Exact coefficient fields and exact projective linear algebra.

Two interchangeable backends sit behind one small field interface:
arbitrary-precision rationals (elements are ``fractions.Fraction`` in lowest
terms) and odd prime fields F_p (elements are plain ints in ``[0, p)``).
Values stay plain and immutable; the field object carries the arithmetic.

Prime-field elimination is vectorised with numpy int64, which is safe for
p < 2**31 because a single product stays below 2**62.  Rational elimination
uses a fraction-free (Bareiss-style) forward pass to control coefficient
growth, with the reduced echelon form recovered afterwards over Fraction.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PRIME = 2_147_483_647  # largest 31-bit prime, = 3 mod 4


class DegenerateInputError(ValueError):
    """A geometric construction received degenerate input data."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond 64-bit inputs."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class RationalField:
    """The rational numbers; exact, always in lowest terms."""

    tag = "Q"

    def __call__(self, value) -> Fraction:
        return Fraction(value)

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def is_zero(self, a) -> bool:
        return a == 0

    def random(self, rng: random.Random) -> Fraction:
        # small integers keep later eliminations readable and fast
        return Fraction(rng.randrange(-99, 100))

    def format_elem(self, a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def parse_elem(self, s: str) -> Fraction:
        return Fraction(s)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("Q")

    def __repr__(self) -> str:
        return "QQ"


class PrimeField:
    """The field F_p for an odd prime p; elements are ints in [0, p)."""

    def __init__(self, p: int = DEFAULT_PRIME):
        if p == 2 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        self.p = p
        self.tag = f"Fp:{p}"

    def __call__(self, value) -> int:
        return int(value) % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def is_square(self, a) -> bool:
        a %= self.p
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def sqrt(self, a):
        """A square root of a, or None when a is a non-residue (Tonelli-Shanks)."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t * t % p, 1
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r

    def format_elem(self, a) -> str:
        return str(a % self.p)

    def parse_elem(self, s: str) -> int:
        return int(s) % self.p

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Fp", self.p))

    def __repr__(self) -> str:
        return f"GF({self.p})"


QQ = RationalField()


def field_from_tag(tag: str):
    if tag == "Q":
        return QQ
    if tag.startswith("Fp:"):
        return PrimeField(int(tag.split(":", 1)[1]))
    raise ValueError(f"unknown field tag {tag!r}")


def derived_rng(seed: int, label: str) -> random.Random:
    """A reproducible child generator; fixed labels give fixed streams."""
    digest = hashlib.sha256(f"{label}:{seed}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# ---------------------------------------------------------------------------
# matrices and elimination


@dataclass(frozen=True)
class Matrix:
    """A dense rectangular matrix over one exact field."""

    field: object
    rows: tuple

    @staticmethod
    def from_rows(field, rows: Iterable[Sequence]) -> "Matrix":
        coerced = tuple(tuple(field(x) for x in row) for row in rows)
        if not coerced:
            raise ValueError("matrix needs at least one row")
        width = len(coerced[0])
        if width == 0 or any(len(r) != width for r in coerced):
            raise ValueError("matrix rows must be non-empty and equal length")
        return Matrix(field, coerced)

    @staticmethod
    def identity(field, n: int) -> "Matrix":
        one, zero = field.one, field.zero
        return Matrix(field, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0])

    def apply(self, vec: Sequence) -> tuple:
        f = self.field
        return tuple(
            sum((f.mul(a, v) for a, v in zip(row, vec)), f.zero) for row in self.rows
        )

    def mul(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        f = self.field
        cols = list(zip(*other.rows))
        return Matrix(
            f,
            tuple(
                tuple(sum((f.mul(a, b) for a, b in zip(row, col)), f.zero) for col in cols)
                for row in self.rows
            ),
        )

    def transpose(self) -> "Matrix":
        return Matrix(self.field, tuple(zip(*self.rows)))

    def rank(self) -> int:
        return rref_kernel(self).rank

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> "Matrix":
        n = self.nrows
        if self.ncols != n:
            raise ValueError("not square")
        f = self.field
        aug = [list(row) + [f.one if i == j else f.zero for j in range(n)] for i, row in enumerate(self.rows)]
        res = _rref_rows(f, aug)
        if res.rank != n:
            raise DegenerateInputError("matrix is singular")
        return Matrix(f, tuple(tuple(row[n:]) for row in res.rref))

    def to_jsonable(self) -> dict:
        f = self.field
        return {
            "field": f.tag,
            "rows": [[f.format_elem(x) for x in row] for row in self.rows],
        }

    @staticmethod
    def from_jsonable(data: dict) -> "Matrix":
        f = field_from_tag(data["field"])
        return Matrix.from_rows(f, [[f.parse_elem(x) for x in row] for row in data["rows"]])


@dataclass(frozen=True)
class RrefResult:
    rank: int
    pivots: tuple
    rref: tuple
    kernel: tuple  # basis of the right kernel, as coordinate tuples


def _rref_rows_fp(p: int, rows) -> RrefResult:
    a = np.asarray(rows, dtype=np.int64) % p
    if a.ndim != 2:
        a = a.reshape(len(rows), -1)
    m, n = a.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = a[r] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        a = (a - np.outer(col, a[r])) % p
        pivots.append(c)
        r += 1
    rref = tuple(tuple(int(x) for x in a[i]) for i in range(r))
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    kern = []
    for fcol in free:
        v = [0] * n
        v[fcol] = 1
        for i, c in enumerate(pivots):
            v[c] = (-int(a[i, fcol])) % p
        kern.append(tuple(v))
    return RrefResult(r, tuple(pivots), rref, tuple(kern))


def _rref_rows_generic(field, rows) -> RrefResult:
    # fraction-free forward elimination after clearing denominators
    work = []
    for row in rows:
        fr = [Fraction(x) for x in row]
        den = 1
        for x in fr:
            den = den * x.denominator // _gcd(den, x.denominator)
        work.append([int(x * den) for x in fr])
    m, n = len(work), len(work[0])
    prev = 1
    r = 0
    pivots = []
    for c in range(n):
        piv = None
        for i in range(r, m):
            if work[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        for i in range(r + 1, m):
            for j in range(n - 1, c - 1, -1):
                work[i][j] = (work[i][j] * work[r][c] - work[i][c] * work[r][j]) // prev
        prev = work[r][c]
        pivots.append(c)
        r += 1
    # reduced form over Fraction (small after the fraction-free pass)
    red = [[Fraction(x) for x in work[i]] for i in range(r)]
    for i in range(r - 1, -1, -1):
        c = pivots[i]
        lead = red[i][c]
        red[i] = [x / lead for x in red[i]]
        for k in range(i):
            factor = red[k][c]
            if factor:
                red[k] = [x - factor * y for x, y in zip(red[k], red[i])]
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    kern = []
    for fcol in free:
        v = [Fraction(0)] * n
        v[fcol] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -red[i][fcol]
        kern.append(tuple(v))
    return RrefResult(r, tuple(pivots), tuple(tuple(row) for row in red), tuple(kern))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a if a else 1


def _rref_rows(field, rows) -> RrefResult:
    if isinstance(rows, np.ndarray):
        if rows.shape[0] == 0:
            return RrefResult(0, (), (), ())
        if not isinstance(field, PrimeField):
            raise TypeError("array input is only supported over prime fields")
        return _rref_rows_fp(field.p, rows)
    if not rows:
        return RrefResult(0, (), (), ())
    if isinstance(field, PrimeField):
        return _rref_rows_fp(field.p, [[int(x) % field.p for x in row] for row in rows])
    return _rref_rows_generic(field, rows)


def rref_kernel(m: Matrix) -> RrefResult:
    """Rank, pivots, reduced echelon rows and a right-kernel basis of m."""
    return _rref_rows(m.field, m.rows)


def solve_linear(field, a_rows, b_vec):
    """One solution x of A x = b, or None when the system is inconsistent."""
    aug = [list(row) + [bi] for row, bi in zip(a_rows, b_vec)]
    res = _rref_rows(field, aug)
    ncols = len(a_rows[0])
    if ncols in res.pivots:
        return None  # pivot in the augmented column
    x = [field.zero] * ncols
    for i, c in enumerate(res.pivots):
        x[c] = res.rref[i][ncols]
    return tuple(x)


# ---------------------------------------------------------------------------
# projective points and subspaces


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^n, stored with its first non-zero coordinate scaled to 1."""

    field: object
    coords: tuple

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def to_jsonable(self) -> dict:
        f = self.field
        return {"field": f.tag, "coords": [f.format_elem(x) for x in self.coords]}

    @staticmethod
    def from_jsonable(data: dict) -> "ProjPoint":
        f = field_from_tag(data["field"])
        return proj_point(f, [f.parse_elem(x) for x in data["coords"]])


def proj_point(field, coords: Sequence) -> ProjPoint:
    vals = [field(x) for x in coords]
    lead = next((x for x in vals if not field.is_zero(x)), None)
    if lead is None:
        raise DegenerateInputError("projective point needs a non-zero coordinate")
    inv = field.inv(lead)
    return ProjPoint(field, tuple(field.mul(inv, x) for x in vals))


def random_point(field, ambient: int, rng: random.Random) -> ProjPoint:
    """A reproducible random point of P^ambient, uniform over coordinate tuples."""
    if ambient < 1:
        raise ValueError("ambient dimension must be at least 1")
    while True:
        coords = [field.random(rng) for _ in range(ambient + 1)]
        if any(not field.is_zero(x) for x in coords):
            return proj_point(field, coords)


@dataclass(frozen=True)
class ProjSubspace:
    """A linear subspace of P^ambient with a canonical reduced-echelon basis.

    An empty basis is the empty subspace, which is distinct from a single
    point (projective dimension 0).
    """

    field: object
    ambient: int
    basis: tuple  # rref rows; canonical, so == compares subspaces
    pivots: tuple

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @property
    def is_empty(self) -> bool:
        return not self.basis

    def basis_points(self) -> tuple:
        return tuple(proj_point(self.field, row) for row in self.basis)

    def reduce_vector(self, vec: Sequence) -> tuple:
        """Residue of vec after eliminating against the basis rows."""
        f = self.field
        v = [f(x) for x in vec]
        for row, c in zip(self.basis, self.pivots):
            factor = v[c]
            if not f.is_zero(factor):
                v = [f.sub(x, f.mul(factor, y)) for x, y in zip(v, row)]
        return tuple(v)

    def contains_point(self, p: ProjPoint) -> bool:
        return all(self.field.is_zero(x) for x in self.reduce_vector(p.coords))

    def contains_subspace(self, other: "ProjSubspace") -> bool:
        return all(
            all(self.field.is_zero(x) for x in self.reduce_vector(row)) for row in other.basis
        )

    def annihilator_rows(self) -> tuple:
        """A basis of the linear forms vanishing on the subspace."""
        if self.is_empty:
            raise ValueError("empty subspace")
        res = _rref_rows(self.field, list(self.basis))
        return res.kernel

    def to_jsonable(self) -> dict:
        f = self.field
        return {
            "field": f.tag,
            "ambient": self.ambient,
            "basis": [[f.format_elem(x) for x in row] for row in self.basis],
        }

    @staticmethod
    def from_jsonable(data: dict) -> "ProjSubspace":
        f = field_from_tag(data["field"])
        rows = [[f.parse_elem(x) for x in row] for row in data["basis"]]
        return span_rows(f, data["ambient"], rows)


def span_rows(field, ambient: int, rows) -> ProjSubspace:
    if not rows:
        return ProjSubspace(field, ambient, (), ())
    res = _rref_rows(field, rows)
    return ProjSubspace(field, ambient, res.rref, res.pivots)


def span(points: Sequence[ProjPoint]) -> ProjSubspace:
    """The smallest projective subspace containing the given points."""
    if not points:
        raise ValueError("span of no points is undefined")
    ambient = points[0].dim
    field = points[0].field
    if any(p.dim != ambient or p.field != field for p in points):
        raise ValueError("points must share one ambient projective space")
    return span_rows(field, ambient, [list(p.coords) for p in points])


def intersect_subspaces(a: ProjSubspace, b: ProjSubspace) -> ProjSubspace:
    """Exact intersection; the result may be empty (distinct from a point)."""
    if a.ambient != b.ambient or a.field != b.field:
        raise ValueError("subspaces live in different ambient spaces")
    field = a.field
    if a.is_empty or b.is_empty:
        return ProjSubspace(field, a.ambient, (), ())
    # vectors u, v with u^T A = v^T B: kernel of the stacked transpose
    ka, kb = len(a.basis), len(b.basis)
    rows = []
    for col in range(a.ambient + 1):
        rows.append(
            [a.basis[i][col] for i in range(ka)] + [field.neg(b.basis[j][col]) for j in range(kb)]
        )
    res = _rref_rows(field, rows)
    vecs = []
    for kern in res.kernel:
        u = kern[:ka]
        vec = [field.zero] * (a.ambient + 1)
        for i, ui in enumerate(u):
            if field.is_zero(ui):
                continue
            for c in range(a.ambient + 1):
                vec[c] = field.add(vec[c], field.mul(ui, a.basis[i][c]))
        if any(not field.is_zero(x) for x in vec):
            vecs.append(vec)
    return span_rows(field, a.ambient, vecs)


@dataclass(frozen=True)
class SubspaceChart:
    """Exact coordinates on a subspace, identifying it with P^dim.

    With a reduced-echelon basis the local coordinates of an ambient point
    are just its entries at the pivot columns.
    """

    subspace: ProjSubspace

    @property
    def local_dim(self) -> int:
        return self.subspace.dim

    def to_local(self, p: ProjPoint) -> ProjPoint:
        sub = self.subspace
        coords = [p.coords[c] for c in sub.pivots]
        local = proj_point(sub.field, coords)
        if self.to_ambient(local) != p:
            raise DegenerateInputError("point does not lie on the subspace")
        return local

    def to_ambient(self, local: ProjPoint) -> ProjPoint:
        sub = self.subspace
        f = sub.field
        vec = [f.zero] * (sub.ambient + 1)
        for lam, row in zip(local.coords, sub.basis):
            if f.is_zero(lam):
                continue
            for c in range(sub.ambient + 1):
                vec[c] = f.add(vec[c], f.mul(lam, row[c]))
        return proj_point(f, vec)

    def basis_matrix(self) -> Matrix:
        """Columns are the basis rows: the linear map P^dim -> ambient."""
        sub = self.subspace
        cols = list(zip(*sub.basis))
        return Matrix.from_rows(sub.field, cols)
