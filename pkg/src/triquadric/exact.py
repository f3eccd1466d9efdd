"""Exact rational linear algebra and quadratic-form primitives.

Everything here works over Q with `fractions.Fraction`; no floating point.
Values are immutable after construction and all operations are pure
functions, so they are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch

Rat = Fraction

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def rat(x) -> Fraction:
    """Coerce ints, strings like "3/4", and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def vec(entries) -> Vec:
    return tuple(rat(e) for e in entries)


def mat(rows) -> Mat:
    out = tuple(vec(r) for r in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DimensionMismatch("ragged matrix")
    return out


# ---------------------------------------------------------------------------
# vector / matrix arithmetic


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))

def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))

def vec_scale(c, a: Vec) -> Vec:
    c = rat(c)
    return tuple(c * x for x in a)

def dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), Fraction(0))

def mat_vec(m: Mat, x: Vec) -> Vec:
    return tuple(dot(row, x) for row in m)

def transpose(m: Mat) -> Mat:
    return tuple(zip(*m)) if m else ()

def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(ra, cb) for cb in bt) for ra in a)

def identity(n: int) -> Mat:
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def is_zero_vec(a: Vec) -> bool:
    return all(x == 0 for x in a)


def primitive_integer_vector(a: Vec) -> tuple[int, ...]:
    """Scale a nonzero rational vector to coprime integers, first nonzero > 0."""
    if is_zero_vec(a):
        raise ValueError("zero vector has no primitive representative")
    denom_lcm = 1
    for x in a:
        denom_lcm = denom_lcm * x.denominator // math.gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in a]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def _scaled_int_matrix(m: Mat) -> tuple[list[list[int]], int]:
    """Common-denominator integer copy of m; returns (matrix, scale)."""
    scale = 1
    for row in m:
        for x in row:
            scale = scale * x.denominator // math.gcd(scale, x.denominator)
    return [[int(x * scale) for x in row] for row in m], scale


def mat_det(m: Mat) -> Fraction:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in m):
        raise DimensionMismatch("determinant of non-square matrix")
    a, scale = _scaled_int_matrix(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if pivot is None:
                return Fraction(0)
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return Fraction(sign * a[n - 1][n - 1], scale**n)


def rref(m: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form over Q; returns (rref, pivot columns)."""
    rows = [list(r) for r in m]
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in rows), pivots


def mat_rank(m: Mat) -> int:
    if not m:
        return 0
    _, pivots = rref(m)
    return len(pivots)


def kernel_basis(m: Mat) -> list[Vec]:
    """Basis of the right kernel {x : m @ x = 0}."""
    if not m:
        return []
    ncols = len(m[0])
    red, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            x[pc] = -red[r][fc]
        basis.append(tuple(x))
    return basis


def integer_kernel_basis(m: Mat) -> list[Vec]:
    """Z-basis of the saturated kernel lattice {x in Z^n : m x = 0}.

    Column echelon with unimodular column operations; because the lattice is
    an intersection of Z^n with a Q-subspace it is saturated, so the returned
    rows stay linearly independent modulo every prime.  This matters wherever
    a kernel basis is later reduced mod p: rational elimination bases can
    silently drop rank there."""
    if not m:
        return []
    ncols = len(m[0])
    a = []
    for row in m:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        a.append([int(x * lcm) for x in row])
    v = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]

    def col_addmul(dst: int, src: int, q: int):
        for i in range(len(a)):
            a[i][dst] -= q * a[i][src]
        for i in range(ncols):
            v[i][dst] -= q * v[i][src]

    def col_swap(i: int, j: int):
        for r in range(len(a)):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(ncols):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    col = 0
    for row in range(len(a)):
        while True:
            nz = [j for j in range(col, ncols) if a[row][j] != 0]
            if not nz:
                break
            jmin = min(nz, key=lambda j: abs(a[row][j]))
            done = True
            for j in nz:
                if j == jmin:
                    continue
                q = a[row][j] // a[row][jmin]
                col_addmul(j, jmin, q)
                if a[row][j] != 0:
                    done = False
            if done and all(a[row][j] == 0 for j in range(col, ncols) if j != jmin):
                if jmin != col:
                    col_swap(col, jmin)
                col += 1
                break
    basis = []
    for j in range(col, ncols):
        x = tuple(Fraction(v[i][j]) for i in range(ncols))
        if not is_zero_vec(x):
            lead = next(c for c in x if c != 0)
            if lead < 0:
                x = tuple(-c for c in x)
            basis.append(x)
    return basis


def saturated_rowspan_basis(rows: Mat) -> Mat:
    """Z-basis of rowspan(rows) intersected with Z^n (a saturated lattice,
    so the basis keeps full rank modulo every prime)."""
    ann = integer_kernel_basis(rows)
    if not ann:
        n = len(rows[0])
        return tuple(
            tuple(Fraction(1 if i == j else 0) for j in range(n))
            for i in range(n)
        )
    return tuple(integer_kernel_basis(tuple(ann)))


def solve_in_rowspan(rows: Mat, target: Vec) -> Vec | None:
    """Coefficients c with sum(c_i rows_i) = target, or None if unsolvable."""
    # solve rows^T c = target by elimination on the transposed system
    a = [list(r) + [t] for r, t in zip(transpose(rows), target)]
    ncols = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(a)):
        if a[i][-1] != 0:
            return None
    sol = [Fraction(0)] * ncols
    for row_idx, c in enumerate(pivots):
        sol[c] = a[row_idx][-1]
    return tuple(sol)


def mat_inverse(m: Mat) -> Mat:
    n = len(m)
    aug = tuple(tuple(m[i]) + tuple(identity(n)[i]) for i in range(n))
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return tuple(row[n:] for row in red)


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class Signature:
    """Inertia counts of a real symmetric form: positives, negatives, nullity."""

    n_plus: int
    n_minus: int
    n_zero: int

    def __post_init__(self):
        if min(self.n_plus, self.n_minus, self.n_zero) < 0:
            raise ValueError("negative signature count")


@dataclass(frozen=True)
class QuadForm:
    """Quadratic form Q(x) = x^T A x with A symmetric over Q."""

    n: int
    gram: Mat

    def __post_init__(self):
        if len(self.gram) != self.n or any(len(r) != self.n for r in self.gram):
            raise DimensionMismatch("gram matrix must be n x n")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.gram[i][j] != self.gram[j][i]:
                    raise ValueError("gram matrix must be symmetric")

    @classmethod
    def from_rows(cls, rows) -> "QuadForm":
        g = mat(rows)
        return cls(len(g), g)

    @classmethod
    def diagonal(cls, entries) -> "QuadForm":
        d = vec(entries)
        n = len(d)
        zero = Fraction(0)
        g = tuple(
            tuple(d[i] if i == j else zero for j in range(n)) for i in range(n)
        )
        return cls(n, g)

    @classmethod
    def zero(cls, n: int) -> "QuadForm":
        return cls.diagonal([0] * n)

    def __call__(self, x) -> Fraction:
        return eval_form(self, x)

    def bilinear(self, x, y) -> Fraction:
        """x^T A y, the polar bilinear form (so bilinear(x,x) = Q(x))."""
        x, y = vec(x), vec(y)
        if len(x) != self.n or len(y) != self.n:
            raise DimensionMismatch("vector length must equal form dimension")
        return dot(mat_vec(self.gram, x), y)

    def det(self) -> Fraction:
        return mat_det(self.gram)

    def scale(self, c) -> "QuadForm":
        c = rat(c)
        return QuadForm(self.n, tuple(tuple(c * x for x in row) for row in self.gram))

    def add(self, other: "QuadForm") -> "QuadForm":
        if self.n != other.n:
            raise DimensionMismatch("cannot add forms of different dimension")
        g = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.gram, other.gram)
        )
        return QuadForm(self.n, g)


def eval_form(q: QuadForm, x) -> Fraction:
    """Q(x) = x^T A x, exactly."""
    x = vec(x)
    if len(x) != q.n:
        raise DimensionMismatch(f"expected {q.n} coordinates, got {len(x)}")
    return dot(mat_vec(q.gram, x), x)


def gradient(q: QuadForm, x) -> Vec:
    """Gradient 2 A x of Q at x."""
    x = vec(x)
    if len(x) != q.n:
        raise DimensionMismatch(f"expected {q.n} coordinates, got {len(x)}")
    return tuple(2 * e for e in mat_vec(q.gram, x))


def rank(q: QuadForm) -> int:
    return mat_rank(q.gram)


def congruence_diagonalize(q: QuadForm) -> tuple[QuadForm, Mat]:
    """Diagonalize by congruence: returns (D, U) with U^T A U = D exactly.

    Symmetric Gaussian elimination.  A zero pivot with some nonzero diagonal
    entry further down is fixed by a swap; an all-zero diagonal with a nonzero
    off-diagonal entry a_jk is fixed by the hyperbolic move col_j += col_k
    (which puts 2 a_jk on the diagonal).  No eigenvalues, no floating point.
    """
    n = q.n
    a = [list(row) for row in q.gram]
    u = [list(row) for row in identity(n)]

    def col_op(dst: int, src: int, factor: Fraction):
        # column dst += factor * column src, applied congruently
        for i in range(n):
            a[i][dst] += factor * a[i][src]
        for j in range(n):
            a[dst][j] += factor * a[src][j]
        for i in range(n):
            u[i][dst] += factor * u[i][src]

    def col_swap(i: int, j: int):
        for r in range(n):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        a[i], a[j] = a[j], a[i]
        for r in range(n):
            u[r][i], u[r][j] = u[r][j], u[r][i]

    for k in range(n):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][i] != 0), None)
            if swap is not None:
                col_swap(k, swap)
            else:
                off = None
                for i in range(k, n):
                    for j in range(i + 1, n):
                        if a[i][j] != 0:
                            off = (i, j)
                            break
                    if off:
                        break
                if off is None:
                    break  # remaining block is zero
                i, j = off
                col_op(i, j, Fraction(1))  # now a[i][i] = 2 a_ij != 0
                if i != k:
                    col_swap(k, i)
        pivot = a[k][k]
        for j in range(k + 1, n):
            if a[k][j] != 0:
                col_op(j, k, -a[k][j] / pivot)

    d = QuadForm.diagonal([a[i][i] for i in range(n)])
    return d, tuple(tuple(row) for row in u)


def signature_real(q: QuadForm) -> Signature:
    """Counts of positive / negative / zero diagonal entries after
    congruence diagonalization (basis independent)."""
    d, _ = congruence_diagonalize(q)
    plus = sum(1 for i in range(q.n) if d.gram[i][i] > 0)
    minus = sum(1 for i in range(q.n) if d.gram[i][i] < 0)
    return Signature(plus, minus, q.n - plus - minus)


@dataclass(frozen=True)
class QuadSystem:
    """An ordered triple of quadratic forms in the same number of variables."""

    forms: tuple[QuadForm, QuadForm, QuadForm]

    def __post_init__(self):
        if len(self.forms) != 3:
            raise ValueError("a system consists of exactly three forms")
        n = self.forms[0].n
        if any(f.n != n for f in self.forms):
            raise DimensionMismatch("all three forms must share one dimension")

    @property
    def n(self) -> int:
        return self.forms[0].n

    def combine(self, t) -> QuadForm:
        """t1*Q1 + t2*Q2 + t3*Q3 for a coefficient triple t."""
        t = vec(t)
        if len(t) != 3:
            raise DimensionMismatch("coefficient vector must have length 3")
        out = self.forms[0].scale(t[0])
        out = out.add(self.forms[1].scale(t[1]))
        return out.add(self.forms[2].scale(t[2]))


@dataclass(frozen=True)
class LinearSpace:
    """Projective t-plane in P^{n-1}, spanned by the rows of `basis`."""

    n: int
    t: int
    basis: Mat

    def __post_init__(self):
        if len(self.basis) != self.t + 1:
            raise DimensionMismatch("basis must have t+1 rows")
        if any(len(r) != self.n for r in self.basis):
            raise DimensionMismatch("basis rows must have length n")
        if not 0 <= self.t <= self.n - 1:
            raise ValueError("need 0 <= t <= n-1")
        if mat_rank(self.basis) != self.t + 1:
            raise ValueError("basis rows must be linearly independent")

    @classmethod
    def from_rows(cls, rows) -> "LinearSpace":
        b = mat(rows)
        return cls(len(b[0]), len(b) - 1, b)

    def contains_point(self, x) -> bool:
        x = vec(x)
        if is_zero_vec(x):
            return False
        return solve_in_rowspan(self.basis, x) is not None

    def contains_space(self, other: "LinearSpace") -> bool:
        if other.n != self.n:
            raise DimensionMismatch("ambient dimensions differ")
        stacked = self.basis + other.basis
        return mat_rank(stacked) == self.t + 1

    def span_with(self, x) -> "LinearSpace":
        x = vec(x)
        if self.contains_point(x):
            raise ValueError("point already lies in the space")
        return LinearSpace(self.n, self.t + 1, self.basis + (x,))


@dataclass(frozen=True)
class FFPoint:
    """Projective point over F_p, normalized so the first nonzero entry is 1."""

    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if any(not 0 <= c < self.p for c in self.coords):
            raise ValueError("coordinates must be reduced mod p")
        lead = next((c for c in self.coords if c != 0), None)
        if lead is None:
            raise ValueError("projective point cannot be zero")
        if lead != 1:
            raise ValueError("representative must be normalized (first nonzero = 1)")

    @classmethod
    def normalize(cls, p: int, coords) -> "FFPoint":
        cs = [c % p for c in coords]
        lead = next((c for c in cs if c != 0), None)
        if lead is None:
            raise ValueError("projective point cannot be zero")
        inv = pow(lead, p - 2, p)
        return cls(p, tuple(c * inv % p for c in cs))


@dataclass(frozen=True)
class PadicApprox:
    """Point with coordinates known mod p^precision, at least one unit."""

    p: int
    precision: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        mod = self.p**self.precision
        if any(not 0 <= c < mod for c in self.coords):
            raise ValueError("coordinates must be reduced mod p^precision")
        if all(c % self.p == 0 for c in self.coords):
            raise ValueError("representative must be primitive (one unit coordinate)")

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    def truncate(self, k: int) -> "PadicApprox":
        if k > self.precision:
            raise ValueError("cannot increase precision by truncation")
        mod = self.p**k
        return PadicApprox(self.p, k, tuple(c % mod for c in self.coords))

    def first_unit_index(self) -> int:
        return next(i for i, c in enumerate(self.coords) if c % self.p != 0)
