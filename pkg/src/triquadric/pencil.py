"""Determinant forms and discriminants for pencils and nets of quadrics.

The binary determinant form det(X*A + Y*B) and its discriminant certify
whether a pair of quadrics is a nonsingular system: the pair is nonsingular
exactly when the form is nonzero with distinct linear factors over the
algebraic closure, i.e. nonzero discriminant.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DimensionMismatch, TriesExhausted
from .exact import (
    Mat,
    QuadForm,
    QuadSystem,
    Vec,
    kernel_basis,
    mat_det,
    mat_rank,
    rat,
    vec,
)
from .ffenum import SweepOutcome, sweep_triple_singular


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form of fixed degree d; coeffs[j] multiplies X^(d-j) Y^j."""

    degree: int
    coeffs: Vec

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise ValueError("need degree+1 coefficients")

    @classmethod
    def make(cls, coeffs) -> "BinaryForm":
        cs = vec(coeffs)
        return cls(len(cs) - 1, cs)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __call__(self, x, y) -> Fraction:
        x, y = rat(x), rat(y)
        d = self.degree
        return sum(
            (c * x ** (d - j) * y**j for j, c in enumerate(self.coeffs)),
            Fraction(0),
        )

    def dehomogenized(self) -> list[Fraction]:
        """Coefficients of f(x, 1), ascending in x."""
        return [self.coeffs[self.degree - i] for i in range(self.degree + 1)]

    def shear(self, s) -> "BinaryForm":
        """Substitute Y -> s*X + Y (unimodular, discriminant preserving)."""
        s = rat(s)
        d = self.degree
        out = [Fraction(0)] * (d + 1)
        for j, c in enumerate(self.coeffs):
            if c == 0:
                continue
            # c X^(d-j) (sX + Y)^j contributes to X^(d-i) Y^i for i <= j
            for i in range(j + 1):
                out[i] += c * math.comb(j, i) * s ** (j - i)
        return BinaryForm(d, tuple(out))


@dataclass(frozen=True)
class TrivariateForm:
    """Homogeneous form in t1, t2, t3; coefficient map keyed by exponents."""

    degree: int
    coeffs: tuple[tuple[tuple[int, int, int], Fraction], ...]

    @classmethod
    def from_dict(cls, degree: int, coeffs: dict) -> "TrivariateForm":
        cleaned = {}
        for e, c in coeffs.items():
            e = tuple(e)
            c = rat(c)
            if sum(e) != degree:
                raise ValueError(f"exponents {e} do not sum to {degree}")
            if c != 0:
                cleaned[e] = c
        return cls(degree, tuple(sorted(cleaned.items())))

    def __call__(self, t) -> Fraction:
        t = vec(t)
        total = Fraction(0)
        for (a, b, c), coeff in self.coeffs:
            total += coeff * t[0] ** a * t[1] ** b * t[2] ** c
        return total

    def is_zero(self) -> bool:
        return not self.coeffs

    def restrict_to_pencil(self) -> BinaryForm:
        """The binary form f(X, Y, 0)."""
        out = [Fraction(0)] * (self.degree + 1)
        for (a, b, c), coeff in self.coeffs:
            if c == 0:
                out[b] += coeff
        return BinaryForm(self.degree, tuple(out))


# ---------------------------------------------------------------------------
# univariate helpers (exact)


def _poly_interpolate(points: list[tuple[Fraction, Fraction]]) -> list[Fraction]:
    """Coefficients (ascending) of the polynomial through the given points,
    by Newton divided differences."""
    xs = [p[0] for p in points]
    coef = [p[1] for p in points]
    n = len(points)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    # expand Newton form
    out = [Fraction(0)] * n
    acc = [Fraction(1)]  # product (x - x_0)...(x - x_{k-1})
    for k in range(n):
        for i, a in enumerate(acc):
            out[i] += coef[k] * a
        nxt = [Fraction(0)] * (len(acc) + 1)
        for i, a in enumerate(acc):
            nxt[i + 1] += a
            nxt[i] -= xs[k] * a
        acc = nxt
    return out


def _poly_degree(cs: list[Fraction]) -> int:
    for i in range(len(cs) - 1, -1, -1):
        if cs[i] != 0:
            return i
    return -1


def _poly_derivative(cs: list[Fraction]) -> list[Fraction]:
    return [i * c for i, c in enumerate(cs)][1:] or [Fraction(0)]


def _poly_mod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = a[:]
    da, db = _poly_degree(a), _poly_degree(b)
    while da >= db and da >= 0:
        f = a[da] / b[db]
        for i in range(db + 1):
            a[da - db + i] -= f * b[i]
        a[da] = Fraction(0)
        da = _poly_degree(a)
    return a


def poly_gcd(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Monic gcd of univariate polynomials over Q."""
    a, b = a[:], b[:]
    while _poly_degree(b) >= 0:
        a, b = b, _poly_mod(a, b)
    d = _poly_degree(a)
    if d < 0:
        return [Fraction(0)]
    lc = a[d]
    return [c / lc for c in a[: d + 1]]


def _trial_factor(n: int) -> list[int]:
    """Prime factorization; trial division then Pollard rho for the rest."""
    n = abs(n)
    out = []
    for q in (2, 3, 5, 7, 11, 13):
        while n % q == 0:
            out.append(q)
            n //= q
    f = 17
    while f * f <= n and f < 100000:
        while n % f == 0:
            out.append(f)
            n //= f
        f += 2

    def rho(m: int) -> int:
        if m % 2 == 0:
            return 2
        for c in range(1, 20):
            x = y = 2
            d = 1
            while d == 1:
                x = (x * x + c) % m
                y = (y * y + c) % m
                y = (y * y + c) % m
                d = math.gcd(abs(x - y), m)
            if d != m:
                return d
        raise ArithmeticError(f"failed to factor {m}")

    def is_prime(m: int) -> bool:
        if m < 2:
            return False
        for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
            if m % a == 0:
                return m == a
            d, s = m - 1, 0
            while d % 2 == 0:
                d //= 2
                s += 1
            x = pow(a, d, m)
            if x in (1, m - 1):
                continue
            for _ in range(s - 1):
                x = x * x % m
                if x == m - 1:
                    break
            else:
                return False
        return True

    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out.append(m)
            continue
        d = rho(m)
        stack.extend([d, m // d])
    return sorted(out)


def _divisors(n: int) -> list[int]:
    if n == 0:
        return []
    facs = _trial_factor(n)
    divs = {1}
    for f in facs:
        divs |= {d * f for d in divs}
    return sorted(divs)


def rational_roots(cs: list[Fraction]) -> list[Fraction]:
    """All rational roots of a univariate polynomial over Q (no multiplicity)."""
    d = _poly_degree(cs)
    if d <= 0:
        return []
    lcm = 1
    for c in cs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ics = [int(c * lcm) for c in cs[: d + 1]]
    roots = set()
    shift = 0
    while ics[0] == 0:
        roots.add(Fraction(0))
        ics = ics[1:]
        shift += 1
        if len(ics) == 1:
            return sorted(roots)
    if len(ics) == 2:
        roots.add(Fraction(-ics[0], ics[1]))
        return sorted(roots)
    if len(ics) == 3:
        a, b, c = ics[2], ics[1], ics[0]
        disc = b * b - 4 * a * c
        if disc >= 0:
            s = math.isqrt(disc)
            if s * s == disc:
                roots.add(Fraction(-b + s, 2 * a))
                roots.add(Fraction(-b - s, 2 * a))
        return sorted(roots)
    for u in _divisors(ics[0]):
        for v in _divisors(ics[-1]):
            for cand in (Fraction(u, v), Fraction(-u, v)):
                if cand in roots:
                    continue
                val = Fraction(0)
                for c in reversed(ics):
                    val = val * cand + c
                if val == 0:
                    roots.add(cand)
    return sorted(roots)


def _resultant(f: list[Fraction], g: list[Fraction]) -> Fraction:
    """Resultant of univariate polynomials via the Sylvester determinant."""
    df, dg = _poly_degree(f), _poly_degree(g)
    if df < 0 or dg < 0:
        return Fraction(0)
    if df == 0:
        return f[0] ** dg
    if dg == 0:
        return g[0] ** df
    size = df + dg
    rows = []
    fd = [f[df - i] for i in range(df + 1)]  # descending
    gd = [g[dg - i] for i in range(dg + 1)]
    for i in range(dg):
        rows.append(
            tuple([Fraction(0)] * i + fd + [Fraction(0)] * (size - df - 1 - i))
        )
    for i in range(df):
        rows.append(
            tuple([Fraction(0)] * i + gd + [Fraction(0)] * (size - dg - 1 - i))
        )
    return mat_det(tuple(rows))


# ---------------------------------------------------------------------------
# spec operations


@lru_cache(maxsize=1024)
def det_form_pencil(qa: QuadForm, qb: QuadForm) -> BinaryForm:
    """det(X*A + Y*B) as an exact binary form of degree m.

    Computed by evaluating det(A + y*B) at m+1 integer nodes and
    interpolating; the coefficient of X^(m-j) Y^j is the y^j coefficient.
    """
    if qa.n != qb.n:
        raise DimensionMismatch("pencil members must share a dimension")
    m = qa.n
    pts = []
    for k in range(m + 1):
        y = Fraction(k)
        member = qa.add(qb.scale(y))
        pts.append((y, mat_det(member.gram)))
    cs = _poly_interpolate(pts)
    return BinaryForm(m, tuple(cs))


def det_form_net(system: QuadSystem) -> TrivariateForm:
    """det(t1*A1 + t2*A2 + t3*A3) of degree n, by exact interpolation on an
    (n+1) x (n+1) evaluation grid (tensor-structured linear solve)."""
    n = system.n
    a1, a2, a3 = system.forms
    # g(u, v) = det(u A1 + v A2 + A3); recover f by homogenizing with t3
    per_u: list[list[Fraction]] = []
    for iu in range(n + 1):
        u = Fraction(iu)
        pts = []
        for iv in range(n + 1):
            v = Fraction(iv)
            member = a1.scale(u).add(a2.scale(v)).add(a3)
            pts.append((v, mat_det(member.gram)))
        per_u.append(_poly_interpolate(pts))  # coefficients in v at this u
    coeffs: dict[tuple[int, int, int], Fraction] = {}
    for b in range(n + 1):
        pts = [(Fraction(iu), per_u[iu][b]) for iu in range(n + 1)]
        in_u = _poly_interpolate(pts)
        for a, c in enumerate(in_u):
            if c != 0:
                if a + b > n:
                    raise ArithmeticError("interpolated degree exceeds n")
                coeffs[(a, b, n - a - b)] = c
    return TrivariateForm.from_dict(n, coeffs)


@lru_cache(maxsize=1024)
def disc_binary(f: BinaryForm) -> Fraction:
    """Discriminant of a binary form, zero iff it has a repeated root in the
    algebraic closure (including at [1:0]).

    Normalization: Disc = (-1)^(d(d-1)/2) Res(f, f') / lc(f) on the
    dehomogenization.  A vanishing X^d coefficient is repaired first by the
    unimodular shear Y -> sX + Y, which preserves the discriminant exactly.
    """
    if f.is_zero():
        raise ValueError("discriminant of the zero form is undefined")
    d = f.degree
    if d < 1:
        raise ValueError("degree must be >= 1")
    g = f
    if g.coeffs[0] == 0:
        s = next(k for k in range(d + 1) if f(1, k) != 0)
        g = f.shear(s)
        assert g.coeffs[0] != 0
    cs = g.dehomogenized()
    lc = cs[-1]
    res = _resultant(cs, _poly_derivative(cs))
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * res / lc


def has_repeated_root(f: BinaryForm) -> bool:
    """Projective repeated-root test via gcd (independent of disc_binary)."""
    if f.is_zero():
        raise ValueError("zero form")
    cs = f.dehomogenized()
    deg_affine = _poly_degree(cs)
    if f.degree - deg_affine >= 2:
        return True  # [1:0] is a repeated root
    g = poly_gcd(cs, _poly_derivative(cs))
    return _poly_degree(g) >= 1


@dataclass(frozen=True)
class PairCertificate:
    """Verdict of the nonsingular-pair test with its discriminant witness."""

    verdict: bool
    witness: Fraction
    pencil_identically_zero: bool = False


def pair_nonsingular(qa: QuadForm, qb: QuadForm) -> PairCertificate:
    """A pair is a nonsingular system iff det(XA+YB) is nonzero with distinct
    linear factors; the witness is that form's discriminant."""
    if qa.n != qb.n:
        raise DimensionMismatch("pair members must share a dimension")
    if qa.n < 2:
        raise ValueError("pair test needs at least 2 variables")
    f = det_form_pencil(qa, qb)
    if f.is_zero():
        return PairCertificate(False, Fraction(0), pencil_identically_zero=True)
    w = disc_binary(f)
    return PairCertificate(w != 0, w)


def pencil_rank_property(
    qa: QuadForm, qb: QuadForm, samples: int, seed: int = 0
) -> bool:
    """Check rank(a*A + b*B) >= m-1 at `samples` random nontrivial (a, b)
    plus every rational root of the pencil form (and [1:0])."""
    m = qa.n
    rng = random.Random(seed)
    probes: list[tuple[Fraction, Fraction]] = [(Fraction(1), Fraction(0))]
    f = det_form_pencil(qa, qb)
    if not f.is_zero():
        for root in rational_roots(f.dehomogenized()):
            probes.append((root, Fraction(1)))
    for _ in range(samples):
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        b = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if a == 0 and b == 0:
            b = Fraction(1)
        probes.append((a, b))
    for a, b in probes:
        member = qa.scale(a).add(qb.scale(b))
        if mat_rank(member.gram) < m - 1:
            return False
    return True


def repeated_rational_roots(f: BinaryForm) -> list[Fraction]:
    """Rational affine roots [r : 1] of multiplicity >= 2."""
    cs = f.dehomogenized()
    g = poly_gcd(cs, _poly_derivative(cs))
    if _poly_degree(g) < 1:
        return []
    return rational_roots(g)


def singular_member_kernel(
    qa: QuadForm, qb: QuadForm, root: Fraction
) -> list[Vec]:
    """Kernel basis of root*A + B (gradient directions that vanish)."""
    member = qa.scale(root).add(qb)
    return kernel_basis(member.gram)


@dataclass(frozen=True)
class GeneratorWitnesses:
    d1_m3: Fraction
    d2_m12: Fraction
    d2_m13: Fraction
    det_m: Fraction


@dataclass(frozen=True)
class GeneratorTriple:
    """Coefficient vectors m1, m2, m3 regenerating the system."""

    m1: Vec
    m2: Vec
    m3: Vec

    def __post_init__(self):
        if mat_det((self.m1, self.m2, self.m3)) == 0:
            raise ValueError("generator vectors must be linearly independent")

    def matrix(self) -> Mat:
        return (self.m1, self.m2, self.m3)


def _candidate_triples(seed: int, max_tries: int):
    """Standard basis first, then seeded integer vectors of growing height."""
    e = (
        (Fraction(1), Fraction(0), Fraction(0)),
        (Fraction(0), Fraction(1), Fraction(0)),
        (Fraction(0), Fraction(0), Fraction(1)),
    )
    yield e
    rng = random.Random(seed)
    height = 5
    for k in range(max_tries - 1):
        if k and k % 200 == 0:
            height *= 2
        yield tuple(
            tuple(Fraction(rng.randint(-height, height)) for _ in range(3))
            for _ in range(3)
        )


def select_generators(
    system: QuadSystem, seed: int, max_tries: int
) -> tuple[GeneratorTriple, GeneratorWitnesses]:
    """Find (m1, m2, m3) with d1(m3), d2(m1,m2), d2(m1,m3) and det(m1|m2|m3)
    all nonzero, recording the four witnesses."""
    for cand in _candidate_triples(seed, max_tries):
        m1, m2, m3 = cand
        det_m = mat_det((m1, m2, m3))
        if det_m == 0:
            continue
        d1_m3 = mat_det(system.combine(m3).gram)
        if d1_m3 == 0:
            continue
        q1 = system.combine(m1)
        cert12 = pair_nonsingular(q1, system.combine(m2))
        if not cert12.verdict:
            continue
        cert13 = pair_nonsingular(q1, system.combine(m3))
        if not cert13.verdict:
            continue
        triple = GeneratorTriple(m1, m2, m3)
        witnesses = GeneratorWitnesses(d1_m3, cert12.witness, cert13.witness, det_m)
        return triple, witnesses
    raise TriesExhausted(
        f"no generator triple found in {max_tries} tries; "
        "the system is likely singular or degenerate"
    )


def triple_nonsingular_ff(
    system: QuadSystem, p: int, max_points: int, workers: int = 1
) -> SweepOutcome:
    """Exhaustive F_p sweep for common zeros with Jacobian rank < 3.

    A singular witness proves the reduction mod p is singular; a clean sweep
    is Monte-Carlo evidence about the characteristic-zero system.
    """
    if p == 2:
        raise ValueError("p must be odd")
    return sweep_triple_singular(
        tuple(system.forms), p, max_points, mask_rows=None, workers=workers
    )
