"""Sparse multivariate polynomials over Q and homogeneous systems.

Used for the local-solvability machinery: systems of homogeneous equations,
their exact and mod-p evaluation, and Jacobians.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionMismatch
from .exact import QuadForm, Vec, rat, vec


def _clean(terms: dict[tuple[int, ...], Fraction]) -> dict[tuple[int, ...], Fraction]:
    return {e: c for e, c in terms.items() if c != 0}


@dataclass(frozen=True)
class Poly:
    """Polynomial as a map from exponent tuples to rational coefficients."""

    nvars: int
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    @classmethod
    def from_dict(cls, nvars: int, terms: dict) -> "Poly":
        cleaned = _clean({tuple(e): rat(c) for e, c in terms.items()})
        for e in cleaned:
            if len(e) != nvars or any(x < 0 for x in e):
                raise ValueError(f"bad exponent tuple {e}")
        return cls(nvars, tuple(sorted(cleaned.items())))

    @classmethod
    def from_quadform(cls, q: QuadForm) -> "Poly":
        terms: dict[tuple[int, ...], Fraction] = {}
        for i in range(q.n):
            for j in range(i, q.n):
                coeff = q.gram[i][j] if i == j else 2 * q.gram[i][j]
                if coeff == 0:
                    continue
                e = [0] * q.n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + coeff
        return cls.from_dict(q.n, terms)

    @classmethod
    def linear(cls, coeffs) -> "Poly":
        cs = vec(coeffs)
        terms = {}
        for i, c in enumerate(cs):
            if c != 0:
                e = [0] * len(cs)
                e[i] = 1
                terms[tuple(e)] = c
        return cls.from_dict(len(cs), terms)

    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e, _ in self.terms}
        return len(degs) <= 1

    def __call__(self, x) -> Fraction:
        x = vec(x)
        if len(x) != self.nvars:
            raise DimensionMismatch("wrong number of coordinates")
        total = Fraction(0)
        for e, c in self.terms:
            term = c
            for xi, ei in zip(x, e):
                if ei:
                    term *= xi**ei
            total += term
        return total

    def eval_int(self, x: tuple[int, ...]) -> Fraction:
        return self(tuple(Fraction(v) for v in x))

    def grad(self) -> list["Poly"]:
        out = []
        for v in range(self.nvars):
            terms: dict[tuple[int, ...], Fraction] = {}
            for e, c in self.terms:
                if e[v] == 0:
                    continue
                de = list(e)
                de[v] -= 1
                key = tuple(de)
                terms[key] = terms.get(key, Fraction(0)) + c * e[v]
            out.append(Poly.from_dict(self.nvars, terms))
        return out

    def scale(self, c) -> "Poly":
        c = rat(c)
        return Poly.from_dict(self.nvars, {e: c * v for e, v in self.terms})

    def denominator_lcm(self) -> int:
        import math

        l = 1
        for _, c in self.terms:
            l = l * c.denominator // math.gcd(l, c.denominator)
        return l


@dataclass(frozen=True)
class PolySystem:
    """System of r homogeneous equations in m+1 variables, r <= m."""

    nvars: int
    polys: tuple[Poly, ...]

    def __post_init__(self):
        if not self.polys:
            raise ValueError("empty system")
        if len(self.polys) > self.nvars - 1:
            raise ValueError("need r <= m for a system in m+1 variables")
        for f in self.polys:
            if f.nvars != self.nvars:
                raise DimensionMismatch("all equations must share the variable count")
            if not f.is_homogeneous():
                raise ValueError("equations must be homogeneous")

    @classmethod
    def of_forms(cls, *forms: QuadForm) -> "PolySystem":
        return cls(forms[0].n, tuple(Poly.from_quadform(f) for f in forms))

    @property
    def r(self) -> int:
        return len(self.polys)

    def values(self, x) -> list[Fraction]:
        return [f(x) for f in self.polys]

    def jacobian(self, x) -> list[Vec]:
        """Rows grad f_i(x), exact."""
        x = vec(x)
        return [tuple(g(x) for g in f.grad()) for f in self.polys]
