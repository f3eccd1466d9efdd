"""Dimension formulas for families of t-planes in quadrics, with a counting
oracle over small finite fields.

For a rank-r quadric in n variables the family of projective t-planes it
contains is nonempty iff t <= n - r/2 - 1.  In the middle rank range the
dimension has a closed form; outside it a two-step reduction (pass to the
quadric cone over a point) applies while the rank stays >= 2.  Queries
outside every validity range raise instead of extrapolating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, NotApplicable
from .exact import QuadForm
from .ffenum import count_isotropic_subspaces, gaussian_binomial

EMPTY = "empty"


@dataclass(frozen=True)
class FanoQuery:
    n: int
    t: int
    r: int

    def __post_init__(self):
        if not 1 <= self.r <= self.n:
            raise ValueError("need 1 <= r <= n")
        if not 0 <= self.t <= self.n - 2:
            raise ValueError("need 0 <= t <= n-2")


@dataclass(frozen=True)
class CountRecord:
    p: int
    t: int
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def fano_nonempty(q: FanoQuery) -> bool:
    """t <= n - r/2 - 1, compared exactly over Q."""
    return Fraction(q.t) <= Fraction(q.n) - Fraction(q.r, 2) - 1


def _closed_form(n: int, t: int) -> int:
    value = (t + 1) * (Fraction(n) - 2 - Fraction(3 * t, 2))
    if value.denominator != 1:
        raise ArithmeticError(f"closed form not integral at (n={n}, t={t})")
    return int(value)


def fano_dim(q: FanoQuery) -> int | str:
    """Dimension of the family of t-planes in a rank-r quadric, or EMPTY.

    Uses the closed form (t+1)(n - 2 - 3t/2) when 2t+2 <= r <= 2n-2t-2 and
    otherwise descends through (n, t, r) -> (n-2, t-1, r-2) while 2 <= r.
    """
    if not fano_nonempty(q):
        return EMPTY
    n, t, r = q.n, q.t, q.r
    if 2 * t + 2 <= r:  # upper bound r <= 2n-2t-2 is exactly nonemptiness
        return _closed_form(n, t)
    if t >= 1 and r >= 2:
        try:
            inner_query = FanoQuery(n - 2, t - 1, r - 2)
        except ValueError as exc:
            raise NotApplicable(
                f"reduction leaves the valid range at (n={n}, t={t}, r={r})"
            ) from exc
        inner = fano_dim(inner_query)
        if inner == EMPTY:
            return EMPTY
        return n - 2 - t + inner
    if t == 0 and 2 <= r <= 2 * n - 2:
        return n - 2
    raise NotApplicable(
        f"dimension formula not applicable at (n={q.n}, t={q.t}, r={q.r})"
    )


def fano_dim_recursive(q: FanoQuery) -> int | str:
    """Same value as fano_dim but unrolled purely through the reduction
    (n,t,r) -> (n-2, t-1, r-2) down to t = 0; kept as an independent path
    for consistency checking."""
    if not fano_nonempty(q):
        return EMPTY
    n, t, r = q.n, q.t, q.r
    total = 0
    while t >= 1:
        if r < 2 or r > 2 * n - 2 * t - 2:
            raise NotApplicable(
                f"reduction not applicable at (n={n}, t={t}, r={r})"
            )
        total += n - 2 - t
        n, t, r = n - 2, t - 1, r - 2
    if not 2 <= r <= 2 * n - 2:
        raise NotApplicable(f"base case not applicable at (n={n}, t=0, r={r})")
    return total + n - 2


def fano_dim_through_point(q: FanoQuery) -> int | str:
    """Dimension of the subfamily of t-planes through a fixed smooth point:
    reduces to (n-2, t-1, r-2)."""
    if q.t < 1 or q.r < 2:
        raise NotApplicable("need t >= 1 and r >= 2")
    return fano_dim(FanoQuery(q.n - 2, q.t - 1, q.r - 2))


def count_planes_ff(
    q: QuadForm, p: int, t: int, budget: int = 10**8, workers: int = 1
) -> CountRecord:
    """Exhaustively count projective t-planes over F_p inside the quadric
    q = 0, via reduced-row-echelon canonical representatives."""
    if p == 2:
        raise ValueError("p must be odd")
    count = count_isotropic_subspaces(q, p, t + 1, budget, workers=workers)
    return CountRecord(p, t, count)


def fit_count_degree(records: list[CountRecord]) -> int:
    """Least-squares slope of log(count) against log(p), rounded to the
    nearest integer; the two largest primes' ratio is used as a cross-check.

    Needs at least two records at distinct primes with positive counts.
    """
    if len(records) < 2:
        raise ValueError("need at least two count records")
    primes = [r.p for r in records]
    if len(set(primes)) != len(primes):
        raise ValueError("records must use distinct primes")
    if any(r.count <= 0 for r in records):
        raise ValueError("counts must be positive to fit a growth degree")
    if len({r.t for r in records}) != 1:
        raise ValueError("records must share the plane dimension t")
    xs = [math.log(r.p) for r in records]
    ys = [math.log(r.count) for r in records]
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    ordered = sorted(records, key=lambda r: r.p)
    top, second = ordered[-1], ordered[-2]
    ratio_slope = math.log(top.count / second.count) / math.log(top.p / second.p)
    fitted = round(slope)
    if round(ratio_slope) != fitted:
        raise ArithmeticError(
            f"degree fit inconsistent: least-squares {slope:.3f} vs "
            f"top-ratio {ratio_slope:.3f}"
        )
    return fitted


def enumeration_size(n: int, t: int, p: int) -> int:
    """Number of canonical representatives the counting oracle would visit."""
    return gaussian_binomial(n, t + 1, p)


__all__ = [
    "EMPTY",
    "FanoQuery",
    "CountRecord",
    "fano_nonempty",
    "fano_dim",
    "fano_dim_recursive",
    "fano_dim_through_point",
    "count_planes_ff",
    "fit_count_degree",
    "enumeration_size",
    "BudgetExceeded",
]
