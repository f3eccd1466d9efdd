"""Rational isotropic vectors, hyperbolic splitting, perpendicular spaces,
restriction of forms to linear subspaces, and the admissibility predicates
used by the descent pipeline.

A plane L inside the third quadric is admissible when (a) the pair of the
first two forms restricted to L is a nonsingular system (certified exactly
through the pencil discriminant) and (b) the triple restricted to the
perpendicular space of L shows no singular point in exhaustive small-prime
sweeps.  The restriction of the third form to that perpendicular space is a
cone with vertex L -- its gradient vanishes along L by construction -- so
common zeros on L itself are structural and are only counted as witnesses
when the first two restricted gradients degenerate as well.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DimensionMismatch, TriesExhausted
from .exact import (
    LinearSpace,
    Mat,
    QuadForm,
    QuadSystem,
    Vec,
    congruence_diagonalize,
    integer_kernel_basis,
    is_zero_vec,
    mat_rank,
    mat_vec,
    primitive_integer_vector,
    solve_in_rowspan,
    transpose,
    vec,
)
from .ffenum import SweepOutcome, projective_count, sweep_triple_singular
from .pencil import PairCertificate, pair_nonsingular


def _is_rational_square(x: Fraction) -> Fraction | None:
    """sqrt(x) if x is a square in Q, else None."""
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    rn = math.isqrt(x.numerator)
    rd = math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def _isotropic_candidates(q: QuadForm, height: int):
    """Yield isotropic vectors of q (original coordinates), cheapest first:
    kernel vectors, two-variable square ratios, three-variable bounded
    search, then full enumeration for very small forms."""
    n = q.n
    d, u = congruence_diagonalize(q)
    cols = transpose(u)  # row i of cols = image of diagonal basis vector i
    diag = [d.gram[i][i] for i in range(n)]

    def back(y: Vec) -> Vec:
        x = [Fraction(0)] * n
        for i, c in enumerate(y):
            if c:
                x = [a + c * b for a, b in zip(x, cols[i])]
        return tuple(x)

    for i in range(n):
        if diag[i] == 0:
            yield back(tuple(Fraction(1 if j == i else 0) for j in range(n)))
    nz = [i for i in range(n) if diag[i] != 0]
    for i, j in itertools.combinations(nz, 2):
        root = _is_rational_square(-diag[j] / diag[i])
        if root is not None:
            y = [Fraction(0)] * n
            y[i], y[j] = root, Fraction(1)
            yield back(tuple(y))
    h3 = min(height, 8)
    for i, j, k in itertools.combinations(nz, 3):
        for a in range(0, h3 + 1):
            for b in range(-h3, h3 + 1):
                if a == 0 and b <= 0:
                    continue
                val = -(diag[i] * a * a + diag[j] * b * b) / diag[k]
                root = _is_rational_square(val)
                if root is not None:
                    y = [Fraction(0)] * n
                    y[i], y[j], y[k] = Fraction(a), Fraction(b), root
                    if not is_zero_vec(tuple(y)):
                        yield back(tuple(y))
    if n <= 4:
        rng = range(-height, height + 1)
        for combo in itertools.product(rng, repeat=n):
            if all(c == 0 for c in combo):
                continue
            y = vec(combo)
            if sum(diag[i] * y[i] * y[i] for i in range(n)) == 0:
                yield back(y)


def isotropic_vector(q: QuadForm, height: int) -> Vec | None:
    """A primitive nonzero x with Q(x) = 0, or None within the height bound.

    Kernel vectors count: Q vanishes on them.  Search runs in a diagonalizing
    basis with two- and three-variable early exits.
    """
    for cand in _isotropic_candidates(q, height):
        if not is_zero_vec(cand):
            x = vec(primitive_integer_vector(cand))
            assert q(x) == 0
            return x
    return None


@dataclass(frozen=True)
class HyperbolicSplit:
    """Hyperbolic pairs (v_i, w_i) with Q(v)=Q(w)=0, b(v,w)=1, mutually
    orthogonal, plus the residual complement."""

    pairs: tuple[tuple[Vec, Vec], ...]
    residual_basis: tuple[Vec, ...]
    residual_form: QuadForm

    @property
    def witt_index(self) -> int:
        return len(self.pairs)

    def full_basis(self) -> Mat:
        rows: list[Vec] = []
        for v, w in self.pairs:
            rows.append(v)
            rows.append(w)
        rows.extend(self.residual_basis)
        return tuple(rows)

    def isotropic_space_rows(self) -> Mat:
        """The span of the v_i: a totally isotropic subspace."""
        return tuple(v for v, _ in self.pairs)


def verify_split(q: QuadForm, split: HyperbolicSplit) -> bool:
    """Exact recheck: the Gram matrix in the split basis is hyperbolic
    2 x 2 blocks followed by the residual gram, with zero off-blocks."""
    basis = split.full_basis()
    if len(basis) != q.n or mat_rank(basis) != q.n:
        return False
    k = split.witt_index
    gram = restrict_form(q, LinearSpace(q.n, q.n - 1, basis)).gram
    for i in range(q.n):
        for j in range(q.n):
            if i < 2 * k or j < 2 * k:
                inside = i // 2 == j // 2 and i < 2 * k and j < 2 * k
                expected = (
                    Fraction(1) if inside and i != j else Fraction(0)
                )
            else:
                expected = split.residual_form.gram[i - 2 * k][j - 2 * k]
            if gram[i][j] != expected:
                return False
    return True


def split_hyperbolic(q: QuadForm, height: int) -> HyperbolicSplit:
    """Greedy Witt splitting: find an isotropic vector that pairs
    nontrivially, complete it to a hyperbolic pair, recurse on the
    orthogonal complement.  Stops when no such vector is found within the
    height bound (the residual keeps any radical)."""
    n = q.n
    pairs: list[tuple[Vec, Vec]] = []
    comp_rows: Mat = tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )
    while len(comp_rows) >= 2:
        sub = restrict_form(q, LinearSpace(n, len(comp_rows) - 1, comp_rows))
        v_r = None
        for cand in _isotropic_candidates(sub, height):
            if is_zero_vec(cand):
                continue
            if not is_zero_vec(mat_vec(sub.gram, cand)):
                v_r = vec(primitive_integer_vector(cand))
                break
        if v_r is None:
            break
        bil = mat_vec(sub.gram, v_r)
        idx = next(i for i, c in enumerate(bil) if c != 0)
        # coordinate vector scaled so b(v, w0) = 1
        w0 = tuple(
            Fraction(1, 1) / bil[idx] if i == idx else Fraction(0)
            for i in range(len(comp_rows))
        )
        qw = sub(w0)
        w_r = tuple(a - qw / 2 * b for a, b in zip(w0, v_r))
        assert sub(v_r) == 0 and sub(w_r) == 0
        assert sub.bilinear(v_r, w_r) == 1
        to_ambient = lambda y: tuple(
            sum(c * row[i] for c, row in zip(y, comp_rows))
            for i in range(n)
        )
        pairs.append((to_ambient(v_r), to_ambient(w_r)))
        rows_bil = (mat_vec(sub.gram, v_r), mat_vec(sub.gram, w_r))
        kern = integer_kernel_basis(rows_bil)
        comp_rows = tuple(
            vec(primitive_integer_vector(to_ambient(k))) for k in kern
        )
    if comp_rows:
        residual = restrict_form(q, LinearSpace(n, len(comp_rows) - 1, comp_rows))
    else:
        residual = QuadForm(0, ())
    return HyperbolicSplit(tuple(pairs), comp_rows, residual)


@lru_cache(maxsize=4096)
def restrict_form(q: QuadForm, space: LinearSpace) -> QuadForm:
    """The form on the subspace: gram B A B^T for basis rows B."""
    if space.n != q.n:
        raise DimensionMismatch("space and form dimensions differ")
    b = space.basis
    inner = tuple(tuple(sum(q.gram[i][j] * row[j] for j in range(q.n)) for row in b)
                  for i in range(q.n))
    gram = tuple(
        tuple(sum(row[i] * inner[i][c] for i in range(q.n)) for c in range(len(b)))
        for row in b
    )
    return QuadForm(len(b), gram)


def contains_in_quadric(q: QuadForm, space: LinearSpace) -> bool:
    """L lies in the quadric iff the restricted form vanishes identically
    (all pairwise bilinear products of basis vectors are zero)."""
    g = restrict_form(q, space).gram
    return all(all(x == 0 for x in row) for row in g)


@lru_cache(maxsize=1024)
def perp_space(q3: QuadForm, space: LinearSpace) -> LinearSpace:
    """{[y] : y^T A3 x = 0 for all x in L} as a linear space (kernel of
    B A3).  Contains L itself whenever L lies in the quadric."""
    if space.n != q3.n:
        raise DimensionMismatch("space and form dimensions differ")
    rows = tuple(mat_vec(q3.gram, r) for r in space.basis)
    kern = integer_kernel_basis(rows)
    if not kern:
        raise ValueError("perpendicular space is empty")
    return LinearSpace(q3.n, len(kern) - 1, tuple(kern))


def space_in_coords(sub: LinearSpace, ambient: LinearSpace) -> Mat:
    """Coefficient rows expressing sub's basis inside ambient's basis."""
    out = []
    for row in sub.basis:
        coeffs = solve_in_rowspan(ambient.basis, row)
        if coeffs is None:
            raise ValueError("subspace does not lie in the ambient space")
        out.append(coeffs)
    return tuple(out)


@dataclass(frozen=True)
class AdmissibilityReport:
    contained_in_q3: bool
    pair_disc: Fraction
    pencil_identically_zero: bool
    perp_system_sweeps: tuple[SweepOutcome, ...]
    skipped_primes: tuple[int, ...]
    verdict: str  # "admissible" | "not_admissible" | "probable"
    reason: str = ""


def is_admissible(
    space: LinearSpace,
    system: QuadSystem,
    ff_primes: tuple[int, ...] = (3, 5),
    budget: int = 10**8,
    workers: int = 1,
) -> AdmissibilityReport:
    """Certify admissibility of a plane inside the third quadric.

    (a) exact containment; (b) exact nonsingularity of the restriction of
    the first two forms, via the pencil discriminant (which covers the
    vacuous empty-intersection case uniformly); (c) singular-point sweeps
    of the triple restricted to the perpendicular space over each feasible
    prime, with the structural cone vertex along L masked.
    """
    q1, q2, q3 = system.forms
    contained = contains_in_quadric(q3, space)
    if not contained:
        return AdmissibilityReport(
            False, Fraction(0), False, (), (), "not_admissible",
            "plane is not contained in the third quadric",
        )
    r1 = restrict_form(q1, space)
    r2 = restrict_form(q2, space)
    cert: PairCertificate = pair_nonsingular(r1, r2)
    if not cert.verdict:
        return AdmissibilityReport(
            True, cert.witness, cert.pencil_identically_zero, (), (),
            "not_admissible",
            "restricted pair is singular (discriminant vanishes)",
        )
    perp = perp_space(q3, space)
    from .exact import saturated_rowspan_basis

    mask_int = saturated_rowspan_basis(space_in_coords(space, perp))
    restricted = tuple(restrict_form(f, perp) for f in system.forms)
    sweeps: list[SweepOutcome] = []
    skipped: list[int] = []
    for p in ff_primes:
        if projective_count(p, len(perp.basis)) > budget:
            skipped.append(p)
            continue
        outcome = sweep_triple_singular(restricted, p, budget,
                                        mask_rows=mask_int, workers=workers)
        sweeps.append(outcome)
        if outcome.status == "singular_witness":
            break  # verdict settled; skip the remaining (slower) primes
    if sweeps and all(s.status == "no_witness" for s in sweeps):
        verdict, reason = "admissible", ""
    elif any(s.status == "singular_witness" for s in sweeps):
        verdict = "probable"
        reason = "perp-system sweep found a mod-p singular point"
    else:
        verdict = "probable"
        reason = "no feasible sweep prime within budget"
    return AdmissibilityReport(
        True, cert.witness, False, tuple(sweeps), tuple(skipped), verdict, reason
    )


def intersect_rowspans(a_rows: Mat, b_rows: Mat) -> list[Vec]:
    """Basis of span(a) intersected with span(b)."""
    if not a_rows or not b_rows:
        return []
    n = len(a_rows[0])
    stacked = tuple(
        tuple(a_rows[i][c] for i in range(len(a_rows)))
        + tuple(-b_rows[j][c] for j in range(len(b_rows)))
        for c in range(n)
    )
    out = []
    for k in integer_kernel_basis(stacked):
        coeffs = k[: len(a_rows)]
        x = [Fraction(0)] * n
        for c, row in zip(coeffs, a_rows):
            if c:
                x = [xi + c * ri for xi, ri in zip(x, row)]
        if not is_zero_vec(tuple(x)):
            out.append(tuple(x))
    return out


def quadric_point_sampler(
    q: QuadForm, base: Vec, rng: random.Random, height: int = 9
):
    """Yield rational points on Q = 0 by lines through a smooth isotropic
    base point (degree-2 parametrization by the direction vector)."""
    from .exact import gradient

    g = gradient(q, base)
    n = q.n
    while True:
        m = tuple(Fraction(rng.randint(-height, height)) for _ in range(n))
        if is_zero_vec(m):
            continue
        gm = sum(gi * mi for gi, mi in zip(g, m))
        x = tuple(q(m) * bi - gm * mi for bi, mi in zip(base, m))
        if is_zero_vec(x):
            continue
        pt = vec(primitive_integer_vector(x))
        assert q(pt) == 0
        yield pt


def _vp(x: Fraction, p: int) -> int:
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _smooth_in_space_mod(
    q3: QuadForm, ambient: LinearSpace, x: Vec, primes: tuple[int, ...]
) -> bool:
    """The restricted gradient at x must not vanish mod any listed prime;
    otherwise every line through x collapses projectively mod p and the
    point is useless as a parametrization center."""
    from .exact import gradient

    g_amb = gradient(q3, x)
    g_sub = [
        sum(r * gi for r, gi in zip(row, g_amb)) for row in ambient.basis
    ]
    if all(c == 0 for c in g_sub):
        return False
    for p in primes:
        if all(c == 0 or _vp(c, p) > 0 for c in g_sub):
            return False
    return True


def isotropic_point_in_space(
    q3: QuadForm,
    ambient: LinearSpace,
    iso_rows: Mat | None,
    height: int,
    unit_grad_primes: tuple[int, ...] = (),
) -> Vec | None:
    """A rational point of the quadric inside the given space: combinations
    from the intersection with a known totally isotropic subspace first
    (every such combination is isotropic), then search the restricted form.
    Candidates whose restricted gradient vanishes mod a listed prime are
    rejected."""
    if iso_rows:
        inter = intersect_rowspans(iso_rows, ambient.basis)
        if inter:
            k = len(inter)
            seen = 0
            for combo in itertools.product((0, 1, -1, 2), repeat=min(k, 6)):
                if all(c == 0 for c in combo):
                    continue
                seen += 1
                if seen > 300:
                    break
                x = [Fraction(0)] * q3.n
                for c, row in zip(combo, inter):
                    if c:
                        x = [a + c * b for a, b in zip(x, row)]
                x = tuple(x)
                if is_zero_vec(x):
                    continue
                assert q3(x) == 0
                if _smooth_in_space_mod(q3, ambient, x, unit_grad_primes):
                    return vec(primitive_integer_vector(x))
    sub = restrict_form(q3, ambient)
    for y in _isotropic_candidates(sub, height):
        if is_zero_vec(y):
            continue
        x = tuple(
            sum(c * row[i] for c, row in zip(y, ambient.basis))
            for i in range(q3.n)
        )
        if is_zero_vec(x):
            continue
        if _smooth_in_space_mod(q3, ambient, tuple(x), unit_grad_primes):
            return vec(primitive_integer_vector(x))
    return None


def extend_plane(
    space: LinearSpace,
    system: QuadSystem,
    height: int,
    seed: int,
    max_tries: int,
    ff_primes: tuple[int, ...] = (3, 5),
    budget: int = 10**8,
    iso_rows: Mat | None = None,
    workers: int = 1,
) -> LinearSpace:
    """Extend an admissible t-plane to an admissible (t+1)-plane by sampling
    rational points of the quadric inside the perpendicular space and
    certifying each candidate extension."""
    if space.t > 6:
        raise ValueError("extension beyond 7-planes is not supported")
    q3 = system.forms[2]
    perp = perp_space(q3, space)
    rng = random.Random(seed)
    base = isotropic_point_in_space(q3, perp, iso_rows, height)
    if base is None:
        raise TriesExhausted("no rational base point on the quadric in the perp space")
    # candidate stream: the base point itself, then sampled points
    restricted_base = solve_in_rowspan(perp.basis, base)
    assert restricted_base is not None
    sub_q3 = restrict_form(q3, perp)
    sampler = quadric_point_sampler(sub_q3, vec(restricted_base), rng)

    def to_ambient(y: Vec) -> Vec:
        x = tuple(
            sum(c * row[i] for c, row in zip(y, perp.basis))
            for i in range(q3.n)
        )
        return vec(primitive_integer_vector(x))

    candidates = itertools.chain([base], (to_ambient(y) for y in sampler))
    for _ in range(max_tries):
        x = next(candidates)
        if space.contains_point(x):
            continue
        bigger = LinearSpace(
            space.n, space.t + 1,
            space.basis + (vec(primitive_integer_vector(x)),),
        )
        if not contains_in_quadric(q3, bigger):
            continue
        report = is_admissible(bigger, system, ff_primes, budget, workers)
        if report.verdict == "admissible":
            return bigger
    raise TriesExhausted(
        f"no admissible extension of the {space.t}-plane in {max_tries} tries"
    )


def chain_admissible_check(
    space: LinearSpace,
    system: QuadSystem,
    seed: int,
    height: int,
    max_tries: int,
    ff_primes: tuple[int, ...] = (3, 5),
    budget: int = 10**8,
    iso_rows: Mat | None = None,
    workers: int = 1,
) -> tuple[bool, list[LinearSpace]]:
    """Try to build an explicit admissible chain from the plane up to
    dimension 7.  A False verdict only means no chain was found within
    budget; it is not a proof of non-extendability."""
    if not 3 <= space.t <= 7:
        raise ValueError("chains start between dimensions 3 and 7")
    report = is_admissible(space, system, ff_primes, budget, workers)
    if report.verdict != "admissible":
        return False, []
    chain = [space]
    rng = random.Random(seed)
    while chain[-1].t < 7:
        try:
            nxt = extend_plane(
                chain[-1], system, height, rng.randrange(2**32), max_tries,
                ff_primes, budget, iso_rows, workers,
            )
        except TriesExhausted:
            return False, chain
        chain.append(nxt)
    return True, chain
