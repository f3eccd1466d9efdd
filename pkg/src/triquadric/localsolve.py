"""Local solvability over R and Q_p, quantitative lifting, and effective
weak approximation on quadrics.

Lifting follows the quantitative form of Hensel's lemma for systems: if at
an approximate zero the residuals are smaller than the square of the best
r x r Jacobian minor, a true zero exists within residual/|minor| of the
start, and a modular Newton iteration converges to it quadratically.  The
real analogue is Newton iteration plus an exact Kantorovich-style existence
certificate (quadratic systems have constant Hessians, so the contraction
bound is a finite rational computation).
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatch,
    HeightExhausted,
    HenselConditionFailed,
    IncompatibleTarget,
)
from .exact import (
    FFPoint,
    PadicApprox,
    QuadForm,
    Vec,
    gradient,
    is_zero_vec,
    mat_rank,
    primitive_integer_vector,
    rank,
    rat,
    signature_real,
    vec,
)
from .ffenum import (
    eval_quadric_batch,
    int_rank_mod,
    projective_count,
    random_points_mod,
    reduce_gram_mod,
)
from .polys import PolySystem

# ---------------------------------------------------------------------------
# places and valuations


@dataclass(frozen=True)
class Place:
    kind: str  # "real" | "finite"
    p: int | None = None

    def __post_init__(self):
        if self.kind not in ("real", "finite"):
            raise ValueError("kind must be 'real' or 'finite'")
        if self.kind == "finite" and (self.p is None or self.p < 2):
            raise ValueError("finite place needs a prime p")
        if self.kind == "real" and self.p is not None:
            raise ValueError("real place carries no prime")


REAL = Place("real")


def finite(p: int) -> Place:
    return Place("finite", p)


@dataclass(frozen=True)
class LocalTarget:
    """A point to approximate at one place: real point with tolerance, or a
    p-adic point with a required congruence precision."""

    place: Place
    point: object  # Vec for real, PadicApprox for finite
    tolerance: object  # Fraction for real, int (precision) for finite

    def __post_init__(self):
        if self.place.kind == "real":
            if not isinstance(self.point, tuple):
                object.__setattr__(self, "point", vec(self.point))
            if rat(self.tolerance) <= 0:
                raise ValueError("real tolerance must be positive")
        else:
            if not isinstance(self.point, PadicApprox):
                raise TypeError("finite target point must be a PadicApprox")
            k = int(self.tolerance)
            if not 1 <= k <= self.point.precision:
                raise ValueError("required precision must be within the point's")


def valuation(x: Fraction, p: int) -> int:
    """v_p(x); raises on x = 0."""
    x = rat(x)
    if x == 0:
        raise ValueError("valuation of zero is infinite")
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


def _unit_part_mod(x: Fraction, p: int, modulus: int) -> int:
    """The p-unit part of x reduced mod `modulus` (a power of p)."""
    v = valuation(x, p)
    n, d = x.numerator, x.denominator
    if v > 0:
        n //= p**v
    elif v < 0:
        d //= p ** (-v)
    return n * pow(d, -1, modulus) % modulus


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def hilbert_symbol(a, b, v: Place) -> int:
    """+1 iff z^2 = a x^2 + b y^2 has a nontrivial solution over the
    completion at v, by the standard local formulas."""
    a, b = rat(a), rat(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert symbol needs nonzero arguments")
    if v.kind == "real":
        return -1 if a < 0 and b < 0 else 1
    p = v.p
    alpha, beta = valuation(a, p), valuation(b, p)
    if p != 2:
        u = _unit_part_mod(a, p, p)
        w = _unit_part_mod(b, p, p)
        sign = 1
        if alpha % 2 and beta % 2 and (p - 1) // 2 % 2:
            sign = -sign
        if beta % 2:
            sign *= legendre(u, p)
        if alpha % 2:
            sign *= legendre(w, p)
        return sign
    u = _unit_part_mod(a, 2, 8)
    w = _unit_part_mod(b, 2, 8)
    eps_u, eps_w = (u - 1) // 2 % 2, (w - 1) // 2 % 2
    om_u, om_w = (u * u - 1) // 8 % 2, (w * w - 1) // 8 % 2
    e = eps_u * eps_w + alpha * om_w + beta * om_u
    return -1 if e % 2 else 1


def is_square_local(x, v: Place) -> bool:
    x = rat(x)
    if x == 0:
        return True
    if v.kind == "real":
        return x > 0
    p = v.p
    if valuation(x, p) % 2:
        return False
    if p == 2:
        return _unit_part_mod(x, 2, 8) == 1
    return legendre(_unit_part_mod(x, p, p), p) == 1


def quadric_locally_solvable(q: QuadForm, v: Place) -> bool:
    """Does Q(x) = 0 have a nontrivial solution over the completion at v?

    Real: yes iff the form is not definite (some sign pair or a kernel).
    Finite: automatic for rank >= 5; rank <= 4 decided by discriminant and
    Hasse-invariant criteria on a diagonalization.
    """
    if v.kind == "real":
        s = signature_real(q)
        return s.n_zero >= 1 or min(s.n_plus, s.n_minus) >= 1
    r = rank(q)
    if r < q.n:
        return True  # kernel vector
    if r >= 5:
        return True
    if r == 0:
        return q.n >= 1
    from .exact import congruence_diagonalize

    d, _ = congruence_diagonalize(q)
    ds = [d.gram[i][i] for i in range(q.n) if d.gram[i][i] != 0]
    assert len(ds) == r
    if r == 1:
        return False
    disc = math.prod(ds)
    if r == 2:
        return is_square_local(-disc, v)
    hasse = 1
    for i in range(r):
        for j in range(i + 1, r):
            hasse *= hilbert_symbol(ds[i], ds[j], v)
    if r == 3:
        return hasse == hilbert_symbol(-1, -disc, v)
    # r == 4
    if not is_square_local(disc, v):
        return True
    return hasse == hilbert_symbol(-1, -1, v)


# ---------------------------------------------------------------------------
# mod-p smooth points


@dataclass(frozen=True)
class ModPointSearch:
    point: FFPoint | None
    exhaustive: bool
    scanned: int


def _p_normalized_int_polys(system: PolySystem, p: int):
    """Integer-coefficient copies of the equations, scaled so each is
    p-primitive (p-integral with a unit coefficient)."""
    out = []
    for f in system.polys:
        if f.is_zero():
            raise ValueError("zero equation in system")
        lcm = f.denominator_lcm()
        if lcm % p == 0:
            raise ValueError("coefficients not p-integral even after clearing")
        terms = [(e, int(c * lcm)) for e, c in f.terms]
        vmin = min(_int_val(c, p) for _, c in terms)
        terms = [(e, c // p**vmin) for e, c in terms]
        out.append(terms)
    return out


def _int_val(c: int, p: int) -> int:
    if c == 0:
        return 10**9
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def _eval_terms_mod(terms, x: tuple[int, ...], mod: int) -> int:
    total = 0
    for e, c in terms:
        t = c % mod
        for xi, ei in zip(x, e):
            if ei:
                t = t * pow(xi, ei, mod) % mod
        total = (total + t) % mod
    return total


def _grad_terms(terms, nvars: int):
    out = []
    for v in range(nvars):
        g = {}
        for e, c in terms:
            if e[v]:
                de = list(e)
                de[v] -= 1
                key = tuple(de)
                g[key] = g.get(key, 0) + c * e[v]
        out.append([(e, c) for e, c in g.items() if c])
    return out


def _all_quadratic_grams(system: PolySystem) -> list | None:
    """If every equation is a quadratic form, return their gram matrices."""
    grams = []
    for f in system.polys:
        if f.is_zero() or f.degree() != 2 or not f.is_homogeneous():
            return None
        n = f.nvars
        g = [[Fraction(0)] * n for _ in range(n)]
        for e, c in f.terms:
            idx = [i for i, ei in enumerate(e) for _ in range(ei)]
            i, j = idx
            if i == j:
                g[i][i] = c
            else:
                g[i][j] += c / 2
                g[j][i] += c / 2
        grams.append(QuadForm.from_rows(g))
    return grams


def smooth_point_mod_p(
    system: PolySystem, p: int, budget: int, seed: int = 0
) -> ModPointSearch:
    """A projective point mod p where all equations vanish and the Jacobian
    has full rank r.  Small spaces are scanned exhaustively in lexicographic
    order; larger ones are sampled with a seeded generator within budget."""
    if p == 2:
        raise ValueError("p must be odd")
    nvars = system.nvars
    r = system.r
    terms_int = _p_normalized_int_polys(system, p)
    grads = [_grad_terms(t, nvars) for t in terms_int]

    def jacobian_rank_ok(x) -> bool:
        rows = [[_eval_terms_mod(g, x, p) for g in gr] for gr in grads]
        return int_rank_mod(rows, p) == r

    total = projective_count(p, nvars)
    if total <= budget:
        scanned = 0
        for lead in range(nvars - 1, -1, -1):
            tail = nvars - 1 - lead
            for idx in range(p**tail):
                coords = [0] * lead + [1]
                v = idx
                rest = []
                for _ in range(tail):
                    rest.append(v % p)
                    v //= p
                coords += rest[::-1]
                scanned += 1
                x = tuple(coords)
                if all(_eval_terms_mod(t, x, p) == 0 for t in terms_int):
                    if jacobian_rank_ok(x):
                        return ModPointSearch(FFPoint.normalize(p, x), True, scanned)
        return ModPointSearch(None, True, scanned)

    grams = _all_quadratic_grams(system)
    scanned = 0
    batch = 1 << 15
    round_ = 0
    while scanned < budget:
        round_ += 1
        if grams is not None:
            pts = random_points_mod(p, nvars, batch, seed + round_)
            keep = np.ones(len(pts), dtype=bool)
            for q in grams:
                keep &= eval_quadric_batch(pts, reduce_gram_mod(q, p), p) == 0
            scanned += len(pts)
            for row in pts[keep]:
                x = tuple(int(c) for c in row)
                if jacobian_rank_ok(x):
                    return ModPointSearch(FFPoint.normalize(p, x), False, scanned)
        else:
            rng = random.Random(f"{seed}|{round_}")
            for _ in range(batch):
                x = tuple(rng.randrange(p) for _ in range(nvars))
                if all(c == 0 for c in x):
                    continue
                scanned += 1
                if all(_eval_terms_mod(t, x, p) == 0 for t in terms_int):
                    if jacobian_rank_ok(x):
                        return ModPointSearch(FFPoint.normalize(p, x), False, scanned)
        if scanned >= budget:
            break
    return ModPointSearch(None, False, scanned)


# ---------------------------------------------------------------------------
# Hensel lifting


def _best_minor_columns(
    jac_rows: list[list[int]], r: int, p: int
) -> tuple[tuple[int, ...], int]:
    """Columns of the r x r Jacobian minor with minimal p-valuation of det."""
    ncols = len(jac_rows[0])
    best: tuple[int, ...] | None = None
    best_val = None
    for cols in itertools.combinations(range(ncols), r):
        sub = [[row[c] for c in cols] for row in jac_rows]
        d = _int_det(sub)
        if d == 0:
            continue
        v = _int_val(d, p)
        if best_val is None or v < best_val:
            best, best_val = cols, v
    if best is None:
        raise HenselConditionFailed("Jacobian has no invertible r x r minor")
    return best, best_val


def _int_det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
    from .exact import mat_det

    return int(mat_det(tuple(tuple(Fraction(x) for x in row) for row in m)))


def _int_adjugate(m: list[list[int]]) -> list[list[int]]:
    n = len(m)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [
                [m[r][c] for c in range(n) if c != j] for r in range(n) if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * _int_det(sub)
    return adj


def hensel_lift(
    system: PolySystem, start: PadicApprox, target_precision: int
) -> PadicApprox:
    """Lift an approximate zero to precision p^k via modular Newton steps.

    Requires max_i |f_i(x0)|_p < |D|_p^2 for the best r x r Jacobian minor D
    at x0.  The output satisfies f_i = 0 mod p^k and stays within
    residual/|D| of the start coordinatewise.
    """
    p = start.p
    k = target_precision
    nvars = system.nvars
    if len(start.coords) != nvars:
        raise DimensionMismatch("point length does not match the system")
    terms_int = _p_normalized_int_polys(system, p)
    grads = [_grad_terms(t, nvars) for t in terms_int]
    r = system.r

    x = [int(c) for c in start.coords]

    def residual_val(xv, cap) -> int:
        vals = []
        mod = p**cap
        for t in terms_int:
            fv = _eval_terms_mod(t, tuple(xv), mod)
            vals.append(_int_val(fv, p) if fv else cap)
        return min(vals)

    big = k + 4
    jac0 = [[_eval_terms_mod(g, tuple(x), p**big) for g in gr] for gr in grads]
    cols, e = _best_minor_columns(jac0, r, p)
    v0 = residual_val(x, big)
    if v0 <= 2 * e:
        raise HenselConditionFailed(
            f"residual valuation {v0} <= 2 * minor valuation {e}",
            minor_columns=cols,
            minor_valuation=e,
        )
    if v0 >= k:
        mod = p**k
        return PadicApprox(p, k, tuple(c % mod for c in x))

    work = k + 2 * e + 2
    modw = p**work
    guard = 0
    while residual_val(x, work) < k:
        guard += 1
        if guard > 2 * k + 20:
            raise HenselConditionFailed("lifting failed to converge")
        jac = [[_eval_terms_mod(g, tuple(x), modw) for g in gr] for gr in grads]
        sub = [[row[c] for c in cols] for row in jac]
        det = _int_det(sub) % modw
        vdet = _int_val(det, p)
        if vdet != e:
            raise HenselConditionFailed("minor valuation drifted during lifting")
        unit = det // p**e
        unit_inv = pow(unit, -1, modw)
        fv = [_eval_terms_mod(t, tuple(x), modw) for t in terms_int]
        adj = _int_adjugate(sub)
        for row_idx, col in enumerate(cols):
            num = sum(adj[row_idx][i] * fv[i] for i in range(r))
            if num % p**e:
                raise HenselConditionFailed("correction not divisible by the minor")
            step = (num // p**e) * unit_inv % modw
            x[col] = (x[col] - step) % modw

    modk = p**k
    out = tuple(c % modk for c in x)
    # distance re-check: moved coordinates changed by at least v0 - e
    for c_out, c_in in zip(out, [int(c) for c in start.coords]):
        diff = c_out - c_in
        if diff % p ** min(k, v0 - e):
            raise HenselConditionFailed("lift moved farther than residual/minor")
    return PadicApprox(p, k, out)


# ---------------------------------------------------------------------------
# real Newton refinement and existence certificates


def newton_refine_real(
    system: PolySystem, start, iterations: int, minor_floor: float = 1e-12
) -> list[float]:
    """Float Newton iteration on the r coordinates of the best Jacobian
    minor; residuals shrink quadratically near a smooth zero."""
    x = np.array([float(v) for v in start], dtype=float)
    r = system.r

    def feval(xv):
        out = []
        for f in system.polys:
            tot = 0.0
            for e, c in f.terms:
                term = float(c)
                for xi, ei in zip(xv, e):
                    if ei:
                        term *= xi**ei
                tot += term
            out.append(tot)
        return np.array(out)

    grads = [f.grad() for f in system.polys]

    def jval(xv):
        out = []
        for gr in grads:
            row = []
            for gpoly in gr:
                tot = 0.0
                for e, c in gpoly.terms:
                    term = float(c)
                    for xi, ei in zip(xv, e):
                        if ei:
                            term *= xi**ei
                    tot += term
                row.append(tot)
            out.append(row)
        return np.array(out)

    res_prev = None
    increases = 0
    for _ in range(iterations):
        fv = feval(x)
        res = float(np.max(np.abs(fv)))
        if res == 0.0 or res < 1e-15:
            break
        if res_prev is not None and res > res_prev:
            increases += 1
            if increases >= 3:
                raise ArithmeticError("Newton iteration diverging")
        else:
            increases = 0
        res_prev = res
        jac = jval(x)
        best_cols, best_det = None, 0.0
        for cols in itertools.combinations(range(len(x)), r):
            d = abs(np.linalg.det(jac[:, cols]))
            if d > best_det:
                best_cols, best_det = cols, d
        if best_det < minor_floor:
            raise ArithmeticError("Jacobian minor below threshold (singular)")
        sub = jac[:, best_cols]
        step = np.linalg.solve(sub, fv)
        for i, c in enumerate(best_cols):
            x[c] -= step[i]
    return [float(v) for v in x]


@dataclass(frozen=True)
class RealZeroCertificate:
    """Exact contraction certificate: a true real zero of the subsystem lies
    within `zero_radius` (sup norm, on the moving coordinates) of `point`."""

    point: Vec
    moving_cols: tuple[int, ...]
    residual: Fraction
    zero_radius: Fraction
    contraction: Fraction  # must be <= 1/2 for validity

    @property
    def valid(self) -> bool:
        return self.contraction <= Fraction(1, 2)


def real_zero_certificate(
    system: PolySystem, point, moving_cols: tuple[int, ...] | None = None
) -> RealZeroCertificate:
    """Kantorovich-style existence proof for quadratic-or-lower systems.

    With J the Jacobian on the moving coordinates at the rational point x0,
    eta = ||J^-1 f(x0)||, beta = ||J^-1|| and M the (constant) quadratic
    remainder bound, the simplified-Newton operator contracts on the ball of
    radius 2*eta as soon as 4*beta*M*(2*eta) <= 1/2; a genuine zero then
    lies within 2*eta of x0.  All norms are sup norms computed exactly.
    """
    from .exact import mat_inverse, mat_vec

    x0 = vec(point)
    r = system.r
    if any(f.degree() > 2 for f in system.polys):
        raise ValueError("certificate requires degree <= 2 equations")
    if moving_cols is None:
        jac = system.jacobian(x0)
        best, best_det = None, Fraction(0)
        for cols in itertools.combinations(range(len(x0)), r):
            sub = tuple(tuple(row[c] for c in cols) for row in jac)
            from .exact import mat_det

            d = abs(mat_det(sub))
            if d > best_det:
                best, best_det = cols, d
        if best is None or best_det == 0:
            raise ArithmeticError("no invertible minor at the point")
        moving_cols = best
    jac = system.jacobian(x0)
    sub = tuple(tuple(row[c] for c in moving_cols) for row in jac)
    inv = mat_inverse(sub)
    fv = tuple(f(x0) for f in system.polys)
    corr = mat_vec(inv, fv)
    eta = max((abs(c) for c in corr), default=Fraction(0))
    beta = max(sum(abs(e) for e in row) for row in inv)
    m_bound = Fraction(0)
    for f in system.polys:
        tot = Fraction(0)
        for e, c in f.terms:
            deg_moving = sum(e[c_] for c_ in moving_cols)
            if deg_moving == 2:
                tot += abs(c)
        m_bound = max(m_bound, tot)
    residual = max((abs(v) for v in fv), default=Fraction(0))
    contraction = 8 * beta * m_bound * eta
    return RealZeroCertificate(
        point=x0,
        moving_cols=tuple(moving_cols),
        residual=residual,
        zero_radius=2 * eta,
        contraction=contraction,
    )


def rational_newton_refine(
    system: PolySystem, start, steps: int,
    moving_cols: tuple[int, ...] | None = None,
    snap_digits: int | None = None,
) -> tuple[Vec, tuple[int, ...]]:
    """Exact Newton iteration over Q on the coordinates of the best Jacobian
    minor.  Residuals square each step; with `snap_digits` set, each iterate
    is rounded to denominators of that many digits, which caps coordinate
    heights (Newton absorbs the perturbation) at the cost of a convergence
    floor far below any certification need."""
    from .exact import mat_det, mat_inverse, mat_vec

    x = list(vec(start))
    r = system.r
    if moving_cols is None:
        jac = system.jacobian(tuple(x))
        best, best_det = None, Fraction(0)
        for cols in itertools.combinations(range(len(x)), r):
            sub = tuple(tuple(row[c] for c in cols) for row in jac)
            d = abs(mat_det(sub))
            if d > best_det:
                best, best_det = cols, d
        if best is None or best_det == 0:
            raise ArithmeticError("no invertible Jacobian minor at the start")
        moving_cols = best
    for _ in range(steps):
        fv = tuple(f(tuple(x)) for f in system.polys)
        if all(v == 0 for v in fv):
            break
        jac = system.jacobian(tuple(x))
        sub = tuple(tuple(row[c] for c in moving_cols) for row in jac)
        inv = mat_inverse(sub)
        step = mat_vec(inv, fv)
        for i, c in enumerate(moving_cols):
            x[c] -= step[i]
        if snap_digits is not None:
            x = [c.limit_denominator(10**snap_digits) for c in x]
    return tuple(x), tuple(moving_cols)


def perturbed_point(
    system: PolySystem, perturbed: PolySystem, target: LocalTarget
):
    """Carry a smooth local point of one system to a nearby system whose
    coefficients are close, via lifting (finite place) or Newton plus an
    exact existence certificate (real place)."""
    if target.place.kind == "finite":
        p0: PadicApprox = target.point
        k = int(target.tolerance)
        try:
            return hensel_lift(perturbed, p0, k)
        except HenselConditionFailed as exc:
            raise HenselConditionFailed(
                f"perturbation too large for lifting: {exc}"
            ) from exc
    floats = newton_refine_real(perturbed, [float(v) for v in target.point], 40)
    approx = tuple(Fraction(v).limit_denominator(10**15) for v in floats)
    cert = real_zero_certificate(perturbed, approx)
    if not cert.valid:
        raise ArithmeticError("perturbation too large: contraction bound fails")
    return cert


# ---------------------------------------------------------------------------
# weak approximation on quadrics


def real_proj_distance(x, target) -> Fraction:
    """Sup-norm distance after scaling x to match the target's largest
    coordinate; exact rational arithmetic."""
    x, t = vec(x), vec(target)
    j = max(range(len(t)), key=lambda i: abs(t[i]))
    if x[j] == 0:
        raise ZeroDivisionError("cannot normalize against the target chart")
    scale = t[j] / x[j]
    return max(abs(xi * scale - ti) for xi, ti in zip(x, t))


def padic_proj_congruent(x, target: PadicApprox, k: int) -> bool:
    """Projective congruence mod p^k, normalizing at the target's first unit
    coordinate."""
    p = target.p
    mod = p**k
    j = target.first_unit_index()
    xs = []
    for xi in vec(x):
        if xi.denominator % p == 0:
            return False
        xs.append(xi.numerator * pow(xi.denominator, -1, mod) % mod)
    if xs[j] % p == 0:
        return False
    inv_x = pow(xs[j], -1, mod)
    tgt = [c % mod for c in target.coords]
    inv_t = pow(tgt[j] % mod, -1, mod)
    return all(
        xi * inv_x % mod == ti * inv_t % mod for xi, ti in zip(xs, tgt)
    )


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    g = math.gcd(m1, m2)
    assert g == 1
    m = m1 * m2
    x = (r1 * m2 * pow(m2, -1, m1) + r2 * m1 * pow(m1, -1, m2)) % m
    return x, m


def _direction_mod_p(
    base: tuple[int, ...], target: PadicApprox, prec: int, rng: random.Random,
    tangent: Vec,
) -> tuple[list[int], int]:
    """Direction of the line from the base point to the target, mod p^prec;
    falls back to a tangent direction when the two coincide p-adically."""
    p = target.p
    mod = p**prec
    tcoords = [c % mod for c in target.coords]
    j = next(i for i, c in enumerate(base) if c % p != 0)
    m = [(base[j] * tc - tcoords[j] * bc) % mod for tc, bc in zip(tcoords, base)]
    w = min((_int_val(c, p) for c in m if c), default=prec)
    if w <= prec - 2:
        scale = p**w
        return [c // scale % (mod // scale) for c in m], prec - w
    # target is the base point at this precision: constrain to the tangent
    gm = [int(x.numerator * pow(x.denominator, -1, mod)) % mod for x in tangent]
    idx = next((i for i, c in enumerate(gm) if c % p != 0), None)
    for _ in range(64):
        cand = [rng.randrange(mod) for _ in range(len(base))]
        if idx is not None:
            s = sum(gm[i] * cand[i] for i in range(len(cand)) if i != idx)
            cand[idx] = -s * pow(gm[idx], -1, mod) % mod
        if any(c % p for c in cand):
            return cand, prec
    raise ArithmeticError("could not build a tangent direction mod p")


def weak_approx_quadric(
    q: QuadForm,
    base,
    targets: list[LocalTarget],
    height_bound: int,
    seed: int = 0,
) -> Vec:
    """A rational point on Q = 0 close to every target: congruent to each
    finite target mod p^k (projectively) and within tolerance of each real
    target (projectively, exact rational comparison).

    Lines through the base point parametrize the quadric; the direction
    vector is chosen by CRT at the finite places and rational rounding at
    the real place, with escalating precision until the exact checks pass.
    """
    if rank(q) < 3:
        raise ValueError("weak approximation needs rank >= 3")
    base_v = vec(base)
    if q(base_v) != 0:
        raise ValueError("base point must lie on the quadric")
    grad_base = gradient(q, base_v)
    if is_zero_vec(grad_base):
        raise ValueError("base point must be smooth")
    b = primitive_integer_vector(base_v)
    g = gradient(q, tuple(Fraction(c) for c in b))
    n = q.n

    finite_targets = [t for t in targets if t.place.kind == "finite"]
    real_targets = [t for t in targets if t.place.kind == "real"]
    for t in finite_targets:
        pa: PadicApprox = t.point
        k = int(t.tolerance)
        if _eval_padic(q, pa, k) != 0:
            raise IncompatibleTarget(
                f"finite target is not on the quadric mod {pa.p}^{k}"
            )
    for t in real_targets:
        tv = vec(t.point)
        if is_zero_vec(tv):
            raise IncompatibleTarget("real target cannot be the zero vector")
        scale = max(abs(c) for c in tv)
        if abs(q(tuple(c / scale for c in tv))) > rat(t.tolerance) / 4:
            raise IncompatibleTarget("real target is too far from the quadric")

    def satisfies(x: Vec) -> bool:
        if q(x) != 0:
            return False
        for t in finite_targets:
            if not padic_proj_congruent(x, t.point, int(t.tolerance)):
                return False
        for t in real_targets:
            try:
                d = real_proj_distance(x, t.point)
            except ZeroDivisionError:
                return False
            if d >= rat(t.tolerance):
                return False
        return True

    # a rational target already on the quadric may solve everything at once
    for t in real_targets:
        tv = vec(t.point)
        if q(tv) == 0 and satisfies(tv):
            return vec(primitive_integer_vector(tv))

    for t in finite_targets:
        p = t.place.p
        if all(x == 0 or valuation(x, p) > 0 for x in g):
            # every line through such a base collapses mod p; the caller
            # must pick a base reducing to a smooth point
            raise ValueError(
                f"base point is singular mod {p}; choose another base"
            )

    # A target known only mod p^k pins the direction to ~k digits, and the
    # line parametrization loses a few of them to the valuations of Q(m)
    # and g.m.  Refining the target on the quadric itself (Hensel) supplies
    # genuine extra digits; the refinement agrees with the original mod p^k,
    # so any point congruent to it is congruent to the original target.
    refined: list[LocalTarget] = []
    for t in finite_targets:
        pa: PadicApprox = t.point
        k = int(t.tolerance)
        try:
            lifted = hensel_lift(PolySystem.of_forms(q), pa, k + 34)
            refined.append(LocalTarget(t.place, lifted, k))
        except Exception:
            refined.append(t)  # non-smooth reduction: keep the raw target
    finite_targets = refined

    rng = random.Random(seed)
    for level in range(1, 26):
        for attempt in range(8):
            residues: list[int] | None = [0] * n
            modulus = 1
            ok = True
            for t in finite_targets:
                pa: PadicApprox = t.point
                prec = int(t.tolerance) + level + 1
                try:
                    mv, eff = _direction_mod_p(b, pa, prec, rng, g)
                except ArithmeticError:
                    ok = False
                    break
                pmod = pa.p**eff
                new_res = []
                for i in range(n):
                    r_new, _ = _crt_pair(residues[i], modulus, mv[i], pmod)
                    new_res.append(r_new)
                residues = new_res
                modulus *= pmod
            if not ok:
                continue
            if real_targets:
                t0 = vec(real_targets[0].point)
                # chart at the base's largest coordinate, so the direction
                # spans {base, target} and degenerates only when t0 ~ base
                j = max(range(n), key=lambda i: abs(b[i]))
                direction = tuple(
                    t0[i] * Fraction(b[j]) - t0[j] * Fraction(b[i])
                    for i in range(n)
                )
                if is_zero_vec(direction):
                    direction = _tangent_direction(g, n, rng)
                dir_int = primitive_integer_vector(direction)
                s = 2 ** (level + 3) * modulus
                m = [
                    residues[i]
                    + modulus * round((s * dir_int[i] - residues[i]) / modulus)
                    for i in range(n)
                ]
            else:
                m = [
                    r if r <= modulus // 2 else r - modulus for r in residues
                ]
                if all(c == 0 for c in m):
                    m[rng.randrange(n)] = modulus
            mv = tuple(Fraction(c) for c in m)
            x = tuple(
                q(mv) * Fraction(bi) - sum(gi * mi for gi, mi in zip(g, mv)) * mi2
                for bi, mi2 in zip(b, mv)
            )
            if is_zero_vec(x):
                continue
            xi = primitive_integer_vector(x)
            if max(abs(c) for c in xi) > height_bound:
                continue
            xv = vec(xi)
            if satisfies(xv):
                return xv
    raise HeightExhausted(
        f"no point satisfying all targets within height {height_bound}"
    )


def _tangent_direction(g: Vec, n: int, rng: random.Random) -> Vec:
    idx = next((i for i, c in enumerate(g) if c != 0), None)
    for _ in range(64):
        cand = [Fraction(rng.randint(-9, 9)) for _ in range(n)]
        if idx is not None:
            s = sum(g[i] * cand[i] for i in range(n) if i != idx)
            cand[idx] = -s / g[idx]
        if not is_zero_vec(tuple(cand)):
            return tuple(cand)
    raise ArithmeticError("no tangent direction found")


def _eval_padic(q: QuadForm, pa: PadicApprox, k: int) -> int:
    """Q(coords) mod p^k with rational gram entries reduced p-adically."""
    mod = pa.p**k
    total = 0
    for i in range(q.n):
        for j in range(q.n):
            a = q.gram[i][j]
            if a == 0:
                continue
            if a.denominator % pa.p == 0:
                raise ValueError("gram entry not p-integral")
            aa = a.numerator * pow(a.denominator, -1, mod) % mod
            total = (total + aa * pa.coords[i] * pa.coords[j]) % mod
    return total % mod
