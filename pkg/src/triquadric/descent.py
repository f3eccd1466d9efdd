"""End-to-end pipeline: preprocessing of a nonsingular triple, construction
of a chain of admissible planes approximating the given local data, and an
exactly re-verifiable certificate of everything built along the way.

Stages: (1) regenerate the three forms so the third is nonsingular and both
relevant pairs are nonsingular systems, witnessed by nonzero discriminants;
(2) rebalance the third form by a rational multiple of the first so its real
signature leaves enough isotropy, then split off hyperbolic planes over Q;
(3) build a 3-plane inside the third quadric through weak approximation
toward the local targets, certify admissibility, and record local witnesses
on the restricted pair; (4) optionally extend by one dimension to cover
extra large primes; (5) extend to an admissible 7-plane; (6) bounded-height
search for a rational point on the restricted pair.  Every exact claim in
the certificate can be re-derived from the input by verify_certificate.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    HeightExhausted,
    HenselConditionFailed,
    IncompatibleTarget,
    TriesExhausted,
)
from .exact import (
    LinearSpace,
    PadicApprox,
    QuadForm,
    QuadSystem,
    Signature,
    Vec,
    is_zero_vec,
    mat_det,
    mat_rank,
    primitive_integer_vector,
    rat,
    signature_real,
    solve_in_rowspan,
    vec,
)
from .ffenum import SweepOutcome, projective_count
from .localsolve import (
    REAL,
    LocalTarget,
    Place,
    finite,
    hensel_lift,
    padic_proj_congruent,
    rational_newton_refine,
    real_proj_distance,
    real_zero_certificate,
    smooth_point_mod_p,
    weak_approx_quadric,
)
from .pencil import (
    GeneratorTriple,
    GeneratorWitnesses,
    pair_nonsingular,
    select_generators,
    triple_nonsingular_ff,
)
from .planes import (
    AdmissibilityReport,
    HyperbolicSplit,
    contains_in_quadric,
    extend_plane,
    is_admissible,
    isotropic_point_in_space,
    perp_space,
    quadric_point_sampler,
    restrict_form,
    split_hyperbolic,
    verify_split,
)
from .polys import PolySystem


@dataclass(frozen=True)
class Budgets:
    """Per-stage limits; all searches derive their effort from these."""

    height: int = 10**60  # weak-approximation height cap
    tries: int = 64  # retry budget for randomized constructions
    sweep: int = 10**8  # projective points per finite-field sweep
    sample: int = 10**6  # mod-p point-search budget
    iso_height: int = 40  # isotropic-vector search height

    def __post_init__(self):
        if min(self.height, self.tries, self.sweep, self.sample, self.iso_height) <= 0:
            raise ValueError("budgets must be positive")


@dataclass(frozen=True)
class DescentInput:
    system: QuadSystem
    targets: tuple[LocalTarget, ...]
    epsilon: Fraction
    seed: int
    budgets: Budgets = field(default_factory=Budgets)
    forced_t: tuple[int, ...] = ()

    def __post_init__(self):
        if rat(self.epsilon) <= 0:
            raise ValueError("epsilon must be positive")

    def validate(self) -> None:
        """Targets must lie on all three quadrics at their places to stated
        precision; forced extra places must be primes >= 37 outside the
        target set."""
        n = self.system.n
        target_primes = set()
        for t in self.targets:
            if t.place.kind == "finite":
                pa: PadicApprox = t.point
                target_primes.add(pa.p)
                if len(pa.coords) != n:
                    raise IncompatibleTarget("target length mismatch")
                k = int(t.tolerance)
                for q in self.system.forms:
                    if _eval_gram_padic(q, pa.coords, pa.p, k) != 0:
                        raise IncompatibleTarget(
                            f"target at p={pa.p} misses a quadric mod {pa.p}^{k}"
                        )
            else:
                tv = vec(t.point)
                if len(tv) != n:
                    raise IncompatibleTarget("target length mismatch")
                scale = max(abs(c) for c in tv)
                tol = rat(t.tolerance)
                for q in self.system.forms:
                    if abs(q(tuple(c / scale for c in tv))) > tol**2 / 4:
                        raise IncompatibleTarget(
                            "real target is too far from a quadric"
                        )
        for p in self.forced_t:
            if p < 37:
                raise ValueError(
                    "extra places must lie over primes >= 37 (smaller primes "
                    "belong with the approximation targets)"
                )
            if p in target_primes:
                raise ValueError("extra places must be disjoint from targets")


def _eval_gram_padic(q: QuadForm, coords, p: int, k: int) -> int:
    mod = p**k
    total = 0
    for i in range(q.n):
        row = q.gram[i]
        ci = coords[i] % mod
        if ci == 0:
            continue
        for j in range(q.n):
            a = row[j]
            if a == 0:
                continue
            aa = a.numerator * pow(a.denominator, -1, mod) % mod
            total = (total + aa * ci * coords[j]) % mod
    return total


# ---------------------------------------------------------------------------
# certificate records


@dataclass(frozen=True)
class ChainLink:
    space: LinearSpace
    pair_disc: Fraction
    sweeps: tuple[SweepOutcome, ...]
    skipped_primes: tuple[int, ...]


@dataclass(frozen=True)
class FiniteWitness:
    p: int
    claim_precision: int  # congruence to the target holds mod p^this
    precision: int  # coordinates are recorded mod p^this
    plane_coords: tuple[int, ...]
    ambient: tuple[int, ...]


@dataclass(frozen=True)
class RealWitness:
    plane_coords: Vec
    ambient: Vec
    moving_cols: tuple[int, ...]
    zero_radius: Fraction
    contraction: Fraction
    distance_bound: Fraction  # checked strict bound against epsilon/2


@dataclass(frozen=True)
class LocalWitnessRecord:
    place: Place
    finite_witness: FiniteWitness | None = None
    real_witness: RealWitness | None = None


@dataclass(frozen=True)
class TRecord:
    p: int
    perp_point: PadicApprox  # coordinates in the perp-space basis of L3
    witness: FiniteWitness  # point of the restricted pair on the 4-plane


@dataclass(frozen=True)
class FinalPoint:
    coords: Vec
    plane_coords: Vec
    height: int


@dataclass(frozen=True)
class DescentCertificate:
    n: int
    sub_hypothesis: bool
    seed: int
    generators: GeneratorTriple
    generator_witnesses: GeneratorWitnesses
    c: Fraction
    c_signature: Signature
    adjusted_q3: QuadForm
    split: HyperbolicSplit
    evidence_sweeps: tuple[SweepOutcome, ...]
    evidence_skipped: tuple[int, ...]
    chain: tuple[ChainLink, ...]
    local_witnesses: tuple[LocalWitnessRecord, ...]
    t_records: tuple[TRecord, ...]
    final_point: FinalPoint | None
    budgets: Budgets


@dataclass(frozen=True)
class PreprocessResult:
    adjusted: QuadSystem
    generators: GeneratorTriple
    witnesses: GeneratorWitnesses
    c: Fraction
    c_signature: Signature
    split: HyperbolicSplit
    evidence: tuple[SweepOutcome, ...]
    evidence_skipped: tuple[int, ...]


# ---------------------------------------------------------------------------
# stage 1: preprocessing


def _rationals_by_height():
    yield Fraction(0)
    h = 1
    while True:
        for b in range(1, h + 1):
            if math.gcd(h, b) == 1:
                yield Fraction(h, b)
                yield Fraction(-h, b)
        for a in range(1, h):
            if math.gcd(a, h) == 1:
                yield Fraction(a, h)
                yield Fraction(-a, h)
        h += 1


def preprocess(
    system: QuadSystem,
    seed: int,
    budgets: Budgets = Budgets(),
    ff_primes: tuple[int, ...] = (3, 5),
    workers: int = 1,
) -> PreprocessResult:
    """Regenerate the system, rebalance the third form over the reals, and
    split off hyperbolic planes, recording all witnesses."""
    n = system.n
    evidence: list[SweepOutcome] = []
    skipped: list[int] = []
    for p in ff_primes:
        if projective_count(p, n) > budgets.sweep:
            skipped.append(p)
            continue
        sweep = triple_nonsingular_ff(system, p, budgets.sweep, workers=workers)
        if sweep.status == "singular_witness":
            raise ValueError(
                f"system is singular mod {p} at {sweep.witness}; "
                "nonsingularity evidence failed"
            )
        evidence.append(sweep)

    generators, witnesses = select_generators(system, seed, budgets.tries * 16)
    q1 = system.combine(generators.m1)
    q2 = system.combine(generators.m2)
    q3 = system.combine(generators.m3)

    need = -(-(n - 2) // 2)  # ceil((n-2)/2)
    chosen_c = None
    chosen_sig = None
    for idx, c in enumerate(_rationals_by_height()):
        if idx >= budgets.tries * 16:
            break
        member = q1.scale(c).add(q3)
        if mat_det(member.gram) == 0:
            continue
        sig = signature_real(member)
        if min(sig.n_plus, sig.n_minus) >= need:
            chosen_c, chosen_sig = c, sig
            break
    if chosen_c is None:
        raise TriesExhausted(
            "no rational multiple balances the real signature of the third form"
        )
    adjusted_q3 = q1.scale(chosen_c).add(q3)
    split = split_hyperbolic(adjusted_q3, budgets.iso_height)
    floor_bound = (n - 5) // 2
    if split.witt_index < floor_bound:
        raise TriesExhausted(
            f"hyperbolic splitting found only {split.witt_index} pairs; "
            f"expected at least {floor_bound}"
        )
    adjusted = QuadSystem((q1, q2, adjusted_q3))
    return PreprocessResult(
        adjusted, generators, witnesses, chosen_c, chosen_sig, split,
        tuple(evidence), tuple(skipped),
    )


# ---------------------------------------------------------------------------
# stage 2: the 3-plane through the local data


class _RetryChain(Exception):
    pass


def _identity_space(n: int) -> LinearSpace:
    rows = tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )
    return LinearSpace(n, n - 1, rows)


def _to_ambient(coords: Vec, space: LinearSpace) -> Vec:
    x = tuple(
        sum(c * row[i] for c, row in zip(coords, space.basis))
        for i in range(space.n)
    )
    return vec(primitive_integer_vector(x))


def _generic_sample_targets(
    sub_form: QuadForm,
    places: list[Place],
    budgets: Budgets,
    rng: random.Random,
) -> list[LocalTarget]:
    """Fallback sampling: independent smooth local points of the restricted
    quadric at each finite place (the real place is left unconstrained)."""
    out: list[LocalTarget] = []
    for place in places:
        if place.kind != "finite":
            continue
        p = place.p
        search = smooth_point_mod_p(
            PolySystem.of_forms(sub_form), p, budgets.sample,
            seed=rng.randrange(2**32),
        )
        if search.point is None:
            raise _RetryChain(f"no smooth point mod {p} on a step quadric")
        lifted = hensel_lift(
            PolySystem.of_forms(sub_form),
            PadicApprox(p, 1, search.point.coords),
            2,
        )
        out.append(LocalTarget(finite(p), lifted, 2))
    if not out:
        raise _RetryChain("no finite place to pin a generic sample")
    return out


def find_chain_admissible_3plane(
    inp: DescentInput,
    pre: PreprocessResult,
    ff_primes: tuple[int, ...] = (3, 5),
    workers: int = 1,
) -> tuple[LinearSpace, AdmissibilityReport, tuple[LocalWitnessRecord, ...]]:
    """Build basis vectors e0..e3 of a 3-plane in the adjusted third quadric:
    e0 approximates every local target by weak approximation, and each
    subsequent vector approximates generic local samples on the orthogonal
    restriction (a quadric of rank >= n-2t >= 5).  The plane is certified
    admissible and local witnesses on the restricted pair are recorded."""
    q3 = pre.adjusted.forms[2]
    iso = pre.split.isotropic_space_rows()
    n = q3.n
    budgets = inp.budgets
    places = [t.place for t in inp.targets]
    target_primes = tuple(
        t.place.p for t in inp.targets if t.place.kind == "finite"
    )

    for outer in range(budgets.tries):
        rng = random.Random(f"{inp.seed}|chain3|{outer}")
        try:
            rows: list[Vec] = []
            for i in range(4):
                if i == 0:
                    ambient = _identity_space(n)
                else:
                    ambient = perp_space(
                        q3, LinearSpace(n, len(rows) - 1, tuple(rows))
                    )
                sub_form = restrict_form(q3, ambient)
                base_amb = isotropic_point_in_space(
                    q3, ambient, iso, budgets.iso_height,
                    unit_grad_primes=target_primes,
                )
                if base_amb is None:
                    raise _RetryChain("no isotropic base point in a step space")
                base_sub = solve_in_rowspan(ambient.basis, base_amb)
                assert base_sub is not None
                if i == 0:
                    targets_sub = [
                        _tighten(t) for t in inp.targets
                    ]
                else:
                    targets_sub = _generic_sample_targets(
                        sub_form, places, budgets, rng
                    )
                e_sub = weak_approx_quadric(
                    sub_form, base_sub, targets_sub, budgets.height,
                    seed=rng.randrange(2**32),
                )
                e_amb = _to_ambient(e_sub, ambient)
                if rows and mat_rank(tuple(rows) + (e_amb,)) == len(rows):
                    raise _RetryChain("new basis vector fell into the span")
                rows.append(e_amb)
            plane = LinearSpace(n, 3, tuple(rows))
            if not contains_in_quadric(q3, plane):
                raise _RetryChain("plane escaped the quadric")
            report = is_admissible(
                plane, pre.adjusted, ff_primes, budgets.sweep, workers
            )
            if report.verdict != "admissible":
                raise _RetryChain(f"admissibility: {report.reason}")
            witnesses = _local_witnesses(inp, pre, plane)
            return plane, report, witnesses
        except (_RetryChain, HeightExhausted, HenselConditionFailed,
                ArithmeticError, ValueError):
            continue
    raise TriesExhausted(
        f"no chain-admissible 3-plane found in {budgets.tries} attempts"
    )


def _tighten(t: LocalTarget) -> LocalTarget:
    """Shrink the real tolerance for the basis-vector stage so that the
    later witness stage keeps margin within epsilon/2."""
    if t.place.kind == "real":
        return LocalTarget(t.place, t.point, rat(t.tolerance) / 8)
    return t


def _local_witnesses(
    inp: DescentInput, pre: PreprocessResult, plane: LinearSpace
) -> tuple[LocalWitnessRecord, ...]:
    """Points of the restricted pair on the plane near each target.

    The first basis vector approximates the target at each place, so the
    plane point (1,0,0,0) is an approximate zero of the restricted pair;
    lifting (finite) or exact Newton plus a contraction certificate (real)
    produces the witness."""
    q1, q2, _ = pre.adjusted.forms
    r1 = restrict_form(q1, plane)
    r2 = restrict_form(q2, plane)
    sys2 = PolySystem.of_forms(r1, r2)
    eps_half = rat(inp.epsilon) / 2
    out: list[LocalWitnessRecord] = []
    for t in inp.targets:
        if t.place.kind == "finite":
            pa: PadicApprox = t.point
            p, k_claim = pa.p, int(t.tolerance)
            k_wit = k_claim + 2
            start_coords = tuple(
                1 if i == 0 else 0 for i in range(plane.t + 1)
            )
            start = PadicApprox(p, k_wit, start_coords)
            lifted = hensel_lift(sys2, start, k_wit)
            amb = _plane_to_ambient_mod(lifted.coords, plane, p, k_wit)
            if not _padic_congruent_ints(amb, pa.coords, p, k_claim):
                raise _RetryChain(
                    f"finite witness at p={p} missed the target congruence"
                )
            out.append(
                LocalWitnessRecord(
                    t.place,
                    finite_witness=FiniteWitness(
                        p, k_claim, k_wit, lifted.coords, amb
                    ),
                )
            )
        else:
            start = tuple(
                Fraction(1 if i == 0 else 0) for i in range(plane.t + 1)
            )
            # cap iterate heights relative to the coefficient size: Newton
            # then converges to a floor ~60 digits below what certification
            # needs, and the recorded witness stays cheap to re-verify
            coeff_digits = max(
                len(str(abs(c.numerator))) + len(str(c.denominator))
                for f in sys2.polys for _, c in f.terms
            )
            snap = coeff_digits + 60
            refined, cols = rational_newton_refine(sys2, start, 8,
                                                   snap_digits=snap)
            cert = real_zero_certificate(sys2, refined, cols)
            for _ in range(3):
                if cert.valid:
                    break
                refined, cols = rational_newton_refine(
                    sys2, refined, 1, cols, snap_digits=snap)
                cert = real_zero_certificate(sys2, refined, cols)
            if not cert.valid:
                raise _RetryChain("real witness certificate failed to contract")
            amb = tuple(
                sum(c * row[i] for c, row in zip(refined, plane.basis))
                for i in range(plane.n)
            )
            dist = real_proj_distance(amb, t.point)
            bound = dist + _ambient_radius_bound(
                cert.zero_radius, plane, amb, vec(t.point)
            )
            if bound >= eps_half:
                raise _RetryChain("real witness distance bound too large")
            out.append(
                LocalWitnessRecord(
                    t.place,
                    real_witness=RealWitness(
                        refined, amb, cols, cert.zero_radius,
                        cert.contraction, bound,
                    ),
                )
            )
    return tuple(out)


def _plane_to_ambient_mod(
    plane_coords, plane: LinearSpace, p: int, k: int
) -> tuple[int, ...]:
    mod = p**k
    out = []
    for i in range(plane.n):
        total = 0
        for c, row in zip(plane_coords, plane.basis):
            x = row[i]
            if x == 0:
                continue
            total += c * (x.numerator * pow(x.denominator, -1, mod))
        out.append(total % mod)
    return tuple(out)


def _padic_congruent_ints(a, b, p: int, k: int) -> bool:
    mod = p**k
    ja = next((i for i, c in enumerate(a) if c % p), None)
    jb = next((i for i, c in enumerate(b) if c % p), None)
    if ja is None or jb is None or ja != jb:
        return False
    ia = pow(a[ja] % mod, -1, mod)
    ib = pow(b[jb] % mod, -1, mod)
    return all((x * ia - y * ib) % mod == 0 for x, y in zip(a, b))


def _ambient_radius_bound(
    radius: Fraction, plane: LinearSpace, amb: Vec, target: Vec
) -> Fraction:
    """Exact bound on how much a plane-coordinate perturbation of sup norm
    `radius` can move the normalized ambient distance."""
    col_sums = [
        sum(abs(row[i]) for row in plane.basis) for i in range(plane.n)
    ]
    delta = radius * max(col_sums)
    j = max(range(len(target)), key=lambda i: abs(target[i]))
    yj = abs(amb[j])
    if yj <= delta:
        return Fraction(10**9)  # normalization chart would be destroyed
    ymax = max(abs(c) for c in amb)
    return abs(target[j]) * delta * (yj + ymax + delta) / (yj * (yj - delta))


# ---------------------------------------------------------------------------
# stage 3: covering extra large primes with a 4-plane


def extend_for_t(
    inp: DescentInput,
    pre: PreprocessResult,
    plane: LinearSpace,
    ff_primes: tuple[int, ...] = (3, 5),
    workers: int = 1,
) -> tuple[LinearSpace, tuple[TRecord, ...]]:
    """If extra finite places (primes >= 37) must be covered, extend the
    3-plane by a rational point of the quadric in its perpendicular space
    that is close to local points of the full restricted system at each such
    prime; the resulting 4-plane then carries local points of the restricted
    pair at those places."""
    t_set = inp.forced_t
    if not t_set:
        return plane, ()
    budgets = inp.budgets
    q3 = pre.adjusted.forms[2]
    perp = perp_space(q3, plane)
    restricted = tuple(restrict_form(f, perp) for f in pre.adjusted.forms)
    triple = PolySystem.of_forms(*restricted)
    sub_q3 = restricted[2]
    rng = random.Random(f"{inp.seed}|extendT")

    lifted_points: dict[int, PadicApprox] = {}
    for p in t_set:
        search = smooth_point_mod_p(triple, p, budgets.sample,
                                    seed=rng.randrange(2**32))
        if search.point is None:
            raise TriesExhausted(
                f"no smooth local point mod {p} on the restricted system; "
                "the input appears outside the guaranteed range"
            )
        lifted_points[p] = hensel_lift(
            triple, PadicApprox(p, 1, search.point.coords), 3
        )

    base_amb = isotropic_point_in_space(
        q3, perp, pre.split.isotropic_space_rows(), budgets.iso_height,
        unit_grad_primes=tuple(t_set),
    )
    if base_amb is None:
        raise TriesExhausted("no rational point of the quadric in the perp space")
    base_sub = solve_in_rowspan(perp.basis, base_amb)
    assert base_sub is not None

    for attempt in range(budgets.tries):
        targets = [
            LocalTarget(finite(p), lifted_points[p], 2) for p in t_set
        ]
        try:
            x_sub = weak_approx_quadric(
                sub_q3, base_sub, targets, budgets.height,
                seed=rng.randrange(2**32),
            )
        except Exception:
            continue
        x_amb = _to_ambient(x_sub, perp)
        if plane.contains_point(x_amb):
            continue
        bigger = LinearSpace(plane.n, plane.t + 1, plane.basis + (x_amb,))
        if not contains_in_quadric(q3, bigger):
            continue
        report = is_admissible(bigger, pre.adjusted, ff_primes,
                               budgets.sweep, workers)
        if report.verdict != "admissible":
            continue
        records = []
        try:
            r1 = restrict_form(pre.adjusted.forms[0], bigger)
            r2 = restrict_form(pre.adjusted.forms[1], bigger)
            sys2 = PolySystem.of_forms(r1, r2)
            for p in t_set:
                k_wit = 3
                start_coords = tuple(
                    1 if i == bigger.t else 0 for i in range(bigger.t + 1)
                )
                start = PadicApprox(p, k_wit, start_coords)
                lifted = hensel_lift(sys2, start, k_wit)
                amb = _plane_to_ambient_mod(lifted.coords, bigger, p, k_wit)
                records.append(
                    TRecord(
                        p, lifted_points[p],
                        FiniteWitness(p, 2, k_wit, lifted.coords, amb),
                    )
                )
        except Exception:
            continue
        return bigger, tuple(records)
    raise TriesExhausted("no admissible covering 4-plane found within budget")


# ---------------------------------------------------------------------------
# stage 4: extension to a 7-plane and the final search


def extend_to_7plane(
    plane: LinearSpace,
    pre: PreprocessResult,
    budgets: Budgets,
    seed: int,
    ff_primes: tuple[int, ...] = (3, 5),
    workers: int = 1,
) -> list[LinearSpace]:
    """Repeatedly extend an admissible plane (dimension 3..7) to dimension 7;
    candidate points come from the split's isotropic coordinates before
    falling back to sampled points of the quadric in the perp space."""
    if not 3 <= plane.t <= 7:
        raise ValueError("extension starts from dimensions 3..7")
    rng = random.Random(f"{seed}|extend7")
    chain: list[LinearSpace] = []
    current = plane
    while current.t < 7:
        current = extend_plane(
            current, pre.adjusted, budgets.iso_height,
            rng.randrange(2**32), budgets.tries, ff_primes, budgets.sweep,
            iso_rows=pre.split.isotropic_space_rows(), workers=workers,
        )
        chain.append(current)
    return chain


def final_point_search(
    system: QuadSystem,
    plane: LinearSpace,
    targets: tuple[LocalTarget, ...],
    height_bound: int,
) -> FinalPoint | None:
    """Bounded-height search for a rational point of the restricted pair on
    the 7-plane, pulled back to the ambient space and verified on all three
    quadrics.  Absence of a point is not a refutation: the search is
    height-limited by design."""
    if height_bound <= 0:
        return None
    q1, q2, q3 = system.forms
    r1 = restrict_form(q1, plane)
    r2 = restrict_form(q2, plane)
    k = plane.t + 1

    def check(coords: Vec) -> FinalPoint | None:
        if is_zero_vec(coords):
            return None
        if r1(coords) != 0 or r2(coords) != 0:
            return None
        amb = _to_ambient(coords, plane)
        for q in (q1, q2, q3):
            if q(amb) != 0:
                return None
        height = max(abs(int(c)) for c in amb)
        if height > height_bound:
            return None
        return FinalPoint(amb, coords, height)

    for i in range(k):
        hit = check(tuple(Fraction(1 if j == i else 0) for j in range(k)))
        if hit:
            return hit
    import itertools as it

    for h in (1, 2):
        for combo in it.product(range(-h, h + 1), repeat=k):
            if max(abs(c) for c in combo) != h:
                continue
            hit = check(vec(combo))
            if hit:
                return hit
    return None


# ---------------------------------------------------------------------------
# orchestration


def descend(
    inp: DescentInput,
    ff_primes: tuple[int, ...] = (3, 5),
    workers: int = 1,
) -> DescentCertificate:
    """Run the full pipeline and assemble the certificate."""
    inp.validate()
    pre = preprocess(inp.system, inp.seed, inp.budgets, ff_primes, workers)
    n = inp.system.n

    plane3, report3, witnesses = find_chain_admissible_3plane(
        inp, pre, ff_primes, workers
    )
    plane_t, t_records = extend_for_t(inp, pre, plane3, ff_primes, workers)
    upper = extend_to_7plane(
        plane_t, pre, inp.budgets, inp.seed, ff_primes, workers
    )
    chain_spaces: list[LinearSpace] = [plane3]
    if plane_t.t != plane3.t:
        chain_spaces.append(plane_t)
    chain_spaces.extend(upper)

    links: list[ChainLink] = []
    for idx, space in enumerate(chain_spaces):
        if idx == 0:
            rep = report3
        else:
            rep = is_admissible(space, pre.adjusted, ff_primes,
                                inp.budgets.sweep, workers)
        links.append(
            ChainLink(space, rep.pair_disc, rep.perp_system_sweeps,
                      rep.skipped_primes)
        )

    final = final_point_search(
        pre.adjusted, chain_spaces[-1], inp.targets, min(inp.budgets.height, 100)
    )

    return DescentCertificate(
        n=n,
        sub_hypothesis=n < 19,
        seed=inp.seed,
        generators=pre.generators,
        generator_witnesses=pre.witnesses,
        c=pre.c,
        c_signature=pre.c_signature,
        adjusted_q3=pre.adjusted.forms[2],
        split=pre.split,
        evidence_sweeps=pre.evidence,
        evidence_skipped=pre.evidence_skipped,
        chain=tuple(links),
        local_witnesses=witnesses,
        t_records=t_records,
        final_point=final,
        budgets=inp.budgets,
    )


# ---------------------------------------------------------------------------
# verification

def _short(x) -> str:
    """Digest of a possibly huge exact value for human-readable reports."""
    try:
        f = float(x)
        if abs(f) == float("inf"):
            raise OverflowError
        return f"~{f:.4g}"
    except (OverflowError, ValueError):
        return "(huge exact value)"



def verify_certificate(
    cert: DescentCertificate,
    inp: DescentInput,
    rerun_sweeps: bool = False,
    workers: int = 1,
) -> tuple[bool, list[tuple[str, bool, str]]]:
    """Re-derive every exact claim of a certificate from the input.

    Returns (ok, report); the report lists (claim, ok, detail) in evaluation
    order, and verification stops at the first failing claim."""
    report: list[tuple[str, bool, str]] = []

    def claim(name: str, ok: bool, detail: str = "") -> bool:
        report.append((name, ok, detail))
        return ok

    try:
        system = inp.system
        n = system.n
        if not claim("schema.n", cert.n == n, f"{cert.n} vs {n}"):
            return False, report

        g = cert.generators
        w = cert.generator_witnesses
        det_m = mat_det(g.matrix())
        if not claim("generators.det", det_m == w.det_m and det_m != 0,
                     f"det {_short(det_m)}"):
            return False, report
        d1 = mat_det(system.combine(g.m3).gram)
        if not claim("generators.d1_m3", d1 == w.d1_m3 and d1 != 0, _short(d1)):
            return False, report
        q1 = system.combine(g.m1)
        q2 = system.combine(g.m2)
        q3 = system.combine(g.m3)
        c12 = pair_nonsingular(q1, q2)
        if not claim("generators.d2_m12",
                     c12.verdict and c12.witness == w.d2_m12,
                     _short(c12.witness)):
            return False, report
        c13 = pair_nonsingular(q1, q3)
        if not claim("generators.d2_m13",
                     c13.verdict and c13.witness == w.d2_m13,
                     _short(c13.witness)):
            return False, report

        adjusted_q3 = q1.scale(cert.c).add(q3)
        if not claim("adjusted_q3.derivation",
                     adjusted_q3.gram == cert.adjusted_q3.gram):
            return False, report
        if not claim("adjusted_q3.nonsingular", mat_det(adjusted_q3.gram) != 0):
            return False, report
        sig = signature_real(adjusted_q3)
        need = -(-(n - 2) // 2)
        if not claim(
            "adjusted_q3.signature",
            sig == cert.c_signature and min(sig.n_plus, sig.n_minus) >= need,
            f"{sig}",
        ):
            return False, report

        if not claim("split.exact", verify_split(adjusted_q3, cert.split)):
            return False, report
        if not claim(
            "split.witt_bound",
            cert.split.witt_index >= (n - 5) // 2,
            f"witt {cert.split.witt_index}",
        ):
            return False, report

        adjusted = QuadSystem((q1, q2, adjusted_q3))
        if not claim("chain.nonempty", len(cert.chain) >= 1):
            return False, report
        prev: LinearSpace | None = None
        for i, link in enumerate(cert.chain):
            name = f"chain[{link.space.t}]"
            if not claim(f"{name}.contained",
                         contains_in_quadric(adjusted_q3, link.space)):
                return False, report
            if prev is not None:
                grew = (
                    link.space.t == prev.t + 1
                    and link.space.contains_space(prev)
                )
                if not claim(f"{name}.inclusion", grew):
                    return False, report
            r1 = restrict_form(q1, link.space)
            r2 = restrict_form(q2, link.space)
            cert_pair = pair_nonsingular(r1, r2)
            if not claim(
                f"{name}.pair_disc",
                cert_pair.verdict and cert_pair.witness == link.pair_disc,
                _short(cert_pair.witness),
            ):
                return False, report
            if rerun_sweeps:
                rep = is_admissible(link.space, adjusted,
                                    tuple(s.p for s in link.sweeps) or (3,),
                                    link.sweeps[0].budget if link.sweeps else 10**8,
                                    workers)
                if not claim(f"{name}.sweeps",
                             rep.verdict == "admissible", rep.reason):
                    return False, report
            prev = link.space
        if not claim("chain.start_dim", cert.chain[0].space.t == 3):
            return False, report
        if not claim("chain.end_dim", cert.chain[-1].space.t == 7):
            return False, report

        plane3 = cert.chain[0].space
        eps_half = rat(inp.epsilon) / 2
        rp1 = restrict_form(q1, plane3)
        rp2 = restrict_form(q2, plane3)
        sys2 = PolySystem.of_forms(rp1, rp2)
        by_place = {}
        for rec in cert.local_witnesses:
            by_place[(rec.place.kind, rec.place.p)] = rec
        for t in inp.targets:
            key = (t.place.kind, t.place.p)
            rec = by_place.get(key)
            pname = f"local_witness[{key[1] or 'real'}]"
            if rec is None:
                claim(f"{pname}.missing", False, "no witness for declared place")
                return False, report
            if t.place.kind == "finite":
                fw = rec.finite_witness
                if fw is None:
                    claim(f"{pname}.missing", False, "wrong witness kind")
                    return False, report
                mod = fw.p**fw.precision
                vals_ok = all(
                    _eval_gram_padic(rq, fw.plane_coords, fw.p, fw.precision) == 0
                    for rq in (rp1, rp2)
                )
                if not claim(f"{pname}.on_pair", vals_ok):
                    return False, report
                amb = _plane_to_ambient_mod(
                    fw.plane_coords, plane3, fw.p, fw.precision
                )
                if not claim(f"{pname}.in_plane", amb == fw.ambient):
                    return False, report
                pa: PadicApprox = t.point
                cong = _padic_congruent_ints(
                    amb, pa.coords, fw.p, fw.claim_precision
                )
                if not claim(f"{pname}.distance",
                             cong and fw.claim_precision >= int(t.tolerance)):
                    return False, report
            else:
                rw = rec.real_witness
                if rw is None:
                    claim(f"{pname}.missing", False, "wrong witness kind")
                    return False, report
                kant = real_zero_certificate(sys2, rw.plane_coords,
                                             rw.moving_cols)
                if not claim(
                    f"{pname}.contraction",
                    kant.valid and kant.zero_radius == rw.zero_radius,
                    f"contraction {_short(kant.contraction)}",
                ):
                    return False, report
                amb = tuple(
                    sum(c * row[i] for c, row in zip(rw.plane_coords,
                                                     plane3.basis))
                    for i in range(plane3.n)
                )
                if not claim(f"{pname}.in_plane", amb == rw.ambient):
                    return False, report
                dist = real_proj_distance(amb, t.point)
                bound = dist + _ambient_radius_bound(
                    rw.zero_radius, plane3, amb, vec(t.point)
                )
                if not claim(
                    f"{pname}.distance",
                    bound == rw.distance_bound and bound < eps_half,
                    f"bound {_short(bound)}",
                ):
                    return False, report

        if cert.t_records:
            plane4 = cert.chain[1].space if len(cert.chain) > 1 else None
            if plane4 is None or plane4.t != 4:
                claim("t_record.plane", False, "no 4-plane in the chain")
                return False, report
            perp = perp_space(adjusted_q3, plane3)
            restricted = tuple(restrict_form(f, perp) for f in adjusted.forms)
            rq1 = restrict_form(q1, plane4)
            rq2 = restrict_form(q2, plane4)
            for trec in cert.t_records:
                name = f"t_record[{trec.p}]"
                pp = trec.perp_point
                on_sys = all(
                    _eval_gram_padic(rf, pp.coords, pp.p, pp.precision) == 0
                    for rf in restricted
                )
                if not claim(f"{name}.point_on_system", on_sys):
                    return False, report
                fw = trec.witness
                vals_ok = all(
                    _eval_gram_padic(rq, fw.plane_coords, fw.p, fw.precision) == 0
                    for rq in (rq1, rq2)
                )
                amb = _plane_to_ambient_mod(
                    fw.plane_coords, plane4, fw.p, fw.precision
                )
                if not claim(f"{name}.witness",
                             vals_ok and amb == fw.ambient):
                    return False, report

        if cert.final_point is not None:
            fp = cert.final_point
            on_all = all(q(fp.coords) == 0 for q in adjusted.forms)
            if not claim("final_point.on_system", on_all):
                return False, report
            inside = solve_in_rowspan(cert.chain[-1].space.basis, fp.coords)
            if not claim("final_point.in_plane", inside is not None):
                return False, report

        return all(ok for _, ok, _ in report), report
    except Exception as exc:  # malformed certificates surface as failures
        report.append(("malformed", False, f"{type(exc).__name__}: {exc}"))
        return False, report
