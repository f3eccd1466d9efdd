"""Finite-field enumeration kernels backing the counting and sweep oracles.

Projective points over F_p are enumerated in lexicographic order as
leading-one representatives, in numpy batches.  Matrix products are done in
float32/float64 windows small enough to be exact integers, then reduced
mod p; this keeps full sweeps of ~10^7 points in the seconds range.

Chunks are processed in a fixed order and merged deterministically, so the
result never depends on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch
from .exact import FFPoint, Mat, QuadForm

CHUNK = 1 << 17


def reduce_rat_mod(x: Fraction, p: int) -> int:
    if x.denominator % p == 0:
        raise ValueError(f"denominator of {x} not invertible mod {p}")
    return x.numerator * pow(x.denominator, p - 2, p) % p


def reduce_matrix_mod(m: Mat, p: int) -> np.ndarray:
    return np.array([[reduce_rat_mod(x, p) for x in row] for row in m], dtype=np.int64)


def reduce_gram_mod(q: QuadForm, p: int) -> np.ndarray:
    if p == 2:
        raise ValueError("p = 2 is excluded (bilinear/quadratic mismatch)")
    return reduce_matrix_mod(q.gram, p)


def projective_count(p: int, n: int) -> int:
    return (p**n - 1) // (p - 1)


def _float_dtype(p: int, n: int):
    # products bounded by n (p-1)^2 must be exact in the mantissa
    return np.float32 if n * (p - 1) ** 2 < (1 << 24) else np.float64


def _quadric_dtype(p: int, n: int):
    """Dtype in which x^T A x fits exactly without intermediate reduction:
    the bound is n^2 (p-1)^3 over reduced representatives."""
    bound = n * n * (p - 1) ** 3
    if bound < (1 << 24):
        return np.float32
    if bound < (1 << 53):
        return np.float64
    return None


def _digit_block(p: int, ndigits: int, start: int, stop: int) -> np.ndarray:
    """Base-p digits of range(start, stop), most significant digit first."""
    vals = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, ndigits), dtype=np.int64)
    for d in range(ndigits - 1, -1, -1):
        out[:, d] = vals % p
        vals //= p
    return out


def projective_chunks(p: int, n: int):
    """Yield (lead_index, start, stop) chunk descriptors in lexicographic
    order of the normalized representatives."""
    for lead in range(n - 1, -1, -1):
        total = p ** (n - 1 - lead)
        for start in range(0, total, CHUNK):
            yield lead, start, min(start + CHUNK, total)


def chunk_points(p: int, n: int, lead: int, start: int, stop: int) -> np.ndarray:
    pts = np.zeros((stop - start, n), dtype=np.int64)
    pts[:, lead] = 1
    if lead < n - 1:
        pts[:, lead + 1 :] = _digit_block(p, n - 1 - lead, start, stop)
    return pts


def eval_quadric_batch(pts: np.ndarray, gram_mod: np.ndarray, p: int) -> np.ndarray:
    """x^T A x mod p for each row x of pts."""
    n = pts.shape[1]
    dt = _quadric_dtype(p, n)
    if dt is not None:
        x = pts if pts.dtype == dt else pts.astype(dt)
        t = x @ gram_mod.astype(dt)
        return (np.einsum("ij,ij->i", t, x) % p).astype(np.int64)
    dt = _float_dtype(p, n)
    x = pts.astype(dt)
    a = gram_mod.astype(dt)
    t = (x @ a) % p
    return ((t * x).sum(axis=1) % p).astype(np.int64)


def gradient_batch(pts: np.ndarray, gram_mod: np.ndarray, p: int) -> np.ndarray:
    """Rows 2 A x mod p for each point."""
    n = pts.shape[1]
    dt = _float_dtype(p, n)
    g = (2 * (pts.astype(dt) @ gram_mod.T.astype(dt))) % p
    return g.astype(np.int64)


def _proj_coeff_rows(p: int, k: int) -> np.ndarray:
    """Normalized representatives of P^{k-1}(F_p) as combination rows."""
    rows = []
    for lead in range(k):
        tail = k - 1 - lead
        for idx in range(p**tail):
            row = [0] * lead + [1]
            rest = []
            v = idx
            for _ in range(tail):
                rest.append(v % p)
                v //= p
            rows.append(row + rest[::-1])
    return np.array(rows, dtype=np.int64)


def _rank_lt(jac: np.ndarray, p: int, r: int, combos: np.ndarray) -> np.ndarray:
    """For a (z, rows, n) stack of Jacobians, flag those with rank < r.

    rank < r  <=>  some nontrivial row combination vanishes mod p."""
    c = combos.astype(np.int64)
    mixed = np.einsum("ck,zkn->czn", c, jac) % p
    return (mixed == 0).all(axis=2).any(axis=0)


class ModSpace:
    """Row space of a matrix mod p, for fast membership tests."""

    def __init__(self, rows_mod: np.ndarray, p: int):
        self.p = p
        reduced = [list(map(int, r)) for r in rows_mod % p]
        ncols = len(reduced[0])
        pivots: list[tuple[int, list[int]]] = []
        for row in reduced:
            for c, prow in pivots:
                if row[c] % p:
                    f = row[c] % p
                    row = [(a - f * b) % p for a, b in zip(row, prow)]
            lead = next((i for i, a in enumerate(row) if a % p), None)
            if lead is None:
                continue
            inv = pow(row[lead], p - 2, p)
            row = [a * inv % p for a in row]
            pivots.append((lead, row))
        self.pivots = pivots

    def contains(self, x) -> bool:
        p = self.p
        x = [int(a) % p for a in x]
        for c, prow in self.pivots:
            if x[c]:
                f = x[c]
                x = [(a - f * b) % p for a, b in zip(x, prow)]
        return all(a % p == 0 for a in x)


@dataclass(frozen=True)
class SweepOutcome:
    """Result of an exhaustive singular-point sweep over F_p."""

    status: str  # "no_witness" | "singular_witness" | "budget_exceeded"
    p: int
    witness: FFPoint | None
    points_scanned: int
    budget: int
    vertex_points_skipped: int = 0


def sweep_triple_singular(
    forms: tuple[QuadForm, QuadForm, QuadForm],
    p: int,
    budget: int,
    mask_rows: Mat | None = None,
    workers: int = 1,
) -> SweepOutcome:
    """Scan P^{n-1}(F_p) for common zeros of three quadrics where the 3 x n
    Jacobian drops below rank 3.

    When `mask_rows` spans a subspace V, common zeros inside V are treated as
    structural: the third form is expected to be a cone with vertex V there
    (its gradient vanishes on V by construction), so such points only count
    as witnesses if additionally the first two gradients are dependent.
    Returns the lexicographically smallest witness.
    """
    n = forms[0].n
    if any(f.n != n for f in forms):
        raise DimensionMismatch("forms must share a dimension")
    total = projective_count(p, n)
    if total > budget:
        return SweepOutcome("budget_exceeded", p, None, 0, budget)

    mats = [reduce_gram_mod(f, p) for f in forms]
    combos3 = _proj_coeff_rows(p, 3)
    combos2 = _proj_coeff_rows(p, 2)
    mask = ModSpace(reduce_matrix_mod(mask_rows, p), p) if mask_rows is not None else None

    def scan(desc):
        lead, start, stop = desc
        pts = chunk_points(p, n, lead, start, stop)
        count = len(pts)
        zeros = pts
        for m in mats:
            zeros = zeros[eval_quadric_batch(zeros, m, p) == 0]
            if not len(zeros):
                return None, count, 0
        jac = np.stack([gradient_batch(zeros, m, p) for m in mats], axis=1)
        low = _rank_lt(jac, p, 3, combos3)
        if not low.any():
            return None, len(pts), 0
        skipped = 0
        for idx in np.nonzero(low)[0]:
            x = zeros[idx]
            if mask is not None and mask.contains(x):
                pair = jac[idx][:2][None, :, :]
                if not bool(_rank_lt(pair, p, 2, combos2)[0]):
                    skipped += 1
                    continue
            return FFPoint.normalize(p, [int(c) for c in x]), len(pts), skipped
        return None, len(pts), skipped

    scanned = 0
    skipped_total = 0
    descs = list(projective_chunks(p, n))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for witness, cnt, skipped in pool.map(scan, descs):
                scanned += cnt
                skipped_total += skipped
                if witness is not None:
                    return SweepOutcome(
                        "singular_witness", p, witness, scanned, budget, skipped_total
                    )
    else:
        for desc in descs:
            witness, cnt, skipped = scan(desc)
            scanned += cnt
            skipped_total += skipped
            if witness is not None:
                return SweepOutcome(
                    "singular_witness", p, witness, scanned, budget, skipped_total
                )
    return SweepOutcome("no_witness", p, None, scanned, budget, skipped_total)


# ---------------------------------------------------------------------------
# subspace enumeration (reduced row echelon canonical representatives)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    assert num % den == 0
    return num // den


def _pattern_free_slots(pivots: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    """Free (row, col) positions of an RREF matrix with the given pivots."""
    pivset = set(pivots)
    slots = []
    for i, c in enumerate(pivots):
        for j in range(c + 1, n):
            if j not in pivset:
                slots.append((i, j))
    return slots


def count_isotropic_subspaces(
    q: QuadForm, p: int, k: int, budget: int, workers: int = 1
) -> int:
    """Number of k-dimensional subspaces of F_p^n on which q vanishes
    identically, by exhaustive canonical-form enumeration.

    Vanishing on the subspace is tested through the bilinear form: in odd
    characteristic Q|_V = 0 iff b(e_i, e_j) = 0 for all basis pairs.
    """
    n = q.n
    if p == 2:
        raise ValueError("p = 2 is excluded")
    total = gaussian_binomial(n, k, p)
    if total > budget:
        raise BudgetExceeded(
            f"{total} subspaces exceed the enumeration budget {budget}"
        )
    import itertools

    a = reduce_gram_mod(q, p)
    dt = _float_dtype(p, n)
    af = a.astype(dt)

    def run_pattern(pivots):
        slots = _pattern_free_slots(pivots, n)
        nfree = len(slots)
        found = 0
        for start in range(0, p**nfree, CHUNK):
            stop = min(start + CHUNK, p**nfree)
            basis = np.zeros((stop - start, k, n), dtype=np.int64)
            for i, c in enumerate(pivots):
                basis[:, i, c] = 1
            if nfree:
                digits = _digit_block(p, nfree, start, stop)
                for s, (i, j) in enumerate(slots):
                    basis[:, i, j] = digits[:, s]
            bf = basis.astype(dt)
            t = (bf @ af) % p
            g = np.matmul(t, bf.transpose(0, 2, 1)) % p
            found += int(((g % p) == 0).all(axis=(1, 2)).sum())
        return found

    patterns = list(itertools.combinations(range(n), k))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(run_pattern, patterns))
    return sum(run_pattern(pat) for pat in patterns)


def random_points_mod(
    p: int, n: int, count: int, seed: int
) -> np.ndarray:
    """Deterministic batch of nonzero points mod p (not normalized)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    pts = rng.integers(0, p, size=(count, n), dtype=np.int64)
    keep = (pts != 0).any(axis=1)
    return pts[keep]


def int_rank_mod(rows: list[list[int]], p: int) -> int:
    """Rank of an integer matrix mod p (small sizes, plain elimination)."""
    m = [[int(x) % p for x in row] for row in rows]
    rank_ = 0
    ncols = len(m[0]) if m else 0
    row_idx = 0
    for c in range(ncols):
        piv = next((i for i in range(row_idx, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[row_idx], m[piv] = m[piv], m[row_idx]
        inv = pow(m[row_idx][c], p - 2, p)
        m[row_idx] = [x * inv % p for x in m[row_idx]]
        for i in range(len(m)):
            if i != row_idx and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[row_idx])]
        rank_ += 1
        row_idx += 1
    return rank_
