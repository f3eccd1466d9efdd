import random
from fractions import Fraction as F

import pytest

from triquadric.errors import DimensionMismatch
from triquadric.exact import (
    FFPoint,
    LinearSpace,
    PadicApprox,
    QuadForm,
    Signature,
    congruence_diagonalize,
    eval_form,
    gradient,
    integer_kernel_basis,
    kernel_basis,
    mat,
    mat_det,
    mat_mul,
    mat_rank,
    primitive_integer_vector,
    rank,
    saturated_rowspan_basis,
    signature_real,
    transpose,
    vec,
)


def random_symmetric(rng, n, lo=-5, hi=5):
    g = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            c = F(rng.randint(lo, hi), rng.randint(1, 3))
            g[i][j] = g[j][i] = c
    return QuadForm.from_rows(g)


def random_invertible(rng, n):
    while True:
        m = mat([[rng.randint(-4, 4) for _ in range(n)] for _ in range(n)])
        if mat_det(m) != 0:
            return m


def test_eval_form_examples():
    assert eval_form(QuadForm.diagonal([1, -1]), (1, 1)) == 0
    assert eval_form(QuadForm.diagonal([1, 1, -2]), (1, 1, 1)) == 0
    q = QuadForm.from_rows([[0, F(1, 2)], [F(1, 2), 0]])
    assert eval_form(q, (3, 5)) == 15


def test_eval_form_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        eval_form(QuadForm.diagonal([1, 2]), (1, 2, 3))


def test_gradient_examples():
    assert gradient(QuadForm.diagonal([1, -1]), (1, 1)) == vec([2, -2])
    assert gradient(QuadForm.diagonal([1, 1, -2]), (0, 0, 0)) == vec([0, 0, 0])
    q = QuadForm.from_rows([[0, F(1, 2)], [F(1, 2), 0]])
    assert gradient(q, (1, 0)) == vec([0, 1])


def test_congruence_diagonalize_examples():
    d, u = congruence_diagonalize(QuadForm.diagonal([2, 3]))
    assert d.gram == QuadForm.diagonal([2, 3]).gram

    q = QuadForm.from_rows([[0, F(1, 2)], [F(1, 2), 0]])
    d, u = congruence_diagonalize(q)
    assert mat_mul(mat_mul(transpose(u), q.gram), u) == d.gram
    assert signature_real(q) == Signature(1, 1, 0)

    d, u = congruence_diagonalize(QuadForm.zero(3))
    assert d.gram == QuadForm.zero(3).gram


def test_congruence_diagonalize_random_exact():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(1, 20)
        q = random_symmetric(rng, n)
        d, u = congruence_diagonalize(q)
        assert mat_mul(mat_mul(transpose(u), q.gram), u) == d.gram
        assert all(d.gram[i][j] == 0 for i in range(n) for j in range(n)
                   if i != j)
        assert mat_rank(d.gram) == mat_rank(q.gram)


def test_signature_examples():
    assert signature_real(QuadForm.diagonal([1, 1, -2])) == Signature(2, 1, 0)
    assert signature_real(QuadForm.diagonal([0, 0, 5])) == Signature(1, 0, 2)


def test_signature_congruence_invariant():
    rng = random.Random(5)
    for _ in range(15):
        n = rng.randint(2, 6)
        q = random_symmetric(rng, n)
        u = random_invertible(rng, n)
        conj = QuadForm(n, mat_mul(mat_mul(transpose(u), q.gram), u))
        assert signature_real(conj) == signature_real(q)


def test_rank_examples():
    assert rank(QuadForm.diagonal([1, 0, 3])) == 2
    assert rank(QuadForm.zero(4)) == 0
    assert rank(QuadForm.from_rows([[1, 2], [2, 4]])) == 1


def test_bilinearity_identity():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 8)
        q = random_symmetric(rng, n)
        x = vec([rng.randint(-5, 5) for _ in range(n)])
        y = vec([rng.randint(-5, 5) for _ in range(n)])
        xy = tuple(a + b for a, b in zip(x, y))
        assert q(xy) - q(x) - q(y) == 2 * q.bilinear(x, y)


def test_euler_relation():
    rng = random.Random(4)
    for _ in range(30):
        n = rng.randint(1, 8)
        q = random_symmetric(rng, n)
        x = vec([F(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)])
        g = gradient(q, x)
        assert sum(a * b for a, b in zip(g, x)) == 2 * q(x)


def test_primitive_integer_vector():
    assert primitive_integer_vector(vec([F(2, 3), F(-4, 3)])) == (1, -2)
    assert primitive_integer_vector(vec([-2, 4])) == (1, -2)
    with pytest.raises(ValueError):
        primitive_integer_vector(vec([0, 0]))


def test_kernel_bases_agree_and_saturate():
    rng = random.Random(9)
    for _ in range(25):
        nrows = rng.randint(1, 4)
        ncols = rng.randint(nrows, 7)
        m = mat([[rng.randint(-6, 6) for _ in range(ncols)]
                 for _ in range(nrows)])
        k1 = kernel_basis(m)
        k2 = integer_kernel_basis(m)
        assert len(k1) == len(k2)
        for v in k2:
            assert all(sum(r * c for r, c in zip(row, v)) == 0 for row in m)
        if k2:
            # saturation: full rank mod small primes
            for p in (2, 3, 5):
                rows_mod = [[int(c) % p for c in v] for v in k2]
                from triquadric.ffenum import int_rank_mod

                assert int_rank_mod(rows_mod, p) == len(k2)


def test_saturated_rowspan_basis():
    rows = mat([[2, 4, 0], [0, 6, 3]])
    sat = saturated_rowspan_basis(rows)
    assert len(sat) == 2
    assert mat_rank(rows + sat) == 2
    for p in (2, 3):
        from triquadric.ffenum import int_rank_mod

        assert int_rank_mod([[int(c) % p for c in r] for r in sat], p) == 2


def test_linear_space_validation():
    with pytest.raises(ValueError):
        LinearSpace.from_rows([[1, 2, 0], [2, 4, 0]])
    sp = LinearSpace.from_rows([[1, 0, 0], [0, 1, 0]])
    assert sp.contains_point((3, -2, 0))
    assert not sp.contains_point((0, 0, 1))
    bigger = sp.span_with((0, 0, 1))
    assert bigger.t == 2 and bigger.contains_space(sp)


def test_ffpoint_normalization():
    pt = FFPoint.normalize(7, (3, 5, 0))
    assert pt.coords[0] == 1
    with pytest.raises(ValueError):
        FFPoint(5, (0, 0, 0))
    with pytest.raises(ValueError):
        FFPoint(5, (2, 1, 0))  # not normalized


def test_padic_validation():
    pa = PadicApprox(3, 2, (1, 3, 0))
    assert pa.modulus == 9 and pa.first_unit_index() == 0
    with pytest.raises(ValueError):
        PadicApprox(3, 2, (3, 6, 0))  # no unit coordinate
    assert pa.truncate(1).coords == (1, 0, 0)


def test_quadsystem_combine():
    from triquadric.exact import QuadSystem

    s = QuadSystem((QuadForm.diagonal([1, 0]), QuadForm.diagonal([0, 1]),
                    QuadForm.from_rows([[0, F(1, 2)], [F(1, 2), 0]])))
    comb = s.combine((1, 1, 0))
    assert comb.gram == QuadForm.diagonal([1, 1]).gram
    assert s.combine((0, 0, 2)).gram[0][1] == 1
