import random
from fractions import Fraction as F

import pytest

from triquadric.exact import (
    LinearSpace,
    QuadForm,
    QuadSystem,
    gradient,
    is_zero_vec,
    mat,
    mat_mul,
    mat_rank,
    vec,
)
from triquadric.planes import (
    contains_in_quadric,
    intersect_rowspans,
    is_admissible,
    isotropic_point_in_space,
    isotropic_vector,
    perp_space,
    quadric_point_sampler,
    restrict_form,
    space_in_coords,
    split_hyperbolic,
    verify_split,
)

from test_exact import random_invertible, random_symmetric


def split4():
    g = [[0, F(1, 2), 0, 0], [F(1, 2), 0, 0, 0],
         [0, 0, 0, F(1, 2)], [0, 0, F(1, 2), 0]]
    return QuadForm.from_rows(g)


def normal_form_19():
    """Eight hyperbolic blocks x_i x_{i+8} plus a nonsingular 3-variable tail."""
    g = [[F(0)] * 19 for _ in range(19)]
    for i in range(8):
        g[i][i + 8] = g[i + 8][i] = F(1, 2)
    g[16][16], g[17][17], g[18][18] = F(1), F(1), F(-7)
    return QuadForm.from_rows(g)


def test_isotropic_vector_examples():
    assert isotropic_vector(QuadForm.diagonal([1, 1, -1]), 10) is not None
    assert isotropic_vector(QuadForm.diagonal([1, 1, 1]), 10) is None
    assert isotropic_vector(QuadForm.diagonal([1, -2]), 60) is None
    # kernel vectors count as isotropic
    v = isotropic_vector(QuadForm.diagonal([1, 0]), 10)
    assert v is not None and QuadForm.diagonal([1, 0])(v) == 0


def test_split_examples():
    q = QuadForm.diagonal([1, -1])
    s = split_hyperbolic(q, 10)
    assert s.witt_index == 1 and not s.residual_basis
    assert verify_split(q, s)

    s4 = split_hyperbolic(split4(), 10)
    assert s4.witt_index == 2 and verify_split(split4(), s4)

    aniso = QuadForm.diagonal([1, 1, 1])
    s3 = split_hyperbolic(aniso, 10)
    assert s3.witt_index == 0
    assert s3.residual_form.gram == aniso.gram


def test_split_random_exact():
    rng = random.Random(61)
    for _ in range(30):
        n = rng.randint(1, 10)
        q = random_symmetric(rng, n, lo=-3, hi=3)
        s = split_hyperbolic(q, 12)
        assert verify_split(q, s)


def test_split_normal_form():
    q = normal_form_19()
    s = split_hyperbolic(q, 40)
    assert s.witt_index == 8  # the tail 1,1,-7 is anisotropic over Q
    assert verify_split(q, s)


def test_restrict_form_examples():
    q = QuadForm.diagonal([1, -1, 2, -3])
    sp = LinearSpace.from_rows([[1, 1, 0, 0], [0, 0, 1, 1]])
    assert restrict_form(q, sp).gram == QuadForm.diagonal([0, -1]).gram

    full = LinearSpace.from_rows([[1, 0], [0, 1]])
    q2 = QuadForm.diagonal([2, 3])
    assert restrict_form(q2, full).gram == q2.gram

    iso = LinearSpace.from_rows([[1, 1]])
    assert restrict_form(QuadForm.diagonal([1, -1]), iso).gram == ((F(0),),)


def test_restrict_form_change_of_basis():
    rng = random.Random(67)
    for _ in range(10):
        n = rng.randint(3, 6)
        k = rng.randint(1, n - 1)
        q = random_symmetric(rng, n)
        rows = []
        while len(rows) < k:
            cand = [rng.randint(-3, 3) for _ in range(n)]
            if mat_rank(mat(rows + [cand])) == len(rows) + 1:
                rows.append(cand)
        sp = LinearSpace.from_rows(rows)
        m = random_invertible(rng, k)
        new_rows = mat_mul(m, sp.basis)
        sp2 = LinearSpace(n, k - 1, new_rows)
        from triquadric.exact import transpose

        expected = mat_mul(mat_mul(m, restrict_form(q, sp).gram), transpose(m))
        assert restrict_form(q, sp2).gram == expected


def test_contains_examples():
    q = split4()
    assert contains_in_quadric(q, LinearSpace.from_rows([[1, 0, 0, 0],
                                                         [0, 0, 1, 0]]))
    assert not contains_in_quadric(q, LinearSpace.from_rows([[1, 0, 0, 0],
                                                             [0, 1, 0, 0]]))
    assert contains_in_quadric(q, LinearSpace.from_rows([[1, 0, 0, 0]]))


def test_perp_space_properties():
    q = split4()
    line = LinearSpace.from_rows([[1, 0, 0, 0], [0, 0, 1, 0]])
    perp = perp_space(q, line)
    assert perp.t == 4 - 2 - 1  # n - t - 2 projectively
    assert perp.contains_space(line)

    # a non-isotropic point gives a hyperplane missing it
    pt = LinearSpace.from_rows([[1, 1, 0, 0]])
    h = perp_space(q, pt)
    assert h.t == 2
    assert not h.contains_point((1, 1, 0, 0))


def test_perp_space_normal_form_coordinates():
    """For the block form and the plane on e1..e4, the perpendicular space is
    spanned by e1..e8 and e13..e19."""
    q = normal_form_19()
    m = LinearSpace.from_rows(
        [[1 if j == i else 0 for j in range(19)] for i in range(4)]
    )
    perp = perp_space(q, m)
    assert perp.t == 19 - 4 - 1
    expected_idx = list(range(8)) + list(range(12, 19))
    expected = LinearSpace.from_rows(
        [[1 if j == i else 0 for j in range(19)] for i in expected_idx]
    )
    assert perp.contains_space(expected) and expected.contains_space(perp)

    # e8 (the last vector of the corresponding 7-plane) is a smooth point of
    # the quadric inside that perpendicular space
    e8 = vec([1 if i == 7 else 0 for i in range(19)])
    assert q(e8) == 0 and perp.contains_point(e8)
    assert not is_zero_vec(gradient(q, e8))


def test_space_in_coords_roundtrip():
    q = split4()
    line = LinearSpace.from_rows([[1, 0, 0, 0], [0, 0, 1, 0]])
    perp = perp_space(q, line)
    coords = space_in_coords(line, perp)
    for crow, lrow in zip(coords, line.basis):
        back = [sum(c * r[i] for c, r in zip(crow, perp.basis))
                for i in range(4)]
        assert vec(back) == lrow


def test_intersect_rowspans():
    a = mat([[1, 0, 0], [0, 1, 0]])
    b = mat([[0, 1, 0], [0, 0, 1]])
    inter = intersect_rowspans(a, b)
    assert len(inter) == 1
    x = inter[0]
    assert x[0] == 0 and x[2] == 0 and x[1] != 0


def test_quadric_point_sampler():
    q = split4()
    rng = random.Random(3)
    sampler = quadric_point_sampler(q, vec([1, 0, 0, 0]), rng)
    for _ in range(10):
        pt = next(sampler)
        assert q(pt) == 0


def test_is_admissible_guards():
    q1 = QuadForm.diagonal([1, -1, 2, -3])
    q2 = QuadForm.diagonal([2, 1, -1, 1])
    q3 = split4()
    system = QuadSystem((q1, q2, q3))
    off = LinearSpace.from_rows([[1, 0, 0, 0], [0, 1, 0, 0]])  # not in q3
    rep = is_admissible(off, system)
    assert rep.verdict == "not_admissible"
    assert "contained" in rep.reason

    # a line of q3 disjoint from the first two quadrics is vacuously fine on
    # the pair side: the restricted pencil discriminant is nonzero
    line = LinearSpace.from_rows([[1, 0, 0, 0], [0, 0, 1, 0]])
    rep2 = is_admissible(line, system, ff_primes=(3,), budget=10**6)
    assert rep2.contained_in_q3
    assert rep2.pair_disc != 0


def test_is_admissible_degenerate_pair():
    q = QuadForm.diagonal([1, -1, 2, -3])
    system = QuadSystem((q, q, split4()))
    line = LinearSpace.from_rows([[1, 0, 0, 0], [0, 0, 1, 0]])
    rep = is_admissible(line, system, ff_primes=(3,), budget=10**6)
    assert rep.verdict == "not_admissible"
    assert rep.pair_disc == 0


def test_isotropic_point_in_space_uses_intersection():
    q = normal_form_19()
    s = split_hyperbolic(q, 40)
    iso = s.isotropic_space_rows()
    sub = LinearSpace.from_rows(
        [[1 if j == i else 0 for j in range(19)] for i in range(10)]
    )
    pt = isotropic_point_in_space(q, sub, iso, 10)
    assert pt is not None and q(pt) == 0
    assert sub.contains_point(pt)
