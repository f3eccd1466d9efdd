import random
from dataclasses import replace
from fractions import Fraction as F

import pytest

from triquadric.descent import (
    Budgets,
    DescentInput,
    _rationals_by_height,
    extend_for_t,
    final_point_search,
    preprocess,
)
from triquadric.errors import IncompatibleTarget
from triquadric.exact import LinearSpace, PadicApprox, QuadForm, QuadSystem, vec
from triquadric.fixtures import (
    descent_input_f19,
    make_f19,
    make_toy9,
    perturbed_padic_target,
)
from triquadric.localsolve import REAL, LocalTarget, finite


def test_rationals_by_height_order():
    stream = _rationals_by_height()
    first = [next(stream) for _ in range(7)]
    assert first[0] == 0
    assert set(first[1:3]) == {F(1), F(-1)}
    assert all(max(abs(c.numerator), c.denominator) <= 2 for c in first[:7])


def test_preprocess_toy9():
    fx = make_toy9()
    pre = preprocess(fx.system, seed=3, budgets=Budgets(sweep=10**6))
    n = 9
    assert pre.split.witt_index >= (n - 5) // 2
    sig = pre.c_signature
    assert min(sig.n_plus, sig.n_minus) >= (n - 2 + 1) // 2
    from triquadric.planes import verify_split

    assert verify_split(pre.adjusted.forms[2], pre.split)


def test_preprocess_degenerate_system():
    q = QuadForm.diagonal([1, -1, 2, -3, 5, 1, -2, 3, 1])
    with pytest.raises(Exception):
        preprocess(QuadSystem((q, q, q)), seed=0, budgets=Budgets(sweep=10**4))


def test_input_validation_guards():
    inp = descent_input_f19()
    inp.validate()

    with pytest.raises(ValueError):
        replace(inp, forced_t=(5,)).validate()  # small primes belong to targets
    with pytest.raises(ValueError):
        replace(inp, forced_t=(3,)).validate()  # overlaps the 3-adic target

    bad_point = PadicApprox(3, 2, (1, 1) + (0,) * 17)
    bad = replace(
        inp,
        targets=(LocalTarget(finite(3), bad_point, 2),),
    )
    with pytest.raises(IncompatibleTarget):
        bad.validate()


def test_final_point_search_planted():
    fx = make_f19()
    plane = LinearSpace.from_rows(
        [[1 if j == i else 0 for j in range(19)] for i in range(8)]
    )
    # the planted point e1 is the first basis vector of this coordinate plane
    hit = final_point_search(fx.system, plane, (), 100)
    assert hit is not None
    assert hit.plane_coords == vec([1, 0, 0, 0, 0, 0, 0, 0])
    assert all(q(hit.coords) == 0 for q in fx.system.forms)
    assert hit.height <= 100

    assert final_point_search(fx.system, plane, (), 0) is None


def test_extend_for_t_empty():
    inp = descent_input_f19()
    plane = LinearSpace.from_rows(
        [[1 if j == i else 0 for j in range(19)] for i in range(4)]
    )
    out, records = extend_for_t(inp, None, plane)
    assert out is plane and records == ()


def test_perturbed_target_is_on_system():
    fx = make_f19()
    tgt = perturbed_padic_target(fx, 3, 3)
    mod = 27
    for q in fx.system.forms:
        total = 0
        for i in range(19):
            for j in range(19):
                a = q.gram[i][j]
                if a == 0:
                    continue
                aa = a.numerator * pow(a.denominator, -1, mod)
                total += aa * tgt.coords[i] * tgt.coords[j]
        assert total % mod == 0
    # genuinely different from the planted point at precision 2
    z = [int(c) for c in fx.planted_point]
    assert any((a - b) % 9 for a, b in zip(tgt.coords, z))


def test_extend_for_t_forced_41(f19_input, f19_pre):
    inp = replace(f19_input, forced_t=(41,))
    inp.validate()
    from triquadric.descent import find_chain_admissible_3plane

    plane3, report, _ = find_chain_admissible_3plane(inp, f19_pre)
    plane4, records = extend_for_t(inp, f19_pre, plane3)
    assert plane4.t == 4 and plane4.contains_space(plane3)
    assert len(records) == 1 and records[0].p == 41
    fw = records[0].witness
    assert fw.p == 41 and fw.precision == 3
    # the recorded pair witness satisfies both restricted forms mod 41^3
    from triquadric.descent import _eval_gram_padic
    from triquadric.planes import restrict_form

    r1 = restrict_form(f19_pre.adjusted.forms[0], plane4)
    r2 = restrict_form(f19_pre.adjusted.forms[1], plane4)
    for rq in (r1, r2):
        assert _eval_gram_padic(rq, fw.plane_coords, 41, 3) == 0
