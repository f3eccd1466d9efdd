"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s`.  The end-to-end criteria
share one session-scoped pipeline run on the flagship n = 19 fixture.
"""

import itertools
import math
import random
import time
from dataclasses import replace
from fractions import Fraction as F

import pytest

from triquadric import jsonio
from triquadric.descent import Budgets, descend, verify_certificate
from triquadric.errors import NotApplicable
from triquadric.exact import (
    PadicApprox,
    QuadForm,
    mat,
    mat_mul,
    mat_rank,
    transpose,
    vec,
)
from triquadric.fano import (
    FanoQuery,
    count_planes_ff,
    fano_dim,
    fano_dim_recursive,
    fit_count_degree,
)
from triquadric.localsolve import (
    REAL,
    LocalTarget,
    finite,
    hensel_lift,
    padic_proj_congruent,
    real_proj_distance,
    smooth_point_mod_p,
    weak_approx_quadric,
)
from triquadric.pencil import (
    pair_nonsingular,
    repeated_rational_roots,
    singular_member_kernel,
)
from triquadric.planes import quadric_point_sampler, split_hyperbolic, verify_split
from triquadric.polys import PolySystem

from test_exact import random_invertible, random_symmetric


def report(num, label, ok):
    print(f"\n[acceptance {num}] {label}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({label}) failed"


def test_criterion_1_fano_consistency():
    start = time.time()
    checked = 0
    for n in range(3, 26):
        for t in range(0, n - 1):
            for r in range(1, n + 1):
                q = FanoQuery(n, t, r)
                try:
                    a = fano_dim(q)
                    b = fano_dim_recursive(q)
                except NotApplicable:
                    continue
                assert a == b, (n, t, r)
                checked += 1
    elapsed = time.time() - start
    report(1, f"fano closed form == recursion ({checked} queries, "
              f"{elapsed:.2f}s)", checked > 1000 and elapsed < 1.0)


def _split_form(n):
    g = [[F(0)] * n for _ in range(n)]
    for i in range(0, n - 1, 2):
        g[i][i + 1] = g[i + 1][i] = F(1, 2)
    if n % 2:
        g[n - 1][n - 1] = F(1)
    return QuadForm.from_rows(g)


def test_criterion_2_fano_oracle():
    start = time.time()
    q4 = _split_form(4)
    counts4 = [count_planes_ff(q4, p, 1) for p in (3, 5, 7)]
    ok = [r.count for r in counts4] == [8, 12, 16]
    ok = ok and fit_count_degree(counts4) == 1 == fano_dim(FanoQuery(4, 1, 4))
    q5 = _split_form(5)
    counts5 = [count_planes_ff(q5, p, 1) for p in (3, 5)]
    ok = ok and fit_count_degree(counts5) == 3 == fano_dim(FanoQuery(5, 1, 5))
    elapsed = time.time() - start
    report(2, f"fano counting oracle (counts {[r.count for r in counts4]}, "
              f"{elapsed:.1f}s)", ok and elapsed < 120)


def test_criterion_3_pair_certification():
    start = time.time()
    rng = random.Random(2024)
    # 200 random pairs with small coefficients
    for _ in range(200):
        m = rng.randint(2, 5)
        qa = random_symmetric(rng, m, lo=-3, hi=3)
        qb = random_symmetric(rng, m, lo=-3, hi=3)
        cert = pair_nonsingular(qa, qb)
        if not cert.verdict and not cert.pencil_identically_zero:
            from triquadric.pencil import det_form_pencil

            f = det_form_pencil(qa, qb)
            for lam in repeated_rational_roots(f):
                member = qa.scale(lam).add(qb)
                assert mat_rank(member.gram) <= m - 1
                for k in singular_member_kernel(qa, qb, lam):
                    assert all(x == 0 for x in
                               (sum(member.gram[i][j] * k[j] for j in range(m))
                                for i in range(m)))
        else:
            assert cert.pencil_identically_zero or not repeated_rational_roots(
                det_form_pencil_cached(qa, qb))
    # 50 constructed pairs with planted rational repeated roots
    for _ in range(50):
        m = rng.randint(3, 5)
        u = random_invertible(rng, m)
        diag = [0, 0] + [rng.choice([1, -1, 2, -2, 3]) for _ in range(m - 2)]
        c_gram = mat_mul(mat_mul(transpose(u), QuadForm.diagonal(diag).gram), u)
        qa = random_symmetric(rng, m, lo=-3, hi=3)
        lam = F(rng.randint(-3, 3), rng.randint(1, 3))
        qb = QuadForm(m, mat(c_gram)).add(qa.scale(-lam))
        cert = pair_nonsingular(qa, qb)
        assert not cert.verdict  # planted ground truth
        member = qa.scale(lam).add(qb)
        assert mat_rank(member.gram) <= m - 1
        kern = singular_member_kernel(qa, qb, lam)
        assert kern
        for k in kern:
            grad = [2 * sum(member.gram[i][j] * k[j] for j in range(m))
                    for i in range(m)]
            assert all(g == 0 for g in grad)
    elapsed = time.time() - start
    report(3, f"pair certification soundness ({elapsed:.1f}s)", elapsed < 60)


def det_form_pencil_cached(qa, qb):
    from triquadric.pencil import det_form_pencil

    return det_form_pencil(qa, qb)


def _minor_valuation(system, coords, p):
    terms = []
    from triquadric.localsolve import _best_minor_columns, _grad_terms, \
        _eval_terms_mod, _p_normalized_int_polys

    ints = _p_normalized_int_polys(system, p)
    grads = [_grad_terms(t, system.nvars) for t in ints]
    jac = [[_eval_terms_mod(g, tuple(coords), p**30) for g in gr]
           for gr in grads]
    _, e = _best_minor_columns(jac, system.r, p)
    vals = []
    for t in ints:
        fv = _eval_terms_mod(t, tuple(coords), p**30)
        v = 0
        while fv and fv % p == 0:
            fv //= p
            v += 1
        vals.append(v if fv else 30)
    return min(vals), e


def test_criterion_4_hensel_contract():
    start = time.time()
    rng = random.Random(4096)
    lifted = 0
    k = 50
    while lifted < 100:
        p = rng.choice([11, 13, 37, 41])
        n = rng.randint(3, 5)
        diag = [rng.choice([1, -1, 2, -2, 3, 5, -7]) for _ in range(n)]
        system = PolySystem.of_forms(QuadForm.diagonal(diag))
        found = smooth_point_mod_p(system, p, 10**6,
                                   seed=rng.randrange(2**30))
        if found.point is None:
            continue
        start_pt = PadicApprox(p, 1, found.point.coords)
        v0, e = _minor_valuation(system, found.point.coords, p)
        out = hensel_lift(system, start_pt, k)
        mod = p**k
        residual = sum(d * c * c for d, c in zip(diag, out.coords)) % mod
        assert residual == 0
        # distance bound: each coordinate moved by at most residual/minor
        bound = v0 - e
        assert bound >= 1
        for a, b in zip(out.coords, start_pt.coords):
            assert (a - b) % p**bound == 0
        lifted += 1
    elapsed = time.time() - start
    report(4, f"hensel lifting to p^50 on 100 systems ({elapsed:.1f}s)",
           elapsed < 60)


def test_criterion_5_witt_splitting(f19_run):
    start = time.time()
    rng = random.Random(512)
    for _ in range(100):
        n = rng.randint(1, 10)
        q = random_symmetric(rng, n, lo=-3, hi=3)
        s = split_hyperbolic(q, 10)
        assert verify_split(q, s)
    # shipped fixtures
    from triquadric.fixtures import make_f17, make_toy9

    for fx in (make_toy9(),):
        s = split_hyperbolic(fx.system.forms[2], 40)
        assert verify_split(fx.system.forms[2], s)
    inp, cert, _ = f19_run
    ok = cert.split.witt_index >= (19 - 5) // 2
    elapsed = time.time() - start
    report(5, f"witt splitting exact; flagship witt={cert.split.witt_index} "
              f"({elapsed:.1f}s)", ok and elapsed < 120)


def test_criterion_6_weak_approximation():
    start = time.time()
    rng = random.Random(606)
    # the worked circle instance
    q = QuadForm.diagonal([1, 1, -1])
    tr = LocalTarget(REAL, (F(3, 5), F(4, 5), 1), F(1, 10))
    t7 = LocalTarget(finite(7), PadicApprox(7, 1, (1, 0, 1)), 1)
    x = weak_approx_quadric(q, (1, 0, 1), [tr, t7], 10**12, seed=6)
    assert q(x) == 0
    assert padic_proj_congruent(x, t7.point, 1)
    assert real_proj_distance(x, tr.point) < F(1, 10)

    done = 0
    while done < 25:
        n = rng.randint(3, 5)
        g = [[F(0)] * n for _ in range(n)]
        g[0][1] = g[1][0] = F(1, 2)
        for i in range(2, n):
            g[i][i] = F(rng.choice([1, -1, 2, -3, 5]))
        form = QuadForm.from_rows(g)
        base = vec([1 if i == 0 else 0 for i in range(n)])
        sampler = quadric_point_sampler(form, base, rng)
        t_real = next(sampler)
        p = rng.choice([3, 5, 7, 11])
        t_fin = next(sampler)
        if all(int(c) % p == 0 for c in t_fin):
            continue
        kk = rng.randint(1, 3)
        pa = PadicApprox(p, kk, tuple(int(c) % p**kk for c in t_fin))
        targets = [LocalTarget(REAL, t_real, F(1, 8)),
                   LocalTarget(finite(p), pa, kk)]
        out = weak_approx_quadric(form, base, targets, 10**45,
                                  seed=rng.randrange(2**30))
        assert form(out) == 0
        assert padic_proj_congruent(out, pa, kk)
        assert real_proj_distance(out, t_real) < F(1, 8)
        done += 1
    elapsed = time.time() - start
    report(6, f"weak approximation on 25 instances + worked case "
              f"({elapsed:.1f}s)", elapsed < 60)


def test_criterion_7_end_to_end(f19_run):
    inp, cert, wall = f19_run
    ok_chain = [link.space.t for link in cert.chain] == [3, 4, 5, 6, 7]
    sweep3 = [s for s in cert.chain[0].sweeps if s.p == 3]
    ok_sweep = (len(sweep3) == 1 and sweep3[0].status == "no_witness"
                and sweep3[0].points_scanned <= 10**8)
    t0 = time.time()
    valid, claims = verify_certificate(cert, inp)
    verify_time = time.time() - t0
    ok = ok_chain and ok_sweep and valid and wall <= 1800
    if cert.final_point is not None:
        ok = ok and all(qf(cert.final_point.coords) == 0
                        for qf in inp.system.forms)
    report(7, f"end-to-end descent on the n=19 fixture (pipeline {wall:.0f}s, "
              f"verify {verify_time:.1f}s, {len(claims)} claims)", ok)


def _mutate(data, path, fn):
    node = data
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = fn(node[path[-1]])


def test_criterion_8_tamper_detection(f19_run):
    inp, cert, _ = f19_run
    base = jsonio.certificate_json(cert)
    bump = lambda s: str(int(F(s).numerator) + 1)

    mutations = [
        (("n",), lambda v: v + 1, ("schema.n",)),
        (("generators", "m3", 0), bump, ("generators.det",
                                         "generators.d1_m3")),
        (("generators", "witnesses", "d1_m3"), bump, ("generators.d1_m3",)),
        (("generators", "witnesses", "d2_m12"), bump, ("generators.d2_m12",)),
        (("generators", "witnesses", "d2_m13"), bump, ("generators.d2_m13",)),
        (("generators", "witnesses", "det_m"), bump, ("generators.det",)),
        (("c",), bump, ("adjusted_q3.derivation",)),
        (("c_signature", 0), lambda v: v + 1, ("adjusted_q3.signature",)),
        (("adjusted_q3", "gram", 0, 0), bump, ("adjusted_q3.derivation",)),
        (("split", "pairs", 0, 0, 0), bump, ("split.exact",)),
        (("split", "residual_gram", 0, 0), bump, ("split.exact",)),
        (("chain", 0, "space", "basis", 0, 0), bump,
         ("chain[3].contained", "chain[3].pair_disc", "chain[4].inclusion")),
        (("chain", 1, "space", "basis", 4, 0), bump,
         ("chain[4].contained", "chain[4].inclusion", "chain[4].pair_disc")),
        (("chain", 0, "pair_disc"), bump, ("chain[3].pair_disc",)),
        (("chain", 2, "pair_disc"), bump, ("chain[5].pair_disc",)),
        (("chain", 4, "space", "basis", 7, 2), bump,
         ("chain[7].contained", "chain[7].inclusion", "chain[7].pair_disc")),
    ]
    # witness mutations depend on which entry is finite/real
    for idx, entry in enumerate(base["local_witnesses"]):
        if "finite" in entry:
            p = entry["place"]["p"]
            mutations.append(
                (("local_witnesses", idx, "finite", "plane_coords", 0), bump,
                 (f"local_witness[{p}].on_pair", f"local_witness[{p}].in_plane",
                  f"local_witness[{p}].distance")))
            mutations.append(
                (("local_witnesses", idx, "finite", "ambient", 0), bump,
                 (f"local_witness[{p}].in_plane",)))
        else:
            mutations.append(
                (("local_witnesses", idx, "real", "plane_coords", 1),
                 lambda s: jsonio.rat_str(jsonio.parse_rat(s) + F(1, 7)),
                 ("local_witness[real].contraction",
                  "local_witness[real].in_plane",
                  "local_witness[real].distance")))
            mutations.append(
                (("local_witnesses", idx, "real", "distance_bound"),
                 lambda s: jsonio.rat_str(jsonio.parse_rat(s) * 2),
                 ("local_witness[real].distance",)))

    # removal of a witness for a declared place
    def drop_witness(data):
        data["local_witnesses"] = data["local_witnesses"][1:]

    start = time.time()
    rejected = 0
    import copy

    for path, fn, expected in mutations[:19]:
        tampered = copy.deepcopy(base)
        _mutate(tampered, path, fn)
        cert2 = jsonio.parse_certificate(tampered)
        valid, claims = verify_certificate(cert2, inp)
        assert not valid, path
        failing = next(c for c, ok, _ in claims if not ok)
        assert failing in expected, (path, failing, expected)
        rejected += 1

    tampered = copy.deepcopy(base)
    drop_witness(tampered)
    cert2 = jsonio.parse_certificate(tampered)
    valid, claims = verify_certificate(cert2, inp)
    assert not valid
    failing = next(c for c, ok, _ in claims if not ok)
    assert "missing" in failing
    rejected += 1

    elapsed = time.time() - start
    report(8, f"{rejected} tampered certificates rejected with the right "
              f"claim ({elapsed:.1f}s)", rejected == 20 and elapsed < 10)


def test_criterion_9_determinism():
    from triquadric.fixtures import descent_input_f17

    start = time.time()
    inp = descent_input_f17(budgets=Budgets(sweep=10**7))
    blobs = []
    for workers in (1, 4):
        cert = descend(inp, workers=workers)
        blobs.append(jsonio.dumps(jsonio.certificate_json(cert)))
    ok = blobs[0] == blobs[1]
    elapsed = time.time() - start
    report(9, f"byte-identical certificates across workers 1 and 4 "
              f"({elapsed:.0f}s)", ok)
