"""Command-line entry point.

Exit codes: 0 success / positive verdict, 1 negative verdict or nothing
found, 2 input or schema error, 3 budget exhausted.  All randomness is
derived from --seed, so equal seed and configuration give byte-identical
output regardless of --workers.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import jsonio
from .descent import descend, verify_certificate
from .errors import BudgetExceeded, IncompatibleTarget, SchemaError
from .fano import (
    CountRecord,
    FanoQuery,
    count_planes_ff,
    fano_dim,
    fano_dim_through_point,
    fit_count_degree,
)
from .localsolve import (
    REAL,
    LocalTarget,
    finite,
    hensel_lift,
    quadric_locally_solvable,
    weak_approx_quadric,
)
from .pencil import pair_nonsingular, select_generators, triple_nonsingular_ff
from .planes import (
    chain_admissible_check,
    is_admissible,
    isotropic_vector,
    split_hyperbolic,
    verify_split,
)
from .polys import PolySystem

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _emit(args, payload: dict) -> None:
    text = jsonio.dumps(payload)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _workers(args) -> int:
    w = getattr(args, "workers", None)
    return w if w else (os.cpu_count() or 1)


def cmd_check_system(args) -> int:
    system = jsonio.parse_system(jsonio.read_json(args.system))
    q1, q2, q3 = system.forms
    pair_verdicts = {
        "q1_q2": pair_nonsingular(q1, q2).verdict,
        "q1_q3": pair_nonsingular(q1, q3).verdict,
        "q2_q3": pair_nonsingular(q2, q3).verdict,
    }
    from .exact import mat_det

    d1_nonzero = mat_det(q3.gram) != 0
    out: dict = {"pair_verdicts": pair_verdicts, "d1_nonzero": d1_nonzero}
    try:
        triple, witnesses = select_generators(system, args.seed, args.tries)
        out["generator_triple"] = {
            "m1": jsonio.vec_json(triple.m1),
            "m2": jsonio.vec_json(triple.m2),
            "m3": jsonio.vec_json(triple.m3),
            "witnesses": {
                "d1_m3": jsonio.rat_str(witnesses.d1_m3),
                "d2_m12": jsonio.rat_str(witnesses.d2_m12),
                "d2_m13": jsonio.rat_str(witnesses.d2_m13),
                "det_m": jsonio.rat_str(witnesses.det_m),
            },
        }
    except BudgetExceeded:
        out["generator_triple"] = None
    sweeps = []
    for p in args.primes:
        sweeps.append(jsonio.sweep_json(
            triple_nonsingular_ff(system, p, args.budget, workers=_workers(args))
        ))
    out["ff_sweeps"] = sweeps
    _emit(args, out)
    ok = (
        out["generator_triple"] is not None
        and all(s["status"] != "singular_witness" for s in sweeps)
    )
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_fano_dim(args) -> int:
    query = FanoQuery(args.n, args.t, args.r)
    value = fano_dim_through_point(query) if args.through_point else fano_dim(query)
    print(value)
    return EXIT_OK if value != "empty" else EXIT_NEGATIVE


def cmd_count_fano(args) -> int:
    form = jsonio.parse_quadform(jsonio.read_json(args.form))
    rec = count_planes_ff(form, args.p, args.t, budget=args.budget,
                          workers=_workers(args))
    print(rec.count)
    return EXIT_OK


def cmd_fano_report(args) -> int:
    from .report import render_count_fit, write_count_table

    form = jsonio.parse_quadform(jsonio.read_json(args.form))
    records = [
        count_planes_ff(form, p, args.t, budget=args.budget,
                        workers=_workers(args))
        for p in args.primes
    ]
    os.makedirs(args.outdir, exist_ok=True)
    csv_path = os.path.join(args.outdir, f"counts_t{args.t}.csv")
    fig_path = os.path.join(args.outdir, f"count_fit_t{args.t}.png")
    write_count_table(records, csv_path)
    fitted = None
    if len(records) >= 2 and all(r.count > 0 for r in records):
        fitted = fit_count_degree(records)
    from .exact import rank as form_rank

    reference = fano_dim(FanoQuery(form.n, args.t, form_rank(form)))
    render_count_fit(records, fitted, reference if reference != "empty" else None,
                     fig_path)
    _emit(args, {
        "counts": [{"p": r.p, "t": r.t, "count": r.count} for r in records],
        "fitted_degree": fitted,
        "family_dimension": reference,
        "csv": csv_path,
        "figure": fig_path,
    })
    return EXIT_OK


def cmd_split(args) -> int:
    form = jsonio.parse_quadform(jsonio.read_json(args.form))
    split = split_hyperbolic(form, args.height)
    assert verify_split(form, split)
    _emit(args, {
        "witt_index": split.witt_index,
        "pairs": [[jsonio.vec_json(v), jsonio.vec_json(w)]
                  for v, w in split.pairs],
        "residual_basis": jsonio.mat_json(split.residual_basis),
        "residual_gram": jsonio.mat_json(split.residual_form.gram),
    })
    return EXIT_OK


def cmd_local_solve(args) -> int:
    form = jsonio.parse_quadform(jsonio.read_json(args.form))
    place = REAL if args.place == "real" else finite(int(args.place))
    solvable = quadric_locally_solvable(form, place)
    _emit(args, {"place": args.place, "solvable": solvable})
    return EXIT_OK if solvable else EXIT_NEGATIVE


def cmd_lift(args) -> int:
    data = jsonio.read_json(args.system)
    if "forms" in data:
        system = jsonio.parse_system(data)
        polys = PolySystem.of_forms(*system.forms)
    else:
        polys = PolySystem.of_forms(jsonio.parse_quadform(data))
    point = jsonio.parse_padic(jsonio.read_json(args.point))
    lifted = hensel_lift(polys, point, args.prec)
    _emit(args, jsonio.padic_json(lifted))
    return EXIT_OK


def cmd_weak_approx(args) -> int:
    form = jsonio.parse_quadform(jsonio.read_json(args.form))
    spec = jsonio.read_json(args.targets)
    targets = [jsonio.parse_target(t) for t in spec["targets"]]
    if "base" in spec:
        base = jsonio.parse_vec(spec["base"])
    else:
        base = isotropic_vector(form, args.height)
        if base is None:
            print("no isotropic base point found", file=sys.stderr)
            return EXIT_BUDGET
    x = weak_approx_quadric(form, base, targets, args.height_bound,
                            seed=args.seed)
    _emit(args, {"point": jsonio.vec_json(x)})
    return EXIT_OK


def _admissibility_json(report) -> dict:
    return {
        "verdict": report.verdict,
        "reason": report.reason,
        "contained_in_q3": report.contained_in_q3,
        "pair_disc": jsonio.rat_str(report.pair_disc),
        "pencil_identically_zero": report.pencil_identically_zero,
        "sweeps": [jsonio.sweep_json(s) for s in report.perp_system_sweeps],
        "skipped_primes": list(report.skipped_primes),
    }


def cmd_find_plane(args) -> int:
    import random

    from .descent import _identity_space, _to_ambient
    from .exact import LinearSpace, mat_rank, solve_in_rowspan, vec
    from .planes import (
        isotropic_point_in_space,
        perp_space,
        quadric_point_sampler,
        restrict_form,
    )

    system = jsonio.parse_system(jsonio.read_json(args.system))
    q3 = system.forms[2]
    split = split_hyperbolic(q3, args.height)
    iso = split.isotropic_space_rows()
    n = q3.n
    rng = random.Random(args.seed)
    for _ in range(args.tries):
        rows: list = []
        ok = True
        for i in range(args.dim + 1):
            ambient = (_identity_space(n) if i == 0
                       else perp_space(q3, LinearSpace(n, len(rows) - 1,
                                                       tuple(rows))))
            base = isotropic_point_in_space(q3, ambient, iso, args.height)
            if base is None:
                ok = False
                break
            base_sub = solve_in_rowspan(ambient.basis, base)
            sampler = quadric_point_sampler(
                restrict_form(q3, ambient), vec(base_sub), rng
            )
            e_amb = _to_ambient(next(sampler), ambient)
            if rows and mat_rank(tuple(rows) + (e_amb,)) == len(rows):
                ok = False
                break
            rows.append(e_amb)
        if not ok:
            continue
        plane = LinearSpace(n, args.dim, tuple(rows))
        report = is_admissible(plane, system, tuple(args.primes), args.budget,
                               _workers(args))
        if report.verdict == "admissible":
            _emit(args, {
                "plane": jsonio.space_json(plane),
                "report": _admissibility_json(report),
            })
            return EXIT_OK
    print("no admissible plane found within budget", file=sys.stderr)
    return EXIT_BUDGET


def cmd_chain(args) -> int:
    system = jsonio.parse_system(jsonio.read_json(args.system))
    plane = jsonio.parse_space(jsonio.read_json(args.plane))
    split = split_hyperbolic(system.forms[2], args.height)
    verdict, chain = chain_admissible_check(
        plane, system, args.seed, args.height, args.tries,
        tuple(args.primes), args.budget, split.isotropic_space_rows(),
        _workers(args),
    )
    _emit(args, {
        "verdict": verdict,
        "chain": [jsonio.space_json(s) for s in chain],
        "reports": [
            _admissibility_json(
                is_admissible(s, system, tuple(args.primes), args.budget,
                              _workers(args))
            )
            for s in chain
        ],
    })
    return EXIT_OK if verdict else EXIT_NEGATIVE


def cmd_descend(args) -> int:
    inp = jsonio.parse_descent_input(jsonio.read_json(args.input))
    if args.seed is not None:
        from dataclasses import replace

        inp = replace(inp, seed=args.seed)
    if args.budget is not None:
        from dataclasses import replace

        inp = replace(inp, budgets=replace(inp.budgets, sweep=args.budget))
    cert = descend(inp, workers=_workers(args))
    _emit(args, jsonio.certificate_json(cert))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cert = jsonio.parse_certificate(jsonio.read_json(args.certificate))
        inp = jsonio.parse_descent_input(jsonio.read_json(args.input))
    except SchemaError as exc:
        print(f"malformed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    ok, report = verify_certificate(cert, inp, rerun_sweeps=args.rerun_sweeps,
                                    workers=_workers(args))
    _emit(args, {
        "valid": ok,
        "claims": [{"claim": c, "ok": o, "detail": d} for c, o, d in report],
    })
    return EXIT_OK if ok else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triquadric",
        description="exact certification toolkit for triples of quadratic forms",
    )
    parser.add_argument("--workers", type=int, default=None,
                        help="worker threads for finite-field sweeps")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", help="write JSON output to this path")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("check-system", cmd_check_system,
            help="pair verdicts, generators, and mod-p sweeps for a system")
    p.add_argument("system")
    p.add_argument("--primes", type=int, nargs="*", default=[3])
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--tries", type=int, default=1000)

    p = add("fano-dim", cmd_fano_dim,
            help="dimension of the family of t-planes in a rank-r quadric")
    p.add_argument("n", type=int)
    p.add_argument("t", type=int)
    p.add_argument("r", type=int)
    p.add_argument("--through-point", action="store_true")

    p = add("count-fano", cmd_count_fano,
            help="count t-planes in a quadric over F_p exhaustively")
    p.add_argument("form")
    p.add_argument("p", type=int)
    p.add_argument("t", type=int)
    p.add_argument("--budget", type=int, default=10**8)

    p = add("fano-report", cmd_fano_report,
            help="count table (CSV) and growth-fit figure over several primes")
    p.add_argument("form")
    p.add_argument("t", type=int)
    p.add_argument("--primes", type=int, nargs="+", required=True)
    p.add_argument("--outdir", default="reports")
    p.add_argument("--budget", type=int, default=10**8)

    p = add("split", cmd_split, help="hyperbolic splitting of a form over Q")
    p.add_argument("form")
    p.add_argument("--height", type=int, default=40)

    p = add("local-solve", cmd_local_solve,
            help="solvability of Q = 0 over R or Q_p")
    p.add_argument("form")
    p.add_argument("--place", required=True, help="'real' or a prime p")

    p = add("lift", cmd_lift, help="lift an approximate mod-p zero")
    p.add_argument("system")
    p.add_argument("point")
    p.add_argument("--prec", type=int, required=True)

    p = add("weak-approx", cmd_weak_approx,
            help="rational point on a quadric near the given local targets")
    p.add_argument("form")
    p.add_argument("targets")
    p.add_argument("--height", type=int, default=40,
                   help="isotropic base search height")
    p.add_argument("--height-bound", type=int, default=10**60)

    p = add("find-plane", cmd_find_plane,
            help="random admissible t-plane in the third quadric")
    p.add_argument("system")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--primes", type=int, nargs="*", default=[3, 5])
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--tries", type=int, default=64)
    p.add_argument("--height", type=int, default=40)

    p = add("chain", cmd_chain,
            help="extend an admissible plane to dimension 7")
    p.add_argument("system")
    p.add_argument("plane")
    p.add_argument("--primes", type=int, nargs="*", default=[3, 5])
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--tries", type=int, default=64)
    p.add_argument("--height", type=int, default=40)

    p = add("descend", cmd_descend,
            help="run the full pipeline and emit a certificate")
    p.add_argument("input")
    p.add_argument("--budget", type=int, default=None,
                   help="finite-field sweep budget override")

    p = add("verify", cmd_verify, help="re-verify a certificate exactly")
    p.add_argument("certificate")
    p.add_argument("input")
    p.add_argument("--rerun-sweeps", action="store_true")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (IncompatibleTarget, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
