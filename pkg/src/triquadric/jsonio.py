"""JSON encoding of every public type, with exact string rationals.

All numeric payloads are strings of the form "p" or "p/q" so certificates
are diffable and re-verifiable without any precision loss.  Dumps are
canonical (sorted keys, fixed separators), so equal objects serialize to
identical bytes.
"""

from __future__ import annotations

import json
import sys
from fractions import Fraction

from .descent import (
    Budgets,
    ChainLink,
    DescentCertificate,
    DescentInput,
    FinalPoint,
    FiniteWitness,
    LocalWitnessRecord,
    RealWitness,
    TRecord,
)
from .errors import SchemaError
from .exact import (
    LinearSpace,
    PadicApprox,
    QuadForm,
    QuadSystem,
    Signature,
    Vec,
)
from .ffenum import SweepOutcome
from .localsolve import LocalTarget, Place
from .pencil import GeneratorTriple, GeneratorWitnesses
from .planes import HyperbolicSplit

# Certificates legitimately carry very large exact integers.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(2_000_000)


def rat_str(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise SchemaError(f"expected a string rational, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {s!r}") from exc


def vec_json(v) -> list[str]:
    return [rat_str(c) for c in v]


def parse_vec(data) -> Vec:
    if not isinstance(data, list):
        raise SchemaError("expected a list of rationals")
    return tuple(parse_rat(c) for c in data)


def mat_json(m) -> list[list[str]]:
    return [vec_json(r) for r in m]


def parse_mat(data):
    if not isinstance(data, list):
        raise SchemaError("expected a matrix")
    return tuple(parse_vec(r) for r in data)


# --- core types -------------------------------------------------------------


def quadform_json(q: QuadForm) -> dict:
    return {"n": q.n, "gram": mat_json(q.gram)}


def parse_quadform(data) -> QuadForm:
    try:
        return QuadForm(int(data["n"]), parse_mat(data["gram"]))
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad quadratic form: {exc}") from exc


def system_json(s: QuadSystem) -> dict:
    return {"forms": [quadform_json(f) for f in s.forms]}


def parse_system(data) -> QuadSystem:
    try:
        forms = tuple(parse_quadform(f) for f in data["forms"])
        return QuadSystem(forms)
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad system: {exc}") from exc


def space_json(sp: LinearSpace) -> dict:
    return {"n": sp.n, "t": sp.t, "basis": mat_json(sp.basis)}


def parse_space(data) -> LinearSpace:
    try:
        return LinearSpace(int(data["n"]), int(data["t"]), parse_mat(data["basis"]))
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad linear space: {exc}") from exc


def padic_json(pa: PadicApprox) -> dict:
    return {
        "p": pa.p,
        "precision": pa.precision,
        "coords": [str(c) for c in pa.coords],
    }


def parse_padic(data) -> PadicApprox:
    try:
        return PadicApprox(
            int(data["p"]), int(data["precision"]),
            tuple(int(c) for c in data["coords"]),
        )
    except Exception as exc:
        raise SchemaError(f"bad p-adic point: {exc}") from exc


def place_json(pl: Place) -> dict:
    out = {"kind": pl.kind}
    if pl.kind == "finite":
        out["p"] = pl.p
    return out


def parse_place(data) -> Place:
    try:
        if data["kind"] == "real":
            return Place("real")
        return Place("finite", int(data["p"]))
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad place: {exc}") from exc


def target_json(t: LocalTarget) -> dict:
    if t.place.kind == "real":
        return {
            "place": place_json(t.place),
            "point": vec_json(t.point),
            "tolerance": rat_str(t.tolerance),
        }
    return {
        "place": place_json(t.place),
        "point": padic_json(t.point),
        "precision": int(t.tolerance),
    }


def parse_target(data) -> LocalTarget:
    place = parse_place(data["place"])
    try:
        if place.kind == "real":
            return LocalTarget(place, parse_vec(data["point"]),
                               parse_rat(data["tolerance"]))
        return LocalTarget(place, parse_padic(data["point"]),
                           int(data["precision"]))
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad local target: {exc}") from exc


def budgets_json(b: Budgets) -> dict:
    return {
        "height": b.height,
        "tries": b.tries,
        "sweep": b.sweep,
        "sample": b.sample,
        "iso_height": b.iso_height,
    }


def parse_budgets(data) -> Budgets:
    try:
        return Budgets(
            height=int(data["height"]),
            tries=int(data["tries"]),
            sweep=int(data["sweep"]),
            sample=int(data["sample"]),
            iso_height=int(data["iso_height"]),
        )
    except Exception as exc:
        raise SchemaError(f"bad budgets: {exc}") from exc


def descent_input_json(inp: DescentInput) -> dict:
    return {
        "system": system_json(inp.system),
        "targets": [target_json(t) for t in inp.targets],
        "epsilon": rat_str(inp.epsilon),
        "seed": inp.seed,
        "budgets": budgets_json(inp.budgets),
        "forced_t": list(inp.forced_t),
    }


def parse_descent_input(data) -> DescentInput:
    try:
        return DescentInput(
            system=parse_system(data["system"]),
            targets=tuple(parse_target(t) for t in data["targets"]),
            epsilon=parse_rat(data["epsilon"]),
            seed=int(data["seed"]),
            budgets=parse_budgets(data["budgets"]) if "budgets" in data else Budgets(),
            forced_t=tuple(int(p) for p in data.get("forced_t", [])),
        )
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad descent input: {exc}") from exc


# --- certificate pieces -----------------------------------------------------


def sweep_json(s: SweepOutcome) -> dict:
    return {
        "status": s.status,
        "p": s.p,
        "witness": list(s.witness.coords) if s.witness else None,
        "points_scanned": s.points_scanned,
        "budget": s.budget,
        "vertex_points_skipped": s.vertex_points_skipped,
    }


def parse_sweep(data) -> SweepOutcome:
    from .exact import FFPoint

    try:
        witness = None
        if data.get("witness") is not None:
            witness = FFPoint(int(data["p"]), tuple(int(c) for c in data["witness"]))
        return SweepOutcome(
            data["status"], int(data["p"]), witness,
            int(data["points_scanned"]), int(data["budget"]),
            int(data.get("vertex_points_skipped", 0)),
        )
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"bad sweep record: {exc}") from exc


def certificate_json(cert: DescentCertificate) -> dict:
    def fw_json(fw: FiniteWitness) -> dict:
        return {
            "p": fw.p,
            "claim_precision": fw.claim_precision,
            "precision": fw.precision,
            "plane_coords": [str(c) for c in fw.plane_coords],
            "ambient": [str(c) for c in fw.ambient],
        }

    witnesses = []
    for rec in cert.local_witnesses:
        entry = {"place": place_json(rec.place)}
        if rec.finite_witness is not None:
            entry["finite"] = fw_json(rec.finite_witness)
        if rec.real_witness is not None:
            rw = rec.real_witness
            entry["real"] = {
                "plane_coords": vec_json(rw.plane_coords),
                "ambient": vec_json(rw.ambient),
                "moving_cols": list(rw.moving_cols),
                "zero_radius": rat_str(rw.zero_radius),
                "contraction": rat_str(rw.contraction),
                "distance_bound": rat_str(rw.distance_bound),
            }
        witnesses.append(entry)

    return {
        "format": "descent-certificate/1",
        "n": cert.n,
        "sub_hypothesis": cert.sub_hypothesis,
        "seed": cert.seed,
        "generators": {
            "m1": vec_json(cert.generators.m1),
            "m2": vec_json(cert.generators.m2),
            "m3": vec_json(cert.generators.m3),
            "witnesses": {
                "d1_m3": rat_str(cert.generator_witnesses.d1_m3),
                "d2_m12": rat_str(cert.generator_witnesses.d2_m12),
                "d2_m13": rat_str(cert.generator_witnesses.d2_m13),
                "det_m": rat_str(cert.generator_witnesses.det_m),
            },
        },
        "c": rat_str(cert.c),
        "c_signature": [cert.c_signature.n_plus, cert.c_signature.n_minus,
                        cert.c_signature.n_zero],
        "adjusted_q3": quadform_json(cert.adjusted_q3),
        "split": {
            "pairs": [[vec_json(v), vec_json(w)] for v, w in cert.split.pairs],
            "residual_basis": mat_json(cert.split.residual_basis),
            "residual_gram": mat_json(cert.split.residual_form.gram),
        },
        "evidence_sweeps": [sweep_json(s) for s in cert.evidence_sweeps],
        "evidence_skipped": list(cert.evidence_skipped),
        "chain": [
            {
                "space": space_json(link.space),
                "pair_disc": rat_str(link.pair_disc),
                "sweeps": [sweep_json(s) for s in link.sweeps],
                "skipped_primes": list(link.skipped_primes),
            }
            for link in cert.chain
        ],
        "local_witnesses": witnesses,
        "t_records": [
            {
                "p": tr.p,
                "perp_point": padic_json(tr.perp_point),
                "witness": fw_json(tr.witness),
            }
            for tr in cert.t_records
        ],
        "final_point": (
            None
            if cert.final_point is None
            else {
                "coords": vec_json(cert.final_point.coords),
                "plane_coords": vec_json(cert.final_point.plane_coords),
                "height": str(cert.final_point.height),
            }
        ),
        "budgets": budgets_json(cert.budgets),
    }


def parse_certificate(data) -> DescentCertificate:
    try:
        gw = data["generators"]["witnesses"]
        generators = GeneratorTriple(
            parse_vec(data["generators"]["m1"]),
            parse_vec(data["generators"]["m2"]),
            parse_vec(data["generators"]["m3"]),
        )
        witnesses = GeneratorWitnesses(
            parse_rat(gw["d1_m3"]), parse_rat(gw["d2_m12"]),
            parse_rat(gw["d2_m13"]), parse_rat(gw["det_m"]),
        )
        sig = data["c_signature"]
        split_data = data["split"]
        residual_gram = parse_mat(split_data["residual_gram"])
        split = HyperbolicSplit(
            tuple(
                (parse_vec(v), parse_vec(w)) for v, w in split_data["pairs"]
            ),
            parse_mat(split_data["residual_basis"]),
            QuadForm(len(residual_gram), residual_gram),
        )
        chain = []
        for link in data["chain"]:
            chain.append(
                ChainLink(
                    parse_space(link["space"]),
                    parse_rat(link["pair_disc"]),
                    tuple(parse_sweep(s) for s in link["sweeps"]),
                    tuple(int(p) for p in link["skipped_primes"]),
                )
            )

        def parse_fw(d) -> FiniteWitness:
            return FiniteWitness(
                int(d["p"]), int(d["claim_precision"]), int(d["precision"]),
                tuple(int(c) for c in d["plane_coords"]),
                tuple(int(c) for c in d["ambient"]),
            )

        lws = []
        for entry in data["local_witnesses"]:
            place = parse_place(entry["place"])
            fw = parse_fw(entry["finite"]) if "finite" in entry else None
            rw = None
            if "real" in entry:
                r = entry["real"]
                rw = RealWitness(
                    parse_vec(r["plane_coords"]),
                    parse_vec(r["ambient"]),
                    tuple(int(c) for c in r["moving_cols"]),
                    parse_rat(r["zero_radius"]),
                    parse_rat(r["contraction"]),
                    parse_rat(r["distance_bound"]),
                )
            lws.append(LocalWitnessRecord(place, fw, rw))
        t_records = tuple(
            TRecord(int(tr["p"]), parse_padic(tr["perp_point"]),
                    parse_fw(tr["witness"]))
            for tr in data["t_records"]
        )
        final = None
        if data.get("final_point") is not None:
            f = data["final_point"]
            final = FinalPoint(
                parse_vec(f["coords"]), parse_vec(f["plane_coords"]),
                int(f["height"]),
            )
        return DescentCertificate(
            n=int(data["n"]),
            sub_hypothesis=bool(data["sub_hypothesis"]),
            seed=int(data["seed"]),
            generators=generators,
            generator_witnesses=witnesses,
            c=parse_rat(data["c"]),
            c_signature=Signature(int(sig[0]), int(sig[1]), int(sig[2])),
            adjusted_q3=parse_quadform(data["adjusted_q3"]),
            split=split,
            evidence_sweeps=tuple(parse_sweep(s) for s in data["evidence_sweeps"]),
            evidence_skipped=tuple(int(p) for p in data["evidence_skipped"]),
            chain=tuple(chain),
            local_witnesses=tuple(lws),
            t_records=t_records,
            final_point=final,
            budgets=parse_budgets(data["budgets"]),
        )
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"malformed certificate: {exc}") from exc


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def loads(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc


def write_json(path, obj: dict) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(obj))


def read_json(path) -> dict:
    with open(path) as fh:
        return loads(fh.read())
