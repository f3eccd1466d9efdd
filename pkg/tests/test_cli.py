import csv
import json
from fractions import Fraction as F

import pytest

from triquadric import jsonio
from triquadric.cli import main
from triquadric.exact import QuadForm, QuadSystem


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(jsonio.dumps(payload))
    return str(path)


def split4_json():
    g = [[0, F(1, 2), 0, 0], [F(1, 2), 0, 0, 0],
         [0, 0, 0, F(1, 2)], [0, 0, F(1, 2), 0]]
    return jsonio.quadform_json(QuadForm.from_rows(g))


def test_fano_dim_cli(capsys):
    assert main(["fano-dim", "4", "1", "4"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["fano-dim", "4", "2", "4"]) == 1
    assert capsys.readouterr().out.strip() == "empty"


def test_count_fano_cli(tmp_path, capsys):
    form = write(tmp_path, "split4.json", split4_json())
    assert main(["count-fano", form, "3", "1"]) == 0
    assert capsys.readouterr().out.strip() == "8"


def test_fano_report_cli(tmp_path, capsys):
    form = write(tmp_path, "split4.json", split4_json())
    outdir = tmp_path / "reports"
    code = main(["--output", str(tmp_path / "report.json"),
                 "fano-report", form, "1", "--primes", "3", "5", "7",
                 "--outdir", str(outdir)])
    assert code == 0
    payload = json.loads((tmp_path / "report.json").read_text())
    assert payload["fitted_degree"] == 1
    assert payload["family_dimension"] == 1
    counts = {row["p"]: row["count"] for row in payload["counts"]}
    assert counts == {3: 8, 5: 12, 7: 16}
    with open(outdir / "counts_t1.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [int(r["count"]) for r in rows] == [8, 12, 16]
    png = (outdir / "count_fit_t1.png").read_bytes()
    assert png[:8] == b"\x89PNG\r\n\x1a\n"


def test_split_cli(tmp_path, capsys):
    form = write(tmp_path, "f.json", split4_json())
    assert main(["split", form]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["witt_index"] == 2


def test_local_solve_cli(tmp_path, capsys):
    form = write(tmp_path, "f.json",
                 jsonio.quadform_json(QuadForm.diagonal([1, 2, -1, 3, 5])))
    assert main(["local-solve", form, "--place", "7"]) == 0
    definite = write(tmp_path, "g.json",
                     jsonio.quadform_json(QuadForm.diagonal([1, 1, 1, 1])))
    assert main(["local-solve", definite, "--place", "real"]) == 1


def test_lift_cli(tmp_path, capsys):
    form = write(tmp_path, "f.json",
                 jsonio.quadform_json(QuadForm.diagonal([1, 1, -3])))
    point = write(tmp_path, "p.json",
                  {"p": 11, "precision": 1, "coords": ["5", "0", "1"]})
    assert main(["lift", form, point, "--prec", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["coords"] == ["27", "0", "1"]


def test_weak_approx_cli(tmp_path, capsys):
    form = write(tmp_path, "f.json",
                 jsonio.quadform_json(QuadForm.diagonal([1, 1, -1])))
    targets = write(tmp_path, "t.json", {
        "base": ["1", "0", "1"],
        "targets": [
            {"place": {"kind": "real"}, "point": ["3/5", "4/5", "1"],
             "tolerance": "1/10"},
            {"place": {"kind": "finite", "p": 7},
             "point": {"p": 7, "precision": 1, "coords": ["1", "0", "1"]},
             "precision": 1},
        ],
    })
    assert main(["--seed", "1", "weak-approx", form, targets]) == 0
    payload = json.loads(capsys.readouterr().out)
    x = tuple(F(c) for c in payload["point"])
    assert x[0] ** 2 + x[1] ** 2 == x[2] ** 2


def test_check_system_cli(tmp_path, capsys):
    system = QuadSystem((QuadForm.diagonal([1, -1, 2, -3, 5]),
                         QuadForm.diagonal([2, 1, -1, 1, -2]),
                         QuadForm.diagonal([1, 1, 1, -1, -1])))
    path = write(tmp_path, "s.json", jsonio.system_json(system))
    assert main(["check-system", path, "--primes", "5", "11"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["pair_verdicts"]["q1_q2"] is True
    assert payload["pair_verdicts"]["q2_q3"] is False  # genuinely singular pair
    assert payload["d1_nonzero"] is True
    assert payload["generator_triple"]["m1"] == ["1", "0", "0"]
    assert all(s["status"] == "no_witness" for s in payload["ff_sweeps"])

    # reduction mod 3 is singular: the evidence sweep reports it (exit 1)
    assert main(["check-system", path, "--primes", "3"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["ff_sweeps"][0]["status"] == "singular_witness"


def test_chain_cli_budget_starved(tmp_path, capsys):
    """With a starved sweep budget no plane can be certified admissible, so
    the chain verdict is negative (exit 1) without long searches."""
    from triquadric.fixtures import make_f19

    fx = make_f19()
    sys_path = write(tmp_path, "s.json", jsonio.system_json(fx.system))
    plane = [[1 if j == i else 0 for j in range(19)] for i in range(4)]
    plane_path = write(tmp_path, "p.json",
                       {"n": 19, "t": 3,
                        "basis": [[str(c) for c in row] for row in plane]})
    code = main(["chain", sys_path, plane_path, "--budget", "10",
                 "--tries", "1"])
    assert code == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["verdict"] is False


def test_verify_cli_malformed(tmp_path, capsys):
    bad = tmp_path / "cert.json"
    bad.write_text("{}")
    inp = tmp_path / "inp.json"
    inp.write_text("{}")
    assert main(["verify", str(bad), str(inp)]) == 2


def test_missing_file_is_input_error(capsys):
    assert main(["split", "/nonexistent/file.json"]) == 2
