import dataclasses
import json
import subprocess
import sys
from pathlib import Path

import pytest

from saddlenf import cli, jobs
from saddlenf.errors import StructureError
from saddlenf.scalar import RATIONAL
from saddlenf.series import PlanarMap, Series2

JOBS = Path(__file__).resolve().parents[1] / "jobs"


def _run(tmp_path, job, name="report.json"):
    out = tmp_path / name
    code = cli.main(["run", str(job), "--out", str(out)])
    return code, json.loads(out.read_text(encoding="utf-8"))


def _write_job(tmp_path, data, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return path


def test_linear_job(tmp_path):
    code, rep = _run(tmp_path, JOBS / "linear.json")
    assert code == 0 and rep["status"] == "ok"
    assert rep["outcome"]["structure"] == []
    assert rep["diagnostics"]["residual"] == 0


def test_fixture_job(tmp_path):
    code, rep = _run(tmp_path, JOBS / "resonant_fixture.json")
    assert code == 0
    assert rep["checks"]["survivors_in_final_cone"] and rep["checks"]["conjugacy_residual_zero"]
    assert rep["job"]["degree"] == 12


def test_precondition_job(tmp_path, capsys):
    code, rep = _run(tmp_path, JOBS / "not_resonant.json")
    assert code == 1 and rep["status"] == "error"
    assert rep["error"].startswith("PreconditionError")
    assert "PreconditionError" in capsys.readouterr().err


def test_theorem2_job(tmp_path):
    code, rep = _run(tmp_path, JOBS / "golden_complex.json")
    assert code == 0
    assert rep["frame"]["u"] == [2, 3] and rep["frame"]["ut"] == [3, 5]
    tags = {row[2] for row in rep["lattice"]}
    assert tags == {"IrrStage1", "IrrStage2", "IrrFinal"}
    assert ["2", "3", "IrrFinal"] in rep["lattice"]


def test_non_coprime_job(tmp_path, capsys):
    data = json.loads((JOBS / "linear.json").read_text())
    data["theorem1"] = {"p": 4, "q": 2, "N": 0}
    code, rep = _run(tmp_path, _write_job(tmp_path, data))
    assert code == 1 and rep["error"].startswith("NotCoprime")


def test_unknown_field_is_named(tmp_path, capsys):
    data = json.loads((JOBS / "linear.json").read_text())
    data["theorem1"]["M"] = 3
    code, rep = _run(tmp_path, _write_job(tmp_path, data))
    assert code == 1
    assert "/theorem1" in rep["error"] and "'M'" in rep["error"]


def test_malformed_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "mode": "theorem1",\n  "ring" "rational"\n}\n', encoding="utf-8")
    code, rep = _run(tmp_path, path)
    assert code == 1 and "line 3" in rep["error"]


def test_injected_violation_exits_two(tmp_path, monkeypatch, capsys):
    real = cli.run_pipeline

    def corrupted(job):
        out = real(job)
        g = out.g
        bump = Series2.monomial(RATIONAL, g.degree, (6, 4), RATIONAL.one)
        return dataclasses.replace(out, g=PlanarMap(g.mu1, g.mu2, g.n1 + bump, g.n2))

    monkeypatch.setattr(cli, "run_pipeline", corrupted)
    code, rep = _run(tmp_path, JOBS / "resonant_fixture.json")
    assert code == 2 and rep["status"] == "finding"
    assert {"component": 1, "exponent": [5, 4], "cone": "HatB"} in [f["witness"] for f in rep["findings"]]
    assert "witness" in capsys.readouterr().err


def test_structure_error_exits_two(tmp_path, monkeypatch):
    def failing(job):
        raise StructureError("normal form: exponents violate HatB", [(1, (5, 4), "outside HatB")])

    monkeypatch.setattr(cli, "run_pipeline", failing)
    code, rep = _run(tmp_path, JOBS / "linear.json")
    assert code == 2
    assert rep["findings"] == [{"component": 1, "exponent": [5, 4], "detail": "outside HatB"}]


def test_reports_are_byte_identical(tmp_path):
    _run(tmp_path, JOBS / "resonant_fixture.json", "a.json")
    _run(tmp_path, JOBS / "resonant_fixture.json", "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_report_round_trip(tmp_path):
    job = jobs.load_job((JOBS / "resonant_fixture.json").read_text())
    outcome = cli.run_pipeline(job)
    _, rep = _run(tmp_path, JOBS / "resonant_fixture.json")
    for name in ("g", "h", "h_inv"):
        back = jobs.map_from_json(rep["outcome"][name], job.ring, job.degree)
        assert back == getattr(outcome, name)
        assert jobs.map_to_json(back) == rep["outcome"][name]


def test_lattice_command(tmp_path):
    out = tmp_path / "lat.csv"
    assert cli.main(["lattice", "--p", "3", "--q", "2", "--N", "1", "--maxdeg", "5", "--csv", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "m1,m2,set"
    assert {"2,1,G0", "3,2,B2", "3,2,B0", "3,2,HatB"} <= set(rows)


def test_lattice_command_not_coprime(capsys):
    assert cli.main(["lattice", "--p", "2", "--q", "4"]) == 1
    assert "NotCoprime" in capsys.readouterr().err


def test_cf_command(capsys):
    assert cli.main(["cf", "--surd", "1,1,2,5", "--terms", "6"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,a_n,q_n,p_n"
    rows = [tuple(int(v) for v in line.split(",")) for line in lines[1:]]
    assert [r[1] for r in rows] == [1] * 6
    assert [(r[2], r[3]) for r in rows] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5), (13, 8)]


def test_cf_command_rejects_square(capsys):
    assert cli.main(["cf", "--surd", "0,1,1,4"]) == 1
    assert "NotIrrational" in capsys.readouterr().err


def test_verify_command(tmp_path, capsys):
    matrix = tmp_path / "m.json"
    matrix.write_text(json.dumps([{"p": 3, "q": 2, "N": 1}, {"p": 1, "q": 1, "N": 0}]))
    assert cli.main(["verify", "--matrix", str(matrix), "--jobs", "2"]) == 0
    assert capsys.readouterr().out.strip().endswith("all checks passed")


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "saddlenf", "cf", "--quotients", "2,3"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[-1] == "2,3,7,3"


@pytest.mark.parametrize("name", ["linear", "resonant_fixture", "not_resonant", "golden_complex"])
def test_example_jobs_validate(name):
    jobs.load_job((JOBS / f"{name}.json").read_text())
