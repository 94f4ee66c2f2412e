import csv
import io
import json
import math
import shutil
import subprocess

import pytest

from fractalzeta.cli import main, parse_complex, parse_descriptor

SIER_D = math.log(8) / math.log(3)


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_zeta_example_row(capsys):
    code, out, _ = run(["zeta", "--set", "cantor:2,1/3", "--s", "0.8+0i", "--delta", "0.25"], capsys)
    assert code == 0
    header, row = rows(out)
    assert header[:4] == ["s_re", "s_im", "value_re", "value_im"]
    assert float(row[2]) == pytest.approx(4.342051867901910, rel=1e-12)
    assert float(row[3]) == 0


def test_sierpinski_pole_row(capsys):
    code, out, _ = run(["poles", "--form", "sierpinski", "--window", "1.5,2.0,-1,1"], capsys)
    assert code == 0
    data = rows(out)[1:]
    assert len(data) == 1
    assert float(data[0][0]) == pytest.approx(SIER_D, abs=1e-6)
    assert abs(float(data[0][1])) <= 1e-6


def test_repeated_runs_are_byte_identical(capsys):
    argv = ["poles", "--form", "cantor:2,1/3", "--window", "0.5,0.8,-10,10"]
    first = run(argv, capsys)[1]
    second = run(argv, capsys)[1]
    assert first == second and first.count("\n") == 4


def test_output_file(tmp_path, capsys):
    path = tmp_path / "tube.csv"
    assert main(["tube", "--set", "cantor:2,1/3", "--t", "0.1", "--out", str(path)]) == 0
    data = rows(path.read_text())
    assert float(data[1][1]) == pytest.approx(16 / 15, rel=1e-14)


@pytest.mark.parametrize("argv,code", [
    (["zeta", "--set", "bogus:1", "--s", "1"], 2),
    (["qp", "build", "--D", "0.5", "--m", "2", "4"], 2),
    (["zeta", "--set", "cantor:2,1/3", "--s", "0.5", "--delta", "0.25"], 3),
    (["spectral", "zeta", "--model", "rectangle:1,1", "--s", "1.5"], 3),
    (["zeta", "--set", "sphere:2,1", "--kind", "relative", "--s", "2"], 4),
    (["form", "eval", "--form", "sphere:2,1", "--kind", "spectral", "--s", "2"], 4),
    (["zeta", "--set", "cantor:2,1/3"], 2),
])
def test_exit_codes(argv, code, capsys):
    got, out, err = run(argv, capsys)
    assert got == code
    if code == 2 and "--s" in argv:
        assert len(err.strip().splitlines()) == 1


def test_qp_dependency_certificate_in_diagnostic(capsys):
    _, _, err = run(["qp", "build", "--D", "0.5", "--m", "2", "4"], capsys)
    assert "2*e_1 - 1*e_2" in err


def test_job_matches_flags(capsys):
    job = {"command": "zeta", "input": "cantor:2,1/3", "params": {"s": "0.8", "delta": 0.25}}
    code, out_job, _ = run(["--job", json.dumps(job)], capsys)
    _, out_flags, _ = run(["zeta", "--set", "cantor:2,1/3", "--s", "0.8", "--delta", "0.25"], capsys)
    assert code == 0 and out_job == out_flags


def test_job_file_and_output(tmp_path, capsys):
    out = tmp_path / "poles.csv"
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "poles", "input": "sierpinski",
                               "params": {"window": "1.5,2.0,-1,1"}, "output": str(out)}))
    assert main(["--job", str(job)]) == 0
    assert len(rows(out.read_text())) == 2


@pytest.mark.parametrize("job", [
    {"command": "zeta", "input": "cantor:2,1/3", "params": {"s": "0.8"}, "extra": 1},
    {"command": "launch"},
    "not json",
])
def test_job_strict(job, capsys):
    text = job if isinstance(job, str) else json.dumps(job)
    assert run(["--job", text], capsys)[0] == 2


def test_json_descriptor_input(capsys):
    desc = json.dumps({"type": "cantor", "m": 2, "a": "1/3"})
    code, out, _ = run(["zeta", "--set", desc, "--s", "0.8", "--delta", "0.25"], capsys)
    assert code == 0
    assert float(rows(out)[1][2]) == pytest.approx(4.342051867901910, rel=1e-12)


def test_parsers():
    assert parse_complex("0.8+0i") == 0.8
    assert parse_complex("1-2j") == complex(1, -2)
    assert parse_descriptor("cantor:3,1/5").obj.m == 3


def test_console_script():
    exe = shutil.which("fractalzeta")
    if exe is None:
        pytest.skip("console script not installed")
    res = subprocess.run([exe, "poles", "--form", "sierpinski", "--window", "1.5,2.0,-1,1"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and res.stdout.count("\n") == 2
    res = subprocess.run([exe, "zeta", "--set", "cantor:2,1/3", "--s", "0.5", "--delta", "0.25"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 3 and res.stderr.startswith("divergence")
