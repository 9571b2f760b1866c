from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from cone_index.cli import EXIT_COMPUTATION, EXIT_INPUT, EXIT_VERIFY, run
from cone_index.spectra import spectrum_to_json, sphere_spectrum

ROOT = Path(__file__).resolve().parent.parent
PROBLEMS = sorted((ROOT / "problems").glob("*.json"))


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_table(capsys):
    code, out, _ = _run(capsys, "spectrum", "--model", "sphere", "--n", "4", "--interval", "[0,4)")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "eigenvalue\tmultiplicity"
    assert lines[1:4] == ["3/2\t2", "5/2\t6", "7/2\t12"]
    assert lines[-1] == "# N[0,4) = 20"


def test_spectrum_from_file(tmp_path, capsys):
    f = tmp_path / "s.json"
    f.write_text(json.dumps(spectrum_to_json(sphere_spectrum(2))))
    code, out, _ = _run(capsys, "spectrum", "--spectrum", str(f), "--interval", "(-1,1)")
    assert code == 0 and "-1/2\t1" in out and "1/2\t1" in out


def test_eta_sphere2(capsys):
    code, out, _ = _run(capsys, "eta", "--spectrum", "sphere2", "--cut", "0")
    assert code == 0
    assert out.splitlines()[0] == "eta = 0 (exact)"


def test_eta_trace_printed(capsys):
    code, out, _ = _run(capsys, "eta", "--spectrum", "sphere4", "--cut", "1/2")
    assert code == 0 and "zeta_H" in out


def test_index_fictitious(capsys):
    code, out, _ = _run(capsys, "index", "--problem", str(ROOT / "problems/fictitious_n2_p3half.json"))
    assert code == 0
    data = json.loads(out)
    assert data["index"] == -1
    assert data["alpha2"] == "5/6" and data["variant_agrees"] is True
    assert set(data["terms"]) == {"ahat", "half_eta", "calderon_correction", "cut_used"}


def test_index_reports_disagreement(capsys):
    code, out, _ = _run(capsys, "index", "--problem", str(ROOT / "problems/synthetic_table.json"))
    data = json.loads(out)
    assert code == 0
    assert data["variant_agrees"] is False and data["alternate_index"] != data["index"]


@pytest.mark.parametrize("path", PROBLEMS, ids=lambda p: p.stem)
def test_verify_bundled_problems(path, capsys):
    code, out, _ = _run(capsys, "verify", "--problem", str(path))
    assert code == 0, out
    assert out.count("[PASS]") == 5 and "[FAIL]" not in out


def test_verify_failure_exit_code(monkeypatch, capsys):
    from cone_index import cli
    from cone_index.verify import CheckResult

    monkeypatch.setattr(cli, "run_verification", lambda prob, seed=0: [CheckResult("x", False, "broken")])
    code, out, _ = _run(capsys, "verify", "--problem", str(PROBLEMS[0]))
    assert code == EXIT_VERIFY and "[FAIL] x: broken" in out


def test_sweep_writes_csv_and_loci(tmp_path, capsys):
    out_path = tmp_path / "d.csv"
    code, out, _ = _run(
        capsys,
        "sweep",
        "--problem", str(ROOT / "problems/fictitious_n2_p3half.json"),
        "--p-range", "1.1:10",
        "--q-range", "1.1:10",
        "--resolution", "8",
        "--out", str(out_path),
        "--threads", "2",
    )
    assert code == 0 and "64 cells" in out
    rows = out_path.read_text().splitlines()
    assert rows[0] == "inv_p,inv_q,index,regime,variant_agrees" and len(rows) == 65
    loci = json.loads(out_path.with_suffix(".loci.json").read_text())
    assert {"type": "Q_CUT", "eigenvalue": "1/2", "coordinate": "1/2"} in loci


def test_sweep_threads_env_override(monkeypatch, capsys):
    args = ["sweep", "--problem", str(ROOT / "problems/l2_sphere_n4.json"), "--p-range", "1.1:10",
            "--q-range", "1.1:10", "--resolution", "6"]
    _, single, _ = _run(capsys, *args, "--threads", "1")
    monkeypatch.setenv("CONE_INDEX_THREADS", "3")
    _, multi, _ = _run(capsys, *args, "--threads", "1")
    assert single == multi
    monkeypatch.setenv("CONE_INDEX_THREADS", "many")
    code, _, _ = _run(capsys, *args)
    assert code == EXIT_INPUT


def test_determinism(capsys):
    argv = ["verify", "--problem", str(ROOT / "problems/second_regime_n2.json"), "--seed", "4"]
    first = _run(capsys, *argv)
    second = _run(capsys, *argv)
    assert first == second


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["index"],
        ["index", "--problem", "/nonexistent.json"],
        ["eta", "--spectrum", "sphere3", "--cut", "0"],
        ["eta", "--spectrum", "sphere2", "--cut", "0.5e0x"],
        ["spectrum", "--interval", "[0,1)"],
        ["spectrum", "--n", "4", "--interval", "0,1"],
        ["sweep", "--problem", "problems/l2_sphere_n4.json", "--p-range", "1.1", "--q-range", "1.1:2"],
        ["sweep", "--problem", "problems/l2_sphere_n4.json", "--p-range", "0.5:2", "--q-range", "1.1:2"],
    ],
)
def test_malformed_input_exit_1(argv, capsys, monkeypatch):
    monkeypatch.chdir(ROOT)
    code = None
    try:
        code = run(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_INPUT


def test_binary_float_in_problem_rejected(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"n": 2, "p": 1.5, "q": "3"}))
    code, _, err = _run(capsys, "index", "--problem", str(f))
    assert code == EXIT_INPUT and "error" in err


def test_computation_error_exit_2_with_json(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"n": 2, "p": "2", "q": "2", "ahat": "1/3"}))
    code, _, err = _run(capsys, "--json", "index", "--problem", str(f))
    assert code == EXIT_COMPUTATION
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload == {"error": "IntegralityError", "message": payload["message"], "exit": 2}


def test_calderon_bound_exit_2(tmp_path, capsys):
    f = tmp_path / "p.json"
    f.write_text(json.dumps({
        "n": 2, "p": "6", "q": "6/5", "spectrum": {
            "progressions": [
                {"sign": 1, "offset": "1/2", "multiplicity_coeffs": ["1"]},
                {"sign": -1, "offset": "1/2", "multiplicity_coeffs": ["1"]},
            ],
            "exceptional": [{"eigenvalue": "1/10", "multiplicity": 1}],
        },
        "ahat": "0",
        "calderon": {"variant": "table", "table": [{"lo": "-1/6", "hi": "1/6", "dim": 2}]},
    }))
    code, _, err = _run(capsys, "index", "--problem", str(f))
    assert code == EXIT_COMPUTATION and "exceeds" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cone_index", "eta", "--spectrum", "sphere2", "--cut", "3/2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "eta = -2 (exact)"
