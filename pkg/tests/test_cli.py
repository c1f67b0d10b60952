import json

from spinchain_entropy.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_entropy_exact_json(capsys):
    code, out = run(capsys, "entropy", "--preset", "xy", "--alpha", "0.8",
                    "--gamma", "0.5", "--method", "exact", "--L", "64")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["value"] - 0.21515987423) < 1e-9


def test_entropy_theta_and_series_agree(capsys):
    code, out = run(capsys, "entropy", "--preset", "xy", "--alpha", "0.8",
                    "--gamma", "0.5", "--method", "theta,series")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload[0]["value"] - payload[1]["value"]) < 1e-8


def test_entropy_scan_csv(tmp_path, capsys):
    out_file = tmp_path / "scan.csv"
    code, _ = run(capsys, "entropy-scan", "--preset", "xy", "--alpha", "0.8",
                  "--gamma", "0.5", "--L", "8:24:8", "--method", "exact,theta",
                  "--output", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "L,S_exact,S_theta,abs_diff"
    assert len(lines) == 4
    row = lines[2].split(",")
    assert int(row[0]) == 16
    assert abs(float(row[1]) - 0.215159405) < 1e-8


def test_scan_determinism(tmp_path, capsys):
    paths = []
    for name in ("a.csv", "b.csv"):
        p = tmp_path / name
        code, _ = run(capsys, "entropy-scan", "--preset", "xy", "--alpha",
                      "0.8", "--gamma", "0.5", "--L", "4:12:4",
                      "--method", "exact", "--output", str(p))
        assert code == 0
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]


def test_determinant_scan(tmp_path, capsys):
    out_file = tmp_path / "det.csv"
    code, _ = run(capsys, "determinant-scan", "--preset", "xy", "--alpha",
                  "0.8", "--gamma", "0.5", "--L", "10:30:10",
                  "--lambda", "2.0", "--output", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    last = lines[-1].split(",")
    assert float(last[-1]) < 1e-10


def test_dump_curve_json(capsys):
    code, out = run(capsys, "dump-curve", "--preset", "xy", "--alpha", "0.8",
                    "--gamma", "0.5")
    assert code == 0
    payload = json.loads(out)
    pi = complex(*payload["Pi"][0][0])
    assert abs(pi - 1.2012100276j) < 1e-9
    assert payload["genus"] == 1
    assert len(payload["lambda_ordering"]) == 4


def test_critical_scan(tmp_path, capsys):
    out_file = tmp_path / "crit.csv"
    code, _ = run(capsys, "critical-scan", "--preset", "xy", "--gamma", "0.5",
                  "--alpha-path", "0.9:0.98:2", "--L", "64",
                  "--output", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0].startswith("alpha,crit_distance,S_exact")
    assert len(lines) == 3


def test_check_command(capsys):
    code, out = run(capsys, "check", "--preset", "xy", "--alpha", "0.8",
                    "--gamma", "0.5")
    assert code == 0
    assert "FAIL" not in out
    assert "OK (0 failures)" in out


def test_config_error_exit_code(capsys):
    code = main(["entropy", "--method", "exact"])
    assert code == 2


def test_critical_symbol_exit_code(capsys):
    # alpha = 1 places a root exactly on the unit circle
    code = main(["entropy", "--preset", "xy", "--alpha", "1.0", "--gamma",
                 "0.5", "--method", "theta"])
    assert code == 4


def test_verify_rh_report(capsys):
    code, out = run(capsys, "verify-rh", "--preset", "xy", "--alpha", "0.8",
                    "--gamma", "0.5", "--lambda", "2.0")
    assert code == 0
    payload = json.loads(out)
    assert payload["jump_residuals"]["max"] < 1e-5
    assert payload["normalization_at_infinity"]["u_minus_minus_identity"] < 1e-7


def test_model_json_file(tmp_path, capsys):
    model_file = tmp_path / "model.json"
    model_file.write_text(
        '{"a": [-2, 1, 0.25], "b": [1, 0.125], "gamma": 0.5}')
    code, out = run(capsys, "entropy", "--model", str(model_file),
                    "--method", "exact", "--L", "48")
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] > 0


def test_thread_pool_output_identical(tmp_path, capsys, monkeypatch):
    outputs = []
    for workers in ("1", "4"):
        monkeypatch.setenv("ENTROPY_NUM_THREADS", workers)
        p = tmp_path / f"scan{workers}.csv"
        code, _ = run(capsys, "entropy-scan", "--preset", "xy", "--alpha",
                      "0.8", "--gamma", "0.5", "--L", "4:20:4",
                      "--method", "exact", "--output", str(p))
        assert code == 0
        outputs.append(p.read_bytes())
    assert outputs[0] == outputs[1]


def test_determinant_lambda_grid(tmp_path, capsys):
    out_file = tmp_path / "grid.csv"
    code, _ = run(capsys, "determinant-scan", "--preset", "xy", "--alpha",
                  "0.8", "--gamma", "0.5", "--L", "24",
                  "--lambda-grid", "1.5:3.0:4", "--output", str(out_file))
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0].startswith("lambda,")
    assert len(lines) == 5
    assert all(float(row.split(",")[-1]) < 1e-8 for row in lines[1:])
