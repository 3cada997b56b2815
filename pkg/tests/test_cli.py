import json

import numpy as np
import pytest

from specflow.cli import main


def run_lines(argv, capsys):
    rc = main(argv)
    out = capsys.readouterr().out.strip().splitlines()
    return rc, [json.loads(line) for line in out]


def test_sf_loop_model(capsys):
    rc, recs = run_lines(["sf-loop", "--model", "k=2,dim=4"], capsys)
    assert rc == 0
    rec = recs[-1]
    assert rec["record_version"] == 1
    assert rec["command"] == "sf-loop"
    assert rec["result"]["value"] == 2
    assert rec["result"]["residual"] < 1e-6
    assert rec["result"]["method"] == "phillips"


def test_sf_loop_integral_methods(capsys):
    for method, extra in (("alpha", ["--n", "2"]), ("beta", ["--r", "0.5"]),
                          ("det", ["--p", "2"])):
        rc, recs = run_lines(["sf-loop", "--model", "k=1,dim=3",
                              "--method", method] + extra, capsys)
        assert rc == 0
        assert recs[-1]["result"]["value"] == 1


def test_sf_loop_error_record(capsys):
    rc, recs = run_lines(["sf-loop", "--model", "k=2"], capsys)
    assert rc == 2
    err = recs[-1]["result"]["error"]
    assert err["type"] == "SpecflowError"
    assert "model spec" in err["message"]


def test_sf_loop_invalid_order(capsys):
    rc, recs = run_lines(["sf-loop", "--model", "k=1,dim=2",
                          "--method", "beta", "--r", "-1"], capsys)
    assert rc == 2
    assert recs[-1]["result"]["error"]["type"] == "InvalidOrder"


def test_sf_path_geodesic(tmp_path, capsys):
    npz = tmp_path / "ends.npz"
    np.savez(npz, U0=np.eye(2, dtype=complex),
             U1=np.diag([1j, 1.0]).astype(complex))
    rc, recs = run_lines(["sf-path", "--path", f"geodesic:{npz}"], capsys)
    assert rc == 0
    res = recs[-1]["result"]
    assert res["value"] == 0
    assert "body_integral" in res
    assert "endpoint_correction" in res


def test_sf_path_scattering_sweep(tmp_path, capsys):
    pot = tmp_path / "well20.json"
    pot.write_text(json.dumps({"dimension": 1,
                               "segments": [[-1.0, 1.0, -20.0]]}))
    rc, recs = run_lines(["sf-path", "--path", f"scattering:{pot}"], capsys)
    assert rc == 0
    res = recs[-1]["result"]
    assert res["value"] == -2
    assert res["residual"] < 1e-6
    assert abs(res["body_integral"]["re"] - (-2.5)) < 0.05


def test_det_winding(capsys):
    rc, recs = run_lines(["det", "--model", "k=1,dim=2", "--p", "1",
                          "--samples", "21"], capsys)
    assert rc == 0
    res = recs[-1]["result"]
    assert abs(res["winding"] - 1.0) < 1e-10
    assert len(res["samples"]) == 21
    row = res["samples"][0]
    assert set(row) >= {"t", "det_p", "log_det_p", "logderiv"}


def test_cayley_record(capsys):
    rc, recs = run_lines(["cayley", "--model", "k=1,dim=2", "--t", "0.3"],
                         capsys)
    assert rc == 0
    res = recs[-1]["result"]
    assert res["subspace_dim"] == 1
    assert abs(res["eigenvalues"][0] - 1.0 / np.tan(0.3 * np.pi)) < 1e-10
    assert res["roundtrip_defect"] < 1e-10
    assert res["graph_idempotency_defect"] < 1e-10
    assert res["resolvent_bound_at_2i"] == 3.0
    assert abs(res["fp_distance_from_start"] - np.sin(0.3 * np.pi)) < 1e-10


def test_levinson_1d(capsys):
    rc, recs = run_lines(["levinson", "--dim", "1", "--well",
                          "depth=20,halfwidth=1"], capsys)
    assert rc == 0
    res = recs[-1]["result"]
    assert res["N"] == 3
    assert res["sf"] == -3
    assert res["verdict"] == "pass"
    assert res["classification"] == "none"


def test_levinson_potential_file(tmp_path, capsys):
    pot = tmp_path / "well.json"
    pot.write_text(json.dumps({"dimension": 1,
                               "segments": [[-1.0, 1.0, -5.0]]}))
    rc, recs = run_lines(["levinson", "--dim", "1", "--potential", str(pot)],
                         capsys)
    assert rc == 0
    assert recs[-1]["result"]["N"] == 2
    assert recs[-1]["result"]["verdict"] == "pass"


def test_levinson_requires_potential(capsys):
    rc, recs = run_lines(["levinson", "--dim", "1"], capsys)
    assert rc == 2
    assert "--well or --potential" in recs[-1]["result"]["error"]["message"]


def test_config_overrides_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"method": "alpha", "n": 1}))
    rc, recs = run_lines(["sf-loop", "--model", "k=1,dim=2",
                          "--method", "phillips", "--config", str(cfg)],
                         capsys)
    assert rc == 0
    assert recs[-1]["result"]["method"] == "alpha"
    assert recs[-1]["result"]["value"] == 1


def test_out_file_appends_and_reproduces(tmp_path, capsys):
    out1 = tmp_path / "a.jsonl"
    out2 = tmp_path / "b.jsonl"
    argv = ["sf-loop", "--model", "k=1,dim=2", "--method", "alpha"]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    lines = out1.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == lines[1]
    # a fresh run reproduces the result payload exactly
    rec = json.loads(lines[0])
    other = json.loads(out2.read_text().splitlines()[0])
    assert rec["result"] == other["result"]
    # config echo keeps the flags (and the out path, which differs per file)
    assert rec["config"]["model"] == "k=1,dim=2"


def test_selftest_passes(capsys):
    rc, recs = run_lines(["selftest"], capsys)
    assert rc == 0
    res = recs[-1]["result"]
    assert res["ok"] is True
    assert len(res["checks"]) >= 8
    assert all(c["ok"] for c in res["checks"])
