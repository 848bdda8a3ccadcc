import json
import math

import pytest

from popuc.cli import main


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def mixed_config(tmp_path):
    return _write(
        tmp_path,
        "mixed.json",
        {
            "measure": {
                "ac": {"kind": "lebesgue", "scale": "1 - t"},
                "masses": [{"gamma": "t", "omega": "0"}],
            },
            "degree": 5,
            "grid": {"start": 0.1, "stop": 0.9, "steps": 9},
            "policy": {"kind": "fixed_b", "value": [-1.0, 0.0]},
            "theorem": "t23",
        },
    )


def test_moments_output(tmp_path, mixed_config):
    out = tmp_path / "m.json"
    code = main(
        ["moments", "--config", mixed_config, "--t", "0.5", "--order", "3", "--out", str(out)]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["c"]["0"] == pytest.approx([1.0, 0.0])
    for k in ("1", "2", "3", "-1"):
        assert payload["c"][k] == pytest.approx([0.5, 0.0])


def test_opuc_output(tmp_path, mixed_config):
    out = tmp_path / "o.json"
    code = main(["opuc", "--config", mixed_config, "--t", "0.5", "--degree", "3", "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["polys"]) == 4
    assert payload["polys"][3][3] == pytest.approx([1.0, 0.0])
    assert len(payload["verblunsky"]) == 3
    assert all(n > 0 for n in payload["norms"])


def test_zeros_with_fixed_zero(tmp_path, mixed_config):
    out = tmp_path / "z.json"
    code = main(
        [
            "zeros", "--config", mixed_config, "--t", "0.5", "--degree", "5",
            "--fix-zero", "0,1", "--out", str(out),
        ]
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["phases"]) == 5
    assert min(abs(p - math.pi / 2) for p in payload["phases"]) < 1e-9
    assert max(payload["residuals"]) < 1e-9


def test_zeros_needs_policy(tmp_path, mixed_config):
    assert main(["zeros", "--config", mixed_config]) == 2


def test_sweep_csv_and_verdicts(tmp_path, mixed_config):
    csv_out = tmp_path / "traj.csv"
    verd_out = tmp_path / "verd.json"
    code = main(
        [
            "sweep", "--config", mixed_config, "--fix-zero", "0,1",
            "--out", str(csv_out), "--verdicts-out", str(verd_out),
        ]
    )
    assert code == 0
    lines = csv_out.read_text().strip().splitlines()
    assert lines[0] == "t,zero_index,phase,velocity,residual"
    assert len(lines) == 1 + 9 * 5
    verdicts = json.loads(verd_out.read_text())
    assert len(verdicts) == 9
    assert all(len(entry["verdicts"]) == 4 for entry in verdicts)


def test_sweep_deterministic(tmp_path, mixed_config):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    for out in (a, b):
        assert main(["sweep", "--config", mixed_config, "--fix-zero", "0,1", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scenario_round_trips_into_sweep(tmp_path):
    cfg_path = tmp_path / "scenario.json"
    assert main(["scenario", "lebesgue_mass_b", "--out", str(cfg_path)]) == 0
    out = tmp_path / "traj.csv"
    assert main(["sweep", "--config", str(cfg_path), "--grid", "0.1:0.9:5", "--out", str(out)]) == 0
    assert out.read_text().startswith("t,zero_index,phase,velocity,residual")


def test_scenario_rejects_unknown_name(capsys):
    with pytest.raises(SystemExit):
        main(["scenario", "nope"])


def test_malformed_expression_exits_2(tmp_path):
    path = _write(
        tmp_path,
        "bad.json",
        {"measure": {"ac": {"kind": "none"}, "masses": [{"gamma": "1 +", "omega": "0"}]}},
    )
    assert main(["moments", "--config", path]) == 2


def test_missing_file_exits_2(tmp_path):
    assert main(["moments", "--config", str(tmp_path / "absent.json")]) == 2


def test_bad_grid_exits_2(tmp_path, mixed_config):
    code = main(
        ["sweep", "--config", mixed_config, "--fix-zero", "0,1", "--grid", "0:1:2",
         "--out", str(tmp_path / "x.csv")]
    )
    assert code == 2


def test_degenerate_measure_exits_3(tmp_path):
    # two masses support OPUC only up to degree 2; degree-4 POPUC needs Q_3
    path = _write(
        tmp_path,
        "degenerate.json",
        {
            "measure": {
                "ac": {"kind": "none"},
                "masses": [
                    {"gamma": "1", "omega": "1.0"},
                    {"gamma": "1", "omega": "3.0"},
                ],
            }
        },
    )
    assert main(["zeros", "--config", path, "--degree", "4", "--b", "1,0"]) == 3


def test_verify_single_check(capsys):
    assert main(["verify", "--only", "expr"]) == 0
    captured = capsys.readouterr()
    assert "PASS" in captured.out
    assert "expr" in captured.out


def test_quad_nodes_env_override(tmp_path, monkeypatch):
    path = _write(
        tmp_path,
        "custom.json",
        {"measure": {"ac": {"kind": "custom", "w": "1 + cos(theta)/2"}, "masses": []}},
    )
    monkeypatch.setenv("POPUC_QUAD_NODES", "10")
    assert main(["moments", "--config", path, "--order", "2"]) == 2
    monkeypatch.setenv("POPUC_QUAD_NODES", "256")
    out = tmp_path / "m.json"
    assert main(["moments", "--config", path, "--order", "2", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["c"]["1"] == pytest.approx([0.25, 0.0], abs=1e-10)
