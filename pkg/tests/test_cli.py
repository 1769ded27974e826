import json
import math

import pytest

from coulomb_edge import __version__
from coulomb_edge.cli import main

GINIBRE = {"type": "radial-poly", "coeffs": [[1, 2]]}
QUARTIC = {"type": "radial-poly", "coeffs": [[1, 4]]}
ELLIPTIC = {"type": "elliptic", "tau": 0.5}


@pytest.fixture
def run(tmp_path, capsys):
    def _run(command, config, *extra):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(config) if not isinstance(config, str) else config)
        out = tmp_path / "out.txt"
        code = main([command, "--config", str(cfg), "--out", str(out), *extra])
        text = out.read_text() if out.exists() else ""
        return code, text, capsys.readouterr().err
    return _run


def _rows(text):
    lines = text.splitlines()
    assert lines[0] == f"# coulomb-edge {__version__}"
    return [line.split(",") for line in lines[2:]]


def test_density_ginibre_n1(run):
    code, text, _ = run("density", {"potential": GINIBRE, "n": [1], "r_grid": [0.0]})
    assert code == 0
    rows = _rows(text)
    assert rows[0] == ["0", "1"]
    assert rows[-2][0] == "mass" and rows[-1][0] == "mass_rel_err"
    assert float(rows[-1][1]) <= 1e-8


def test_density_elliptic_and_json(run):
    code, text, _ = run("density", {"potential": ELLIPTIC, "n": [16]}, "--format", "json")
    assert code == 0
    payload = json.loads(text)
    assert payload["columns"] == ["r", "R_n"]
    assert payload["meta"]["version"] == __version__
    assert payload["rows"][-1][0] == "mass_rel_err" and payload["rows"][-1][1] <= 1e-8


def test_config_errors_exit_2(run):
    code, _, err = run("density", {"potential": {"type": "bogus"}})
    assert code == 2 and "unknown potential type" in err
    code, _, err = run("density", "{not json")
    assert code == 2 and "cannot read config" in err
    code, _, _ = run("density", {"potential": GINIBRE, "n": [0]})
    assert code == 2
    code, _, _ = run("fluct-check", {"potential": GINIBRE})
    assert code == 2


def test_edge_check_ginibre_and_quartic(run):
    code, text, err = run("edge-check", {"potential": GINIBRE})
    assert code == 0 and "decay by factor >= 2: True" in err
    assert text.splitlines()[1] == "n,t,exact,leading,correction,residual,D_n,C,D_minus_C"
    code, _, _ = run("edge-check", {"potential": QUARTIC, "n": [256, 4096]})
    assert code == 0


def test_edge_check_single_n(run):
    code, text, err = run("edge-check", {"potential": GINIBRE, "n": [16]})
    assert code == 0 and "no decay comparison" in err
    assert len(_rows(text)) == 21


def test_wrong_correction_fails_edge_check(run, monkeypatch):
    # negative control: dropping the sqrt(n) term leaves D_n - C -> C(t) != 0
    import coulomb_edge.edge as edge

    monkeypatch.setattr(edge, "c_correction", lambda e, t: 0.0)
    code, _, _ = run("edge-check", {"potential": GINIBRE, "n": [256, 4096]})
    assert code == 1
    code, _, _ = run("convergence", {"potential": GINIBRE})
    assert code == 1


def test_fluct_check_ginibre(run):
    code, text, _ = run("fluct-check", {"potential": GINIBRE, "n": [16, 256],
                                        "test_function": {"coeffs": [[1, 2]]}})
    assert code == 0
    assert all(float(row[5]) <= 1e-10 for row in _rows(text))
    code, text, _ = run("fluct-check", {"potential": GINIBRE, "n": [64, 1024],
                                        "test_function": {"coeffs": [[1, 4]], "label": "r^4"}})
    assert code == 0
    for row in _rows(text):
        assert abs(float(row[5]) - 2 / (3 * int(row[2]))) <= 1e-8


def test_fluct_check_mismatched_label(run):
    code, _, err = run("fluct-check", {"potential": GINIBRE, "test_function": {"coeffs": [[1, 4]], "label": "r^2"}})
    assert code == 2 and "does not match" in err


def test_oracle_verify(run):
    for pot in (GINIBRE, QUARTIC, {"type": "radial-poly", "coeffs": [[1, 2], [1, 4]]}):
        code, text, _ = run("oracle-verify", {"potential": pot})
        assert code == 0
        assert all(float(row[5]) <= 1e-8 for row in _rows(text))
    code, text, _ = run("oracle-verify", {"potential": ELLIPTIC})
    assert code == 0
    assert all(float(row[5]) <= 1e-7 for row in _rows(text))


def test_oracle_verify_catches_corrupted_norm(run):
    code, _, _ = run("oracle-verify", {"potential": GINIBRE}, "--corrupt-norm", "1")
    assert code == 1


def test_convergence(run):
    code, text, _ = run("convergence", {"potential": GINIBRE})
    assert code == 0
    rows = _rows(text)
    assert [int(r[0]) for r in rows] == [256, 1024, 4096]
    assert float(rows[0][2]) == pytest.approx(-1 / (3 * math.sqrt(2 * math.pi)), abs=1e-15)


def test_cli_flags_override_config(run):
    code, text, _ = run("edge-check", {"potential": GINIBRE, "n": [16]}, "--n", "32", "--t-min", "-1",
                        "--t-max", "1", "--t-step", "0.5", "--M", "2")
    assert code == 0
    rows = _rows(text)
    assert {r[0] for r in rows} == {"32"} and len(rows) == 5


def test_output_is_deterministic(run):
    cfg = {"potential": QUARTIC, "n": [64, 1024]}
    first = run("edge-check", cfg)[1]
    second = run("edge-check", cfg)[1]
    assert first == second


def test_numbers_round_trip(run):
    _, text, _ = run("density", {"potential": GINIBRE, "n": [7], "r_grid": [0.3]})
    value = float(_rows(text)[0][1])
    from coulomb_edge.opkernel import ginibre_density_closed
    assert value == pytest.approx(ginibre_density_closed(7, 0.3), rel=1e-13)
    assert repr(value) == _rows(text)[0][1] or float(repr(value)) == value
