import json

import numpy as np
import pytest

from chainflux.cli import main
from chainflux.config import apply_sweep_value, load_config
from chainflux.errors import SpecError
from chainflux.lindblad import TargetZ, TwistedXY


def _write_config(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


GRADED_MODEL = {"n_sites": 3, "alpha": 1.0, "delta_mean": 1.0, "delta_step": 0.5,
                "b_uniform": 0.0}


def _read_csv(path):
    lines = path.read_text().splitlines()
    header_comments = [line for line in lines if line.startswith("#")]
    table = [line for line in lines if not line.startswith("#")]
    columns = table[0].split(",")
    rows = [dict(zip(columns, line.split(","))) for line in table[1:]]
    return header_comments, columns, rows


# --- config parsing -------------------------------------------------------------


def test_load_config_graded_form_and_shorthand(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5, "gamma": 2.0},
        "output": {"path": "out.csv", "format": "csv"},
    })
    config = load_config(path)
    assert config.model.chain.delta == (0.5, 1.5)
    assert config.bath == TargetZ(f_left=0.5, f_right=-0.5, gamma=2.0)
    assert config.output.format == "csv"


def test_load_config_twisted_defaults(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": {"n_sites": 2, "alpha": 1.0, "delta": [1.0]},
        "bath": {"family": "twisted_xy", "k": 0.6},
    })
    config = load_config(path)
    assert config.bath == TwistedXY(k=0.6, k_prime=-0.6, rate=1.0)


def test_load_config_rejects_unknown_keys(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": {**GRADED_MODEL, "typo_key": 1},
        "bath": {"family": "target_z", "f": 0.5},
    })
    with pytest.raises(SpecError):
        load_config(path)


def test_load_config_rejects_unknown_sweep_parameter(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "not_a_knob", "grid": [0.1]},
    })
    with pytest.raises(SpecError):
        load_config(path)


def test_load_config_rejects_empty_grid(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "f", "grid": []},
    })
    with pytest.raises(SpecError):
        load_config(path)


def test_load_config_rejects_family_mismatch(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "twisted_xy", "k": 0.5},
        "sweep": {"parameter": "f", "grid": [0.1]},
    })
    with pytest.raises(SpecError):
        load_config(path)


def test_load_config_delta_sweep_needs_graded_form(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": {"n_sites": 3, "alpha": 1.0, "delta": [0.5, 1.5]},
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "delta_step", "grid": [0.1]},
    })
    with pytest.raises(SpecError):
        load_config(path)


def test_apply_sweep_values(tmp_path):
    path = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "f", "grid": [0.3]},
    })
    config = load_config(path)
    chain, bath = apply_sweep_value(config, 0.3)
    assert bath == TargetZ(f_left=0.3, f_right=-0.3, gamma=1.0)
    assert chain == config.model.chain

    path = _write_config(tmp_path, "d.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "delta_step", "grid": [0.2]},
    })
    config = load_config(path)
    chain, _ = apply_sweep_value(config, 0.2)
    assert chain.delta == (0.8, 1.2)


def test_classical_config_forms(tmp_path):
    explicit = _write_config(tmp_path, "e.json", {
        "classical": {"c": [2.0, 1.5, 1.0], "alpha_exp": 1.0, "t_left": 2.0, "t_right": 1.0},
    })
    config = load_config(explicit)
    assert config.classical.chain.t_left == 2.0

    linearized = _write_config(tmp_path, "l.json", {
        "classical": {"c": [2.0, 1.5, 1.0], "alpha_exp": 1.0, "base_t": 1.0,
                      "a_left": 1.0, "a_right": -1.0},
        "sweep": {"parameter": "eps", "grid": [1e-3]},
    })
    config = load_config(linearized)
    assert config.classical.chain is None
    assert config.sweep.parameter == "eps"

    mixed = _write_config(tmp_path, "m.json", {
        "classical": {"c": [2.0, 1.5, 1.0], "t_left": 2.0, "t_right": 1.0, "base_t": 1.0},
    })
    with pytest.raises(SpecError):
        load_config(mixed)


# --- CLI commands ----------------------------------------------------------------


def test_cmd_steady_homogeneous_energy_column_vanishes(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": {"n_sites": 3, "alpha": 1.0, "delta": [1.0, 1.0]},
        "bath": {"family": "target_z", "f": 0.5},
        "output": {"path": str(tmp_path / "out.csv"), "format": "csv"},
    })
    assert main(["steady", "--config", str(config)]) == 0
    comments, columns, rows = _read_csv(tmp_path / "out.csv")
    assert any(line.startswith("# config:") for line in comments)
    assert columns[-3:] == ["residual", "method", "wall_ms"]
    energy_rows = [r for r in rows if r["observable"] == "energy_xxz"]
    assert energy_rows
    assert all(abs(float(r["value"])) < 1e-9 for r in energy_rows)


def test_cmd_steady_single_site_pinned_state(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": {"n_sites": 1, "alpha": 0.0, "delta": [], "b_field": [0.0]},
        "bath": {"family": "target_z", "f_left": -1.0, "f_right": -1.0},
        "output": {"path": str(tmp_path / "out.csv")},
    })
    assert main(["steady", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "out.csv")
    sz = [r for r in rows if r["observable"] == "sigma_z"]
    assert len(sz) == 1
    assert float(sz[0]["value"]) == pytest.approx(-1.0, abs=1e-10)


def test_cmd_steady_malformed_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "never.csv"
    assert main(["steady", "--config", str(bad), "--out", str(out)]) == 2
    assert not out.exists()


def test_cmd_symmetry_graded_all_pass(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "f", "grid": [0.2, 0.5]},
        "output": {"path": str(tmp_path / "sym.csv")},
    })
    assert main(["symmetry", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "sym.csv")
    assert {r["check"] for r in rows} == {
        "conjugation", "energy_current_even", "spin_current_odd", "direction",
        "direction_overall",
    }
    assert all(r["passed"] == "true" for r in rows)


def test_cmd_symmetry_twisted_conjugation_passes(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": {"n_sites": 3, "alpha": 1.0, "delta": [0.5, 1.5]},
        "bath": {"family": "twisted_xy", "k": 0.6},
        "output": {"path": str(tmp_path / "sym.csv")},
    })
    assert main(["symmetry", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "sym.csv")
    conjugation = [r for r in rows if r["check"] == "conjugation"]
    assert conjugation[0]["passed"] == "true"


def test_cmd_symmetry_refuses_field(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": {**GRADED_MODEL, "b_uniform": 0.4},
        "bath": {"family": "target_z", "f": 0.5},
        "output": {"path": str(tmp_path / "sym.csv")},
    })
    assert main(["symmetry", "--config", str(config)]) == 2
    assert not (tmp_path / "sym.csv").exists()


def test_cmd_sweep_parity_columns(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "f", "grid": [-0.4, 0.4]},
        "output": {"path": str(tmp_path / "sweep.csv")},
    })
    assert main(["sweep", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "sweep.csv")
    assert [float(r["sweep_value"]) for r in rows] == [-0.4, 0.4]
    j_values = [float(r["spin_current"]) for r in rows]
    f_values = [float(r["energy_xxz"]) for r in rows]
    assert j_values[0] == pytest.approx(-j_values[1], abs=1e-9)
    assert f_values[0] == pytest.approx(f_values[1], abs=1e-9)


def test_cmd_sweep_deterministic_output_modulo_timing(tmp_path):
    payload = {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "f", "grid": [0.2, 0.4, 0.6]},
        "output": {"format": "csv"},
    }
    config = _write_config(tmp_path, "c.json", payload)

    def run(out_name, workers):
        out = tmp_path / out_name
        args = ["sweep", "--config", str(config), "--out", str(out),
                "--workers", str(workers)]
        assert main(args) == 0
        lines = out.read_text().splitlines()
        # blank the volatile wall-time column and the output path echo
        stripped = []
        for line in lines:
            if line.startswith("# config:"):
                continue
            cells = line.split(",")
            if not line.startswith("#") and cells[-1] != "wall_ms":
                cells[-1] = ""
            stripped.append(",".join(cells))
        return stripped

    first = run("a.csv", 1)
    second = run("b.csv", 1)
    parallel = run("p.csv", 2)
    assert first == second
    assert first == parallel


def test_cmd_sweep_json_format(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
        "sweep": {"parameter": "f", "grid": [0.3]},
        "output": {"path": str(tmp_path / "sweep.json"), "format": "json"},
    })
    assert main(["sweep", "--config", str(config)]) == 0
    document = json.loads((tmp_path / "sweep.json").read_text())
    assert document["config"]["bath"]["f_left"] == 0.5
    assert document["columns"][0] == "n_sites"
    assert len(document["rows"]) == 1
    assert document["rows"][0]["sweep_value"] == 0.3


def test_cmd_classical_alpha_zero_gap_column(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "classical": {"c": [2.0, 1.5, 1.0], "alpha_exp": 0.0, "t_left": 2.0,
                      "t_right": 1.0},
        "output": {"path": str(tmp_path / "cls.csv")},
    })
    assert main(["classical", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "cls.csv")
    assert abs(float(rows[0]["rectification_gap"])) < 1e-12


def test_cmd_classical_eps_sweep_matches_prediction(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "classical": {"c": [2.0, 1.5, 1.0], "alpha_exp": 1.0, "base_t": 1.0,
                      "a_left": 1.0, "a_right": -1.0},
        "sweep": {"parameter": "eps", "grid": [1e-3, 5e-4]},
        "output": {"path": str(tmp_path / "cls.csv")},
    })
    assert main(["classical", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "cls.csv")
    for row in rows:
        measured = float(row["inv_kappa_gap_measured"])
        predicted = float(row["inv_kappa_gap_predicted"])
        assert measured == pytest.approx(predicted, rel=1e-2)
    # the predicted gap is linear in eps
    predictions = [float(r["inv_kappa_gap_predicted"]) for r in rows]
    assert predictions[0] == pytest.approx(2 * predictions[1], rel=1e-12)


def test_cmd_classical_symmetric_chain_zero_gap(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "classical": {"c": [1.0, 1.5, 1.0], "alpha_exp": 1.0, "t_left": 2.0,
                      "t_right": 1.0},
        "output": {"path": str(tmp_path / "cls.csv")},
    })
    assert main(["classical", "--config", str(config)]) == 0
    _, _, rows = _read_csv(tmp_path / "cls.csv")
    assert abs(float(rows[0]["rectification_gap"])) < 1e-12


def test_cli_requires_output_path(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": GRADED_MODEL,
        "bath": {"family": "target_z", "f": 0.5},
    })
    assert main(["steady", "--config", str(config)]) == 2


def test_cli_method_override_is_echoed(tmp_path):
    config = _write_config(tmp_path, "c.json", {
        "model": {"n_sites": 2, "alpha": 1.0, "delta": [1.0]},
        "bath": {"family": "target_z", "f": 0.5},
        "output": {"path": str(tmp_path / "out.csv")},
    })
    assert main(["steady", "--config", str(config), "--method", "evolve"]) == 0
    _, _, rows = _read_csv(tmp_path / "out.csv")
    assert all(r["method"] == "evolve" for r in rows)
