import json
import shutil
import subprocess
import sys

import pytest

from levy_occupation import cli
from levy_occupation.config import (ConfigError, build_run_config,
                                    flatten_json, load_config,
                                    parse_config_text, serialize_config,
                                    _parse_scalar)

BASE = {
    "model.sigma": 1.0, "model.drift": 0.0,
    "window.p": 0.0, "window.q": 0.0, "window.a": -0.2, "window.b": 0.3,
    "corridor.c": -1.0, "corridor.d": 1.0,
    "lambda": 1.0, "x": 0.5,
}


def _flat(**over):
    flat = dict(BASE)
    flat.update(over)
    return flat


# ---------------------------------------------------------------- config

def test_scalar_parsing():
    assert _parse_scalar("true") is True
    assert _parse_scalar("Off") is False
    assert _parse_scalar("3") == 3 and isinstance(_parse_scalar("3"), int)
    assert _parse_scalar("2.5") == 2.5
    assert _parse_scalar("1e-4") == 1e-4
    assert _parse_scalar("hello") == "hello"


def test_text_round_trip():
    flat = _flat(checks=["a", "b"], **{"sim.n_paths": 500})
    text = serialize_config(flat)
    again = parse_config_text(text)
    assert again == flat
    assert serialize_config(again) == text


def test_json_and_text_agree(tmp_path):
    nested = {"model": {"sigma": 1.0, "drift": 0.0},
              "window": {"p": 0.0, "q": 0.0, "a": -0.2, "b": 0.3},
              "corridor": {"c": -1.0, "d": 1.0},
              "lambda": 1.0, "x": 0.5}
    j = tmp_path / "cfg.json"
    j.write_text(json.dumps(nested))
    t = tmp_path / "cfg.txt"
    t.write_text(serialize_config(BASE))
    assert load_config(str(j)) == load_config(str(t)) == BASE
    assert flatten_json(nested) == BASE


def test_comment_and_blank_lines():
    text = "# heading\n\nmodel.sigma = 1.0\nx = 0.1, 0.2\n"
    assert parse_config_text(text) == {"model.sigma": 1.0, "x": [0.1, 0.2]}


def test_constraint_messages():
    with pytest.raises(ConfigError, match="c <"):
        build_run_config(_flat(**{"corridor.c": 0.5}))
    with pytest.raises(ConfigError, match="b"):
        build_run_config(_flat(**{"corridor.d": 0.25}))
    with pytest.raises(ConfigError):
        build_run_config(_flat(**{"window.p": -0.5}))


def test_run_config_defaults():
    run = build_run_config(_flat())
    assert run.lam == 1.0
    assert run.sim.dt == 1e-3
    assert run.seed == 0 and run.jobs == 1
    assert run.window2 is None


# ---------------------------------------------------------------- commands

def test_eval_rows():
    run = build_run_config(_flat(quantity="last_totals.minus",
                                 x=[-1.0, 0.5]))
    rows = cli.cmd_eval(run)
    assert [r["x"] for r in rows] == [-1.0, 0.5]
    assert rows[0]["value"] == pytest.approx(0.0, abs=1e-12)
    assert 0.0 < rows[1]["value"] < 1.0
    assert "u_at_zero" in rows[1]["sub_terms"]


def test_eval_requires_quantity_and_grid():
    with pytest.raises(ConfigError):
        cli.cmd_eval(build_run_config(_flat()))
    with pytest.raises(ConfigError):
        cli.cmd_eval(build_run_config(_flat(quantity="last_totals.minus",
                                            x=[])))
    with pytest.raises(ConfigError):
        cli.cmd_eval(build_run_config(_flat(quantity="wat")))


def test_validate_subset_and_power():
    run = build_run_config(_flat(
        checks=["last_total_minus/w0"],
        **{"sim.n_paths": 4000, "sim.dt": 1e-3}))
    rep = cli.cmd_validate(run)
    assert [c["check"] for c in rep["checks"]] == ["last_total_minus/w0/x0.5"]
    assert rep["all_pass"] is True
    assert rep["checks"][0]["underpowered"] is False
    # a starved run still reports, flagged as underpowered
    weak = build_run_config(_flat(checks=["p_sigma0_minus"],
                                  **{"sim.n_paths": 16}))
    rep = cli.cmd_validate(weak)
    assert rep["checks"][0]["underpowered"] is True


def test_validate_empty_selection():
    with pytest.raises(ConfigError):
        cli.cmd_validate(build_run_config(_flat(checks=["zzz"])))


def test_table_shape_and_collapse_column():
    run = build_run_config(_flat(x=[0.0, 0.5], y=[-0.5, 0.0, 0.5]))
    text = cli.cmd_table(run)
    lines = text.strip().split("\n")
    assert lines[0] == "x,y,value,closed_form,diff"
    assert len(lines) == 1 + 2 * 3
    for ln in lines[1:]:
        parts = ln.split(",")
        assert len(parts) == 5
        assert abs(float(parts[4])) < 1e-9       # p == q: routes agree
    # distinct rates: no closed form, three columns
    run = build_run_config(_flat(x=[0.0], y=[0.0], **{"window.q": 1.1}))
    lines = cli.cmd_table(run).strip().split("\n")
    assert lines[0] == "x,y,value"


def test_table_needs_grids():
    with pytest.raises(ConfigError):
        cli.cmd_table(build_run_config(_flat(x=[])))


def test_simulate_command():
    run = build_run_config(_flat(quantity="last_total_minus",
                                 **{"sim.n_paths": 800}))
    out = cli.cmd_simulate(run)
    assert out["functional"] == "last_total_minus"
    assert out["n_effective"] == 800
    assert 0.0 <= out["mean"] <= 1.0
    again = cli.cmd_simulate(run)
    assert again["mean"] == out["mean"]


# ---------------------------------------------------------------- main()

def _write_cfg(tmp_path, flat):
    p = tmp_path / "run.cfg"
    p.write_text(serialize_config(flat))
    return str(p)


def test_main_eval_and_out(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, _flat(quantity="last_totals.minus"))
    dest = tmp_path / "res.json"
    code = cli.main(["eval", "--config", cfg, "--out", str(dest)])
    assert code == 0
    data = json.loads(dest.read_text())
    assert data["rows"][0]["quantity"] == "last_totals.minus"
    # stdout path as well, identical up to timing
    assert cli.main(["eval", "--config", cfg]) == 0
    echoed = json.loads(capsys.readouterr().out)
    assert [(r["x"], r["value"]) for r in echoed["rows"]] == \
        [(r["x"], r["value"]) for r in data["rows"]]


def test_main_config_error_exit_code(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, _flat(**{"corridor.c": 0.5}))
    code = cli.main(["eval", "--config", cfg])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_main_seed_override_changes_run(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, _flat(quantity="last_total_minus",
                                     **{"sim.n_paths": 400}))
    outs = []
    for seed in ("1", "2"):
        assert cli.main(["simulate", "--config", cfg, "--seed", seed]) == 0
        outs.append(json.loads(capsys.readouterr().out)["mean"])
    assert outs[0] != outs[1]


def test_main_jobs_override_keeps_results(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, _flat(quantity="last_total_minus",
                                     **{"sim.n_paths": 600}))
    outs = []
    for jobs in ("1", "4"):
        assert cli.main(["simulate", "--config", cfg, "--jobs", jobs]) == 0
        outs.append(json.loads(capsys.readouterr().out))
    assert outs[0] == outs[1]


def test_console_script(tmp_path):
    exe = shutil.which("levyocc")
    if exe is None:
        pytest.skip("entry point not installed")
    cfg = _write_cfg(tmp_path, _flat(quantity="prob_sigma_zero.minus"))
    r = subprocess.run([exe, "eval", "--config", cfg],
                       capture_output=True, text=True, timeout=120)
    assert r.returncode == 0
    assert json.loads(r.stdout)["rows"]
