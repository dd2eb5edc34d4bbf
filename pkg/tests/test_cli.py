import math
from pathlib import Path

import numpy as np
import pytest

from curved_burgers.cli import ConfigError, build_run, convergence_table, main, parse_config

STEADY_CONFIG = """
# pressureless steady run
model = geom-pressureless
eps = 1.0
mass = 0.05
r_max = 1.0
scheme = wb2
cells = 32
cfl = 0.45
t_end = 0.5
snapshot_dt = 0.1
initial = steady
edge_velocity = 0.3
"""


def test_parse_config_grammar():
    params = parse_config(STEADY_CONFIG)
    assert params["model"] == "geom-pressureless"
    assert params["cells"] == 32
    assert params["edge_velocity"] == 0.3


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError):
        parse_config("just some words\n")


def test_build_run_requires_keys():
    with pytest.raises(ConfigError):
        build_run({"model": "geom-pressureless", "scheme": "wb2"})
    with pytest.raises(ConfigError):
        build_run(parse_config(STEADY_CONFIG.replace("geom-pressureless", "warp-drive")))


def test_build_run_converts_velocity_for_w_models():
    params = parse_config(STEADY_CONFIG.replace("geom-pressureless", "geom-relativistic"))
    config, resolved = build_run(params)
    w = config.initial.u_edge
    assert w == pytest.approx(0.3 / math.sqrt(1 - 0.09), rel=1e-14)
    assert resolved["_notes"]["edge_evolved"] == pytest.approx(w)


def test_run_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(STEADY_CONFIG)
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    snap = (out / "snapshots.csv").read_text().splitlines()
    assert snap[0].startswith("# manifest: ")
    assert snap[1] == "t,j,r_center,u,v_physical,K_invariant"
    diag = (out / "diagnostics.csv").read_text().splitlines()
    assert diag[0] == "t,total_mass,total_variation,l1_to_reference,dt"
    # 6 snapshots x 32 cells data rows
    assert len(snap) == 2 + 6 * 32
    assert (out / "run_manifest.txt").exists()


def test_manifest_reruns_identically(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(STEADY_CONFIG)
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(["run", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(out1 / "run_manifest.txt"), "--out", str(out2)]) == 0
    assert (out1 / "snapshots.csv").read_bytes() == (out2 / "snapshots.csv").read_bytes()
    assert (out1 / "diagnostics.csv").read_bytes() == (out2 / "diagnostics.csv").read_bytes()


def test_unknown_preset_lists_valid_names(tmp_path, capsys):
    code = main(["run", "--preset", "nope", "--out", str(tmp_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "single-shock" in err and "scheme-compare-1" in err


def test_run_needs_exactly_one_source(tmp_path):
    assert main(["run", "--out", str(tmp_path)]) == 2


def test_single_shock_preset_monotone_wb2(tmp_path):
    out = tmp_path / "shock"
    # the naive central leg leaves the state space on this preset, so the
    # preset as a whole reports a numerical failure while the other legs
    # still produce their full output
    code = main(["run", "--preset", "single-shock", "--out", str(out)])
    assert code == 3
    assert (out / "nt2" / "run_manifest.txt").read_text().splitlines()[-1].startswith("# status: failed")
    rows = (out / "wb2" / "snapshots.csv").read_text().splitlines()[2:]
    data = {}
    for row in rows:
        t, j, r, u, v, k = row.split(",")
        data.setdefault(float(t), []).append(float(v))
    assert len(data) == 11
    for t, vals in data.items():
        diffs = np.diff(np.array(vals))
        assert np.max(diffs) < 1e-10, f"profile not monotone at t={t}"


def test_preset_emits_three_solution_sets(tmp_path):
    out = tmp_path / "cmp"
    code = main(["run", "--preset", "scheme-compare-1", "--out", str(out),
                 "--t-end", "0.5"])
    assert code == 0
    for leg in ("lf1", "nt2", "wb2"):
        assert (out / leg / "snapshots.csv").exists()
        # K_invariant column carries the weighted-flux field of this model
        line = (out / leg / "snapshots.csv").read_text().splitlines()[2]
        assert len(line.split(",")) == 6


def test_scheme_override_runs_single_leg(tmp_path):
    out = tmp_path / "one"
    code = main(["run", "--preset", "single-shock", "--out", str(out), "--scheme", "wb2"])
    assert code == 0
    assert (out / "wb2").exists()
    assert not (out / "lf1").exists()


def test_wb_check_passes_for_both_models(capsys):
    assert main(["wb-check", "--model", "geom-pressureless", "--k", "0.9",
                 "--steps", "200"]) == 0
    out = capsys.readouterr().out
    assert "wb2" in out
    assert main(["wb-check", "--model", "geom-relativistic", "--k", "0.5",
                 "--steps", "200"]) == 0


def test_wb_check_rejects_flat_model():
    assert main(["wb-check", "--model", "flat-classical"]) == 2


def test_convergence_command(tmp_path, capsys):
    out = tmp_path / "conv.csv"
    code = main(["convergence", "--model", "flat-classical", "--scheme", "lf1",
                 "--levels", "3", "--base-cells", "32", "--out", str(out)])
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "dr,l1_error,order"
    assert len(rows) == 4
    orders = [row.split(",")[2] for row in rows[1:]]
    assert orders[0] == "n/a"
    assert 0.7 < float(orders[-1]) < 1.3


def test_convergence_wb2_steady_is_roundoff(capsys):
    code = main(["convergence", "--model", "geom-pressureless", "--scheme", "wb2",
                 "--levels", "3", "--base-cells", "16"])
    assert code == 0
    rows = capsys.readouterr().out.strip().splitlines()[1:]
    for row in rows:
        dr, err, order = row.split(",")
        assert float(err) < 1e-12
        assert order == "n/a"


def test_presets_command(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in ("scheme-compare-1", "scheme-compare-2", "single-shock",
                 "perturbed-steady-1", "perturbed-steady-2", "perturbed-steady-shock"):
        assert name in out
