import json
import subprocess
import sys

import numpy as np
import pytest

from curvemac.cli import main, run_simulation
from curvemac.config import parse_config, parse_config_text
from curvemac.errors import ConfigError
from curvemac.grid import CurvilinearMesh
from curvemac.io import export_field, read_csv
from curvemac.solver import FlowState
from curvemac.spline import write_edges


def test_cavity_defaults():
    cfg = parse_config_text("scenario = cavity\nre = 100\n")
    assert (cfg.n_xi, cfg.n_eta, cfg.dtau) == (129, 129, 1e-3)


def test_plates_level_sets_lines():
    cfg = parse_config_text("scenario = plates  # Table row\nlevel = P2\n")
    assert (cfg.n_xi, cfg.n_eta) == (17, 9) and cfg.dtau == 1e-2


@pytest.mark.parametrize("text,key,line", [
    ("scenario = cavity\ndtau = -1\n", "dtau", 2),
    ("scenario = cavity\n\nbogus = 3\n", "bogus", 3),
    ("scenario = cavity\nre = abc\n", "re", 2),
    ("re = 100\n", "scenario", None),
    ("scenario = plates\nlevel = P9\n", "level", 2),
    ("scenario = cavity\nformat = png\n", "format", 2),
    ("scenario = cavity\nre = 1\nre = 2\n", "re", 3),
    ("scenario = cavity\nn_xi = 1\n", "n_xi", 2),
])
def test_config_errors_name_key_and_line(text, key, line):
    with pytest.raises(ConfigError) as exc:
        parse_config_text(text)
    assert exc.value.key == key and exc.value.line == line
    assert f"'{key}'" in str(exc.value)


def test_edge_entries():
    cfg = parse_config_text(
        "scenario = custom\nn_xi = 5\nn_eta = 4\ndtau = 0.01\nre = 10\nmax_steps = 3\n"
        "edge = north, kind = CLES, vel = 1.0\nedge = south, kind = CNEI\n"
        "edge = west, kind = CNEI, start = 1, stop = 2\nedge = west, kind = CIPR, vel = 0, "
        "start = 3, stop = 3\nedge = east, kind = CNEI\n")
    spec = cfg.boundary_spec()
    assert len(spec.segments) == 5
    assert spec.segments[0].kind == "CLES" and spec.segments[0].vel == 1.0


def test_edge_entry_errors():
    base = "scenario = custom\nn_xi = 5\nn_eta = 4\ndtau = 0.01\nre = 10\nmax_steps = 3\n"
    with pytest.raises(ConfigError) as exc:
        parse_config_text(base + "edge = north, kind = CLES\n")
    assert exc.value.line == 7
    with pytest.raises(ConfigError, match="uncovered"):
        parse_config_text(base + "edge = north, kind = CNEI\n")
    with pytest.raises(ConfigError) as exc:
        parse_config_text(base + "edge = north, colour = red\n")
    assert exc.value.key == "colour"


def test_export_quiescent_csv(tmp_path):
    mesh = CurvilinearMesh.from_function(3, 3, lambda i, j: (i, j))
    export_field(FlowState.quiescent((2, 2)), mesh, "csv", tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "i,j,x,y,u,v,p" and len(lines) == 5
    d = read_csv(tmp_path / "f.csv")
    np.testing.assert_array_equal(d["x"], d["i"] + 0.5)
    np.testing.assert_array_equal(d["y"], d["j"] + 0.5)
    assert not (d["u"].any() or d["v"].any() or d["p"].any())


def test_export_round_trip_is_exact(tmp_path, rng):
    mesh = CurvilinearMesh.from_function(5, 4, lambda i, j: (np.pi * i, np.e * j + 0.1 * i))
    s = FlowState.quiescent((4, 3))
    for a in (s.u, s.v, s.p):
        a[:] = rng.standard_normal(a.shape) * 10.0 ** rng.integers(-8, 8, a.shape)
    export_field(s, mesh, "csv", tmp_path / "f.csv")
    d = read_csv(tmp_path / "f.csv")
    i, j = d["i"].astype(int), d["j"].astype(int)
    u = 0.5 * (s.u[i, j + 1] + s.u[i + 1, j + 1])
    v = 0.5 * (s.v[i + 1, j] + s.v[i + 1, j + 1])
    assert np.array_equal(d["u"], u) and np.array_equal(d["v"], v)
    assert np.array_equal(d["p"], s.p[i + 1, j + 1])


def test_export_vtk(tmp_path):
    mesh = CurvilinearMesh.rectangle(2, 1, 4, 3)
    s = FlowState.quiescent((3, 2))
    s.u[:] = 1.0
    export_field(s, mesh, "vtk", tmp_path / "f.vtk", raw=True)
    text = (tmp_path / "f.vtk").read_text().splitlines()
    assert text[0] == "# vtk DataFile Version 3.0"
    assert "DATASET STRUCTURED_GRID" in text and "DIMENSIONS 4 3 1" in text
    assert "POINTS 12 double" in text and "CELL_DATA 6" in text
    assert "VECTORS u_v_speed double" in text and "SCALARS p double 1" in text
    k = text.index("VECTORS u_v_speed double")
    assert text[k + 1] == "1 0 0"
    assert (tmp_path / "f.vtk.faces.csv").exists()


def test_export_errors(tmp_path):
    mesh = CurvilinearMesh.rectangle(2, 1, 4, 3)
    with pytest.raises(ValueError):
        export_field(FlowState.quiescent((3, 2)), mesh, "png", tmp_path / "f.png")
    with pytest.raises(ValueError):
        export_field(FlowState.quiescent((2, 2)), mesh, "csv", tmp_path / "f.csv")
    with pytest.raises(OSError):
        export_field(FlowState.quiescent((3, 2)), mesh, "csv", tmp_path / "no" / "f.csv")


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_quiescent_custom_run(tmp_path):
    cfg = write(tmp_path, "scenario = custom\nn_xi = 6\nn_eta = 5\ndtau = 0.01\nre = 10\n"
                          "max_time = 1\nedge = north, kind = CNEI\nedge = south, kind = CNEI\n"
                          "edge = east, kind = CNEI\nedge = west, kind = CNEI\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--output", str(out)]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["steady"] and rep["steps"] == 1
    d = read_csv(out / "field.csv")
    assert not (d["u"].any() or d["v"].any() or d["p"].any())
    assert not (out / "FAILED").exists()


def test_plates_run_and_determinism(tmp_path):
    cfg = write(tmp_path, "scenario = plates\nlevel = P1\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        assert main(["run", "--config", str(cfg), "--output", str(out)]) == 0
        outs.append(out)
    rep = json.loads((outs[0] / "report.json").read_text())
    assert rep["steady"] and rep["max_div_residual"] <= 1e-6
    assert rep["error"] == pytest.approx(abs(1.5 - rep["v_num"]))
    assert (outs[0] / "profile.csv").exists() and (outs[0] / "diagnostics.csv").exists()
    assert (outs[0] / "field.csv").read_bytes() == (outs[1] / "field.csv").read_bytes()


def test_custom_geometry_vtk_and_snapshots(tmp_path):
    edges = {
        "south": np.array([(0.0, 0.0), (1.0, 0.05), (2.0, 0.0)]),
        "east": np.array([(2.0, 0.0), (2.0, 1.0)]),
        "north": np.array([(0.0, 1.0), (1.0, 0.95), (2.0, 1.0)]),
        "west": np.array([(0.0, 0.0), (0.0, 1.0)]),
    }
    write_edges(tmp_path / "duct.txt", edges)
    cfg = write(tmp_path, "scenario = custom\ngeometry = duct.txt\nn_xi = 13\nn_eta = 7\n"
                          "dtau = 0.01\nre = 20\nmax_steps = 10\nsnapshot_interval = 5\n"
                          "format = vtk\nedge = west, kind = CIPR, vel = 1\n"
                          "edge = east, kind = CECO\nedge = north, kind = CNEI\n"
                          "edge = south, kind = CNEI\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--output", str(out)]) == 0
    assert (out / "field.vtk").exists() and (out / "mesh.txt").exists()
    assert sorted(p.name for p in (out / "snapshots").iterdir()) == [
        "field_00000005.vtk", "field_00000010.vtk"]
    rep = json.loads((out / "report.json").read_text())
    assert rep["max_div_residual"] <= 1e-6 and rep["steps"] == 10


def test_exit_code_config_error(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = cavity\ndtau = -1\n")
    assert main(["run", "--config", str(cfg)]) == 2
    assert "dtau" in capsys.readouterr().err


def test_exit_code_mesh_error(tmp_path):
    edges = {
        "south": np.array([(0.0, 0.0), (2.0, 0.0)]),
        "east": np.array([(2.0, 0.0), (2.0, 1.0)]),
        "north": np.array([(0.0, 1.0), (1.0, -2.0), (2.0, 1.0)]),
        "west": np.array([(0.0, 0.0), (0.0, 1.0)]),
    }
    write_edges(tmp_path / "bad.txt", edges)
    cfg = write(tmp_path, "scenario = custom\ngeometry = bad.txt\nn_xi = 9\nn_eta = 5\n"
                          "dtau = 0.01\nre = 20\nmax_steps = 2\nedge = west, kind = CNEI\n"
                          "edge = east, kind = CNEI\nedge = north, kind = CNEI\n"
                          "edge = south, kind = CNEI\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--output", str(out)]) == 3
    assert "MeshQualityError" in (out / "FAILED").read_text()


def test_exit_code_solver_error(tmp_path):
    cfg = write(tmp_path, "scenario = plates\nlevel = P1\npressure_max_iter = 1\n"
                          "pressure_tol = 1e-14\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--output", str(out)]) == 4
    assert (out / "FAILED").exists() and (out / "mesh.txt").exists()


def test_study_mode(tmp_path):
    cfg = write(tmp_path, "scenario = plates\n")
    cfg_obj = parse_config(cfg)
    assert run_simulation(cfg_obj, output=tmp_path / "s", study=True, max_steps=2) == 0
    lines = (tmp_path / "s" / "convergence.csv").read_text().splitlines()
    # two steps are nowhere near steady, so the study stops after P1
    assert len(lines) == 2 and lines[1].startswith("P1,")


def test_console_script_help():
    r = subprocess.run([sys.executable, "-m", "curvemac.cli", "run", "--help"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "--max-steps" in r.stdout
