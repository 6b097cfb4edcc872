"""Command-line entry point: ``curvemac run --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 mesh/geometry error,
4 solver failure (non-convergence or blow-up), 1 anything else.
"""

import argparse
import json
import logging
import os
import sys
import traceback
from dataclasses import replace
from pathlib import Path

from . import scenarios as sc
from .config import parse_config
from .errors import ConfigError, CurveMACError, NoVortexError
from .grid import CurvilinearMesh, generate_grid, write_mesh
from .io import export_field
from .metrics import compute_metrics
from .solver import FluidProps, is_steady
from .spline import EDGE_ORDER, build_spline, read_edges, sample_boundary

log = logging.getLogger("curvemac")


def configure_logging(level=None):
    level = (level or os.environ.get("CURVEMAC_LOG") or "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def build_scenario(cfg):
    if cfg.scenario == "plates":
        s = sc.build_parallel_plates(cfg.level, re=cfg.re, max_time=cfg.max_time)
        return _with(s, cfg)
    if cfg.scenario == "cavity":
        s = sc.build_lid_cavity(cfg.re, n=cfg.n_xi, dtau=cfg.dtau, max_time=cfg.max_time)
        return _with(s, cfg)
    if cfg.scenario == "stenosis":
        s = sc.build_stenosis(cfg.re, depth=cfg.depth, width=cfg.width, center=cfg.center,
                              n_xi=cfg.n_xi, n_eta=cfg.n_eta, vel_in=cfg.vel_in,
                              dtau=cfg.dtau, max_time=cfg.max_time)
        return _with(s, cfg)
    return _custom(cfg)


def _with(s, cfg):
    kw = {"dtau": cfg.dtau, "steady_tol": cfg.steady_tol}
    if cfg.omega is not None:
        kw["omega"] = cfg.omega
    if cfg.mu is not None:
        kw["props"] = FluidProps(cfg.rho, cfg.mu)
    return replace(s, **kw)


def _custom(cfg):
    if cfg.geometry:
        ctrl = read_edges(cfg.geometry)
        counts = {"south": cfg.n_xi, "north": cfg.n_xi, "east": cfg.n_eta, "west": cfg.n_eta}
        edges = {k: sample_boundary(build_spline(ctrl[k]), counts[k]) for k in EDGE_ORDER}
        mesh = generate_grid(edges, max_iter=cfg.grid_max_iter, tol=cfg.grid_tol,
                             method=cfg.grid_method)
    else:
        mesh = CurvilinearMesh.rectangle(cfg.length, cfg.height, cfg.n_xi, cfg.n_eta)
    if cfg.mu is not None:
        props = FluidProps(cfg.rho, cfg.mu)
    else:
        props = FluidProps.from_reynolds(cfg.re, rho=cfg.rho)
    return sc.Scenario("custom", mesh, compute_metrics(mesh), props, cfg.boundary_spec(),
                       cfg.dtau, cfg.max_time if cfg.max_time is not None else float("inf"),
                       steady_tol=cfg.steady_tol,
                       omega=cfg.omega if cfg.omega is not None else 1.0)


def _report(out, scenario, state, history, cfg):
    mesh = scenario.mesh
    rep = {
        "scenario": scenario.name,
        "steps": len(history),
        "tau": state.tau,
        "steady": is_steady(history, scenario.steady_tol),
        "max_div_residual": max((h.div_residual for h in history), default=0.0),
    }
    if cfg.scenario == "plates":
        sc.write_profile(out / "profile.csv", state, mesh)
        v = sc.centerline_velocity(state, mesh)
        rep.update(level=cfg.level, v_num=v, error=abs(sc.POISEUILLE_MAX - v))
    elif cfg.scenario == "cavity":
        try:
            x, y = sc.locate_primary_vortex(state, mesh)
        except NoVortexError as exc:
            rep["vortex"] = None
            log.warning("%s", exc)
        else:
            rep["vortex"] = [x, y]
            sc.write_vortex_table(out / "vortex.csv", {cfg.re: (x, y)})
    elif cfg.scenario == "stenosis":
        zones = sc.detect_recirculation(state, mesh)
        rep["recirculation"] = [dict(wall=z.wall, x_start=z.x_start, x_end=z.x_end,
                                     center=list(z.center), n_cells=z.n_cells) for z in zones]
    with open(out / "report.json", "w") as fh:
        json.dump(rep, fh, indent=2)
    return rep


def run_simulation(cfg, output=None, fmt=None, max_steps=None, study=False):
    """Run the configured case, writing artifacts; returns the process exit code."""
    out = Path(output or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    failed = out / "FAILED"
    if failed.exists():
        failed.unlink()
    fmt = fmt or cfg.format
    max_steps = cfg.max_steps if max_steps is None else max_steps
    try:
        if study:
            if cfg.scenario != "plates":
                raise ConfigError("--study is only defined for the plates scenario",
                                  key="scenario")
            result = sc.convergence_study(max_time=cfg.max_time,
                                          csv_path=out / "convergence.csv",
                                          runner=lambda s: s.run(max_steps=max_steps))
            if not result.complete:
                log.warning("convergence study stopped early at %s", result.rows[-1].level)
            return 0
        scenario = build_scenario(cfg)
        write_mesh(out / "mesh.txt", scenario.mesh)
        ext = "vtk" if fmt == "vtk" else "csv"
        snaps = out / "snapshots"

        def snapshot(state, info):
            if cfg.snapshot_interval and info.step % cfg.snapshot_interval == 0:
                snaps.mkdir(exist_ok=True)
                export_field(state, scenario.mesh, fmt, snaps / f"field_{info.step:08d}.{ext}")

        max_time = scenario.max_time if scenario.max_time != float("inf") else None
        if max_time is None and max_steps is None:
            max_steps = 0
        solver_kw = {"pressure_max_iter": cfg.pressure_max_iter}
        if cfg.pressure_tol is not None:
            solver_kw["pressure_tol"] = cfg.pressure_tol
        state, history = scenario.solver(**solver_kw).run_to_steady(
            steady_tol=scenario.steady_tol, max_time=max_time, max_steps=max_steps,
            log_path=out / "diagnostics.csv", callback=snapshot)
        export_field(state, scenario.mesh, fmt, out / f"field.{ext}")
        _report(out, scenario, state, history, cfg)
        return 0
    except CurveMACError as exc:
        failed.write_text(f"{type(exc).__name__}: {exc}\n")
        log.error("%s: %s", type(exc).__name__, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:
        failed.write_text(traceback.format_exc())
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    parser = argparse.ArgumentParser(prog="curvemac",
                                     description="2-D incompressible flow on boundary-fitted grids")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a configured simulation")
    run.add_argument("--config", required=True, help="key = value configuration file")
    run.add_argument("--output", help="output directory (overrides 'output')")
    run.add_argument("--format", choices=("csv", "vtk"), help="field export format")
    run.add_argument("--max-steps", type=int, help="stop after this many steps")
    run.add_argument("--study", action="store_true",
                     help="plates only: run the P1-P5 refinement study")
    args = parser.parse_args(argv)
    configure_logging()
    try:
        cfg = parse_config(args.config)
    except CurveMACError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.max_steps is not None and args.max_steps < 0:
        print("error: --max-steps must be non-negative", file=sys.stderr)
        return 2
    return run_simulation(cfg, output=args.output, fmt=args.format, max_steps=args.max_steps,
                          study=args.study)


if __name__ == "__main__":
    sys.exit(main())
