"""Field export: CSV tables and legacy-ASCII VTK structured grids."""

import csv

import numpy as np


def cell_center_fields(state, mesh):
    """Cell-centred ``u, v, p`` (each (nx, ny)); velocities average opposite faces."""
    nx, ny = mesh.shape
    u = 0.5 * (state.u[0:nx, 1:ny + 1] + state.u[1:nx + 1, 1:ny + 1])
    v = 0.5 * (state.v[1:nx + 1, 0:ny] + state.v[1:nx + 1, 1:ny + 1])
    return u, v, state.p[1:nx + 1, 1:ny + 1].copy()


def _fmt(x):
    return format(float(x), ".17g")


def _check_shapes(state, mesh):
    nx, ny = mesh.shape
    if state.u.shape != (nx + 2, ny + 2):
        raise ValueError(f"state shape {state.u.shape} does not fit a {nx}x{ny}-cell mesh")


def write_csv(state, mesh, path):
    _check_shapes(state, mesh)
    xc, yc = mesh.cell_centers()
    u, v, p = cell_center_fields(state, mesh)
    nx, ny = mesh.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["i", "j", "x", "y", "u", "v", "p"])
        for i in range(nx):
            for j in range(ny):
                w.writerow([i, j] + [_fmt(a[i, j]) for a in (xc, yc, u, v, p)])


def read_csv(path):
    """Columns of an exported CSV as a dict of arrays."""
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=float)
    return {name: data[name] for name in data.dtype.names}


def write_vtk(state, mesh, path, title="curvemac field"):
    """Legacy ASCII STRUCTURED_GRID: nodes as points, fields on cells."""
    _check_shapes(state, mesh)
    nx, ny = mesh.shape
    u, v, p = cell_center_fields(state, mesh)
    speed_vec = np.stack([u, v, np.zeros_like(u)], axis=-1)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(title.replace("\n", " ")[:255] + "\n")
        fh.write("ASCII\nDATASET STRUCTURED_GRID\n")
        fh.write(f"DIMENSIONS {nx + 1} {ny + 1} 1\n")
        fh.write(f"POINTS {(nx + 1) * (ny + 1)} double\n")
        # VTK wants the first index fastest
        for j in range(ny + 1):
            for i in range(nx + 1):
                fh.write(f"{_fmt(mesh.x[i, j])} {_fmt(mesh.y[i, j])} 0\n")
        fh.write(f"CELL_DATA {nx * ny}\n")
        fh.write("VECTORS u_v_speed double\n")
        for j in range(ny):
            for i in range(nx):
                fh.write(" ".join(_fmt(c) for c in speed_vec[i, j]) + "\n")
        fh.write("SCALARS p double 1\nLOOKUP_TABLE default\n")
        for j in range(ny):
            for i in range(nx):
                fh.write(_fmt(p[i, j]) + "\n")


def write_faces(state, mesh, path):
    """Raw staggered values: one row per face, ``component,i,j,value``."""
    nx, ny = mesh.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["component", "i", "j", "value"])
        for name, arr, ri, rj in (("u", state.u, range(0, nx + 1), range(1, ny + 1)),
                                  ("v", state.v, range(1, nx + 1), range(0, ny + 1)),
                                  ("U", state.U, range(0, nx + 1), range(1, ny + 1)),
                                  ("V", state.V, range(1, nx + 1), range(0, ny + 1))):
            for i in ri:
                for j in rj:
                    w.writerow([name, i, j, _fmt(arr[i, j])])


def export_field(state, mesh, fmt, path, raw=False):
    """Write ``state`` as ``csv`` or ``vtk``; ``raw`` adds a ``*.faces.csv`` dump."""
    fmt = fmt.lower()
    if fmt == "csv":
        write_csv(state, mesh, path)
    elif fmt == "vtk":
        write_vtk(state, mesh, path)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    if raw:
        write_faces(state, mesh, str(path) + ".faces.csv")
    return path
