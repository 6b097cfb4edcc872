"""Transformation metrics on the staggered layout.

Locations and their array indexing (``nx, ny`` = cell counts):

* ``center[i, j]`` -- cell centres, i in 0..nx+1, j in 0..ny+1 (ring of ghosts)
* ``eface[i, j]``  -- east face of cell (i, j), same shape as the u array
* ``nface[i, j]``  -- north face of cell (i, j), same shape as the v array
* ``node[a, b]``   -- mesh nodes, a in 0..nx, b in 0..ny; the north-east
  corner of cell (i, j) is node (i, j)

Ghost values come from nodes extrapolated quadratically past the boundary,
which turns the central differences into one-sided second-order ones there.
"""

from dataclasses import dataclass

import numpy as np

from .errors import MeshQualityError


@dataclass(frozen=True)
class Metrics:
    """Coordinate derivatives and derived coefficients at one family of points."""

    x_xi: np.ndarray
    x_eta: np.ndarray
    y_xi: np.ndarray
    y_eta: np.ndarray
    J: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    @classmethod
    def from_derivatives(cls, x_xi, x_eta, y_xi, y_eta):
        det = x_xi * y_eta - x_eta * y_xi
        with np.errstate(divide="ignore"):
            J = 1.0 / det
        arrays = [x_xi, x_eta, y_xi, y_eta, J,
                  x_eta ** 2 + y_eta ** 2,
                  x_xi * x_eta + y_xi * y_eta,
                  x_xi ** 2 + y_xi ** 2]
        arrays = [np.ascontiguousarray(a, dtype=float) for a in arrays]
        for a in arrays:
            a.setflags(write=False)
        return cls(*arrays)

    @property
    def det(self):
        return self.x_xi * self.y_eta - self.x_eta * self.y_xi


@dataclass(frozen=True)
class MetricField:
    center: Metrics
    eface: Metrics
    nface: Metrics
    node: Metrics
    shape: tuple

    def check(self):
        """Raise MeshQualityError at the first non-positive Jacobian."""
        nx, ny = self.shape
        regions = [
            ("cell", self.center, (slice(1, nx + 1), slice(1, ny + 1)), (1, 1)),
            ("east face", self.eface, (slice(0, nx + 1), slice(1, ny + 1)), (0, 1)),
            ("north face", self.nface, (slice(1, nx + 1), slice(0, ny + 1)), (1, 0)),
            ("node", self.node, (slice(None), slice(None)), (0, 0)),
        ]
        for name, m, sl, off in regions:
            det = m.det[sl]
            bad = ~(det > 0.0)
            if bad.any():
                i, j = np.argwhere(bad)[0]
                loc = (int(i) + off[0], int(j) + off[1])
                raise MeshQualityError(f"non-positive Jacobian at {name} {loc}", location=loc)


def _extrapolate(a, axis):
    """Pad ``a`` by two quadratically extrapolated layers on both ends of ``axis``."""
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    lo, hi = [a[0], a[1] if n > 1 else a[0]], [a[-1], a[-2] if n > 1 else a[-1]]
    if n >= 3:
        lo.append(a[2])
        hi.append(a[-3])
        g1 = 3 * lo[0] - 3 * lo[1] + lo[2]
        g0 = 3 * g1 - 3 * lo[0] + lo[1]
        h1 = 3 * hi[0] - 3 * hi[1] + hi[2]
        h0 = 3 * h1 - 3 * hi[0] + hi[1]
    else:
        g1 = 2 * lo[0] - lo[1]
        g0 = 2 * g1 - lo[0]
        h1 = 2 * hi[0] - hi[1]
        h0 = 2 * h1 - hi[0]
    out = np.concatenate([g0[None], g1[None], a, h1[None], h0[None]])
    return np.moveaxis(out, 0, axis)


def padded_nodes(mesh):
    xg = _extrapolate(_extrapolate(np.asarray(mesh.x, float), 0), 1)
    yg = _extrapolate(_extrapolate(np.asarray(mesh.y, float), 0), 1)
    return xg, yg


def _metrics_at(xg, yg, nx, ny):
    out = {}
    for name, g in (("x", xg), ("y", yg)):
        # cell (i, j): corners g[i+1.., j+1..]
        sw = g[1:nx + 3, 1:ny + 3]
        se = g[2:nx + 4, 1:ny + 3]
        nw = g[1:nx + 3, 2:ny + 4]
        ne = g[2:nx + 4, 2:ny + 4]
        out["c", name, "xi"] = 0.5 * (se + ne - sw - nw)
        out["c", name, "eta"] = 0.5 * (nw + ne - sw - se)
        # east face (i, j): between nodes g[i+2, j+1] and g[i+2, j+2]
        out["e", name, "eta"] = g[2:nx + 4, 2:ny + 4] - g[2:nx + 4, 1:ny + 3]
        out["e", name, "xi"] = 0.25 * (g[3:nx + 5, 2:ny + 4] + g[3:nx + 5, 1:ny + 3]
                                       - g[1:nx + 3, 2:ny + 4] - g[1:nx + 3, 1:ny + 3])
        # north face (i, j): between nodes g[i+1, j+2] and g[i+2, j+2]
        out["n", name, "xi"] = g[2:nx + 4, 2:ny + 4] - g[1:nx + 3, 2:ny + 4]
        out["n", name, "eta"] = 0.25 * (g[1:nx + 3, 3:ny + 5] + g[2:nx + 4, 3:ny + 5]
                                        - g[1:nx + 3, 1:ny + 3] - g[2:nx + 4, 1:ny + 3])
        # node (a, b) sits at g[a+2, b+2]
        out["v", name, "xi"] = 0.5 * (g[3:nx + 4, 2:ny + 3] - g[1:nx + 2, 2:ny + 3])
        out["v", name, "eta"] = 0.5 * (g[2:nx + 3, 3:ny + 4] - g[2:nx + 3, 1:ny + 2])
    fields = {}
    for loc in "cenv":
        fields[loc] = Metrics.from_derivatives(out[loc, "x", "xi"], out[loc, "x", "eta"],
                                               out[loc, "y", "xi"], out[loc, "y", "eta"])
    return fields


def compute_metrics(mesh, check=True):
    nx, ny = mesh.n_xi - 1, mesh.n_eta - 1
    xg, yg = padded_nodes(mesh)
    f = _metrics_at(xg, yg, nx, ny)
    mf = MetricField(center=f["c"], eface=f["e"], nface=f["n"], node=f["v"], shape=(nx, ny))
    if check:
        mf.check()
    return mf


def contravariant_velocity(u, v, m):
    """Contravariant components ``(U, V)`` from Cartesian ``(u, v)`` at points with metrics ``m``."""
    return u * m.y_eta - v * m.x_eta, -u * m.y_xi + v * m.x_xi


def write_metrics(path, mesh, metrics):
    """Debug dump: the mesh text format with cell-centre metric columns appended."""
    nx, ny = metrics.shape
    c = metrics.center
    xc, yc = mesh.cell_centers()
    with open(path, "w") as fh:
        fh.write(f"{nx} {ny}\n")
        for i in range(nx):
            for j in range(ny):
                k = (i + 1, j + 1)
                vals = (xc[i, j], yc[i, j], c.x_xi[k], c.x_eta[k], c.y_xi[k], c.y_eta[k],
                        c.J[k], c.alpha[k], c.beta[k], c.gamma[k])
                fh.write(f"{i} {j} " + " ".join(repr(float(v)) for v in vals) + "\n")
