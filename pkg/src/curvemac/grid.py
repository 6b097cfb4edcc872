"""Structured boundary-fitted grid generation.

Interior nodes are seeded by transfinite interpolation of the four boundary
curves and then relaxed with Gauss-Seidel sweeps of an elliptic system posed
in computational space (unit spacing in both directions). Boundary nodes are
never touched by the smoothing.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import GeometryError, MeshQualityError, TopologyError
from .spline import EDGE_ORDER

log = logging.getLogger(__name__)

CORNER_TOL = 1e-9


@dataclass(frozen=True)
class CurvilinearMesh:
    """Node coordinates ``x[i, j]``, ``y[i, j]`` with i along xi, j along eta."""

    x: np.ndarray
    y: np.ndarray
    residual_history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 2:
            raise TopologyError("x and y must be 2-D arrays of equal shape")
        if min(self.x.shape) < 2:
            raise TopologyError("a mesh needs at least 2 lines in each direction")
        self.x.setflags(write=False)
        self.y.setflags(write=False)

    @property
    def n_xi(self):
        return self.x.shape[0]

    @property
    def n_eta(self):
        return self.x.shape[1]

    @property
    def shape(self):
        """Cell counts ``(nx, ny)``."""
        return self.n_xi - 1, self.n_eta - 1

    @property
    def iterations(self):
        return len(self.residual_history)

    def cell_centers(self):
        xc = 0.25 * (self.x[:-1, :-1] + self.x[1:, :-1] + self.x[:-1, 1:] + self.x[1:, 1:])
        yc = 0.25 * (self.y[:-1, :-1] + self.y[1:, :-1] + self.y[:-1, 1:] + self.y[1:, 1:])
        return xc, yc

    @classmethod
    def from_function(cls, n_xi, n_eta, fn):
        """Mesh with nodes ``fn(i, j)`` evaluated on integer index arrays."""
        i, j = np.meshgrid(np.arange(n_xi, dtype=float), np.arange(n_eta, dtype=float),
                           indexing="ij")
        x, y = fn(i, j)
        return cls(np.array(x, dtype=float), np.array(y, dtype=float))

    @classmethod
    def rectangle(cls, length, height, n_xi, n_eta, x0=0.0, y0=0.0):
        return cls.from_function(
            n_xi, n_eta,
            lambda i, j: (x0 + length * i / (n_xi - 1), y0 + height * j / (n_eta - 1)),
        )


@dataclass
class GridQuality:
    min_jacobian: float
    max_jacobian: float
    min_area: float
    n_folded: int
    folded: list

    @property
    def valid(self):
        return self.n_folded == 0


def _edges_tuple(edges):
    if isinstance(edges, dict):
        return tuple(np.asarray(edges[k], dtype=float) for k in EDGE_ORDER)
    edges = tuple(np.asarray(e, dtype=float) for e in edges)
    if len(edges) != 4:
        raise TopologyError(f"expected 4 edges, got {len(edges)}")
    return edges


def _check_edges(south, east, north, west):
    for name, e in zip(EDGE_ORDER, (south, east, north, west)):
        if e.ndim != 2 or e.shape[1] != 2 or len(e) < 2:
            raise TopologyError(f"{name} edge must be an (n >= 2, 2) point array")
    if len(south) != len(north):
        raise TopologyError(f"south/north point counts differ: {len(south)} vs {len(north)}")
    if len(west) != len(east):
        raise TopologyError(f"west/east point counts differ: {len(west)} vs {len(east)}")
    corners = {
        "south-west": (south[0], west[0]),
        "south-east": (south[-1], east[0]),
        "north-west": (north[0], west[-1]),
        "north-east": (north[-1], east[-1]),
    }
    for name, (a, b) in corners.items():
        if np.max(np.abs(a - b)) > CORNER_TOL:
            raise GeometryError(f"{name} corner mismatch: {a} vs {b}")


def transfinite_interpolation(south, east, north, west):
    """Bilinearly blended (Coons) seed grid, boundaries copied exactly."""
    n_xi, n_eta = len(south), len(west)
    s = np.linspace(0.0, 1.0, n_xi)[:, None]
    t = np.linspace(0.0, 1.0, n_eta)[None, :]
    out = []
    for c in (0, 1):
        S, N = south[:, c][:, None], north[:, c][:, None]
        W, E = west[:, c][None, :], east[:, c][None, :]
        blend = ((1 - t) * S + t * N + (1 - s) * W + s * E
                 - ((1 - s) * (1 - t) * south[0, c] + s * (1 - t) * south[-1, c]
                    + (1 - s) * t * north[0, c] + s * t * north[-1, c]))
        blend[:, 0] = south[:, c]
        blend[:, -1] = north[:, c]
        blend[0, 1:-1] = west[1:-1, c]
        blend[-1, 1:-1] = east[1:-1, c]
        out.append(np.ascontiguousarray(blend))
    return out[0], out[1]


def generate_grid(edges, max_iter=1000, tol=1e-4, method="laplace"):
    """Build a mesh from four sampled edges (south, east, north, west).

    ``method`` is ``"laplace"`` (x and y harmonic in computational space) or
    ``"winslow"`` (the inverse-Laplace system with metric coefficients).
    """
    south, east, north, west = _edges_tuple(edges)
    _check_edges(south, east, north, west)
    if method not in ("laplace", "winslow"):
        raise ValueError(f"unknown smoothing method {method!r}")
    x, y = transfinite_interpolation(south, east, north, west)
    history = kernels.smooth_grid(x, y, int(max_iter), float(tol), method == "winslow")
    if history and history[-1] >= tol:
        log.warning("grid smoothing stopped at %d sweeps with update %.3e >= %.1e",
                    len(history), history[-1], tol)
    else:
        log.info("grid smoothing converged in %d sweeps", len(history))
    mesh = CurvilinearMesh(x, y, tuple(history))
    q = validate_grid(mesh)
    if not q.valid:
        raise MeshQualityError(f"{q.n_folded} folded cell(s), first at {q.folded[0]}",
                               location=q.folded[0])
    return mesh


def cell_determinants(mesh):
    """x_xi*y_eta - x_eta*y_xi at cell centres, shape (nx, ny)."""
    x, y = mesh.x, mesh.y
    xxi = 0.5 * (x[1:, :-1] + x[1:, 1:] - x[:-1, :-1] - x[:-1, 1:])
    yxi = 0.5 * (y[1:, :-1] + y[1:, 1:] - y[:-1, :-1] - y[:-1, 1:])
    xeta = 0.5 * (x[:-1, 1:] + x[1:, 1:] - x[:-1, :-1] - x[1:, :-1])
    yeta = 0.5 * (y[:-1, 1:] + y[1:, 1:] - y[:-1, :-1] - y[1:, :-1])
    return xxi * yeta - xeta * yxi


def validate_grid(mesh):
    x, y = mesh.x, mesh.y
    det = cell_determinants(mesh)
    # corner cross products catch folds that the centre determinant averages away
    quad = [(x[:-1, :-1], y[:-1, :-1]), (x[1:, :-1], y[1:, :-1]),
            (x[1:, 1:], y[1:, 1:]), (x[:-1, 1:], y[:-1, 1:])]
    bad = det <= 0.0
    area = np.zeros_like(det)
    for k in range(4):
        (xa, ya), (xb, yb), (xc, yc) = quad[k - 1], quad[k], quad[(k + 1) % 4]
        cross = (xb - xa) * (yc - yb) - (yb - ya) * (xc - xb)
        bad |= cross <= 0.0
        xk, yk = quad[k]
        xn, yn = quad[(k + 1) % 4]
        area += 0.5 * (xk * yn - xn * yk)
    with np.errstate(divide="ignore"):
        jac = np.where(det > 0.0, 1.0 / np.where(det > 0.0, det, 1.0), np.inf)
    good = ~bad
    folded = [tuple(int(v) for v in ij) for ij in np.argwhere(bad)]
    return GridQuality(
        min_jacobian=float(jac[good].min()) if good.any() else float("nan"),
        max_jacobian=float(jac[good].max()) if good.any() else float("nan"),
        min_area=float(area.min()),
        n_folded=len(folded),
        folded=folded,
    )


def write_mesh(path, mesh):
    with open(path, "w") as fh:
        fh.write(f"{mesh.n_xi} {mesh.n_eta}\n")
        for i in range(mesh.n_xi):
            for j in range(mesh.n_eta):
                fh.write(f"{i} {j} {float(mesh.x[i, j])!r} {float(mesh.y[i, j])!r}\n")


def read_mesh(path):
    with open(path) as fh:
        n_xi, n_eta = (int(v) for v in fh.readline().split())
        x = np.empty((n_xi, n_eta))
        y = np.empty((n_xi, n_eta))
        for line in fh:
            if not line.strip():
                continue
            i, j, xv, yv = line.split()
            x[int(i), int(j)] = float(xv)
            y[int(i), int(j)] = float(yv)
    return CurvilinearMesh(x, y)
