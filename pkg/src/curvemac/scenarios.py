"""Benchmark scenarios and the post-processing that reads results off them.

Three set-ups are provided: flow between parallel plates (five refinement
levels), the lid-driven square cavity and a channel with a symmetric smooth
constriction on both walls. Post-processing works on a converged
:class:`~curvemac.solver.FlowState` and the mesh it lives on.
"""

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import BoundarySpec
from .errors import ConfigError, GeometryError, NoVortexError
from .grid import CurvilinearMesh, generate_grid
from .metrics import compute_metrics
from .solver import FluidProps, MACSolver, is_steady
from .spline import build_spline, sample_boundary

log = logging.getLogger(__name__)

PLATE_LEVELS = {"P1": (9, 5), "P2": (17, 9), "P3": (33, 17), "P4": (65, 33), "P5": (129, 65)}
POISEUILLE_MAX = 1.5

# primary vortex centres for the cavity
VORTEX_REFERENCE = {
    100: {"this_work": (0.6109, 0.7335), "ghia": (0.6172, 0.7344)},
    400: {"this_work": (0.5699, 0.6033), "ghia": (0.5547, 0.6055)},
    1000: {"this_work": (0.5528, 0.5698), "ghia": (0.5313, 0.5625)},
}
# centreline outlet speeds per plates level
PLATES_REFERENCE = {"P1": 1.1999, "P2": 1.3380, "P3": 1.4158, "P4": 1.4498, "P5": 1.5068}


@dataclass(frozen=True)
class Scenario:
    name: str
    mesh: CurvilinearMesh
    metrics: object
    props: FluidProps
    bcs: BoundarySpec
    dtau: float
    max_time: float
    steady_tol: float = 1e-6
    omega: float = 1.0
    # well under steady_tol once turned into a velocity change on fine cells
    pressure_tol: float = 1e-8
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.dtau > 0:
            raise ConfigError(f"time step must be positive, got {self.dtau}", key="dtau")
        self.bcs.validate(self.mesh.shape)

    def solver(self, **kw):
        kw.setdefault("omega", self.omega)
        kw.setdefault("pressure_tol", self.pressure_tol)
        return MACSolver(self.mesh, self.metrics, self.props, self.bcs, self.dtau, **kw)

    def run(self, max_time=None, max_steps=None, log_path=None, callback=None, **kw):
        """Run from rest; returns ``(state, history)``."""
        solver = self.solver(**kw)
        return solver.run_to_steady(
            steady_tol=self.steady_tol,
            max_time=self.max_time if max_time is None else max_time,
            max_steps=max_steps, log_path=log_path, callback=callback)


def build_parallel_plates(level="P5", re=100.0, length=8.0, height=1.0, max_time=60.0):
    """Channel of height H and length 8H; uniform inflow 1 m/s on the west side."""
    level = str(level).upper()
    if level not in PLATE_LEVELS:
        raise ConfigError(f"unknown plates level {level!r}; expected one of "
                          f"{', '.join(PLATE_LEVELS)}", key="level")
    n_xi, n_eta = PLATE_LEVELS[level]
    mesh = CurvilinearMesh.rectangle(length, height, n_xi, n_eta)
    props = FluidProps.from_reynolds(re, v_ref=1.0, l_ref=height)
    bcs = BoundarySpec.uniform(west=("CIPR", 1.0), east="CECO", south="CNEI", north="CNEI")
    dtau = 1e-2 if level in ("P1", "P2", "P3") else 5e-3
    return Scenario(f"plates-{level}", mesh, compute_metrics(mesh), props, bcs, dtau,
                    max_time, omega=1.9,
                    params={"level": level, "length": length, "height": height})


def build_lid_cavity(re=100.0, n=129, dtau=1e-3, max_time=None, omega=1.8):
    """Unit square, lid sliding at 1 m/s, no-slip elsewhere."""
    if not re > 0:
        raise ConfigError(f"Reynolds number must be positive, got {re}", key="re")
    if max_time is None:
        # longer spin-up as the flow gets more convective
        max_time = 60.0 if re <= 100 else 100.0 if re <= 400 else 150.0
    mesh = CurvilinearMesh.rectangle(1.0, 1.0, n, n)
    props = FluidProps.from_reynolds(re)
    bcs = BoundarySpec.uniform(north=("CLES", 1.0), south="CNEI", east="CNEI", west="CNEI")
    return Scenario(f"cavity-Re{re:g}", mesh, compute_metrics(mesh), props, bcs, dtau,
                    max_time, omega=omega, params={"re": re})


def stenosis_wall(length, depth, width, center, n_control=33):
    """Control points of the lower wall: a raised-cosine bump of height ``depth``."""
    x = np.linspace(0.0, length, n_control)
    s = np.clip((x - center) / width, -0.5, 0.5)
    y = 0.5 * depth * (1.0 + np.cos(2.0 * np.pi * s))
    return np.column_stack([x, y])


def stenosis_edges(n_xi=129, n_eta=20, length=8.0, height=1.0, depth=0.25, width=2.0,
                   center=None):
    """Sampled south, east, north, west edges of the constricted channel.

    ``depth`` is the fraction of the height each wall intrudes, ``width`` the
    bump length in units of the height, ``center`` its position (default L/3).
    """
    if not 0.0 <= depth < 0.5:
        raise GeometryError(f"constriction depth {depth} must be in [0, 0.5) of the height")
    center = length / 3.0 if center is None else center
    low = stenosis_wall(length, depth * height, width * height, center)
    south = sample_boundary(build_spline(low), n_xi)
    north = south.copy()
    north[:, 1] = height - south[:, 1]
    eta = np.linspace(0.0, height, n_eta)
    west = np.column_stack([np.zeros(n_eta), eta])
    east = np.column_stack([np.full(n_eta, length), eta])
    # ends of the walls are flat, so the corners coincide exactly
    south[0], south[-1] = (0.0, 0.0), (length, 0.0)
    north[0], north[-1] = (0.0, height), (length, height)
    return {"south": south, "east": east, "north": north, "west": west}


def build_stenosis(re=900.0, depth=0.25, width=2.0, center=None, length=8.0, height=1.0,
                   n_xi=129, n_eta=20, vel_in=0.1467, dtau=5e-3, max_time=400.0):
    edges = stenosis_edges(n_xi, n_eta, length, height, depth, width, center)
    mesh = generate_grid(edges)
    props = FluidProps.from_reynolds(re, v_ref=vel_in, l_ref=height)
    bcs = BoundarySpec.uniform(west=("CIPR", vel_in), east="CECO", south="CNEI", north="CNEI")
    return Scenario(f"stenosis-Re{re:g}", mesh, compute_metrics(mesh), props, bcs, dtau,
                    max_time, omega=1.9, params={"re": re, "depth": depth, "width": width,
                                      "center": length / 3.0 if center is None else center,
                                      "length": length, "height": height})


# -- post-processing ---------------------------------------------------------

def outlet_profile(state, mesh):
    """``(y, u)`` on the east boundary faces, ordered south to north."""
    nx, ny = mesh.shape
    y = 0.5 * (mesh.y[nx, :-1] + mesh.y[nx, 1:])
    return y, state.u[nx, 1:ny + 1].copy()


def centerline_velocity(state, mesh):
    """u at mid-height of the outlet, linearly interpolated between faces."""
    y, u = outlet_profile(state, mesh)
    mid = 0.5 * (mesh.y[-1, 0] + mesh.y[-1, -1])
    return float(np.interp(mid, y, u))


def poiseuille(y, height=1.0, mean=1.0):
    s = np.asarray(y, dtype=float) / height
    return 6.0 * mean * s * (1.0 - s)


def streamfunction(state, mesh):
    """Nodal streamfunction with psi = 0 at the south-west corner.

    Integrates the south-wall fluxes along xi, then the east-face fluxes up
    each xi = const line (psi_eta = U, psi_xi = -V).
    """
    nx, ny = mesh.shape
    psi = np.zeros((nx + 1, ny + 1))
    psi[1:, 0] = -np.cumsum(state.V[1:nx + 1, 0])
    psi[:, 1:] = psi[:, :1] + np.cumsum(state.U[0:nx + 1, 1:ny + 1], axis=1)
    return psi


def _bilinear(arr, a, b):
    a0 = int(np.clip(np.floor(a), 0, arr.shape[0] - 2))
    b0 = int(np.clip(np.floor(b), 0, arr.shape[1] - 2))
    s, t = a - a0, b - b0
    return ((1 - s) * (1 - t) * arr[a0, b0] + s * (1 - t) * arr[a0 + 1, b0]
            + (1 - s) * t * arr[a0, b0 + 1] + s * t * arr[a0 + 1, b0 + 1])


def _quadratic_peak(patch):
    """Offset of the stationary point of a quadratic fitted to a 3x3 patch."""
    d = np.array([-1.0, 0.0, 1.0])
    A, B = np.meshgrid(d, d, indexing="ij")
    X = np.column_stack([np.ones(9), A.ravel(), B.ravel(), A.ravel() ** 2,
                         (A * B).ravel(), B.ravel() ** 2])
    c = np.linalg.lstsq(X, patch.ravel(), rcond=None)[0]
    H = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]])
    try:
        off = np.linalg.solve(H, -c[1:3])
    except np.linalg.LinAlgError:
        return 0.0, 0.0
    return tuple(np.clip(off, -1.0, 1.0))


def locate_primary_vortex(state, mesh):
    """Physical ``(x, y)`` of the strongest interior streamfunction extremum."""
    psi = streamfunction(state, mesh)
    inner = np.abs(psi[1:-1, 1:-1])
    if inner.size == 0 or not inner.max() > 0.0:
        raise NoVortexError("streamfunction vanishes in the interior")
    a, b = np.unravel_index(np.argmax(inner), inner.shape)
    a, b = a + 1, b + 1
    patch = np.abs(psi[a - 1:a + 2, b - 1:b + 2])
    ring = np.delete(patch.ravel(), 4)
    if not np.all(ring < patch[1, 1]):
        raise NoVortexError(f"streamfunction extremum at node {(a, b)} is not isolated")
    da, db = _quadratic_peak(psi[a - 1:a + 2, b - 1:b + 2])
    return float(_bilinear(mesh.x, a + da, b + db)), float(_bilinear(mesh.y, a + da, b + db))


@dataclass(frozen=True)
class RecirculationZone:
    wall: str
    x_start: float
    x_end: float
    center: tuple
    n_cells: int


def _label(mask):
    """4-connected components of a boolean array (0 = background)."""
    labels = np.zeros(mask.shape, dtype=int)
    count = 0
    for seed in zip(*np.nonzero(mask)):
        if labels[seed]:
            continue
        count += 1
        stack = [seed]
        labels[seed] = count
        while stack:
            i, j = stack.pop()
            for ni, nj in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if (0 <= ni < mask.shape[0] and 0 <= nj < mask.shape[1]
                        and mask[ni, nj] and not labels[ni, nj]):
                    labels[ni, nj] = count
                    stack.append((ni, nj))
    return labels, count


def channel_throat(mesh):
    """Index of the xi line where the channel is narrowest."""
    width = mesh.y[:, -1] - mesh.y[:, 0]
    return int(np.argmin(width))


def detect_recirculation(state, mesh, x_min=None):
    """Wall-attached regions of reversed flow downstream of ``x_min``.

    ``x_min`` defaults to the throat (narrowest xi line). Reversal is judged
    on the contravariant flux along xi at cell centres.
    """
    nx, ny = mesh.shape
    xc, yc = mesh.cell_centers()
    if x_min is None:
        x_min = float(mesh.x[channel_throat(mesh), 0])
    Uc = 0.5 * (state.U[0:nx, 1:ny + 1] + state.U[1:nx + 1, 1:ny + 1])
    reverse = (Uc < 0.0) & (xc > x_min)
    labels, count = _label(reverse)
    psi = streamfunction(state, mesh)
    psi_c = 0.25 * (psi[:-1, :-1] + psi[1:, :-1] + psi[:-1, 1:] + psi[1:, 1:])
    zones = []
    for k in range(1, count + 1):
        region = labels == k
        for wall, row, sign in (("south", 0, 1.0), ("north", ny - 1, -1.0)):
            if not region[:, row].any():
                continue
            cols = np.flatnonzero(region[:, row])
            ii, jj = np.nonzero(region)
            # below the dividing streamline psi overshoots its wall value
            c = np.argmin(sign * psi_c[ii, jj])
            zones.append(RecirculationZone(
                wall=wall,
                x_start=float(mesh.x[cols[0], row if wall == "south" else ny]),
                x_end=float(mesh.x[cols[-1] + 1, row if wall == "south" else ny]),
                center=(float(xc[ii[c], jj[c]]), float(yc[ii[c], jj[c]])),
                n_cells=int(region.sum())))
    zones.sort(key=lambda z: (z.wall, z.x_start))
    return zones


def outflow_balance(state, mesh):
    """(inflow, outflow) volume fluxes through the west and east sides."""
    nx, ny = mesh.shape
    return float(state.U[0, 1:ny + 1].sum()), float(state.U[nx, 1:ny + 1].sum())


# -- convergence study -------------------------------------------------------

@dataclass(frozen=True)
class StudyRow:
    level: str
    v_num: float
    h_x: float
    h_y: float
    steady: bool

    @property
    def error(self):
        return abs(POISEUILLE_MAX - self.v_num)


@dataclass
class StudyResult:
    rows: list
    complete: bool

    @property
    def monotone(self):
        err = [r.error for r in self.rows]
        return all(b < a for a, b in zip(err, err[1:]))


def convergence_study(levels=tuple(PLATE_LEVELS), max_time=60.0, csv_path=None,
                      runner=None):
    """Run each plates level to steady state and tabulate the outlet centreline speed.

    Stops at the first level that fails to reach steady state and returns the
    partial table with ``complete = False``. ``runner(scenario)`` may replace
    the default ``scenario.run()``.
    """
    rows = []
    complete = True
    for level in levels:
        sc = build_parallel_plates(level, max_time=max_time)
        state, history = sc.run() if runner is None else runner(sc)
        steady = is_steady(history, sc.steady_tol)
        nx, ny = sc.mesh.shape
        L, H = sc.params["length"], sc.params["height"]
        rows.append(StudyRow(level, centerline_velocity(state, sc.mesh), L / nx, H / ny, steady))
        log.info("%s: V = %.4f (steady: %s)", level, rows[-1].v_num, steady)
        if not steady:
            complete = False
            break
    result = StudyResult(rows, complete)
    if csv_path is not None:
        write_study_table(csv_path, result)
    return result


def write_study_table(path, result):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["mesh", "V_l_num", "h_x", "h_y", "h_x*h_y", "error", "steady"])
        for r in result.rows:
            w.writerow([r.level, f"{r.v_num:.4f}", repr(r.h_x), repr(r.h_y),
                        repr(r.h_x * r.h_y), f"{r.error:.4f}", r.steady])


def write_vortex_table(path, centers):
    """``centers`` maps Reynolds number to the computed (x, y)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["reference"] + [f"Re={re:g}" for re in centers])
        w.writerow(["computed"] + [f"({x:.4f}, {y:.4f})" for x, y in centers.values()])
        for ref in ("this_work", "ghia"):
            w.writerow([ref] + [
                "(%.4f, %.4f)" % VORTEX_REFERENCE[int(re)][ref]
                if int(re) in VORTEX_REFERENCE else "" for re in centers])


def write_profile(path, state, mesh):
    y, u = outlet_profile(state, mesh)
    H = mesh.y[-1, -1] - mesh.y[-1, 0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y", "u", "u_analytic"])
        for yy, uu, ua in zip(y, u, poiseuille(y - mesh.y[-1, 0], H)):
            w.writerow([repr(float(yy)), repr(float(uu)), repr(float(ua))])
