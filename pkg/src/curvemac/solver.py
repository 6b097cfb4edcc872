"""Simplified MAC time stepping on curvilinear grids.

Storage (``nx, ny`` = interior cell counts, one ghost layer all round, all
arrays shaped ``(nx + 2, ny + 2)``):

* ``p[i, j]`` -- pressure at the centre of cell (i, j)
* ``u[i, j]`` -- Cartesian x-velocity on the east face of cell (i, j)
* ``v[i, j]`` -- Cartesian y-velocity on the north face of cell (i, j)
* ``U[i, j]``, ``V[i, j]`` -- contravariant fluxes on the same faces

One step: explicit predictor ``F, G`` (donor-cell convection, central
diffusion), a Gauss-Seidel solve of the discrete pressure equation that
makes the contravariant fluxes divergence free, then the velocity update.
"""

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from types import SimpleNamespace

import numpy as np

from . import kernels
from .boundary import apply_pressure_bc, apply_velocity_bc
from .errors import ConfigError, DivergenceError, NonConvergenceError

log = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ("step", "tau", "div_residual", "pressure_iters", "max_du", "max_dv",
                      "cfl_estimate")


@dataclass(frozen=True)
class FluidProps:
    rho: float
    mu: float
    Re: float = None

    def __post_init__(self):
        if not (self.rho > 0 and self.mu > 0):
            raise ConfigError("density and viscosity must be positive")

    @property
    def nu(self):
        return self.mu / self.rho

    @classmethod
    def from_reynolds(cls, Re, v_ref=1.0, l_ref=1.0, rho=1.0):
        return cls(rho=rho, mu=rho * v_ref * l_ref / Re, Re=Re)


@dataclass
class FlowState:
    u: np.ndarray
    v: np.ndarray
    p: np.ndarray
    U: np.ndarray
    V: np.ndarray
    tau: float = 0.0
    k: int = 0

    @classmethod
    def quiescent(cls, shape):
        nx, ny = shape
        z = lambda: np.zeros((nx + 2, ny + 2))
        return cls(z(), z(), z(), z(), z())

    @property
    def shape(self):
        return self.p.shape[0] - 2, self.p.shape[1] - 2

    def copy(self):
        return replace(self, u=self.u.copy(), v=self.v.copy(), p=self.p.copy(),
                       U=self.U.copy(), V=self.V.copy())


def fou_face_value(upstream, downstream, convecting):
    """Donor-cell value: ``upstream`` unless the convecting velocity is negative."""
    return np.where(np.asarray(convecting) < 0.0, downstream, upstream)


def _edge(a):
    return np.pad(a, 1, mode="edge")


def v_at_efaces(v):
    """Four-point average of a north-face field onto east faces (same array shape)."""
    g = _edge(v)
    # east face (i, j) <- north faces (i, j-1), (i, j), (i+1, j-1), (i+1, j)
    return 0.25 * (g[1:-1, :-2] + g[1:-1, 1:-1] + g[2:, :-2] + g[2:, 1:-1])


def u_at_nfaces(u):
    """Four-point average of an east-face field onto north faces."""
    g = _edge(u)
    # north face (i, j) <- east faces (i-1, j), (i, j), (i-1, j+1), (i, j+1)
    return 0.25 * (g[:-2, 1:-1] + g[1:-1, 1:-1] + g[:-2, 2:] + g[1:-1, 2:])


def contravariant_fluxes(u, v, metrics):
    """Contravariant face fluxes ``(U, V)`` from staggered Cartesian velocities."""
    e, n = metrics.eface, metrics.nface
    U = u * e.y_eta - v_at_efaces(v) * e.x_eta
    V = -u_at_nfaces(u) * n.y_xi + v * n.x_xi
    return U, V


def refresh_fluxes(state, metrics):
    state.U, state.V = contravariant_fluxes(state.u, state.v, metrics)
    return state


def _sel(cell):
    """Map a 1-based cell (i, j) onto the 0-based face arrays returned below."""
    return (cell[0] - 1, cell[1] - 1)


def convective_term_u(state, metrics=None, cell=None):
    """Donor-cell C(u) on east faces i = 1..nx, j = 1..ny, shape (nx, ny)."""
    u, U, V = state.u, state.U, state.V
    c, n = slice(1, -1), slice(2, None)
    m = slice(0, -2)
    UE = 0.5 * (U[c, c] + U[n, c])
    UP = 0.5 * (U[m, c] + U[c, c])
    Vne = 0.5 * (V[c, c] + V[n, c])
    Vse = 0.5 * (V[c, m] + V[n, m])
    uE = fou_face_value(u[c, c], u[n, c], UE)
    uP = fou_face_value(u[m, c], u[c, c], UP)
    une = fou_face_value(u[c, c], u[c, n], Vne)
    use = fou_face_value(u[c, m], u[c, c], Vse)
    out = UE * uE - UP * uP + Vne * une - Vse * use
    return out if cell is None else float(out[_sel(cell)])


def convective_term_v(state, metrics=None, cell=None):
    """Donor-cell C(v) on north faces i = 1..nx, j = 1..ny, shape (nx, ny)."""
    v, U, V = state.v, state.U, state.V
    c, n, m = slice(1, -1), slice(2, None), slice(0, -2)
    Une = 0.5 * (U[c, c] + U[c, n])
    Unw = 0.5 * (U[m, c] + U[m, n])
    VN = 0.5 * (V[c, c] + V[c, n])
    VP = 0.5 * (V[c, m] + V[c, c])
    vne = fou_face_value(v[c, c], v[n, c], Une)
    vnw = fou_face_value(v[m, c], v[c, c], Unw)
    vN = fou_face_value(v[c, c], v[c, n], VN)
    vP = fou_face_value(v[c, m], v[c, c], VP)
    out = Une * vne - Unw * vnw + VN * vN - VP * vP
    return out if cell is None else float(out[_sel(cell)])


def diffusive_term_u(state, metrics, cell=None):
    """Central-difference V(u) on east faces i = 1..nx, j = 1..ny."""
    u = state.u
    C, N = metrics.center, metrics.node
    c, n, m = slice(1, -1), slice(2, None), slice(0, -2)
    # u on the north face of every cell (a, b), a in 1..nx+1, b in 0..ny
    un = 0.25 * (u[:-1, :-1] + u[1:, :-1] + u[:-1, 1:] + u[1:, 1:])
    # index un[a-1, b]
    u_n = un[0:-1, 1:]
    u_s = un[0:-1, :-1]
    u_nee = un[1:, 1:]
    u_see = un[1:, :-1]
    Ja_E, Jb_E = (C.J * C.alpha)[n, c], (C.J * C.beta)[n, c]
    Ja_P, Jb_P = (C.J * C.alpha)[c, c], (C.J * C.beta)[c, c]
    Jg, Jb = N.J * N.gamma, N.J * N.beta
    # node (i, j) is the ne corner, node (i, j-1) the se corner
    Jg_ne, Jb_ne = Jg[1:, 1:], Jb[1:, 1:]
    Jg_se, Jb_se = Jg[1:, :-1], Jb[1:, :-1]
    ue = u[c, c]
    exp1 = (Ja_E * (u[n, c] - ue) - Jb_E * (u_nee - u_see)
            - Ja_P * (ue - u[m, c]) + Jb_P * (u_n - u_s))
    exp2 = (Jg_ne * (u[c, n] - ue) - Jb_ne * (u_nee - u_n)
            - Jg_se * (ue - u[c, m]) + Jb_se * (u_see - u_s))
    out = exp1 + exp2
    return out if cell is None else float(out[_sel(cell)])


def diffusive_term_v(state, metrics, cell=None):
    """Central-difference V(v) on north faces i = 1..nx, j = 1..ny."""
    v = state.v
    C, N = metrics.center, metrics.node
    c, n, m = slice(1, -1), slice(2, None), slice(0, -2)
    # v on the east face of every cell (a, b), a in 0..nx, b in 1..ny+1
    ve = 0.25 * (v[:-1, :-1] + v[:-1, 1:] + v[1:, :-1] + v[1:, 1:])
    # index ve[a, b-1]
    v_e = ve[1:, :-1]
    v_w = ve[:-1, :-1]
    v_nne = ve[1:, 1:]
    v_nnw = ve[:-1, 1:]
    Ja, Jb = N.J * N.alpha, N.J * N.beta
    # node (i, j) is the ne corner, node (i-1, j) the nw corner
    Ja_ne, Jb_ne = Ja[1:, 1:], Jb[1:, 1:]
    Ja_nw, Jb_nw = Ja[:-1, 1:], Jb[:-1, 1:]
    Jg_N, Jb_N = (C.J * C.gamma)[c, n], (C.J * C.beta)[c, n]
    Jg_P, Jb_P = (C.J * C.gamma)[c, c], (C.J * C.beta)[c, c]
    vn = v[c, c]
    exp3 = (Ja_ne * (v[n, c] - vn) - Jb_ne * (v_nne - v_e)
            - Ja_nw * (vn - v[m, c]) + Jb_nw * (v_nnw - v_w))
    exp4 = (Jg_N * (v[c, n] - vn) - Jb_N * (v_nne - v_nnw)
            - Jg_P * (vn - v[c, m]) + Jb_P * (v_e - v_w))
    out = exp3 + exp4
    return out if cell is None else float(out[_sel(cell)])


def assemble_explicit(state, metrics, props, dtau, faces=None):
    """Predictor fields ``(F, G)``, shaped like ``u`` and ``v``.

    ``faces`` is a pair of boolean masks selecting where the momentum
    equations are applied (default: all interior faces); elsewhere F and G
    keep the boundary/ghost velocities.
    """
    nx, ny = state.shape
    if faces is None:
        mu = np.zeros((nx + 2, ny + 2), dtype=bool)
        mv = np.zeros_like(mu)
        mu[1:nx, 1:ny + 1] = True
        mv[1:nx + 1, 1:ny] = True
    else:
        mu, mv = faces
    nu = props.nu
    F = state.u.copy()
    G = state.v.copy()
    Je = metrics.eface.J[1:-1, 1:-1]
    Jn = metrics.nface.J[1:-1, 1:-1]
    fu = Je * dtau * (-convective_term_u(state) + nu * diffusive_term_u(state, metrics))
    fv = Jn * dtau * (-convective_term_v(state) + nu * diffusive_term_v(state, metrics))
    iu = mu[1:-1, 1:-1]
    iv = mv[1:-1, 1:-1]
    F[1:-1, 1:-1][iu] += fu[iu]
    G[1:-1, 1:-1][iv] += fv[iv]
    return F, G


# --------------------------------------------------------------------------
# pressure equation
# --------------------------------------------------------------------------

def _corner(p):
    """Pressure at node (a, b) = mean of the four cells around it, a, b in 0..n."""
    return 0.25 * (p[:-1, :-1] + p[1:, :-1] + p[:-1, 1:] + p[1:, 1:])


def pressure_face_terms(p, metrics):
    """Pressure contributions (per unit dtau/rho) to U on east and V on north faces.

    ``p`` must carry up-to-date ghost values. Returns two (nx+2, ny+2) arrays,
    valid on east faces i = 0..nx, j = 1..ny and north faces i = 1..nx, j = 0..ny.
    """
    e, n = metrics.eface, metrics.nface
    pc = _corner(p)  # pc[a, b] -> node (a, b)
    tu = np.zeros_like(p)
    tv = np.zeros_like(p)
    # east face (i, j): p_xi = p[i+1, j] - p[i, j]; p_eta = node(i, j) - node(i, j-1)
    p_xi = p[1:, 1:-1] - p[:-1, 1:-1]
    p_eta = pc[:, 1:] - pc[:, :-1]
    s = (slice(0, -1), slice(1, -1))
    tu[s] = e.J[s] * (-e.alpha[s] * p_xi + e.beta[s] * p_eta)
    # north face (i, j): p_xi = node(i, j) - node(i-1, j); p_eta = p[i, j+1] - p[i, j]
    p_xi = pc[1:, :] - pc[:-1, :]
    p_eta = p[1:-1, 1:] - p[1:-1, :-1]
    s = (slice(1, -1), slice(0, -1))
    tv[s] = n.J[s] * (n.beta[s] * p_xi - n.gamma[s] * p_eta)
    return tu, tv


def flux_divergence(U, V):
    """U_e - U_w + V_n - V_s for every interior cell, shape (nx, ny)."""
    return U[1:-1, 1:-1] - U[:-2, 1:-1] + V[1:-1, 1:-1] - V[1:-1, :-2]


def apply_pressure_operator(p_interior, metrics, scale):
    """Directly evaluate the discrete pressure operator (interior faces only)."""
    nx, ny = metrics.shape
    p = np.zeros((nx + 2, ny + 2))
    p[1:-1, 1:-1] = p_interior
    apply_pressure_bc(p)
    tu, tv = pressure_face_terms(p, metrics)
    tu[0, :] = 0.0
    tu[nx, :] = 0.0
    tv[:, 0] = 0.0
    tv[:, ny] = 0.0
    return scale * flux_divergence(tu, tv)


def pressure_coefficients(metrics, scale):
    """Folded 9-point stencil of the pressure operator, shape (9, nx, ny).

    Entry ``k = 3 * (di + 1) + (dj + 1)`` multiplies the neighbour at offset
    ``(di, dj)``. Ghost cells are eliminated with the Neumann condition.
    """
    key = ("pressure", float(scale))
    cache = metrics.__dict__.setdefault("_cache", {})
    if key in cache:
        return cache[key]
    nx, ny = metrics.shape
    e, n = metrics.eface, metrics.nface
    coef = np.zeros((9, nx, ny))
    I, Jg = np.meshgrid(np.arange(1, nx + 1), np.arange(1, ny + 1), indexing="ij")

    def scatter(fi, fj, ri, rj, terms, sign):
        # terms are offsets from the face's first cell (fi, fj); row is cell (ri, rj)
        for di, dj, w in terms:
            ti = np.clip(fi + di, 1, nx)
            tj = np.clip(fj + dj, 1, ny)
            k = 3 * (ti - ri + 1) + (tj - rj + 1)
            np.add.at(coef, (k, ri - 1, rj - 1), sign * w)

    # interior east faces (i, j), i = 1..nx-1, between cells (i, j) and (i+1, j)
    fi, fj = I[:-1, :], Jg[:-1, :]
    a = scale * e.J[fi, fj] * e.alpha[fi, fj]
    b = 0.25 * scale * e.J[fi, fj] * e.beta[fi, fj]
    # flux = J (-alpha p_xi + beta p_eta); p_xi = p_E - p_P
    terms = [(0, 0, a), (1, 0, -a), (0, 1, b), (1, 1, b), (0, -1, -b), (1, -1, -b)]
    scatter(fi, fj, fi, fj, terms, 1.0)
    scatter(fi, fj, fi + 1, fj, terms, -1.0)
    # interior north faces (i, j), j = 1..ny-1, between cells (i, j) and (i, j+1)
    fi, fj = I[:, :-1], Jg[:, :-1]
    g = scale * n.J[fi, fj] * n.gamma[fi, fj]
    b = 0.25 * scale * n.J[fi, fj] * n.beta[fi, fj]
    # flux = J (beta p_xi - gamma p_eta); p_eta = p_N - p_P
    terms = [(0, 0, g), (0, 1, -g), (1, 0, b), (1, 1, b), (-1, 0, -b), (-1, 1, -b)]
    scatter(fi, fj, fi, fj, terms, 1.0)
    scatter(fi, fj, fi, fj + 1, terms, -1.0)
    coef = np.ascontiguousarray(coef)
    coef.setflags(write=False)
    cache[key] = coef
    return coef


def predicted_fluxes(F, G, metrics):
    return contravariant_fluxes(F, G, metrics)


def solve_pressure(F, G, metrics, props, dtau, tol=1e-6, max_iter=200000, p0=None,
                   omega=1.0, outlets=None):
    """Gauss-Seidel solve of the discrete pressure equation.

    The equation is written in flux units, so its residual is exactly the
    continuity residual U_e - U_w + V_n - V_s the corrected fluxes will have.
    Returns ``(p, iterations, residual)`` with ``p`` carrying Neumann ghosts.
    """
    nx, ny = metrics.shape
    scale = dtau / props.rho
    Us, Vs = predicted_fluxes(F, G, metrics)
    b = np.ascontiguousarray(-flux_divergence(Us, Vs))
    coef = pressure_coefficients(metrics, scale)
    p = np.zeros((nx + 2, ny + 2)) if p0 is None else np.array(p0, dtype=float)
    pin = np.ascontiguousarray(p[1:-1, 1:-1])
    # with Neumann conditions all round, A p = b needs zero net boundary flux
    net = float(b.sum())
    if not outlets and abs(net) > max(tol * b.size, 1e-12 * float(np.abs(b).sum())):
        raise NonConvergenceError(
            f"net boundary flux {-net:.3e} has no outlet to leave through; the pressure "
            "equation has no solution (is a sliding wall not aligned with x?)",
            residual=abs(net) / b.size, iterations=0)
    its, res = kernels.gauss_seidel_9pt(coef, b, pin, float(omega), float(tol), int(max_iter))
    if its > max_iter:
        raise NonConvergenceError(
            f"pressure solve did not converge in {max_iter} sweeps (residual {res:.3e})",
            residual=res, iterations=max_iter)
    pin -= pin[0, 0]
    p[1:-1, 1:-1] = pin
    apply_pressure_bc(p)
    return p, its, res


def velocity_update(F, G, p, metrics, props, dtau, faces=None):
    """Cartesian face velocities after the pressure correction.

    ``faces`` selects the faces to correct (default: interior); on all other
    faces the result is just F or G.
    """
    nx, ny = metrics.shape
    e, n = metrics.eface, metrics.nface
    s = dtau / props.rho
    pc = _corner(p)
    u = F.copy()
    v = G.copy()
    du = np.zeros_like(F)
    dv = np.zeros_like(G)
    sl = (slice(0, -1), slice(1, -1))
    du[sl] = s * e.J[sl] * ((pc[:, 1:] - pc[:, :-1]) * e.y_xi[sl]
                            - (p[1:, 1:-1] - p[:-1, 1:-1]) * e.y_eta[sl])
    sl = (slice(1, -1), slice(0, -1))
    dv[sl] = s * n.J[sl] * ((pc[1:, :] - pc[:-1, :]) * n.x_eta[sl]
                            - (p[1:-1, 1:] - p[1:-1, :-1]) * n.x_xi[sl])
    if faces is None:
        mu = np.zeros(F.shape, dtype=bool)
        mv = np.zeros(G.shape, dtype=bool)
        mu[1:nx, 1:ny + 1] = True
        mv[1:nx + 1, 1:ny] = True
    else:
        mu, mv = faces
    u[mu] += du[mu]
    v[mv] += dv[mv]
    return u, v


def divergence_residual(state, metrics=None):
    """Max over interior cells of |U_e - U_w + V_n - V_s| for the stored fluxes."""
    return float(np.max(np.abs(flux_divergence(state.U, state.V))))


# --------------------------------------------------------------------------
# time stepping
# --------------------------------------------------------------------------

@dataclass
class StepInfo:
    step: int
    tau: float
    div_residual: float
    pressure_iters: int
    max_du: float
    max_dv: float
    cfl_estimate: float

    def row(self):
        return [self.step, repr(self.tau), repr(self.div_residual), self.pressure_iters,
                repr(self.max_du), repr(self.max_dv), repr(self.cfl_estimate)]


@dataclass
class MACSolver:
    """Bundles the static pieces of a run so each step reuses them."""

    mesh: object
    metrics: object
    props: FluidProps
    bcs: object
    dtau: float
    pressure_tol: float = 1e-6
    pressure_max_iter: int = 200000
    omega: float = 1.0
    _masks: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not self.dtau > 0:
            raise ConfigError("time step must be positive", key="dtau")
        shape = self.metrics.shape
        self.bcs.validate(shape)
        self._masks = self.bcs.momentum_faces(shape)
        self._outlets = self.bcs.outlet_faces(shape)
        ou, ov = self._outlets
        self._has_outlet = bool(ou.any() or ov.any())
        nx, ny = shape
        # corrected faces = interior faces only; boundary fluxes stay fixed
        mu = np.zeros((nx + 2, ny + 2), dtype=bool)
        mv = np.zeros_like(mu)
        mu[1:nx, 1:ny + 1] = True
        mv[1:nx + 1, 1:ny] = True
        self._interior = (mu, mv)
        bu = np.zeros_like(mu)
        bv = np.zeros_like(mu)
        bu[[0, nx], 1:ny + 1] = True
        bv[1:nx + 1, [0, ny]] = True
        self._boundary = (bu, bv)

    def initial_state(self):
        s = FlowState.quiescent(self.metrics.shape)
        apply_velocity_bc(s, self.bcs)
        refresh_fluxes(s, self.metrics)
        return s

    def _balance_outflow(self, F, G):
        """Shift outflow normal velocities so the boundary fluxes sum to zero.

        With the Neumann pressure condition on every side the pressure system
        is only solvable when inflow and outflow balance.
        """
        nx, ny = self.metrics.shape
        e, n = self.metrics.eface, self.metrics.nface
        Us, Vs = contravariant_fluxes(F, G, self.metrics)
        if not self._has_outlet:
            return Us, Vs
        ou, ov = self._outlets
        # sign turning a positive shift of the stored component into outflow
        su = np.where(ou, 1.0, 0.0)
        su[0] *= -1.0
        sv = np.where(ov, 1.0, 0.0)
        sv[:, 0] *= -1.0
        weight = np.abs(e.y_eta[ou]).sum() + np.abs(n.x_xi[ov]).sum()
        # the flux stencils couple neighbouring faces on skewed outlets; a few passes settle it
        for _ in range(4):
            net = (Us[nx, 1:-1].sum() - Us[0, 1:-1].sum()
                   + Vs[1:-1, ny].sum() - Vs[1:-1, 0].sum())
            if abs(net) <= 1e-15 * weight:
                break
            delta = -net / weight
            F[ou] += delta * su[ou]
            G[ov] += delta * sv[ov]
            Us, Vs = contravariant_fluxes(F, G, self.metrics)
        return Us, Vs

    def advance(self, state):
        """One time step; returns ``(new_state, StepInfo)``."""
        m = self.metrics
        new = state.copy()
        apply_velocity_bc(new, self.bcs)
        F, G = assemble_explicit(new, m, self.props, self.dtau, faces=self._masks)
        # ghosts of the predicted field must mirror it, or skewed walls leak flux
        apply_velocity_bc(SimpleNamespace(u=F, v=G), self.bcs)
        Us, Vs = self._balance_outflow(F, G)
        p, its, res = solve_pressure(F, G, m, self.props, self.dtau, tol=self.pressure_tol,
                                     max_iter=self.pressure_max_iter, p0=new.p,
                                     omega=self.omega, outlets=self._has_outlet)
        u, v = velocity_update(F, G, p, m, self.props, self.dtau, faces=self._interior)
        new.u, new.v, new.p = u, v, p
        apply_velocity_bc(new, self.bcs)
        # fluxes: projected on interior faces, the balanced boundary values elsewhere
        tu, tv = pressure_face_terms(p, m)
        s = self.dtau / self.props.rho
        U, V = contravariant_fluxes(new.u, new.v, m)
        mu, mv = self._interior
        bu, bv = self._boundary
        U[mu] = Us[mu] + s * tu[mu]
        V[mv] = Vs[mv] + s * tv[mv]
        U[bu] = Us[bu]
        V[bv] = Vs[bv]
        new.U, new.V = U, V
        new.tau = state.tau + self.dtau
        new.k = state.k + 1
        for name in ("u", "v", "p"):
            if not np.all(np.isfinite(getattr(new, name))):
                raise DivergenceError(f"non-finite {name} at step {new.k}", step=new.k)
        du = float(np.max(np.abs(new.u - state.u)))
        dv = float(np.max(np.abs(new.v - state.v)))
        cfl = self.dtau * float(np.max(np.abs(m.eface.J[mu] * U[mu]), initial=0.0)
                                + np.max(np.abs(m.nface.J[mv] * V[mv]), initial=0.0))
        info = StepInfo(new.k, new.tau, divergence_residual(new), its, du, dv, cfl)
        log.debug("step %d tau=%.4f div=%.2e iters=%d du=%.2e dv=%.2e cfl=%.3f",
                  info.step, info.tau, info.div_residual, its, du, dv, cfl)
        return new, info

    def run_to_steady(self, state=None, steady_tol=1e-6, max_time=None, max_steps=None,
                      log_path=None, callback=None):
        """Advance until max |du|, |dv| per step < ``steady_tol`` or the time limit.

        Returns ``(state, history)`` where history is a list of StepInfo.
        """
        state = self.initial_state() if state is None else state
        if max_time is None and max_steps is None:
            raise ConfigError("run_to_steady needs max_time or max_steps")
        history = []
        fh = writer = None
        if log_path is not None:
            fh = open(log_path, "w", newline="")
            writer = csv.writer(fh)
            writer.writerow(DIAGNOSTIC_COLUMNS)
        try:
            while True:
                if max_time is not None and state.tau >= max_time - 0.5 * self.dtau:
                    break
                if max_steps is not None and len(history) >= max_steps:
                    break
                state, info = self.advance(state)
                history.append(info)
                if writer is not None:
                    writer.writerow(info.row())
                if callback is not None:
                    callback(state, info)
                if info.max_du < steady_tol and info.max_dv < steady_tol:
                    log.info("steady after %d steps (tau = %.4f)", info.step, info.tau)
                    break
        finally:
            if fh is not None:
                fh.close()
        if history:
            last = history[-1]
            change = max(last.max_du, last.max_dv)
            if change > 10.0 * steady_tol:
                log.warning("not steady at tau = %.4f: last change %.3e > 10 x %.1e",
                            state.tau, change, steady_tol)
        return state, history


def is_steady(history, steady_tol=1e-6):
    return bool(history) and max(history[-1].max_du, history[-1].max_dv) < steady_tol


def advance_step(state, mesh, metrics, props, bcs, dtau, **kw):
    """Functional form of :meth:`MACSolver.advance`; returns the new state."""
    return MACSolver(mesh, metrics, props, bcs, dtau, **kw).advance(state)[0]


def run_to_steady(state, mesh, metrics, props, bcs, dtau, steady_tol=1e-6, max_time=math.inf,
                  **kw):
    solver_kw = {k: kw.pop(k) for k in ("pressure_tol", "pressure_max_iter", "omega") if k in kw}
    solver = MACSolver(mesh, metrics, props, bcs, dtau, **solver_kw)
    return solver.run_to_steady(state, steady_tol=steady_tol, max_time=max_time, **kw)
