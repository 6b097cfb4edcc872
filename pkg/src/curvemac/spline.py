"""Parametric natural cubic splines for domain edges.

Each edge of the physical domain is an interpolating cubic through a list of
control points, parametrized by normalized cumulative chord length so that
``t = 0`` is the first point and ``t = 1`` the last.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GeometryError, ZeroChordError

EDGE_ORDER = ("south", "east", "north", "west")


@dataclass(frozen=True)
class ParametricSpline:
    control_points: np.ndarray
    knots: np.ndarray
    _x: CubicSpline = field(repr=False, compare=False)
    _y: CubicSpline = field(repr=False, compare=False)

    @property
    def segment_coeffs(self):
        """Per-segment power-basis coefficients, shape (2, 4, n_segments).

        Row order is highest degree first, in the local variable ``t - knots[k]``.
        """
        return np.stack([self._x.c, self._y.c])

    def __call__(self, t):
        return evaluate_spline(self, t)

    def derivative(self, t, order=1):
        t = np.asarray(t, dtype=float)
        return np.stack([self._x(t, order), self._y(t, order)], axis=-1)


def build_spline(points):
    """Natural cubic spline through ``points`` (an (n, 2) array-like, n >= 2)."""
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError(f"expected an (n, 2) array of points, got shape {pts.shape}")
    if len(pts) < 2:
        raise GeometryError("a spline needs at least 2 control points")
    chords = np.hypot(*np.diff(pts, axis=0).T)
    if np.any(chords == 0.0):
        k = int(np.flatnonzero(chords == 0.0)[0])
        raise ZeroChordError(f"control points {k} and {k + 1} coincide")
    knots = np.concatenate([[0.0], np.cumsum(chords)])
    knots /= knots[-1]
    knots[-1] = 1.0
    if len(pts) == 2:
        # two points: the natural spline is the chord itself
        bc = "not-a-knot"
    else:
        bc = "natural"
    sx = CubicSpline(knots, pts[:, 0], bc_type=bc)
    sy = CubicSpline(knots, pts[:, 1], bc_type=bc)
    pts.setflags(write=False)
    knots.setflags(write=False)
    return ParametricSpline(pts, knots, sx, sy)


def evaluate_spline(s, t):
    """Point(s) on the curve at parameter ``t`` in [0, 1]; shape (..., 2)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0) or np.any(t > 1.0) or np.any(np.isnan(t)):
        raise ValueError(f"spline parameter outside [0, 1]: {t}")
    return np.stack([s._x(t), s._y(t)], axis=-1)


def sample_boundary(s, n):
    """``n`` points at uniformly spaced parameters ``i / (n - 1)``."""
    if int(n) != n or n < 2:
        raise ValueError(f"need at least 2 sample points, got {n}")
    n = int(n)
    t = np.linspace(0.0, 1.0, n)
    out = evaluate_spline(s, t)
    out[0] = s.control_points[0]
    out[-1] = s.control_points[-1]
    return out


def read_edges(path):
    """Read a four-edge geometry file.

    Blocks of ``x y`` lines are separated by lines reading ``#edge``; other
    lines starting with ``#`` and blank lines are ignored. Edges come in the
    order south, east, north, west, with south/north running west to east and
    east/west running south to north.
    """
    blocks = [[]]
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if line == "#edge":
                blocks.append([])
                continue
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise GeometryError(f"{path}:{lineno}: expected 'x y', got {line!r}")
            try:
                blocks[-1].append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise GeometryError(f"{path}:{lineno}: malformed coordinates {line!r}") from None
    blocks = [b for b in blocks if b]
    if len(blocks) != 4:
        raise GeometryError(f"{path}: expected 4 edge blocks, found {len(blocks)}")
    return dict(zip(EDGE_ORDER, (np.array(b) for b in blocks)))


def write_edges(path, edges):
    with open(path, "w") as fh:
        for name in EDGE_ORDER:
            fh.write("#edge\n")
            for x, y in np.asarray(edges[name]):
                fh.write(f"{float(x)!r} {float(y)!r}\n")
