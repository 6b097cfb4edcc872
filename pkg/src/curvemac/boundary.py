"""Ghost-value boundary conditions on the staggered layout.

Four families are supported on each of the four sides:

========  =========================================  ==========================
kind      meaning                                    parameter
========  =========================================  ==========================
CNEI      no-slip, impermeable wall                  --
CLES      wall sliding with tangential speed ``vel``  ``vel``
CIPR      prescribed normal injection ``vel``         ``vel``
CECO      zero normal gradient of both components     --
========  =========================================  ==========================

Sides are ``west`` (case a), ``east`` (b), ``north`` (c) and ``south`` (d).
Array layout matches :mod:`curvemac.solver`: ``u[i, j]`` on the east face and
``v[i, j]`` on the north face of cell ``(i, j)``, interior cells 1..nx, 1..ny.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

KINDS = ("CNEI", "CLES", "CIPR", "CECO")
SIDES = ("west", "east", "north", "south")
_CASE = {"a": "west", "b": "east", "c": "north", "d": "south"}
# walls before inlets before outlets; later writers win at shared corners
_ORDER = {"CNEI": 0, "CLES": 0, "CIPR": 1, "CECO": 2}


@dataclass(frozen=True)
class Segment:
    side: str
    kind: str
    vel: float = None
    start: int = None  # first boundary cell (1-based), default: whole side
    stop: int = None   # last boundary cell, inclusive

    def __post_init__(self):
        side = _CASE.get(self.side, self.side)
        kind = str(self.kind).upper()
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "kind", kind)
        if side not in SIDES:
            raise ConfigError(f"unknown boundary side {self.side!r}", key="edge")
        if kind not in KINDS:
            raise ConfigError(f"unknown boundary kind {self.kind!r}", key="kind")
        if kind in ("CLES", "CIPR"):
            if self.vel is None or not np.isfinite(self.vel):
                raise ConfigError(f"{kind} on {side} needs a finite 'vel'", key="vel")
        elif self.vel is not None:
            raise ConfigError(f"{kind} on {side} takes no 'vel'", key="vel")

    def cells(self, n):
        start = 1 if self.start is None else int(self.start)
        stop = n if self.stop is None else int(self.stop)
        if not 1 <= start <= stop <= n:
            raise ConfigError(f"segment range {start}..{stop} outside 1..{n} on {self.side}")
        return start, stop


@dataclass(frozen=True)
class BoundarySpec:
    segments: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def uniform(cls, **sides):
        """``BoundarySpec.uniform(west=("CIPR", 1.0), north="CNEI", ...)``."""
        segs = []
        for side, val in sides.items():
            if isinstance(val, str):
                segs.append(Segment(side, val))
            else:
                segs.append(Segment(side, *val))
        return cls(tuple(segs))

    def ordered(self):
        return sorted(self.segments, key=lambda s: _ORDER[s.kind])

    def validate(self, shape):
        """Check that every boundary cell is covered exactly once."""
        nx, ny = shape
        for side in SIDES:
            n = ny if side in ("west", "east") else nx
            count = np.zeros(n + 1, dtype=int)
            for s in self.segments:
                if s.side == side:
                    a, b = s.cells(n)
                    count[a:b + 1] += 1
            cover = count[1:]
            if np.any(cover == 0):
                raise ConfigError(f"{side} side has uncovered cells "
                                  f"{(np.flatnonzero(cover == 0) + 1).tolist()}")
            if np.any(cover > 1):
                raise ConfigError(f"{side} side has cells covered twice "
                                  f"{(np.flatnonzero(cover > 1) + 1).tolist()}")
        return self

    def outlet_faces(self, shape):
        """Boolean masks (east faces, north faces) of CECO boundary normal faces."""
        nx, ny = shape
        mu = np.zeros((nx + 2, ny + 2), dtype=bool)
        mv = np.zeros((nx + 2, ny + 2), dtype=bool)
        for s in self.segments:
            if s.kind != "CECO":
                continue
            n = ny if s.side in ("west", "east") else nx
            a, b = s.cells(n)
            if s.side == "west":
                mu[0, a:b + 1] = True
            elif s.side == "east":
                mu[nx, a:b + 1] = True
            elif s.side == "south":
                mv[a:b + 1, 0] = True
            else:
                mv[a:b + 1, ny] = True
        return mu, mv

    def momentum_faces(self, shape):
        """Masks of faces whose velocity comes from the momentum equations.

        Interior faces always; east/north outflow faces too, since there the
        boundary value is advanced and the ghost beyond it is copied from it.
        """
        nx, ny = shape
        mu = np.zeros((nx + 2, ny + 2), dtype=bool)
        mv = np.zeros((nx + 2, ny + 2), dtype=bool)
        mu[1:nx, 1:ny + 1] = True
        mv[1:nx + 1, 1:ny] = True
        ou, ov = self.outlet_faces(shape)
        mu[nx] |= ou[nx]
        mv[:, ny] |= ov[:, ny]
        return mu, mv

    @property
    def has_outlet(self):
        return any(s.kind == "CECO" for s in self.segments)


def _normal(u, v, s, a, b, nx, ny):
    """Boundary normal faces (and the ghost normal beyond an east/north outlet)."""
    k = s.kind
    if s.side == "west":
        if k == "CECO":
            u[0, a:b + 1] = u[1, a:b + 1]
        else:
            u[0, a:b + 1] = s.vel if k == "CIPR" else 0.0
    elif s.side == "east":
        if k == "CECO":
            u[nx + 1, a:b + 1] = u[nx, a:b + 1]
        else:
            u[nx, a:b + 1] = s.vel if k == "CIPR" else 0.0
    elif s.side == "south":
        if k == "CECO":
            v[a:b + 1, 0] = v[a:b + 1, 1]
        else:
            v[a:b + 1, 0] = s.vel if k == "CIPR" else 0.0
    else:
        if k == "CECO":
            v[a:b + 1, ny + 1] = v[a:b + 1, ny]
        else:
            v[a:b + 1, ny] = s.vel if k == "CIPR" else 0.0


def _tangential(u, v, s, a, b, nx, ny):
    """Ghost tangential values so the wall average equals the target."""
    n = ny if s.side in ("west", "east") else nx
    lo = a - 1
    hi = b + 1 if b == n else b  # the last segment also owns the ghost corner face
    sl = slice(lo, hi + 1)
    k = s.kind
    if s.side == "west":
        ghost, inner = (0, sl), (1, sl)
        arr = v
    elif s.side == "east":
        ghost, inner = (nx + 1, sl), (nx, sl)
        arr = v
    elif s.side == "south":
        ghost, inner = (sl, 0), (sl, 1)
        arr = u
    else:
        ghost, inner = (sl, ny + 1), (sl, ny)
        arr = u
    if k == "CECO":
        arr[ghost] = arr[inner]
    elif k == "CLES":
        arr[ghost] = 2.0 * s.vel - arr[inner]
    else:
        arr[ghost] = -arr[inner]


def apply_velocity_bc(state, spec):
    """Set boundary normal faces and ghost tangential values of ``state`` in place.

    Normal faces of every side are written first, then the ghost normals past
    outflow faces, then the tangential ghosts; with that order each written
    value depends only on interior values or values written in an earlier
    pass, which makes the operation idempotent.
    """
    u, v = state.u, state.v
    nx, ny = u.shape[0] - 2, u.shape[1] - 2
    segs = spec.ordered()
    spans = []
    for s in segs:
        n = ny if s.side in ("west", "east") else nx
        spans.append(s.cells(n))
    for s, (a, b) in zip(segs, spans):
        if not (s.kind == "CECO" and s.side in ("east", "north")):
            _normal(u, v, s, a, b, nx, ny)
    for s, (a, b) in zip(segs, spans):
        if s.kind == "CECO" and s.side in ("east", "north"):
            _normal(u, v, s, a, b, nx, ny)
    for s, (a, b) in zip(segs, spans):
        _tangential(u, v, s, a, b, nx, ny)
    return state


def apply_pressure_bc(p):
    """Homogeneous Neumann: every ghost pressure copies its interior neighbour."""
    p[0, 1:-1] = p[1, 1:-1]
    p[-1, 1:-1] = p[-2, 1:-1]
    p[:, 0] = p[:, 1]
    p[:, -1] = p[:, -2]
    return p
