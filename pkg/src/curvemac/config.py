"""Line-oriented ``key = value`` run configuration.

Blank lines and ``#`` comments are ignored. Boundary conditions for custom
geometries take one line per segment, with comma-separated fields::

    scenario = custom
    geometry = duct.txt
    edge = north, kind = CLES, vel = 1.0
    edge = west, kind = CNEI, start = 1, stop = 8
"""

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .boundary import BoundarySpec, Segment
from .errors import ConfigError
from .scenarios import PLATE_LEVELS

SCENARIOS = ("plates", "cavity", "stenosis", "custom")
FORMATS = ("csv", "vtk")


@dataclass
class SimConfig:
    scenario: str
    level: str = "P5"
    re: float = None
    n_xi: int = None
    n_eta: int = None
    rho: float = 1.0
    mu: float = None
    dtau: float = None
    max_time: float = None
    max_steps: int = None
    steady_tol: float = 1e-6
    pressure_tol: float = None
    pressure_max_iter: int = 200000
    omega: float = None
    geometry: str = None
    length: float = 1.0
    height: float = 1.0
    depth: float = 0.25
    width: float = 2.0
    center: float = None
    vel_in: float = 0.1467
    grid_method: str = "laplace"
    grid_max_iter: int = 1000
    grid_tol: float = 1e-4
    output: str = "output"
    format: str = "csv"
    snapshot_interval: int = 0
    edges: list = field(default_factory=list)
    source: str = None

    def boundary_spec(self):
        return BoundarySpec(tuple(self.edges)) if self.edges else None


_TYPES = {f.name: f.type for f in fields(SimConfig)}
_KEYS = set(_TYPES) - {"edges", "source"}
_EDGE_KEYS = {"edge", "kind", "vel", "start", "stop"}


def _convert(key, raw, lineno):
    kind = _TYPES[key]
    try:
        if kind is int:
            val = float(raw)
            if val != int(val):
                raise ValueError
            return int(val)
        if kind is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError
            return val
    except ValueError:
        raise ConfigError(f"malformed value {raw!r}", key=key, line=lineno) from None
    return raw


def _parse_edge(text, lineno):
    items = {}
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f"expected 'name = value' in boundary entry, got {part.strip()!r}",
                              key="edge", line=lineno)
        k, v = (s.strip() for s in part.split("=", 1))
        k = k.lower()
        if k not in _EDGE_KEYS:
            raise ConfigError("unknown boundary field", key=k, line=lineno)
        items[k] = v
    if "kind" not in items:
        raise ConfigError("boundary entry needs a 'kind'", key="kind", line=lineno)
    try:
        vel = float(items["vel"]) if "vel" in items else None
        start = int(items["start"]) if "start" in items else None
        stop = int(items["stop"]) if "stop" in items else None
    except ValueError:
        raise ConfigError("malformed number in boundary entry", key="edge", line=lineno) from None
    try:
        return Segment(items["edge"].lower(), items["kind"], vel, start, stop)
    except ConfigError as exc:
        raise ConfigError(str(exc), line=lineno) from None


def parse_config_text(text, source=None):
    values = {}
    lines = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key == "edge":
            edges.append(_parse_edge(line, lineno))
            continue
        if key not in _KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        if not value:
            raise ConfigError("empty value", key=key, line=lineno)
        values[key] = _convert(key, value, lineno)
        lines[key] = lineno
    if "scenario" not in values:
        raise ConfigError("missing required key", key="scenario")
    cfg = SimConfig(edges=edges, source=source, **values)
    _validate(cfg, lines)
    return cfg


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    cfg = parse_config_text(text, source=str(path))
    if cfg.geometry is not None and not Path(cfg.geometry).is_absolute():
        cfg.geometry = str(path.parent / cfg.geometry)
    return cfg


def _require(cond, key, lines, message):
    if not cond:
        raise ConfigError(message, key=key, line=lines.get(key))


def _validate(cfg, lines):
    cfg.scenario = cfg.scenario.lower()
    cfg.format = cfg.format.lower()
    cfg.level = cfg.level.upper()
    _require(cfg.scenario in SCENARIOS, "scenario", lines,
             f"unknown scenario {cfg.scenario!r}; expected one of {', '.join(SCENARIOS)}")
    _require(cfg.format in FORMATS, "format", lines, f"unknown format {cfg.format!r}")
    _require(cfg.grid_method in ("laplace", "winslow"), "grid_method", lines,
             f"unknown grid method {cfg.grid_method!r}")
    for key in ("re", "mu", "dtau", "max_time", "omega", "pressure_tol"):
        val = getattr(cfg, key)
        _require(val is None or val > 0, key, lines, "must be positive")
    for key in ("rho", "steady_tol", "grid_tol", "length", "height",
                "width", "vel_in"):
        _require(getattr(cfg, key) > 0, key, lines, "must be positive")
    for key in ("pressure_max_iter", "grid_max_iter"):
        _require(getattr(cfg, key) >= 1, key, lines, "must be at least 1")
    _require(cfg.max_steps is None or cfg.max_steps >= 0, "max_steps", lines,
             "must be non-negative")
    _require(cfg.snapshot_interval >= 0, "snapshot_interval", lines, "must be non-negative")
    _require(cfg.omega is None or cfg.omega < 2, "omega", lines, "must be below 2")
    _require(0 <= cfg.depth < 0.5, "depth", lines, "must lie in [0, 0.5)")
    for key in ("n_xi", "n_eta"):
        val = getattr(cfg, key)
        _require(val is None or val >= 2, key, lines, "line counts must be at least 2")
    _require(cfg.re is None or cfg.mu is None, "mu", lines, "give either 're' or 'mu', not both")

    if cfg.scenario == "plates":
        _require(cfg.level in PLATE_LEVELS, "level", lines,
                 f"unknown level {cfg.level!r}; expected one of {', '.join(PLATE_LEVELS)}")
        cfg.n_xi, cfg.n_eta = PLATE_LEVELS[cfg.level]
        cfg.re = 100.0 if cfg.re is None else cfg.re
        if cfg.dtau is None:
            cfg.dtau = 1e-2 if cfg.level in ("P1", "P2", "P3") else 5e-3
        cfg.max_time = 60.0 if cfg.max_time is None else cfg.max_time
    elif cfg.scenario == "cavity":
        cfg.re = 100.0 if cfg.re is None else cfg.re
        cfg.n_xi = cfg.n_xi or 129
        cfg.n_eta = cfg.n_eta or cfg.n_xi
        _require(cfg.n_xi == cfg.n_eta, "n_eta", lines, "the cavity mesh is square")
        cfg.dtau = 1e-3 if cfg.dtau is None else cfg.dtau
    elif cfg.scenario == "stenosis":
        cfg.re = 900.0 if cfg.re is None else cfg.re
        cfg.n_xi = cfg.n_xi or 129
        cfg.n_eta = cfg.n_eta or 20
        cfg.dtau = 5e-3 if cfg.dtau is None else cfg.dtau
        cfg.max_time = 400.0 if cfg.max_time is None else cfg.max_time
    else:
        _require(cfg.n_xi is not None, "n_xi", lines, "custom scenarios need 'n_xi'")
        _require(cfg.n_eta is not None, "n_eta", lines, "custom scenarios need 'n_eta'")
        _require(cfg.dtau is not None, "dtau", lines, "custom scenarios need 'dtau'")
        _require(cfg.re is not None or cfg.mu is not None, "mu", lines,
                 "custom scenarios need 're' or 'mu'")
        _require(cfg.max_time is not None or cfg.max_steps is not None, "max_time", lines,
                 "custom scenarios need 'max_time' or 'max_steps'")
        if not cfg.edges:
            raise ConfigError("custom scenarios need 'edge = ...' boundary entries", key="edge")
        cfg.boundary_spec().validate((cfg.n_xi - 1, cfg.n_eta - 1))
    if cfg.scenario != "custom" and cfg.edges:
        raise ConfigError(f"boundary entries are fixed for the {cfg.scenario} scenario",
                          key="edge")
