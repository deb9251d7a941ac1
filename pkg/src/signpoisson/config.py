"""Plain-text experiment configuration.

Grammar (one entry per line)::

    line    := blank | comment | entry
    comment := '#' anything
    entry   := key '=' value [ '#' anything ]
    value   := number | point | point-list | word
    number  := arithmetic over decimal literals, 'pi' and 'e' with + - * / ** ()
    point   := number ',' number
    point-list := point (';' point)*

Keys are case sensitive and may appear at most once.  Unknown keys are
rejected.  Shape keys are listed in :data:`SHAPE_KEYS`; the same keys with a
``set_`` prefix describe the source set A for the ``solve`` subcommand.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .geometry import Annulus, Disk, DomainSpec, Polygon, Sector, Triangle, UnionOfDisks

SHAPE_KEYS = {"domain", "center", "radius", "r_in", "r_out", "vertices", "vertex",
              "half_angle", "bisector", "disks"}
RUN_KEYS = {"gamma", "mass", "h", "tol", "out", "seed", "starts", "max_iters"}
OTHER_KEYS = {
    "set",  # source set kind for `solve`: a shape name, none, levelset_max, levelset_min
    "m", "R", "breakpoints", "densities", "samples",  # radial
    "alpha", "a", "points",  # wedge / sector
    "sweep", "values",  # sweep
}
KNOWN_KEYS = SHAPE_KEYS | RUN_KEYS | OTHER_KEYS | {"set_" + k for k in SHAPE_KEYS - {"domain"}}

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow, ast.USub: operator.neg,
        ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "e": math.e}


def parse_number(text: str, key: str = "?") -> float:
    """Evaluate a restricted arithmetic expression."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ValueError, ZeroDivisionError, TypeError):
        raise ConfigError(f"key '{key}': cannot read number from {text!r}") from None


def parse_point(text: str, key: str = "?") -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"key '{key}': expected 'x, y', got {text!r}")
    return (parse_number(parts[0], key), parse_number(parts[1], key))


def parse_point_list(text: str, key: str = "?") -> list[tuple[float, float]]:
    return [parse_point(p, key) for p in text.split(";") if p.strip()]


def parse_number_list(text: str, key: str = "?") -> list[float]:
    return [parse_number(p, key) for p in text.replace(";", ",").split(",") if p.strip()]


def parse_text(text: str, source: str = "<config>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        if not value:
            raise ConfigError(f"{source}:{lineno}: key '{key}' has no value")
        entries[key] = value
    return entries


def shape_from_entries(entries: dict[str, str], prefix: str = "", kind: str | None = None) -> DomainSpec:
    """Build a shape from ``entries``; ``prefix`` selects e.g. the ``set_`` keys."""

    def get(name, parser=parse_number, default=None):
        k = prefix + name
        if k in entries:
            return parser(entries[k], k)
        if default is None:
            raise ConfigError(f"key '{k}' is required for a {kind} shape")
        return default

    kind = kind or entries.get(prefix + "domain", "disk")
    try:
        if kind == "disk":
            return Disk(get("center", parse_point, (0.0, 0.0)), get("radius", default=1.0))
        if kind == "annulus":
            return Annulus(get("center", parse_point, (0.0, 0.0)), get("r_in"), get("r_out"))
        if kind == "triangle":
            verts = get("vertices", parse_point_list)
            if len(verts) != 3:
                raise ConfigError(f"key '{prefix}vertices': a triangle needs 3 vertices")
            return Triangle(*verts)
        if kind == "polygon":
            return Polygon(tuple(get("vertices", parse_point_list)))
        if kind == "sector":
            return Sector(get("vertex", parse_point, (0.0, 0.0)), get("half_angle"),
                          get("radius", default=1.0), get("bisector", parse_point, (1.0, 0.0)))
        if kind == "union":
            disks = []
            for item in entries.get(prefix + "disks", "").split(";"):
                if item.strip():
                    nums = parse_number_list(item, prefix + "disks")
                    if len(nums) != 3:
                        raise ConfigError(f"key '{prefix}disks': each disk is 'cx, cy, r'")
                    disks.append(Disk((nums[0], nums[1]), nums[2]))
            return UnionOfDisks(tuple(disks))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    key = prefix + "domain" if prefix == "" else "set"
    raise ConfigError(f"key '{key}': unknown shape {kind!r}")


def format_shape(spec: DomainSpec, prefix: str = "") -> str:
    """Inverse of :func:`shape_from_entries`."""
    f = "%.17g"

    def pt(p):
        return f"{f % p[0]}, {f % p[1]}"

    lines = []
    if isinstance(spec, Disk):
        lines += ["disk", f"{prefix}center = {pt(spec.center)}", f"{prefix}radius = {f % spec.radius}"]
    elif isinstance(spec, Annulus):
        lines += ["annulus", f"{prefix}center = {pt(spec.center)}",
                  f"{prefix}r_in = {f % spec.r_in}", f"{prefix}r_out = {f % spec.r_out}"]
    elif isinstance(spec, Triangle):
        lines += ["triangle", f"{prefix}vertices = " + "; ".join(pt(v) for v in spec.vertices)]
    elif isinstance(spec, Polygon):
        lines += ["polygon", f"{prefix}vertices = " + "; ".join(pt(v) for v in spec.vertices)]
    elif isinstance(spec, Sector):
        lines += ["sector", f"{prefix}vertex = {pt(spec.vertex)}",
                  f"{prefix}half_angle = {f % spec.half_angle}", f"{prefix}radius = {f % spec.radius}",
                  f"{prefix}bisector = {pt(spec.bisector)}"]
    elif isinstance(spec, UnionOfDisks):
        lines += ["union", f"{prefix}disks = " + "; ".join(
            f"{pt(d.center)}, {f % d.radius}" for d in spec.disks)]
    else:
        raise TypeError(f"cannot format {type(spec).__name__}")
    kind_key = "domain" if prefix == "" else "set"
    return "\n".join([f"{kind_key} = {lines[0]}"] + lines[1:]) + "\n"


@dataclass
class ExperimentConfig:
    command: str
    domain: DomainSpec
    gamma: float = 0.5
    mass: float | None = None
    h: float = 1 / 128
    tol: float | None = None
    out: Path = Path("out")
    seed: int = 0x5157
    starts: int = 12
    max_iters: int = 30
    entries: dict[str, str] = field(default_factory=dict)

    def number(self, key: str, default=None):
        if key in self.entries:
            return parse_number(self.entries[key], key)
        return default


def build_config(command: str, entries: dict[str, str], overrides: dict | None = None,
                 default_h: float = 1 / 128) -> ExperimentConfig:
    """Validate ``entries`` (plus command-line ``overrides``) into an :class:`ExperimentConfig`."""
    entries = dict(entries)
    for k, v in (overrides or {}).items():
        if v is not None:
            entries[k] = str(v)
    domain = shape_from_entries(entries)
    cfg = ExperimentConfig(command=command, domain=domain, entries=entries, h=default_h)
    if "gamma" in entries:
        cfg.gamma = parse_number(entries["gamma"], "gamma")
        if not 0 < cfg.gamma < 1:
            raise ConfigError(f"key 'gamma': must lie in (0, 1), got {cfg.gamma}")
    if "mass" in entries:
        cfg.mass = parse_number(entries["mass"], "mass")
        if cfg.mass <= 0:
            raise ConfigError("key 'mass': must be positive")
    if "h" in entries:
        cfg.h = parse_number(entries["h"], "h")
        if cfg.h <= 0:
            raise ConfigError("key 'h': must be positive")
    if "tol" in entries:
        cfg.tol = parse_number(entries["tol"], "tol")
        if cfg.tol <= 0:
            raise ConfigError("key 'tol': must be positive")
    if "out" in entries:
        cfg.out = Path(entries["out"])
    for key in ("seed", "starts", "max_iters"):
        if key in entries:
            try:
                val = int(entries[key], 0)
            except ValueError:
                raise ConfigError(f"key '{key}': expected an integer, got {entries[key]!r}") from None
            if val < (0 if key == "seed" else 1):
                raise ConfigError(f"key '{key}': out of range")
            setattr(cfg, key, val)
    return cfg


def load(path, command: str, overrides: dict | None = None, default_h: float = 1 / 128) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return build_config(command, parse_text(text, str(path)), overrides, default_h)
