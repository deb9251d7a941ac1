"""Command-line front end.

Usage: ``signpoisson <command> [--config FILE] [--out DIR] [--h H] [--gamma G]
[--mass C] [--seed N] [--tol T]``.  Flags override the matching config keys.

Config files use the grammar documented in :mod:`signpoisson.config`.  The
domain defaults to the unit disk.  Example::

    # off-center source set in the unit disk
    domain = disk
    radius = 1
    gamma = 1/2
    h = 1/256
    set = disk
    set_center = 0.52, 0
    set_radius = 0.432067

Keys read by each command (besides the domain keys):

========  ==================================================================
solve     gamma, h, tol, out, set (disk, annulus, triangle, polygon, sector,
          union, levelset_max, levelset_min, none), set_* shape keys, mass
radial    m, R, gamma, breakpoints, densities (or mass), samples, out
rc        none
wedge     alpha, a, points
bounds    m, R, gamma, out
optimize  gamma, mass, h, seed, starts, max_iters, out
cminus    gamma, h, tol, seed, starts, max_iters, out
figures   gamma, h, out
sweep     sweep (gamma or mass), values, plus the optimize keys
========  ==================================================================

Exit status is 0 on success, 1 for invalid input and 2 when a numerical
method fails.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import bounds, config, io, radial, shapeopt
from .config import ExperimentConfig, parse_number, parse_number_list, parse_point_list
from .errors import ConfigError, NumericalFailure, SignPoissonError
from .fdpoisson import RelaxedSet, solve_indicator
from .geometry import Disk, rasterize
from .greens import WedgeSpec, sector_torsion, wedge_torsion


COMMANDS = {
    "solve": "Solve the sign-changing Poisson problem for one source set and export the field.",
    "radial": "Exact radially symmetric solution on a ball; writes r, v, v' samples.",
    "rc": "Print the critical radius of a centered disk that makes the center value vanish (gamma = 1/2).",
    "wedge": "Torsion function of a wedge and of the circular sector cut from it, at given points.",
    "bounds": "Evaluate the closed-form mass thresholds and constants for a ball.",
    "optimize": "Search for the placement of a set of given mass that minimizes the solution's minimum.",
    "cminus": "Bracket the largest mass for which every placement keeps the solution nonnegative.",
    "figures": "Reproduce the centered and the off-center disk experiments as PGM and CSV fields.",
    "sweep": "Repeat cminus over gamma values, or optimize over mass values, into one CSV.",
}

DEFAULT_H = {"figures": 1 / 256}


def _say(*parts) -> None:
    print(*parts, flush=True)


def _grid(cfg: ExperimentConfig):
    return rasterize(cfg.domain, cfg.h)


def _tol(cfg: ExperimentConfig, default: float) -> float:
    return cfg.tol if cfg.tol is not None else default


def _export_field(out: Path, stem: str, field) -> None:
    io.write_field_csv(out / f"{stem}.csv", field)
    io.write_pgm(out / f"{stem}.pgm", field)


def _source_set(cfg: ExperimentConfig, dom) -> RelaxedSet | None:
    kind = cfg.entries.get("set", "none")
    if kind == "none":
        return None
    if kind in ("levelset_max", "levelset_min"):
        if cfg.mass is None:
            raise ConfigError(f"key 'mass' is required for set = {kind}")
        return shapeopt.level_set_integral_opt(dom, cfg.gamma, cfg.mass, kind.split("_")[1])
    shape = config.shape_from_entries(cfg.entries, "set_", kind)
    return RelaxedSet.from_shape(dom, shape)


def cmd_solve(cfg: ExperimentConfig) -> None:
    dom = _grid(cfg)
    g = _source_set(cfg, dom)
    density = g if g is not None else RelaxedSet(dom, [0.0] * dom.count)
    v = solve_indicator(dom, density, cfg.gamma, tol=_tol(cfg, 1e-10))
    _export_field(cfg.out, "field", v)
    io.write_pgm(cfg.out / "set.pgm", density)
    x, y = v.argmin_point
    _say(f"cells {dom.count}")
    _say(f"mass {io.fmt(density.mass)}")
    _say(f"essinf {io.fmt(v.min)} at {io.fmt(x)},{io.fmt(y)}")
    _say(f"integral {io.fmt(v.integral)}")


def cmd_radial(cfg: ExperimentConfig) -> None:
    m = int(cfg.number("m", 2))
    R = cfg.number("R", 1.0)
    if "breakpoints" in cfg.entries:
        bp = parse_number_list(cfg.entries["breakpoints"], "breakpoints")
        if "densities" not in cfg.entries:
            raise ConfigError("key 'densities' is required with 'breakpoints'")
        dens = parse_number_list(cfg.entries["densities"], "densities")
        rc = radial.radial_set_config(m, R, bp, dens, cfg.gamma)
    else:
        mass = cfg.mass if cfg.mass is not None else 0.0
        a = (mass / radial.ball_volume(m)) ** (1 / m)
        rc = radial.ball_config(m, R, a, cfg.gamma)
    n = int(cfg.number("samples", 201))
    if n < 2:
        raise ConfigError("key 'samples': need at least 2")
    sol = radial.solve_radial(rc)
    io.write_csv(cfg.out / "radial.csv", ("r", "v", "dv"), radial.sample(sol, n))
    r, v = radial.min_radial(sol)
    _say(f"center {io.fmt(float(sol.value(0.0)))}")
    _say(f"min {io.fmt(v)} at r={io.fmt(r)}")


def cmd_rc(cfg: ExperimentConfig) -> None:
    _say("%.6f" % radial.find_rc())


def cmd_wedge(cfg: ExperimentConfig) -> None:
    if "alpha" not in cfg.entries:
        raise ConfigError("key 'alpha' is required")
    spec = WedgeSpec(parse_number(cfg.entries["alpha"], "alpha"), cfg.number("a"))
    points = parse_point_list(cfg.entries.get("points", "1, 0"), "points")
    _say("x,y,wedge,sector")
    for x, y in points:
        w = wedge_torsion(spec, (x, y))
        s = sector_torsion(spec, math.hypot(x, y), math.atan2(y, x)) if spec.a else float("nan")
        _say(",".join(io.fmt(t) for t in (x, y, w, s)))


def cmd_bounds(cfg: ExperimentConfig) -> None:
    rep = bounds.bounds_report(int(cfg.number("m", 2)), cfg.gamma, cfg.number("R", 1.0))
    rows = rep.rows()
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        _say(f"{k:<{width}}  {io.fmt(v)}")
    io.write_csv(cfg.out / "bounds.csv", ("quantity", "value"), rows)


def _require_mass(cfg: ExperimentConfig) -> float:
    if cfg.mass is None:
        raise ConfigError("key 'mass' is required")
    return cfg.mass


def cmd_optimize(cfg: ExperimentConfig) -> None:
    dom = _grid(cfg)
    res = shapeopt.minimize_essinf(dom, cfg.gamma, _require_mass(cfg), starts=cfg.starts,
                                   max_iters=cfg.max_iters, seed=cfg.seed)
    _export_field(cfg.out, "field", res.solution)
    io.write_pgm(cfg.out / "set.pgm", res.best)
    io.write_csv(cfg.out / "history.csv", ("start", "step", "essinf"),
                 ((lab, k, v) for lab, hist in zip(res.labels, res.history)
                  for k, v in enumerate(hist)))
    x, y = res.argmin_point
    _say(f"essinf {io.fmt(res.value)} at {io.fmt(x)},{io.fmt(y)}")
    cx, cy = res.best.centroid
    _say(f"set centroid {io.fmt(cx)},{io.fmt(cy)}")
    _say(f"best start {res.best_start}")


def cmd_cminus(cfg: ExperimentConfig) -> None:
    dom = _grid(cfg)
    est = shapeopt.estimate_c_minus(dom, cfg.gamma, tol=_tol(cfg, 1e-2), starts=cfg.starts,
                                    max_iters=cfg.max_iters, seed=cfg.seed)
    io.write_csv(cfg.out / "cminus.csv", ("mass", "essinf", "negative"), est.evaluations)
    _say(f"threshold {io.fmt(est.threshold)}")
    _say(f"cminus in [{io.fmt(est.low)}, {io.fmt(est.high)}]")


def cmd_figures(cfg: ExperimentConfig) -> None:
    if not isinstance(cfg.domain, Disk):
        raise ConfigError("key 'domain': figures need a disk")
    R = cfg.domain.radius
    cx, cy = cfg.domain.center
    a = radial.find_rc() * R
    dom = _grid(cfg)
    placements = {
        "fig1": Disk((cx, cy), a),
        "fig2": Disk((cx + 0.52 * R, cy), a),
    }
    for name, shape in placements.items():
        g = RelaxedSet.from_shape(dom, shape)
        v = solve_indicator(dom, g, cfg.gamma, tol=_tol(cfg, 1e-10), method="direct")
        _export_field(cfg.out, name, v)
        x, y = v.argmin_point
        _say(f"{name} essinf {io.fmt(v.min)} at {io.fmt(x)},{io.fmt(y)}")


def cmd_sweep(cfg: ExperimentConfig) -> None:
    what = cfg.entries.get("sweep")
    if what not in ("gamma", "mass"):
        raise ConfigError("key 'sweep': must be 'gamma' or 'mass'")
    if "values" not in cfg.entries:
        raise ConfigError("key 'values' is required")
    values = parse_number_list(cfg.entries["values"], "values")
    dom = _grid(cfg)
    rows = []
    if what == "gamma":
        disk = cfg.domain if isinstance(cfg.domain, Disk) else None
        for gamma in values:
            if not 0 < gamma < 1:
                raise ConfigError(f"key 'values': gamma {gamma} outside (0, 1)")
            est = shapeopt.estimate_c_minus(dom, gamma, tol=_tol(cfg, 1e-2), starts=cfg.starts,
                                            max_iters=cfg.max_iters, seed=cfg.seed)
            lo, hi = bounds.c_minus_ball_bounds(2, gamma, disk.radius) if disk else (math.nan,) * 2
            rows.append((gamma, est.low, est.high, lo, hi, bounds.c_plus(gamma, cfg.domain.measure())))
            _say(f"gamma {io.fmt(gamma)} cminus in [{io.fmt(est.low)}, {io.fmt(est.high)}]")
        header = ("gamma", "cminus_low", "cminus_high", "ball_lower", "ball_upper", "cplus")
    else:
        for c in values:
            res = shapeopt.minimize_essinf(dom, cfg.gamma, c, starts=cfg.starts,
                                           max_iters=cfg.max_iters, seed=cfg.seed)
            x, y = res.argmin_point
            cx, cy = res.best.centroid
            rows.append((c, res.value, x, y, cx, cy))
            _say(f"mass {io.fmt(c)} essinf {io.fmt(res.value)}")
        header = ("mass", "essinf", "argmin_x", "argmin_y", "centroid_x", "centroid_y")
    io.write_csv(cfg.out / f"sweep_{what}.csv", header, rows)


HANDLERS = {
    "solve": cmd_solve, "radial": cmd_radial, "rc": cmd_rc, "wedge": cmd_wedge,
    "bounds": cmd_bounds, "optimize": cmd_optimize, "cminus": cmd_cminus,
    "figures": cmd_figures, "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signpoisson",
        description="Sign-changing Poisson problem: solvers, closed forms and set placement search.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, text in COMMANDS.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("--config", type=Path, help="key = value config file")
        p.add_argument("--out", help="output directory (default: out)")
        p.add_argument("--h", help="grid spacing, e.g. 1/256")
        p.add_argument("--gamma", help="positive source level in (0, 1)")
        p.add_argument("--mass", help="measure of the negative source set")
        p.add_argument("--seed", help="seed for the random starts")
        p.add_argument("--tol", help="solver or bisection tolerance")
    return parser


def load_config(args) -> ExperimentConfig:
    overrides = {k: getattr(args, k) for k in ("out", "h", "gamma", "mass", "seed", "tol")}
    default_h = DEFAULT_H.get(args.command, 1 / 128)
    if args.config is not None:
        return config.load(args.config, args.command, overrides, default_h)
    return config.build_config(args.command, {}, overrides, default_h)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        HANDLERS[args.command](cfg)
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SignPoissonError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # reader went away (e.g. piped into head)
        sys.stderr.close()
        code = 0
    sys.exit(code)


if __name__ == "__main__":
    main()
