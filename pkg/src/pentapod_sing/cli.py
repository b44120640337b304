"""Command-line interface: ``pentapod-sing <check|param|dist|mesh> --config FILE``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

import jsonschema

from .distance import MODES, MultistartOptions, solve
from .errors import ArchitectureError, ExclusionError, PentapodError, PolynomialError
from .pentapod import Architecture, Configuration, extract_F, is_singular
from .polyalg import to_exact
from .ratparam import param_grid, param_point, sample_parameters

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

_NUMBER = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*[-+]?(\d+(\.\d*)?|\.\d+)([eE][-+]?\d+)?(\s*/\s*[-+]?\d+)?\s*$"},
    ]
}
_VEC3 = {"type": "array", "items": _NUMBER, "minItems": 3, "maxItems": 3}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["architecture", "pose"],
    "properties": {
        "architecture": {
            "type": "object",
            "required": ["base", "r"],
            "properties": {
                "base": {"type": "array", "items": _VEC3, "minItems": 5, "maxItems": 5},
                "r": {"type": "array", "items": _NUMBER, "minItems": 5, "maxItems": 5},
            },
        },
        "pose": {
            "type": "object",
            "required": ["orientation", "position"],
            "properties": {"orientation": _VEC3, "position": _VEC3},
        },
        "mode": {"type": "string"},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "starts": {"type": "integer", "minimum": 1},
        "box": {"type": "number", "exclusiveMinimum": 0},
        "format": {"enum": ["csv", "json"]},
    },
}

DIST_COLUMNS = ["index", "u", "v", "w", "px", "py", "pz", "lambda1", "lambda2", "mu", "distance", "residual"]


class ConfigError(Exception):
    pass


def _number(x):
    """Exact rational for ints and ``"p/q"`` strings, float otherwise."""
    if isinstance(x, bool):
        raise ConfigError("booleans are not numbers")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = (t.strip() for t in s.split("/"))
            return Fraction(to_exact(num)) / Fraction(to_exact(den))
        return Fraction(s) if not any(ch in s for ch in "eE") else float(s)
    return float(x)


def fmt(x) -> str:
    """Ten significant digits; empty for missing values."""
    if x is None:
        return ""
    return f"{float(x):.10g}"


def _json_number(x):
    return None if x is None else float(fmt(x))


def load_config(path: str, warn=None) -> dict:
    """Parse and validate a job file; raises ``ConfigError``."""
    warn = warn or (lambda msg: print(f"warning: {msg}", file=sys.stderr))
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    try:
        arch = Architecture(
            tuple(tuple(_number(x) for x in pt) for pt in raw["architecture"]["base"]),
            tuple(_number(x) for x in raw["architecture"]["r"]),
        )
    except (ArchitectureError, ZeroDivisionError, ValueError) as exc:
        raise ConfigError(f"invalid architecture: {exc}") from None
    try:
        orient = [_number(x) for x in raw["pose"]["orientation"]]
        position = tuple(_number(x) for x in raw["pose"]["position"])
    except (ZeroDivisionError, ValueError) as exc:
        raise ConfigError(f"invalid pose: {exc}") from None
    n2 = sum(x * x for x in orient)
    norm = math.sqrt(float(n2))
    if n2 != 1 and abs(norm - 1) >= 1e-12:
        if abs(norm - 1) < 1e-6:
            warn(f"orientation has length {norm:.12g}; normalized")
            orient = [float(x) / norm for x in orient]
        else:
            raise ConfigError(f"orientation must be a unit vector (length {norm:.12g})")
    pose = Configuration(tuple(orient), position, check_unit=False)
    mode = raw.get("mode", "general").replace("-", "_")
    if mode not in MODES:
        raise ConfigError(f"unknown mode {raw.get('mode')!r}")
    return {
        "architecture": arch,
        "pose": pose,
        "mode": mode,
        "tol": raw.get("tol"),
        "seed": raw.get("seed", 0),
        "starts": raw.get("starts", 5000),
        "box": raw.get("box"),
        "format": raw.get("format", "csv"),
    }


def _merge(cfg: dict, args) -> dict:
    for key in ("mode", "seed", "starts", "tol", "format"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val.replace("-", "_") if key == "mode" else val
    if cfg["mode"] not in MODES:
        raise ConfigError(f"unknown mode {cfg['mode']!r}")
    return cfg


def _write(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def cmd_check(cfg, args) -> str:
    arch, pose = cfg["architecture"], cfg["pose"]
    model = extract_F(arch)
    tol = cfg["tol"] if cfg["tol"] is not None else 1e-8
    chk = is_singular(arch, pose, tol)
    x = pose.as_array()
    report = {
        "F": model.value(x),
        "F_normalized": model.normalized_value(x),
        "sigma_min": chk.sigma_min,
        "sigma_ratio": chk.sigma_ratio,
        "singular": chk.singular,
    }
    if cfg["format"] == "json":
        return json.dumps({k: (v if isinstance(v, bool) else _json_number(v)) for k, v in report.items()},
                          indent=2) + "\n"
    return _csv([[fmt(report["F"]), fmt(report["F_normalized"]), fmt(report["sigma_min"]),
                  fmt(report["sigma_ratio"]), "singular" if chk.singular else "nonsingular"]],
                ["F", "F_normalized", "sigma_min", "sigma_ratio", "verdict"])


def _parse_t(text: str) -> tuple:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != 4:
        raise ConfigError(f"--t needs four values, got {text!r}")
    try:
        return tuple(_number(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad --t value {text!r}: {exc}") from None


def cmd_param(cfg, args) -> str:
    model = extract_F(cfg["architecture"])
    records = []
    if args.t:
        for k, text in enumerate(args.t):
            t = _parse_t(text)
            try:
                c = param_point(model, t)
                records.append((k, t, c, None))
            except ExclusionError as exc:
                records.append((k, t, None, f"{type(exc).__name__}: {exc}"))
    else:
        for rec in param_grid(model, args.grid, args.range, cfg["seed"]):
            records.append((rec.index, rec.t, rec.pose, rec.skipped))
    header = ["index", "t1", "t2", "t3", "t4", "u", "v", "w", "px", "py", "pz", "status"]
    if cfg["format"] == "json":
        out = []
        for k, t, c, skip in records:
            item = {"index": k, "t": [_json_number(x) for x in t]}
            if c is None:
                item["status"] = skip
            else:
                item["pose"] = [_json_number(x) for x in c.as_tuple()]
                item["status"] = "ok"
            out.append(item)
        return json.dumps(out, indent=2) + "\n"
    rows = []
    for k, t, c, skip in records:
        vals = [fmt(x) for x in c.as_tuple()] if c is not None else [""] * 6
        rows.append([k] + [fmt(x) for x in t] + vals + [skip or "ok"])
    return _csv(rows, header)


def cmd_dist(cfg, args) -> str:
    arch, g = cfg["architecture"], cfg["pose"]
    model = extract_F(arch)
    opts = MultistartOptions(starts=cfg["starts"], seed=cfg["seed"], box=cfg["box"],
                             tol=cfg["tol"] if cfg["tol"] is not None else 1e-10)
    ps = solve(cfg["mode"], model, arch, g, opts)
    rows = []
    for k, q in enumerate(ps, start=1):
        rows.append([k, *q.pose.as_tuple(), q.lambda1, q.lambda2, q.mu, q.distance, q.residual])
    if cfg["format"] == "json":
        pts = [dict(zip(DIST_COLUMNS, [r[0]] + [_json_number(x) for x in r[1:]])) for r in rows]
        doc = {"mode": ps.mode, "count": len(ps), "complex_count": ps.complex_count, "points": pts}
        return json.dumps(doc, indent=2) + "\n"
    return _csv([[r[0]] + [fmt(x) for x in r[1:]] for r in rows], DIST_COLUMNS)


def cmd_mesh(cfg, args) -> str:
    from .mesh import quadric_mesh, sphere_curve

    model = extract_F(cfg["architecture"])
    g = cfg["pose"]
    extent = cfg["box"] if cfg["box"] is not None else args.extent
    quad = quadric_mesh(model, g.orientation, g.position, extent, args.resolution)
    curve = sphere_curve(model, g.position, args.resolution)
    doc = {
        "quadric": {
            "orientation": [float(x) for x in g.orientation],
            "center": [float(x) for x in g.position],
            "extent": extent,
            "vertices": [[_json_number(x) for x in v] for v in quad["vertices"]],
            "faces": quad["faces"],
        },
        "sphere_curve": {
            "position": [float(x) for x in g.position],
            "polylines": [[[_json_number(x) for x in p] for p in line] for line in curve],
        },
    }
    return json.dumps(doc) + "\n"


COMMANDS = {"check": cmd_check, "param": cmd_param, "dist": cmd_dist, "mesh": cmd_mesh}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pentapod-sing", description="Singularity analysis of linear pentapods.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON job file")
    p.add_argument("--mode", help="distance mode: " + ", ".join(m.replace("_", "-") for m in MODES))
    p.add_argument("--seed", type=int)
    p.add_argument("--starts", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--t", action="append", help="param: t1,t2,t3,t4 (repeatable; 'p/q' allowed)")
    p.add_argument("--grid", type=int, default=100, help="param: number of Halton samples")
    p.add_argument("--range", type=float, default=10.0, help="param: sample box half-width")
    p.add_argument("--resolution", type=int, default=64, help="mesh: samples per axis")
    p.add_argument("--extent", type=float, default=20.0, help="mesh: half-width of the position cube")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = _merge(load_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        text = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArchitectureError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PentapodError, PolynomialError, ArithmeticError, ValueError) as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    _write(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
