"""Configuration-driven experiment runner.

Experiments are described by line-oriented `key = value` files with
`[section]` headers (see README for the full schema).  The runner validates
strictly: any unknown section or key aborts with exit code 2 and a message
naming the offender.  Successful runs write `cloud.csv`, `cloud.ply` (where
the experiment produces points), and `report.json` into the output
directory; identical config and seed give byte-identical files.  Wall-clock
time is printed to stdout only, so reports stay reproducible.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from rotorb import kernels
from rotorb.geometry import (
    ALGEBRAIC_TOL,
    GEOMETRIC_TOL,
    MAX_COS_DENOMINATOR,
    MAX_SNAP_DENOMINATOR,
    Angle,
    Line3,
    Point2,
    classify_angle,
    conform_rationally,
)
from rotorb.orbit import (
    DEDUP_CELL,
    LADDER_COND_TOL,
    OrbitCloud,
    SamplerBudget,
    bfs_orbit,
    circle_gap_stats,
    discreteness_report,
    ladder_orbit,
    make_density_report,
    mesh_estimate,
)
from rotorb.tetra import (
    EDGE_KEYS,
    VERTEX_LABELS,
    hexagon_report,
    parse_tumble_steps,
    regular_tetrahedron,
    tumble,
)
from rotorb.words import Letter, make_generators

SCHEMA_VERSION = 1

EXPERIMENTS = ("orbit", "density", "ladder", "gaps",
               "tumble", "hexagon", "conform", "classify")

_GEN_SECTION = re.compile(r"gen [1-9][0-9]*\Z")


class ConfigError(Exception):
    """Invalid configuration; the message names the offending section/key."""


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def read_config(path) -> dict:
    """Parse a config file into {section: {key: raw string value}}."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#",))
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}")
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}")
    return {sect: dict(cp.items(sect)) for sect in cp.sections()}


def _schema_for(kind: str) -> dict:
    """Allowed keys per section; True marks a required key.  The pseudo
    section '@gen' covers the numbered [gen N] sections."""
    run = {"experiment": False, "seed": False}
    s = {"run": run}
    if kind in ("orbit", "density", "ladder"):
        run["dedup_cell"] = False
        s["generators"] = {"dim": True}
        s["@gen"] = {"point": False, "base": False, "dir": False, "angle": True}
        s["point"] = {"p": True}
    if kind in ("orbit", "density"):
        run["mode"] = True
        s["budget"] = {"max_len": True, "max_exp": True, "max_points": True}
    if kind == "density":
        s["probe"] = {"center": True, "radius": True, "grid": True}
    if kind == "ladder":
        run["mode"] = False
        s["ladder"] = {"stages": True, "grid": False}
        s["probe"] = {"center": False, "radius": False}
    if kind == "gaps":
        s["gaps"] = {"angle": True, "n": True}
    if kind in ("tumble", "hexagon"):
        s["tetra"] = {"edge": True}
    if kind == "tumble":
        s["tumble"] = {"steps": True, "point": False}
    if kind == "hexagon":
        run["dedup_cell"] = False
        s["hexagon"] = {"word": False}
        s["budget"] = {"max_len": True, "max_exp": True, "max_points": True}
    if kind == "conform":
        s["conform"] = {"dir1": True, "dir2": True}
    if kind == "classify":
        s["classify"] = {"angle": True}
    return s


def validate_schema(kind: str, cfg: dict) -> None:
    schema = _schema_for(kind)
    gen_schema = schema.pop("@gen", None)
    gen_sections = []
    for sect, keys in cfg.items():
        if gen_schema is not None and _GEN_SECTION.match(sect):
            gen_sections.append(sect)
            for k in keys:
                if k not in gen_schema:
                    raise ConfigError(f"unknown key '{k}' in section [{sect}]")
            for k, required in gen_schema.items():
                if required and k not in keys:
                    raise ConfigError(f"missing key '{k}' in section [{sect}]")
            continue
        if sect not in schema:
            raise ConfigError(f"unknown section [{sect}] for experiment '{kind}'")
        for k in keys:
            if k not in schema[sect]:
                raise ConfigError(f"unknown key '{k}' in section [{sect}]")
    for sect, keys in schema.items():
        required = sorted(k for k, r in keys.items() if r)
        if not required:
            continue
        if sect not in cfg:
            raise ConfigError(f"missing section [{sect}] (required keys: {required})")
        for k in required:
            if k not in cfg[sect]:
                raise ConfigError(f"missing key '{k}' in section [{sect}]")
    if gen_schema is not None:
        nums = sorted(int(s.split()[1]) for s in gen_sections)
        if not nums:
            raise ConfigError("missing generator sections [gen 1] .. [gen N]")
        if nums != list(range(1, len(nums) + 1)):
            raise ConfigError(f"generator sections must be numbered 1..N, got {nums}")


def _get(cfg: dict, sect: str, key: str, default=None) -> str | None:
    return cfg.get(sect, {}).get(key, default)


def parse_angle_tag(text: str, where: str) -> Angle:
    """Angle tags: 'pi 1/2' | 'acos 1/3 +' | 'rad 0.5'."""
    tokens = text.split()
    try:
        if not tokens:
            raise ValueError("empty angle")
        tag, rest = tokens[0], tokens[1:]
        if tag == "pi":
            if len(rest) != 1:
                raise ValueError("'pi' takes one fraction, e.g. 'pi 1/2'")
            fr = Fraction(rest[0])
            return Angle.rational_pi(fr.numerator, fr.denominator)
        if tag == "acos":
            if len(rest) not in (1, 2):
                raise ValueError("'acos' takes a fraction and an optional sign")
            sign = 1
            if len(rest) == 2:
                if rest[1] not in ("+", "-"):
                    raise ValueError(f"sine sign must be + or -, got {rest[1]!r}")
                sign = 1 if rest[1] == "+" else -1
            return Angle.algebraic_cos(Fraction(rest[0]), sine_sign=sign)
        if tag == "rad":
            if len(rest) != 1:
                raise ValueError("'rad' takes one float")
            return Angle.raw(float(rest[0]))
        raise ValueError(f"unknown angle tag {tag!r} (use pi | acos | rad)")
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"{where}: bad angle {text!r}: {e}")


def parse_vector(text: str, where: str, dim: int | None = None) -> np.ndarray:
    try:
        vals = np.array([float(tok) for tok in text.split()], dtype=np.float64)
    except ValueError as e:
        raise ConfigError(f"{where}: bad vector {text!r}: {e}")
    if len(vals) == 0 or not np.all(np.isfinite(vals)):
        raise ConfigError(f"{where}: bad vector {text!r}")
    if dim is not None and len(vals) != dim:
        raise ConfigError(f"{where}: expected {dim} components, got {len(vals)}")
    return vals


def parse_number(text: str, where: str, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise ConfigError(f"{where}: expected {kind.__name__}, got {text!r}")


def build_generators(cfg: dict):
    dim = parse_number(_get(cfg, "generators", "dim"), "[generators] dim", int)
    if dim not in (2, 3):
        raise ConfigError("[generators] dim: must be 2 or 3")
    sections = sorted((s for s in cfg if _GEN_SECTION.match(s)),
                      key=lambda s: int(s.split()[1]))
    specs = []
    for sect in sections:
        keys = cfg[sect]
        where = f"[{sect}]"
        angle = parse_angle_tag(keys["angle"], f"{where} angle")
        if dim == 2:
            if "point" not in keys:
                raise ConfigError(f"{where}: 2D generators need 'point'")
            if "base" in keys or "dir" in keys:
                raise ConfigError(f"{where}: 'base'/'dir' are for dim 3; use 'point'")
            p = parse_vector(keys["point"], f"{where} point", 2)
            axis = Point2(float(p[0]), float(p[1]))
        else:
            if "base" not in keys or "dir" not in keys:
                raise ConfigError(f"{where}: 3D generators need 'base' and 'dir'")
            if "point" in keys:
                raise ConfigError(f"{where}: 'point' is for dim 2; use 'base'/'dir'")
            base = parse_vector(keys["base"], f"{where} base", 3)
            d = parse_vector(keys["dir"], f"{where} dir", 3)
            norm = float(np.linalg.norm(d))
            if norm < 1e-12:
                raise ConfigError(f"{where} dir: zero direction")
            axis = Line3(base=tuple(base), dir=tuple(d / norm))
        specs.append((axis, angle))
    try:
        return make_generators(dim, specs)
    except ValueError as e:
        raise ConfigError(f"[generators]: {e}")


def build_budget(cfg: dict) -> SamplerBudget:
    try:
        return SamplerBudget(
            max_len=parse_number(_get(cfg, "budget", "max_len"), "[budget] max_len", int),
            max_exp=parse_number(_get(cfg, "budget", "max_exp"), "[budget] max_exp", int),
            max_points=parse_number(_get(cfg, "budget", "max_points"),
                                    "[budget] max_points", int))
    except ValueError as e:
        raise ConfigError(f"[budget]: {e}")


def _mode(cfg: dict, default=None) -> str:
    mode = _get(cfg, "run", "mode", default)
    if mode not in ("stationary", "peripatetic"):
        raise ConfigError(f"[run] mode: must be stationary or peripatetic, got {mode!r}")
    return mode


def _dedup_cell(cfg: dict) -> float:
    raw = _get(cfg, "run", "dedup_cell")
    if raw is None:
        return DEDUP_CELL
    cell = parse_number(raw, "[run] dedup_cell", float)
    if not cell > 0:
        raise ConfigError("[run] dedup_cell: must be positive")
    return cell


def parse_edge_word(text: str, where: str):
    """Word over the six edge rotations: 'AB^1,AC^-2' (empty = identity)."""
    text = text.strip()
    if not text:
        return ()
    letters = []
    for token in text.split(","):
        token = token.strip()
        m = re.fullmatch(r"([A-D]{2})\^(-?[0-9]+)", token)
        if not m:
            raise ConfigError(f"{where}: bad token {token!r} (want e.g. AB^1)")
        key, exp = m.group(1), int(m.group(2))
        pair = tuple(sorted(key))
        if pair[0] == pair[1] or exp == 0:
            raise ConfigError(f"{where}: bad token {token!r}")
        letters.append(Letter(EDGE_KEYS.index(pair), exp))
    return tuple(letters)


# ---------------------------------------------------------------------------
# Cloud export
# ---------------------------------------------------------------------------

def format_cloud_csv(points: np.ndarray, word_len: np.ndarray) -> str:
    dim = points.shape[1]
    header = "x,y,word_len" if dim == 2 else "x,y,z,word_len"
    lines = [header]
    for row, wl in zip(points, word_len):
        coords = ",".join("%.9g" % v for v in row)
        lines.append(f"{coords},{int(wl)}")
    return "\n".join(lines) + "\n"


def format_cloud_ply(points: np.ndarray) -> str:
    # always three float32 coordinates; 2D clouds get z = 0
    n = len(points)
    lines = ["ply", "format ascii 1.0", f"element vertex {n}",
             "property float x", "property float y", "property float z",
             "end_header"]
    for row in points:
        x, y = row[0], row[1]
        z = row[2] if len(row) > 2 else 0.0
        lines.append(" ".join("%.9g" % float(np.float32(v)) for v in (x, y, z)))
    return "\n".join(lines) + "\n"


def export_cloud(cloud: OrbitCloud, format: str, path) -> None:
    """Write a cloud as CSV (9 significant digits) or ASCII PLY (float32)."""
    if not str(path):
        raise ValueError("empty export path")
    if format == "csv":
        text = format_cloud_csv(cloud.points, cloud.word_len)
    elif format == "ply":
        text = format_cloud_ply(cloud.points)
    else:
        raise ValueError(f"unknown export format {format!r} (csv|ply)")
    Path(path).write_bytes(text.encode("ascii"))


def parse_cloud_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read back an exported CSV cloud (round-trip counterpart)."""
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    dim = len(header) - 1
    pts, wl = [], []
    for line in lines[1:]:
        parts = line.split(",")
        pts.append([float(v) for v in parts[:dim]])
        wl.append(int(parts[dim]))
    return (np.array(pts, dtype=np.float64).reshape(len(pts), dim),
            np.array(wl, dtype=np.int64))


# ---------------------------------------------------------------------------
# Experiment runners: each returns (metrics, tolerances, artifacts)
# where artifacts is a list of (filename, text) pairs.
# ---------------------------------------------------------------------------

def _cloud_artifacts(points, word_len):
    return [("cloud.csv", format_cloud_csv(points, word_len)),
            ("cloud.ply", format_cloud_ply(points))]


def _base_tolerances() -> dict:
    return {"geometric_tol": GEOMETRIC_TOL, "algebraic_tol": ALGEBRAIC_TOL}


def run_orbit(cfg: dict):
    gens = build_generators(cfg)
    P = parse_vector(_get(cfg, "point", "p"), "[point] p", gens.dim)
    mode = _mode(cfg)
    budget = build_budget(cfg)
    cell = _dedup_cell(cfg)
    cloud = bfs_orbit(gens, P, mode, budget, dedup_cell=cell)
    count, min_pair = discreteness_report(cloud)
    metrics = {
        "point_count": len(cloud),
        "truncated": cloud.truncated,
        "max_word_len": int(cloud.word_len.max()) if len(cloud) else 0,
        "distinct_count": count,
        "min_pairwise_distance": min_pair,
        "mode": mode,
    }
    tol = _base_tolerances()
    tol["dedup_cell"] = cell
    return metrics, tol, _cloud_artifacts(cloud.points, cloud.word_len)


def run_density(cfg: dict):
    gens = build_generators(cfg)
    P = parse_vector(_get(cfg, "point", "p"), "[point] p", gens.dim)
    mode = _mode(cfg)
    budget = build_budget(cfg)
    cell = _dedup_cell(cfg)
    center = parse_vector(_get(cfg, "probe", "center"), "[probe] center", gens.dim)
    radius = parse_number(_get(cfg, "probe", "radius"), "[probe] radius", float)
    grid = parse_number(_get(cfg, "probe", "grid"), "[probe] grid", int)
    cloud = bfs_orbit(gens, P, mode, budget, dedup_cell=cell)
    rep = make_density_report(cloud, center, radius, grid)
    count, min_pair = discreteness_report(cloud)
    metrics = {
        "point_count": len(cloud),
        "truncated": cloud.truncated,
        "mode": mode,
        "coverage_fraction": rep.coverage_fraction,
        "mesh_estimate": rep.mesh_estimate,
        "probe_center": [float(v) for v in center],
        "probe_radius": radius,
        "grid_res": grid,
        "distinct_count": count,
        "min_pairwise_distance": min_pair,
    }
    tol = _base_tolerances()
    tol["dedup_cell"] = cell
    return metrics, tol, _cloud_artifacts(cloud.points, cloud.word_len)


def run_ladder(cfg: dict):
    mode = _get(cfg, "run", "mode", "stationary")
    if mode != "stationary":
        raise ConfigError("[run] mode: the ladder experiment is stationary-only")
    gens = build_generators(cfg)
    V = parse_vector(_get(cfg, "point", "p"), "[point] p", gens.dim)
    stages = parse_number(_get(cfg, "ladder", "stages"), "[ladder] stages", int)
    grid = parse_number(_get(cfg, "ladder", "grid", "12"), "[ladder] grid", int)
    cell = _dedup_cell(cfg)
    probe = None
    if "probe" in cfg:
        if not ("center" in cfg["probe"] and "radius" in cfg["probe"]):
            raise ConfigError("[probe]: ladder probe needs both center and radius")
        probe = (parse_vector(cfg["probe"]["center"], "[probe] center", gens.dim),
                 parse_number(cfg["probe"]["radius"], "[probe] radius", float))
    ladder = ladder_orbit(gens, V, stages, dedup_cell=cell)
    stage_rows = []
    for st in ladder:
        row = {"stage": st.stage, "axis_used": st.axis_used,
               "exp_bound": st.exp_bound, "point_count": len(st.points)}
        if probe is not None:
            row["mesh_estimate"] = mesh_estimate(st.points, probe, grid)
        stage_rows.append(row)
    nested = all(
        np.array_equal(ladder[b].points.points[:len(ladder[b - 1].points)],
                       ladder[b - 1].points.points)
        for b in range(1, len(ladder)))
    final = ladder[-1].points
    metrics = {"stages": stage_rows, "nested": nested,
               "final_point_count": len(final)}
    tol = _base_tolerances()
    tol["dedup_cell"] = cell
    tol["ladder_cond_tol"] = LADDER_COND_TOL
    return metrics, tol, _cloud_artifacts(final.points, final.word_len)


def run_gaps(cfg: dict):
    angle = parse_angle_tag(_get(cfg, "gaps", "angle"), "[gaps] angle")
    n = parse_number(_get(cfg, "gaps", "n"), "[gaps] n", int)
    rep = circle_gap_stats(angle, n)
    # circle positions for the cloud: first multiplier j to reach each spot
    x = angle.radians() / (2.0 * math.pi)
    frac = Fraction(*float(x).as_integer_ratio())
    p, q = frac.numerator, frac.denominator
    first_j: dict = {}
    for j in range(n):
        first_j.setdefault((j * p) % q, j)
    residues = sorted(first_j)
    pts = np.array([[math.cos(2.0 * math.pi * r / q),
                     math.sin(2.0 * math.pi * r / q)] for r in residues])
    wl = np.array([first_j[r] for r in residues], dtype=np.int64)
    metrics = {
        "n": rep.n,
        "turn_fraction": float(x),
        "distinct_gaps": rep.distinct_gaps,
        "max_gap": rep.max_gap,
        "gaps": [[length, count] for length, count in rep.gaps],
        "distinct_points": len(pts),
    }
    return metrics, _base_tolerances(), _cloud_artifacts(pts.reshape(len(pts), 2), wl)


def run_tumble(cfg: dict):
    edge_raw = _get(cfg, "tetra", "edge")
    edge = math.sqrt(6.0) if edge_raw.strip() == "sqrt6" else \
        parse_number(edge_raw, "[tetra] edge", float)
    try:
        t = regular_tetrahedron(edge)
    except ValueError as e:
        raise ConfigError(f"[tetra] edge: {e}")
    steps_raw = _get(cfg, "tumble", "steps")
    try:
        steps = parse_tumble_steps(tok for tok in steps_raw.split(",") if tok.strip())
    except ValueError as e:
        raise ConfigError(f"[tumble] steps: {e}")
    p_raw = _get(cfg, "tumble", "point")
    P = t.barycenter() if p_raw is None else parse_vector(p_raw, "[tumble] point", 3)
    trace = tumble(t, P, steps)
    frames = ["step,vertex,x,y,z"]
    for step, verts in enumerate(trace.vertex_history):
        for lab, v in zip(VERTEX_LABELS, verts):
            frames.append("%d,%s,%.9g,%.9g,%.9g" % (step, lab, v[0], v[1], v[2]))
    final = trace.vertex_history[-1]
    dev = 0.0
    for i in range(4):
        for j in range(i + 1, 4):
            dev = max(dev, abs(float(np.linalg.norm(final[i] - final[j])) - edge))
    wl = np.arange(len(trace.point_history), dtype=np.int64)
    metrics = {
        "edge_length": edge,
        "step_count": len(trace.steps),
        "steps": ["".join(k) if s > 0 else "-" + "".join(k) for k, s in trace.steps],
        "tracked_point_start": [float(v) for v in trace.point_history[0]],
        "tracked_point_end": [float(v) for v in trace.point_history[-1]],
        "shape_deviation": dev,
    }
    artifacts = _cloud_artifacts(trace.point_history, wl)
    artifacts.append(("frames.csv", "\n".join(frames) + "\n"))
    return metrics, _base_tolerances(), artifacts


def run_hexagon(cfg: dict):
    edge_raw = _get(cfg, "tetra", "edge")
    edge = math.sqrt(6.0) if edge_raw.strip() == "sqrt6" else \
        parse_number(edge_raw, "[tetra] edge", float)
    try:
        t = regular_tetrahedron(edge)
    except ValueError as e:
        raise ConfigError(f"[tetra] edge: {e}")
    word = parse_edge_word(_get(cfg, "hexagon", "word", ""), "[hexagon] word")
    budget = build_budget(cfg)
    cell = _dedup_cell(cfg)
    rep = hexagon_report(t, word, budget, dedup_cell=cell)
    metrics = {
        "degenerate": rep.degenerate,
        "warnings": list(rep.warnings),
        "point_count": rep.point_count,
        "min_nn_distance": rep.min_nn_distance,
        "nn_histogram": [[d, c] for d, c in rep.nn_histogram],
        "seed_triple": [list(p) for p in rep.seed_triple],
        "plane_point": None if rep.plane_point is None else list(rep.plane_point),
        "plane_normal": None if rep.plane_normal is None else list(rep.plane_normal),
    }
    tol = _base_tolerances()
    tol["dedup_cell"] = cell
    tol["slab_tol"] = rep.slab_tol
    return metrics, tol, _cloud_artifacts(rep.in_plane_points, rep.in_plane_word_len)


def run_conform(cfg: dict):
    d1 = parse_vector(_get(cfg, "conform", "dir1"), "[conform] dir1")
    d2 = parse_vector(_get(cfg, "conform", "dir2"), "[conform] dir2")
    if len(d1) != len(d2) or len(d1) not in (2, 3):
        raise ConfigError("[conform] dir1/dir2: need matching 2- or 3-vectors")
    verdict = conform_rationally(d1, d2)
    metrics = {"verdict": verdict.verdict.capitalize(), "order": verdict.order}
    tol = _base_tolerances()
    tol["max_cos_denominator"] = MAX_COS_DENOMINATOR
    return metrics, tol, []


def run_classify(cfg: dict):
    angle = parse_angle_tag(_get(cfg, "classify", "angle"), "[classify] angle")
    verdict = classify_angle(angle)
    metrics = {
        "verdict": verdict.verdict.capitalize(),
        "order": verdict.order,
        "angle_radians": angle.radians(),
    }
    tol = _base_tolerances()
    tol["max_snap_denominator"] = MAX_SNAP_DENOMINATOR
    return metrics, tol, []


RUNNERS = {
    "orbit": run_orbit,
    "density": run_density,
    "ladder": run_ladder,
    "gaps": run_gaps,
    "tumble": run_tumble,
    "hexagon": run_hexagon,
    "conform": run_conform,
    "classify": run_classify,
}


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        if math.isnan(f):
            return "nan"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def build_report(kind: str, cfg: dict, seed: int, metrics: dict,
                 tolerances: dict, artifact_names: list) -> str:
    report = {
        "schema_version": SCHEMA_VERSION,
        "experiment": kind,
        "backend": kernels.BACKEND_NAME,
        "seed": seed,
        "config": cfg,
        "tolerances": _jsonable(tolerances),
        "metrics": _jsonable(metrics),
        "artifacts": sorted(artifact_names),
    }
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rotorb",
        description="rotation-group orbit experiments (see README for configs)")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for kind in EXPERIMENTS:
        p = sub.add_parser(kind)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="overrides [run] seed (recorded in the report)")
    args = parser.parse_args(argv)

    t0 = time.perf_counter()
    try:
        cfg = read_config(args.config)
        validate_schema(args.experiment, cfg)
        declared = _get(cfg, "run", "experiment")
        if declared is not None and declared != args.experiment:
            raise ConfigError(
                f"[run] experiment: config is for {declared!r}, "
                f"command was {args.experiment!r}")
        if args.seed is not None:
            seed = args.seed
        else:
            seed = parse_number(_get(cfg, "run", "seed", "0"), "[run] seed", int)
        metrics, tolerances, artifacts = RUNNERS[args.experiment](cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        names = []
        for name, text in artifacts:
            (outdir / name).write_bytes(text.encode("ascii"))
            names.append(name)
        report = build_report(args.experiment, cfg, seed, metrics,
                              tolerances, names + ["report.json"])
        (outdir / "report.json").write_bytes(report.encode("ascii"))
        names.append("report.json")
    except OSError as e:
        print(f"error: cannot write outputs: {e}", file=sys.stderr)
        return 1

    wall = time.perf_counter() - t0
    print(f"{args.experiment}: wrote {', '.join(names)} in {args.out} "
          f"[backend={kernels.BACKEND_NAME}, wall_clock={wall:.3f}s]")
    return 0


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
