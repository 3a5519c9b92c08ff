"""Command-line experiment harness.

One run = one subcommand + one config (file plus flag overrides; flags
win). Tables go out as CSV with a header row and 17-significant-digit
decimals; summaries as flat "key = value" text. Identical configs
produce byte-identical tables.

Exit statuses: 0 success, 2 config or domain error, 3 hypothesis
violated, 4 numerical nonconvergence, 5 internal invariant breach.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .action import ActionChain, find_critical_point
from .catalog import CatalogEntry, resolve_map
from .errors import (ConfigInvalid, DomainError, HypothesisViolated,
                     InvariantBreach, NumericalError, PirouetteError)
from .prospector import (find_pq_orbit, property_p_experiment,
                         seed_rings_for, _same_orbit)
from .rotation import local_rotation_set
from .winding import isotopy_index, lefschetz_index

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NUMERICAL = 4
EXIT_INVARIANT = 5

_COMMON_KEYS = {"map", "fixed_point", "output", "seed", "t"}
_SUB_KEYS = {
    "map-eval": {"points", "n_iter"},
    "index": {"radius", "variant", "samples"},
    "rotation": {"u_radius", "v_radius", "n_max", "n_min", "grid"},
    "orbits": {"p", "q", "ring_radius", "ring_count", "tolerance",
               "reingest"},
    "action": {"q", "seed_points", "ring_radius", "ring_count",
               "tolerance"},
    "property-p": {"q_list", "side", "index_radius", "strict"},
}


@dataclass
class ExperimentConfig:
    """Validated inputs for one run."""
    subcommand: str
    map_spec: object
    values: dict = field(default_factory=dict)

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    def require(self, key):
        v = self.values.get(key)
        if v is None:
            raise ConfigInvalid(
                f"{self.subcommand} needs the {key!r} setting")
        return v


def _fmt(v) -> str:
    """17-significant-digit decimal for floats, plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _write_summary(path, items):
    lines = [f"{k} = {_fmt(v)}" for k, v in items]
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _point(value, name):
    try:
        x, y = (float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigInvalid(f"{name} must be a pair of numbers") \
            from None
    return np.array([x, y])


def load_config(subcommand: str, file_values: dict,
                flag_values: dict) -> ExperimentConfig:
    """Merge config-file values with flag overrides (flags win) and
    validate keys for the subcommand."""
    allowed = _COMMON_KEYS | _SUB_KEYS[subcommand]
    merged = {}
    for source in (file_values, flag_values):
        for k, v in source.items():
            if v is not None:
                merged[k] = v
    unknown = sorted(set(merged) - allowed)
    if unknown:
        raise ConfigInvalid(
            "unknown config key(s) for " + subcommand + ": "
            + ", ".join(unknown))
    if "map" not in merged:
        raise ConfigInvalid(f"{subcommand} needs a map")
    return ExperimentConfig(subcommand, merged.pop("map"), merged)


def _resolve(cfg: ExperimentConfig):
    entry = resolve_map(cfg.map_spec)
    t = float(cfg.get("t", 1.0))
    if t != 1.0:
        if entry.k != 1:
            raise ConfigInvalid("time scaling applies to single-factor "
                                "maps only")
        return entry, entry.map.at_time(t)
    return entry, entry.map


def _orbit_rows_and_summary(records, z0, map_obj, prefix):
    """Flat orbit table rows plus summary items; residual stored per
    orbit is the largest cyclic step mismatch, recomputable from the
    table alone."""
    rows = []
    items = []
    for n, rec in enumerate(records):
        res = _cyclic_residual(map_obj, rec.points)
        for idx, (x, y) in enumerate(rec.points):
            rows.append((rec.q, rec.p, idx, x, y,
                         float(np.hypot(x - z0[0], y - z0[1]))))
        items += [
            (f"{prefix}.{n}.q", rec.q),
            (f"{prefix}.{n}.p", rec.p),
            (f"{prefix}.{n}.winding", rec.winding),
            (f"{prefix}.{n}.residual", res),
            (f"{prefix}.{n}.r_max", rec.r_max),
            (f"{prefix}.{n}.r_mean", rec.r_mean),
            (f"{prefix}.{n}.finder", rec.finder),
        ]
    return rows, items


def _cyclic_residual(map_obj, points) -> float:
    res = 0.0
    q = len(points)
    for j in range(q):
        img = map_obj.forward(points[j])
        gap = img - points[(j + 1) % q]
        res = max(res, float(np.hypot(gap[0], gap[1])))
    return res


# ---------------------------------------------------------------------------
# subcommands


def _run_map_eval(cfg, entry, map_obj, out):
    points = cfg.require("points")
    n_iter = int(cfg.get("n_iter", 100))
    if n_iter < 1:
        raise ConfigInvalid("n_iter must be positive")
    rows = []
    truncated = 0
    for k, pt in enumerate(points):
        z = _point(pt, "points entry")
        try:
            seg = map_obj.iterate(z, n_iter)
        except PirouetteError:
            # keep what stays in the window
            seg = [z]
            for _ in range(n_iter):
                try:
                    seg.append(map_obj.forward(seg[-1]))
                except PirouetteError:
                    truncated += 1
                    break
            seg = np.array(seg)
        for step, (x, y) in enumerate(seg):
            rows.append((k, step, x, y))
    _write_csv(None if out is None else out + "_orbits.csv",
               ("orbit", "step", "x", "y"), rows)
    _write_summary(None if out is None else out + "_summary.txt", [
        ("subcommand", "map-eval"),
        ("map", entry.name),
        ("points", len(points)),
        ("n_iter", n_iter),
        ("truncated", truncated),
        ("rows", len(rows)),
    ])
    return EXIT_OK


def _run_index(cfg, entry, map_obj, out):
    z0 = _point(cfg.get("fixed_point", (0.0, 0.0)), "fixed_point")
    radius = float(cfg.require("radius"))
    variant = cfg.get("variant", "lefschetz")
    samples = int(cfg.get("samples", 64))
    if variant == "lefschetz":
        rep = lefschetz_index(map_obj, z0, radius, initial=samples)
        items = [("subcommand", "index"), ("map", entry.name),
                 ("variant", variant), ("radius", radius),
                 ("value", rep.value),
                 ("samples_used", rep.samples_used),
                 ("min_displacement", rep.min_displacement)]
    elif variant == "isotopy":
        value = isotopy_index(map_obj, z0, radius, initial=samples)
        items = [("subcommand", "index"), ("map", entry.name),
                 ("variant", variant), ("radius", radius),
                 ("value", value)]
    else:
        raise ConfigInvalid(
            f"variant must be lefschetz or isotopy, not {variant!r}")
    _write_summary(None if out is None else out + "_summary.txt", items)
    return EXIT_OK


def _run_rotation(cfg, entry, map_obj, out):
    z0 = _point(cfg.get("fixed_point", (0.0, 0.0)), "fixed_point")
    est = local_rotation_set(
        map_obj, z0,
        U_radius=float(cfg.require("u_radius")),
        V_radius=float(cfg.require("v_radius")),
        n_max=int(cfg.require("n_max")),
        grid=int(cfg.get("grid", 12)),
        n_min=None if cfg.get("n_min") is None else int(cfg.get("n_min")),
    )
    rows = [(s.z[0], s.z[1], s.n, s.rho_n, s.cesaro_bound)
            for s in est.observed]
    _write_csv(None if out is None else out + "_samples.csv",
               ("x", "y", "n", "rho_n", "cesaro_bound"), rows)
    items = [("subcommand", "rotation"), ("map", entry.name),
             ("u_radius", est.U_radius), ("v_radius", est.V_radius),
             ("samples", len(est.observed)), ("empty", est.empty)]
    if est.hull is not None:
        items += [("hull_lo", est.hull[0]), ("hull_hi", est.hull[1])]
    _write_summary(None if out is None else out + "_summary.txt", items)
    return EXIT_OK


def _run_orbits(cfg, entry, map_obj, out):
    if cfg.get("reingest") is not None:
        return _reingest(cfg, map_obj)
    z0 = _point(cfg.get("fixed_point", (0.0, 0.0)), "fixed_point")
    p = int(cfg.require("p"))
    q = int(cfg.require("q"))
    tol = float(cfg.get("tolerance", 1e-12))
    if cfg.get("ring_radius") is not None:
        rings = [(float(cfg.get("ring_radius")),
                  int(cfg.get("ring_count", 8 * q)))]
    else:
        rings = seed_rings_for(map_obj, z0, p, q)
    merged = []
    diags = []
    for ring in rings:
        search = find_pq_orbit(map_obj, z0, p, q, ring, tol=tol)
        diags.append(search.diagnostics)
        for rec in search:
            if not any(_same_orbit(rec.points, m.points) for m in merged):
                merged.append(rec)
    merged.sort(key=lambda r: (r.q, r.points[0, 0], r.points[0, 1]))
    rows, orbit_items = _orbit_rows_and_summary(merged, z0, map_obj,
                                                "orbit")
    _write_csv(None if out is None else out + "_orbits.csv",
               ("q", "p", "idx", "x", "y", "r"), rows)
    seeds = sum(d["seeds"] for d in diags)
    _write_summary(None if out is None else out + "_summary.txt", [
        ("subcommand", "orbits"), ("map", entry.name),
        ("p", p), ("q", q), ("rings", len(rings)), ("seeds", seeds),
        ("orbits", len(merged)),
    ] + orbit_items)
    return EXIT_OK


def _read_summary(path):
    items = {}
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if " = " in line:
                k, v = line.split(" = ", 1)
                items[k] = v
    return items


def _reingest(cfg, map_obj):
    """Re-validate an emitted orbit table: rebuild each orbit from its
    rows and require the recomputed residual under twice the stored
    one."""
    prefix = cfg.get("reingest")
    table = prefix + "_orbits.csv"
    summary = _read_summary(prefix + "_summary.txt")
    orbits = []
    with open(table) as fh:
        header = fh.readline().strip().split(",")
        if header[:6] != ["q", "p", "idx", "x", "y", "r"]:
            raise ConfigInvalid(f"{table} is not an orbit table")
        for line in fh:
            qs, ps, idxs, xs, ys, _ = line.strip().split(",")
            if int(idxs) == 0:
                orbits.append([])
            orbits[-1].append((float(xs), float(ys)))
    checked = 0
    for n, pts in enumerate(orbits):
        stored = float(summary[f"orbit.{n}.residual"])
        recomputed = _cyclic_residual(map_obj, np.array(pts))
        if recomputed >= 2.0 * max(stored, 1e-15):
            raise InvariantBreach(
                f"orbit {n} residual {recomputed:.3e} exceeds twice "
                f"the stored {stored:.3e}")
        checked += 1
    _write_summary(None, [
        ("subcommand", "orbits"), ("mode", "reingest"),
        ("table", table), ("orbits_checked", checked),
        ("valid", True),
    ])
    return EXIT_OK


def _run_action(cfg, entry, map_obj, out):
    q = int(cfg.require("q"))
    tol = float(cfg.get("tolerance", 1e-10))
    puncture = _point(cfg.get("fixed_point", (0.0, 0.0)), "fixed_point")
    fact = entry.factorization
    seeds = []
    if cfg.get("seed_points") is not None:
        flat = np.asarray(cfg.get("seed_points"), dtype=float).ravel()
        if flat.size != 2 * fact.k * q:
            raise ConfigInvalid(
                f"seed_points needs {2 * fact.k * q} numbers "
                f"(k*q points), got {flat.size}")
        seeds.append(ActionChain(fact, q,
                                 flat.reshape(fact.k * q, 2)))
    else:
        radius = float(cfg.require("ring_radius"))
        count = int(cfg.get("ring_count", 8))
        for i in range(count):
            ang = 2.0 * np.pi * i / count
            z = radius * np.array([np.cos(ang), np.sin(ang)])
            try:
                seeds.append(ActionChain.from_orbit(fact, q, z))
            except PirouetteError:
                continue
    reports = []
    for chain in seeds:
        try:
            rep = find_critical_point(fact, q, chain, tol=tol,
                                      puncture=puncture)
        except PirouetteError:
            continue
        if not rep.converged:
            continue
        z = rep.orbit_point
        # a chain converging onto a phase rotation of a kept orbit is
        # the same critical circle of the action
        if any(np.min(np.hypot(r.chain.points[:, 0] - z[0],
                               r.chain.points[:, 1] - z[1])) <= 1e-7
               for r in reports):
            continue
        reports.append(rep)
    reports.sort(key=lambda r: (r.orbit_point[0], r.orbit_point[1]))
    rows = []
    items = [("subcommand", "action"), ("map", entry.name),
             ("q", q), ("seeds", len(seeds)),
             ("critical_points", len(reports))]
    for n, rep in enumerate(reports):
        for j, (x, y) in enumerate(rep.chain.points):
            rows.append((n, j, x, y))
        items += [(f"critical.{n}.grad_norm", rep.grad_norm),
                  (f"critical.{n}.morse_index", rep.morse_index),
                  (f"critical.{n}.nullity", rep.nullity),
                  (f"critical.{n}.p", "" if rep.p is None else rep.p),
                  (f"critical.{n}.x", rep.orbit_point[0]),
                  (f"critical.{n}.y", rep.orbit_point[1])]
    _write_csv(None if out is None else out + "_chains.csv",
               ("critical", "j", "x", "y"), rows)
    _write_summary(None if out is None else out + "_summary.txt", items)
    return EXIT_OK


def _run_property_p(cfg, entry, map_obj, out):
    z0 = _point(cfg.get("fixed_point", (0.0, 0.0)), "fixed_point")
    q_list = cfg.require("q_list")
    if isinstance(q_list, str):
        q_list = [s for s in q_list.split(",") if s]
    try:
        q_list = [int(q) for q in q_list]
    except (TypeError, ValueError):
        raise ConfigInvalid("q_list must be a list of integers") \
            from None
    if not q_list or any(q < 1 for q in q_list):
        raise ConfigInvalid("q_list must hold positive integers")
    side = cfg.get("side", "+")
    if side not in ("+", "-"):
        raise ConfigInvalid(f"side must be + or -, not {side!r}")
    report = property_p_experiment(
        map_obj, z0, side, q_list,
        index_radius=float(cfg.get("index_radius", 0.2)),
        strict_hypothesis=bool(cfg.get("strict", False)))
    _write_csv(None if out is None else out + "_concentration.csv",
               ("p_over_q", "r_max", "r_mean"), report.concentration)
    rows, orbit_items = _orbit_rows_and_summary(report.found, z0,
                                                map_obj, "orbit")
    _write_csv(None if out is None else out + "_orbits.csv",
               ("q", "p", "idx", "x", "y", "r"), rows)
    items = [("subcommand", "property-p"), ("map", entry.name),
             ("k", report.k), ("side", report.side),
             ("tested", " ".join(f"{p}/{q}" for p, q in report.tested)),
             ("hypothesis_ok", report.hypothesis_ok)]
    items += [("hypothesis_note", n) for n in report.hypothesis_notes]
    items += [("orbits_found", len(report.found)),
              ("success", report.success)]
    items += orbit_items
    _write_summary(None if out is None else out + "_summary.txt", items)
    return EXIT_OK


_RUNNERS = {
    "map-eval": _run_map_eval,
    "index": _run_index,
    "rotation": _run_rotation,
    "orbits": _run_orbits,
    "action": _run_action,
    "property-p": _run_property_p,
}


def run(subcommand: str, cfg: ExperimentConfig) -> int:
    """Dispatch one validated config; returns the exit status."""
    entry, map_obj = _resolve(cfg)
    out = cfg.get("output")
    return _RUNNERS[subcommand](cfg, entry, map_obj, out)


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="pirouette",
        description="Experiments on area-preserving maps given by "
                    "generating functions.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--map", help="catalog name or definition file")
        p.add_argument("--fixed-point", nargs=2, type=float,
                       metavar=("X", "Y"), dest="fixed_point")
        p.add_argument("--output", help="output path prefix")
        p.add_argument("--seed", type=int,
                       help="random seed recorded with the run")
        p.add_argument("--t", type=float, help="map time in [0, 1]")

    p = sub.add_parser("map-eval", help="iterate seed points to a table")
    common(p)
    p.add_argument("--points", help="JSON list of [x, y] seeds")
    p.add_argument("--n-iter", type=int, dest="n_iter")

    p = sub.add_parser("index", help="fixed-point index report")
    common(p)
    p.add_argument("--radius", type=float)
    p.add_argument("--isotopy", action="store_const", const="isotopy",
                   dest="variant", help="isotopy index instead of the "
                   "fixed-point index")
    p.add_argument("--samples", type=int)

    p = sub.add_parser("rotation", help="local rotation set estimate")
    common(p)
    p.add_argument("--u-radius", type=float, dest="u_radius")
    p.add_argument("--v-radius", type=float, dest="v_radius")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--n-min", type=int, dest="n_min")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("orbits", help="find (p, q)-periodic orbits")
    common(p)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--ring-radius", type=float, dest="ring_radius")
    p.add_argument("--ring-count", type=int, dest="ring_count")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--reingest", metavar="PREFIX",
                   help="re-validate a previously emitted orbit table")

    p = sub.add_parser("action", help="critical chains of the action")
    common(p)
    p.add_argument("--q", type=int)
    p.add_argument("--seed-points", dest="seed_points",
                   help="JSON flat list of chain coordinates")
    p.add_argument("--ring-radius", type=float, dest="ring_radius")
    p.add_argument("--ring-count", type=int, dest="ring_count")
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("property-p",
                       help="orbit-concentration experiment")
    common(p)
    p.add_argument("--q", dest="q_list",
                   help="comma-separated q values, e.g. 5,8,12,20")
    p.add_argument("--side", choices=["+", "-"])
    p.add_argument("--index-radius", type=float, dest="index_radius")
    p.add_argument("--strict", action="store_true", default=None)
    return ap


def _flag_values(ns) -> dict:
    skip = {"config", "subcommand"}
    out = {}
    for k, v in vars(ns).items():
        if k in skip or v is None:
            continue
        if k in ("points", "seed_points") and isinstance(v, str):
            try:
                v = json.loads(v)
            except json.JSONDecodeError:
                raise ConfigInvalid(f"--{k.replace('_', '-')} must be "
                                    "JSON") from None
        out[k] = v
    return out


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    try:
        file_values = {}
        if ns.config:
            try:
                with open(ns.config) as fh:
                    file_values = json.load(fh)
            except OSError as e:
                raise ConfigInvalid(f"cannot read config: {e}") \
                    from None
            except json.JSONDecodeError as e:
                raise ConfigInvalid(f"config is not valid JSON: {e}") \
                    from None
            if not isinstance(file_values, dict):
                raise ConfigInvalid("config must be a JSON object")
        cfg = load_config(ns.subcommand, file_values, _flag_values(ns))
        return run(ns.subcommand, cfg)
    except (ConfigInvalid, DomainError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except HypothesisViolated as e:
        print(f"hypothesis violated: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvariantBreach as e:
        print(f"invariant breach: {e}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
