"""Periodic-orbit prospecting near a fixed point.

Finds type-(p, q) orbits by Newton iteration on f^q - id, classifies
them by their winding about the fixed point, and drives the
concentration experiment: as p/q -> 0 the found orbits should close in
on the fixed point when it is a degenerate extremum of the generating
function.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .backend import thread_count
from .errors import (HypothesisViolated, NotCritical, NotIrreducible,
                     NumericalError, OutOfWindow, PirouetteError,
                     PunctureHit)
from .rotation import blowup_rotation_number, orbit_rotation_number
from .winding import lefschetz_index


@dataclass(frozen=True)
class OrbitRecord:
    """One periodic orbit of type (p, q) around z0.

    winding always equals p for records returned by the finders; r_max
    and r_mean are distances of the orbit points to z0.
    """
    p: int
    q: int
    points: np.ndarray
    residual: float
    winding: int
    r_max: float
    r_mean: float
    finder: str = "direct"

    def __post_init__(self):
        object.__setattr__(self, "points",
                           np.asarray(self.points, dtype=float))


def orbit_measure_stats(orbit, z0):
    """(r_max, r_mean, first_moment) of the orbit's invariant measure.

    first_moment = (1/q) sum |z_i - z0| is the Wasserstein-1 distance
    between the orbit measure and the point mass at z0, radially.
    """
    pts = np.asarray(getattr(orbit, "points", orbit), dtype=float)
    z0 = np.asarray(z0, dtype=float)
    r = np.hypot(pts[:, 0] - z0[0], pts[:, 1] - z0[1])
    if len(r) == 0:
        return 0.0, 0.0, 0.0
    return float(r.max()), float(r.mean()), float(r.mean())


class OrbitSearch(list):
    """List of OrbitRecord plus search diagnostics."""

    def __init__(self, records=(), diagnostics=None):
        super().__init__(records)
        self.diagnostics = dict(diagnostics or {})


def _canonical_phase(points: np.ndarray) -> np.ndarray:
    """Rotate the cyclic order so the lexicographically smallest point
    comes first; makes orbit identity phase-independent."""
    idx = min(range(len(points)),
              key=lambda i: (points[i, 0], points[i, 1]))
    return np.vstack([points[idx:], points[:idx]])


def _same_orbit(a: np.ndarray, b: np.ndarray, tol: float = 1e-7) -> bool:
    if len(a) != len(b):
        return False
    for pt in a:
        if np.min(np.hypot(b[:, 0] - pt[0], b[:, 1] - pt[1])) > tol:
            return False
    return True


def _newton_pq(map_obj, seed, q, tol, max_iter):
    """Damped Newton for f^q(z) = z. Returns (z, residual) or None."""
    z = np.asarray(seed, dtype=float)
    try:
        pts, J = map_obj.orbit_jacobian(z, q)
    except PirouetteError:
        return None
    F = pts[-1] - z
    res = float(np.hypot(F[0], F[1]))
    for _ in range(max_iter):
        if res < tol:
            return z, res
        A = J - np.eye(2)
        try:
            step = np.linalg.solve(A, -F)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        scale = 1.0
        for _ in range(8):
            trial = z + scale * step
            try:
                tp, tJ = map_obj.orbit_jacobian(trial, q)
            except PirouetteError:
                scale *= 0.5
                continue
            tF = tp[-1] - trial
            tres = float(np.hypot(tF[0], tF[1]))
            if np.isfinite(tres) and tres < res:
                z, pts, J, F, res = trial, tp, tJ, tF, tres
                break
            scale *= 0.5
        else:
            return (z, res) if res < tol else None
    return (z, res) if res < tol else None


def find_pq_orbit(map_obj, z0, p: int, q: int, seed_ring,
                  tol: float = 1e-12, max_iter: int = 80,
                  finder_label: str = "direct") -> OrbitSearch:
    """All distinct (p, q)-orbits reached from a ring of Newton seeds.

    seed_ring is (radius, count): seeds equally spaced on the circle of
    that radius around z0. An empty result is valid; the diagnostics
    carry seed counts and the best residual seen.
    """
    p, q = int(p), int(q)
    if q < 1:
        raise ValueError("q must be at least 1")
    if math.gcd(abs(p), q) != 1:
        raise NotIrreducible(f"{p}/{q} is not in lowest terms")
    z0 = np.asarray(z0, dtype=float)
    radius, count = float(seed_ring[0]), int(seed_ring[1])
    seeds = [z0 + radius * np.array([math.cos(2 * math.pi * i / count),
                                     math.sin(2 * math.pi * i / count)])
             for i in range(count)]

    def work(seed):
        return _newton_pq(map_obj, seed, q, tol, max_iter)

    workers = thread_count()
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            roots = list(ex.map(work, seeds))
    else:
        roots = [work(s) for s in seeds]

    diag = {"seeds": len(seeds), "converged": 0, "off_winding": 0,
            "degenerate": 0, "duplicates": 0, "failed": 0,
            "best_residual": math.inf}
    records = []
    kept_points = []
    for root in roots:
        if root is None:
            diag["failed"] += 1
            continue
        z, res = root
        diag["converged"] += 1
        diag["best_residual"] = min(diag["best_residual"], res)
        try:
            pts = map_obj.iterate(z, q)[:q]
        except PirouetteError:
            diag["failed"] += 1
            continue
        # reject collapsed chains: repeated points or the fixed point
        gaps = [np.hypot(*(pts[i] - pts[j]))
                for i in range(q) for j in range(i + 1, q)]
        if (gaps and min(gaps) <= 1e-8) or \
                np.min(np.hypot(pts[:, 0] - z0[0],
                                pts[:, 1] - z0[1])) <= 1e-8:
            diag["degenerate"] += 1
            continue
        try:
            sample = orbit_rotation_number(map_obj, z, z0, q)
        except (PunctureHit, NumericalError, OutOfWindow):
            diag["failed"] += 1
            continue
        w = sample.rho_n * q
        w_int = int(round(w))
        if abs(w - w_int) > 1e-6 or w_int != p:
            diag["off_winding"] += 1
            continue
        canon = _canonical_phase(pts)
        if any(_same_orbit(canon, kp) for kp in kept_points):
            diag["duplicates"] += 1
            continue
        kept_points.append(canon)
        r = np.hypot(canon[:, 0] - z0[0], canon[:, 1] - z0[1])
        records.append(OrbitRecord(p, q, canon, res, w_int,
                                   float(r.max()), float(r.mean()),
                                   finder_label))
    if not np.isfinite(diag["best_residual"]):
        diag["best_residual"] = None
    records.sort(key=lambda r: (r.points[0, 0], r.points[0, 1]))
    return OrbitSearch(records, diag)


# ---------------------------------------------------------------------------
# twist profile and seed-radius fitting


def twist_profile(map_obj, z0, radii=None, n: int = 200,
                  angle: float = 0.0):
    """(radius, rotation) table sampled along one ray from z0.

    Radii whose orbit escapes the window are dropped; the table may be
    shorter than requested.
    """
    z0 = np.asarray(z0, dtype=float)
    w = map_obj.window
    R = min(z0[0] - w.xmin, w.xmax - z0[0],
            z0[1] - w.ymin, w.ymax - z0[1])
    if radii is None:
        radii = np.linspace(0.05 * R, 0.97 * R, 16)
    out = []
    direction = np.array([math.cos(angle), math.sin(angle)])
    for r in radii:
        z = z0 + float(r) * direction
        try:
            s = orbit_rotation_number(map_obj, z, z0, n)
        except PirouetteError:
            continue
        out.append((float(r), float(s.rho_n)))
    return out


def _fit_seed_radius(profile, target: float, R: float) -> Optional[float]:
    """Radius where the quadratic model rho = rho0 + c r^2 meets the
    target rotation; None when the fit cannot be made."""
    if len(profile) < 3:
        return None
    r = np.array([a for a, _ in profile])
    rho = np.array([b for _, b in profile])
    try:
        coef = np.polynomial.polynomial.polyfit(r * r, rho, 1)
    except Exception:
        return None
    rho0, c = float(coef[0]), float(coef[1])
    if c == 0.0:
        return None
    v = (target - rho0) / c
    if not np.isfinite(v):
        return None
    if v <= 0.0:
        # target on the wrong side; clamp into the ring range and let
        # Newton fail honestly if no orbit lives there
        return 0.97 * R
    return float(min(max(math.sqrt(v), 0.02 * R), 0.97 * R))


def seed_rings_for(map_obj, z0, p: int, q: int,
                   profile=None) -> list:
    """Seed rings (radius, count) targeting rotation p/q.

    Uses the twist-profile fit; falls back to three geometric radii
    when the fit fails. Ring count is 8q seeds, Newton basins of high-q
    orbits being thin annuli.
    """
    z0 = np.asarray(z0, dtype=float)
    w = map_obj.window
    R = min(z0[0] - w.xmin, w.xmax - z0[0],
            z0[1] - w.ymin, w.ymax - z0[1])
    count = 8 * q
    if profile is None:
        profile = twist_profile(map_obj, z0)
    fitted = _fit_seed_radius(profile, p / q, R)
    if fitted is None:
        base = 0.8 * R
        return [(base * 0.6 ** i, count) for i in range(3)]
    radii = sorted({min(max(fitted * s, 0.02 * R), 0.97 * R)
                    for s in (0.92, 1.0, 1.06)})
    return [(r, count) for r in radii]


# ---------------------------------------------------------------------------
# the concentration experiment


@dataclass(frozen=True)
class PropertyPReport:
    """Outcome of the orbit-concentration experiment near rotation
    number k = 0.

    concentration holds one (p/q, r_max, r_mean) row per q with at
    least one orbit found; success means every tested q produced an
    orbit and r_max strictly decreases along the q list.
    """
    k: int
    side: str
    tested: tuple
    found: tuple
    concentration: tuple
    hypothesis_ok: bool
    hypothesis_notes: tuple
    success: bool
    diagnostics: dict = field(default_factory=dict)


def property_p_experiment(map_obj, z0, side: str, q_list: Sequence[int],
                          index_radius: float = 0.2,
                          strict_hypothesis: bool = False,
                          tol: float = 1e-12) -> PropertyPReport:
    """Hunt (sign(side), q)-orbits for each q and tabulate how fast
    they concentrate on the fixed point.

    The theorem's hypotheses (Lefschetz index 1, parabolic linear part)
    are checked first and recorded; violations flag the report, and
    raise only when strict_hypothesis is set.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    p = 1 if side == "+" else -1
    z0 = np.asarray(z0, dtype=float)
    notes = []
    try:
        rep = lefschetz_index(map_obj, z0, index_radius)
        if rep.value != 1:
            notes.append(f"Lefschetz index is {rep.value}, not 1")
    except PirouetteError as e:
        notes.append(f"Lefschetz check failed: {e}")
    try:
        br = blowup_rotation_number(map_obj, z0)
        if not br.parabolic:
            notes.append("linearization is not parabolic "
                         f"(rotation {br.turns:.6g})")
    except PirouetteError as e:
        notes.append(f"blow-up rotation check failed: {e}")
    hypothesis_ok = not notes
    if notes and strict_hypothesis:
        raise HypothesisViolated("; ".join(notes))

    profile = twist_profile(map_obj, z0)
    tested = []
    found = []
    concentration = []
    diagnostics = {"profile_points": len(profile), "per_q": {}}
    for q in q_list:
        q = int(q)
        tested.append((p, q))
        rings = seed_rings_for(map_obj, z0, p, q, profile)
        merged = []
        ring_diags = []
        for ring in rings:
            search = find_pq_orbit(map_obj, z0, p, q, ring, tol=tol)
            ring_diags.append({"ring": ring, **search.diagnostics})
            for rec in search:
                if not any(_same_orbit(rec.points, m.points)
                           for m in merged):
                    merged.append(rec)
        merged.sort(key=lambda r: (r.points[0, 0], r.points[0, 1]))
        found.extend(merged)
        diagnostics["per_q"][q] = ring_diags
        if merged:
            best = min(merged, key=lambda r: r.r_max)
            concentration.append((p / q, best.r_max, best.r_mean))
    all_found = len(concentration) == len(list(q_list))
    rs = [row[1] for row in concentration]
    decreasing = all(b < a for a, b in zip(rs, rs[1:]))
    success = all_found and decreasing
    return PropertyPReport(0, side, tuple(tested), tuple(found),
                           tuple(concentration), hypothesis_ok,
                           tuple(notes), success, diagnostics)


# ---------------------------------------------------------------------------
# degenerate-extremum probe


@dataclass(frozen=True)
class ProbeReport:
    """Which of the degenerate-extremum proxy checks hold.

    extremum_ok: per factor, z0 is a strict local extremum on the probe
    ring. eigenvalue_ok: both eigenvalues of the composed Jacobian are
    within 1e-8 of 1. index_ok: the composed Lefschetz index is 1.
    """
    extremum_ok: tuple
    eigenvalue_ok: bool
    eigenvalues: tuple
    index_ok: bool
    index_value: Optional[int]
    ring_radius: float
    index_radius: float
    notes: tuple = ()

    @property
    def all_hold(self) -> bool:
        return (all(self.extremum_ok) and self.eigenvalue_ok
                and self.index_ok)


def degenerate_extremum_probe(factorization, z0,
                              ring_radius: Optional[float] = None,
                              ring_points: int = 64,
                              index_radius: float = 0.2) -> ProbeReport:
    """Affirmative proxy for a degenerate extremum at z0: strict
    extremum of every factor, eigenvalue 1 only, composed index 1."""
    z0 = np.asarray(z0, dtype=float)
    for j, m in enumerate(factorization.maps):
        moved = float(np.linalg.norm(m.forward(z0) - z0))
        if moved > 1e-10:
            raise NotCritical(f"factor {j} moves z0 by {moved:.3e}")
    if ring_radius is None:
        ring_radius = 0.02 * factorization.window.span
    angles = np.linspace(0.0, 2.0 * math.pi, ring_points, endpoint=False)
    ring = z0 + ring_radius * np.column_stack([np.cos(angles),
                                               np.sin(angles)])
    extremum_ok = []
    for g in factorization.factors:
        center = g.value(z0[0], z0[1])
        vals = np.array([g.value(x, y) for x, y in ring])
        extremum_ok.append(bool(np.all(vals < center)
                                or np.all(vals > center)))
    J = factorization.jacobian(z0)
    lam = np.linalg.eigvals(J)
    eigenvalue_ok = bool(np.all(np.abs(lam - 1.0) <= 1e-8))
    notes = []
    index_value = None
    try:
        index_value = lefschetz_index(factorization, z0,
                                      index_radius).value
        index_ok = index_value == 1
    except PirouetteError as e:
        index_ok = False
        notes.append(f"index computation failed: {e}")
    return ProbeReport(tuple(extremum_ok), eigenvalue_ok,
                       tuple(complex(v) for v in lam), index_ok,
                       index_value, float(ring_radius),
                       float(index_radius), tuple(notes))
