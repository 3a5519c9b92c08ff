"""Rotation numbers in turns: linearized (blow-up), per orbit, sampled
local rotation sets, and exact Farey-interval arithmetic.

All angular quantities here are in turns, so rational rotation numbers
p/q are exact and integer bookkeeping shifts are exact.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .backend import kernels, thread_count
from .errors import (DomainError, EmptySample, NotCritical, NotIrreducible,
                     OutOfWindow, PunctureHit, SeedDisagreement,
                     VanishingField)
from .winding import MAX_SAMPLES, LiftedPath

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# blow-up (linearized) rotation number


@dataclass(frozen=True)
class BlowupRotation:
    """Rotation number of the unit-tangent circle map of the Jacobian.

    turns is the representative in (-1/2, 1/2]. parabolic means an
    eigenvector of eigenvalue 1 was found, which makes 0 exact. flagged
    means the seed spread exceeded the standard tolerance but the matrix
    is borderline parabolic, so the value carries a widened error bar.
    """
    turns: float
    spread: float
    parabolic: bool = False
    flagged: bool = False
    seeds_used: int = 0

    def __float__(self) -> float:
        return self.turns


def _representative(rho: float) -> float:
    r = rho - math.floor(rho + 0.5)
    if r <= -0.5:
        r += 1.0
    return r


def blowup_rotation_number(map_obj, z0, n_iter: int = 2 ** 16,
                           n_seeds: int = 8) -> BlowupRotation:
    """Poincare rotation number of v -> Jv/|Jv| for J the Jacobian at
    the fixed point z0.

    A parabolic Jacobian (eigenvector of eigenvalue 1 to 1e-8) returns 0
    exactly with the parabolic flag set, without iterating.
    """
    z0 = np.asarray(z0, dtype=float)
    moved = np.linalg.norm(map_obj.forward(z0) - z0)
    if moved > 1e-10:
        raise NotCritical(f"z0 moves by {moved:.3e}; not a fixed point")
    J = np.asarray(map_obj.jacobian(z0), dtype=float)
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    if abs(det) < 1e-12:
        raise DomainError("Jacobian at z0 is singular")

    lam, vec = np.linalg.eig(J)
    scale = max(1.0, float(np.abs(lam).max()))
    for i in range(2):
        if abs(lam[i] - 1.0) <= 1e-8 * scale and abs(lam[i].imag) <= 1e-8:
            v = np.real(vec[:, i])
            nv = np.linalg.norm(v)
            if nv > 0 and np.linalg.norm(J @ v - v) <= 1e-8 * nv * scale:
                return BlowupRotation(0.0, 0.0, parabolic=True)

    seed_angles = np.ascontiguousarray(
        np.linspace(0.0, TWO_PI, n_seeds, endpoint=False))
    totals = np.asarray(kernels.spin(float(J[0, 0]), float(J[0, 1]),
                                     float(J[1, 0]), float(J[1, 1]),
                                     int(n_iter), seed_angles))
    per_seed = totals / (TWO_PI * n_iter)
    spread = float(per_seed.max() - per_seed.min())
    rho = _representative(float(per_seed.mean()))
    tol = 2.0 / n_iter
    if spread > tol:
        trace = J[0, 0] + J[1, 1]
        if abs(abs(trace) - 2.0) < 1e-6:
            return BlowupRotation(rho, spread, flagged=True,
                                  seeds_used=n_seeds)
        raise SeedDisagreement(
            f"seed spread {spread:.3e} turns exceeds {tol:.3e}")
    return BlowupRotation(rho, spread, seeds_used=n_seeds)


# ---------------------------------------------------------------------------
# per-orbit rotation number


@dataclass(frozen=True)
class RotationSample:
    """Finite-time rotation number rho_n of one orbit segment.

    cesaro_bound = 2 * (largest single-iterate turn) / n bounds how much
    rho can move when n is doubled.
    """
    z: np.ndarray
    n: int
    rho_n: float
    cesaro_bound: float


def _segment_turns(map_obj, z, z0, traj_samples: int, budget: int,
                   puncture_tol: float):
    """Turns of the isotopy trajectory s -> f_s(z) around z0."""
    def curve(s):
        return map_obj.isotopy_path(z, [float(s)])[0]

    try:
        lp = LiftedPath.from_curve(curve, z0, 0.0, 1.0, traj_samples,
                                   budget)
    except VanishingField as e:
        raise PunctureHit(str(e)) from None
    rel = lp.samples - z0
    dmin = float(np.hypot(rel[:, 0], rel[:, 1]).min())
    if dmin < puncture_tol:
        raise PunctureHit(f"trajectory within {dmin:.3e} of the puncture")
    return lp.turns, lp.samples[-1]


def orbit_rotation_number(map_obj, z, z0, n: int, power: int = 1,
                          extra_turns: int = 0, traj_samples: int = 17,
                          budget: int = MAX_SAMPLES) -> RotationSample:
    """Average turns per iterate about z0 along the isotopy trajectory,
    concatenated over n iterates.

    power and extra_turns recompute the bookkeeping for the isotopy that
    runs the base one power times and then adds extra_turns full turns:
    the returned rho_n is power * rho_base + extra_turns.
    """
    z = np.asarray(z, dtype=float)
    z0 = np.asarray(z0, dtype=float)
    if n < 1:
        raise ValueError("n must be at least 1")
    pts = map_obj.iterate(z, n)
    ptol = 1e-10 * max(1.0, map_obj.window.span)
    total = 0.0
    max_step = 0.0
    for j in range(n):
        turns, _ = _segment_turns(map_obj, pts[j], z0, traj_samples,
                                  budget, ptol)
        total += turns
        max_step = max(max_step, abs(turns))
    rho = power * (total / n) + extra_turns
    return RotationSample(z, n, rho, 2.0 * max_step / n)


# ---------------------------------------------------------------------------
# sampled local rotation set


@dataclass(frozen=True)
class RotationSetEstimate:
    """Finite-sample snapshot of the local rotation set near z0.

    A sample (z, n) qualifies when the whole orbit segment stays in the
    disk U, and both endpoints lie outside the inner disk V. The hull is
    an outer estimate of a sampled inner approximation: a heuristic, not
    the limit object.
    """
    U_radius: float
    V_radius: float
    n_range: tuple
    observed: tuple
    hull: Optional[tuple]

    @property
    def empty(self) -> bool:
        return len(self.observed) == 0


def _seed_samples(map_obj, seed, z0, U, V, n_min, n_max, traj_samples,
                  budget, ptol):
    """All qualifying (z, n) samples for one grid seed."""
    out = []
    z = np.asarray(seed, dtype=float)
    prefix = 0.0
    turns_at = [0.0]
    pts = [z]
    cur = z
    max_step = 0.0
    for j in range(n_max):
        try:
            turns, nxt = _segment_turns(map_obj, cur, z0, traj_samples,
                                        budget, ptol)
        except (OutOfWindow, PunctureHit):
            break
        if np.linalg.norm(nxt - z0) > U:
            break
        prefix += turns
        max_step = max(max_step, abs(turns))
        turns_at.append(prefix)
        pts.append(nxt)
        cur = nxt
    for n in range(n_min, min(len(pts) - 1, n_max) + 1):
        if np.linalg.norm(pts[n] - z0) <= V:
            continue
        out.append(RotationSample(z, n, turns_at[n] / n,
                                  2.0 * max_step / n))
    return out


def local_rotation_set(map_obj, z0, U_radius: float, V_radius: float,
                       n_max: int, grid: int, n_min: Optional[int] = None,
                       traj_samples: int = 17, budget: int = MAX_SAMPLES,
                       strict: bool = False) -> RotationSetEstimate:
    """Collect rho_n over grid seeds in the annulus V < |z - z0| <= U.

    With strict=True an empty collection raises EmptySample; otherwise
    the estimate is returned with hull None.
    """
    z0 = np.asarray(z0, dtype=float)
    if not (0.0 < V_radius < U_radius):
        raise DomainError("need 0 < V_radius < U_radius")
    w = map_obj.window
    if not (w.contains(z0[0] - U_radius, z0[1] - U_radius)
            and w.contains(z0[0] + U_radius, z0[1] + U_radius)):
        raise OutOfWindow("outer disk does not fit inside the window")
    if n_min is None:
        n_min = max(1, n_max // 2)
    if not (1 <= n_min <= n_max):
        raise DomainError("need 1 <= n_min <= n_max")
    ptol = 1e-10 * max(1.0, w.span)

    xs = np.linspace(z0[0] - U_radius, z0[0] + U_radius, grid)
    ys = np.linspace(z0[1] - U_radius, z0[1] + U_radius, grid)
    seeds = []
    for y in ys:
        for x in xs:
            r = math.hypot(x - z0[0], y - z0[1])
            if V_radius < r <= U_radius:
                seeds.append((x, y))

    def work(seed):
        return _seed_samples(map_obj, seed, z0, U_radius, V_radius,
                             n_min, n_max, traj_samples, budget, ptol)

    workers = thread_count()
    if workers > 1 and len(seeds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(work, seeds))
    else:
        chunks = [work(s) for s in seeds]
    observed = tuple(s for chunk in chunks for s in chunk)
    if not observed:
        if strict:
            raise EmptySample("no grid orbit satisfied the membership "
                              "predicate")
        return RotationSetEstimate(U_radius, V_radius, (n_min, n_max),
                                   (), None)
    rhos = [s.rho_n for s in observed]
    return RotationSetEstimate(U_radius, V_radius, (n_min, n_max),
                               observed, (min(rhos), max(rhos)))


def local_rotation_scan(map_obj, z0, U_radius: float, n_max: int,
                        grid: int, V_ratio: float = 0.25,
                        levels: int = 3, shrink: float = 0.5,
                        **kw):
    """Nested shrinking-U snapshots plus a qualitative convergence label.

    Labels: 'stable' (hulls agree within sampling slack), 'contracting'
    (each hull sits inside the previous one and widths shrink),
    'empty' (no level produced samples), else 'inconclusive'.
    """
    estimates = []
    for i in range(levels):
        U = U_radius * shrink ** i
        estimates.append(local_rotation_set(
            map_obj, z0, U, U * V_ratio, n_max, grid, **kw))
    hulls = [e.hull for e in estimates if e.hull is not None]
    if not hulls:
        return estimates, "empty"
    if len(hulls) < len(estimates):
        return estimates, "inconclusive"
    # sampling slack: the worst finite-n drift bound among the samples
    slack = max(s.cesaro_bound for e in estimates for s in e.observed)
    stable = all(abs(h[0] - hulls[0][0]) < slack
                 and abs(h[1] - hulls[0][1]) < slack for h in hulls)
    if stable:
        return estimates, "stable"
    contracting = True
    for a, b in zip(hulls, hulls[1:]):
        inside = b[0] >= a[0] - slack and b[1] <= a[1] + slack
        narrower = (b[1] - b[0]) <= (a[1] - a[0]) + slack
        if not (inside and narrower):
            contracting = False
            break
    if contracting:
        return estimates, "contracting"
    return estimates, "inconclusive"


# ---------------------------------------------------------------------------
# Farey intervals


@dataclass(frozen=True)
class FareyInterval:
    """Maximal interval around p/q whose interior contains no rational
    with denominator below q."""
    p: int
    q: int
    lo: Fraction
    hi: Fraction


def farey_interval(p: int, q: int) -> FareyInterval:
    """Exact integer-arithmetic Farey interval of p/q.

    lo is the largest rational below p/q with denominator below q, hi
    the smallest one above. q = 1 admits no such denominators, so the
    interval is undefined.
    """
    p, q = int(p), int(q)
    if q < 1 or p < 1:
        raise DomainError("need a positive rational p/q with q >= 1")
    if math.gcd(p, q) != 1:
        raise NotIrreducible(f"{p}/{q} is not in lowest terms")
    if q == 1:
        raise DomainError("q = 1 admits no denominators below q; "
                          "the Farey interval is undefined")
    target = Fraction(p, q)
    lo = None
    hi = None
    for s in range(1, q):
        r = (p * s) // q
        below = Fraction(r, s)
        above = Fraction(r + 1, s)
        if below < target and (lo is None or below > lo):
            lo = below
        if above > target and (hi is None or above < hi):
            hi = above
    return FareyInterval(p, q, lo, hi)


# ---------------------------------------------------------------------------
# exact rigid rotations


def rigid_rotation_terms(beta: float):
    """Polynomial terms of the generating function of the rotation by
    angle beta (radians, positive = clockwise): the map is
    (x, y) -> (x cos b + y sin b, -x sin b + y cos b).

    Valid as a generating function while |1 - 1/cos(beta)| < 1, that is
    |beta| < pi/3 (one sixth of a turn).
    """
    c = math.cos(beta)
    if c <= 0.5:
        raise DomainError("rigid rotation exceeds the twist bound; "
                          "|beta| must stay below pi/3")
    a = math.tan(beta) / 2.0
    b = 1.0 - 1.0 / c
    return [(2, 0, a), (1, 1, b), (0, 2, a)]
