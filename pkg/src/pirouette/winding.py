"""Angle lifting, Brouwer degrees, Lefschetz and isotopy indices.

All winding counts run through one adaptive engine: sample a closed curve,
bisect any segment whose field direction turns by a quarter turn or more,
and sum the principal-value increments. The only failure mode is angular
aliasing, and the guard rules it out within a sample budget.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (Aliased, FixedPointOnCurve, NotCritical, NotIsolated,
                     VanishingField)

TWO_PI = 2.0 * math.pi
MAX_SAMPLES = 2 ** 20
STEP_GUARD = 0.5 * math.pi


def _principal(d: float) -> float:
    """Wrap an angle difference into (-pi, pi]."""
    d = math.fmod(d + math.pi, TWO_PI)
    if d <= 0.0:
        d += TWO_PI
    return d - math.pi


@dataclass(frozen=True)
class Circle:
    """Closed curve t -> center + radius * (cos 2 pi t, sin 2 pi t)."""
    center: tuple
    radius: float

    def __call__(self, t: float) -> np.ndarray:
        a = TWO_PI * t
        return np.array([self.center[0] + self.radius * math.cos(a),
                         self.center[1] + self.radius * math.sin(a)])

    @property
    def scale(self) -> float:
        return self.radius


class Polyline:
    """Closed polyline through the given vertices, parametrized on [0, 1]."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if len(v) > 1 and np.allclose(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise ValueError("a closed polyline needs at least 3 vertices")
        self.vertices = v

    def __call__(self, t: float) -> np.ndarray:
        n = len(self.vertices)
        s = (t % 1.0) * n
        i = min(int(s), n - 1)
        frac = s - i
        a = self.vertices[i]
        b = self.vertices[(i + 1) % n]
        return a + frac * (b - a)

    @property
    def scale(self) -> float:
        v = self.vertices
        return float(max(v[:, 0].ptp(), v[:, 1].ptp()))


def _as_curve(curve):
    if callable(curve):
        return curve
    return Polyline(curve)


@dataclass(frozen=True)
class LiftedPath:
    """A path in the punctured plane together with a continuous angle lift.

    angles[i] is an unwrapped angular coordinate (radians) of samples[i]
    around the puncture; consecutive angles differ by less than a quarter
    turn, so no winding can hide between samples.
    """
    samples: np.ndarray
    angles: np.ndarray
    puncture: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        a = np.asarray(self.angles, dtype=float)
        p = np.asarray(self.puncture, dtype=float)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "angles", a)
        object.__setattr__(self, "puncture", p)
        if len(s) != len(a) or len(s) < 2:
            raise ValueError("samples and angles must match, length >= 2")
        steps = np.abs(np.diff(a))
        if steps.size and steps.max() >= STEP_GUARD:
            raise Aliased("angle step of a quarter turn or more "
                          "between consecutive samples")
        rel = s - p
        r = np.hypot(rel[:, 0], rel[:, 1])
        if r.min() <= 0.0:
            raise VanishingField("path touches the puncture")
        raw = np.arctan2(rel[:, 1], rel[:, 0])
        mis = np.abs(np.remainder(a - raw + math.pi, TWO_PI) - math.pi)
        if mis.max() > 1e-9:
            raise ValueError("angles are not a lift of the sample "
                             "directions")

    @property
    def turns(self) -> float:
        return float(self.angles[-1] - self.angles[0]) / TWO_PI

    @staticmethod
    def from_curve(curve: Callable[[float], Sequence[float]], puncture,
                   t0: float = 0.0, t1: float = 1.0, initial: int = 33,
                   budget: int = MAX_SAMPLES) -> "LiftedPath":
        """Adaptively sample curve(t) on [t0, t1] and lift its angle."""
        p = np.asarray(puncture, dtype=float)

        def probe(t):
            z = np.asarray(curve(t), dtype=float)
            rel = z - p
            r = math.hypot(rel[0], rel[1])
            if r <= 0.0:
                raise VanishingField("path touches the puncture")
            return z, math.atan2(rel[1], rel[0])

        ts = list(np.linspace(t0, t1, max(2, initial)))
        data = [probe(t) for t in ts]
        used = len(ts)
        i = 0
        while i < len(ts) - 1:
            a0 = data[i][1]
            a1 = data[i + 1][1]
            if abs(_principal(a1 - a0)) < STEP_GUARD:
                i += 1
                continue
            if used >= budget:
                raise Aliased("sample budget exhausted while refining "
                              "the angle lift")
            tm = 0.5 * (ts[i] + ts[i + 1])
            if tm == ts[i] or tm == ts[i + 1]:
                raise Aliased("angle jump persists at machine resolution")
            ts.insert(i + 1, tm)
            data.insert(i + 1, probe(tm))
            used += 1
        samples = np.array([d[0] for d in data])
        angles = np.empty(len(data))
        angles[0] = data[0][1]
        for j in range(1, len(data)):
            angles[j] = angles[j - 1] + _principal(data[j][1]
                                                   - angles[j - 1])
        return LiftedPath(samples, angles, p)


@dataclass(frozen=True)
class IndexReport:
    """Result of a fixed-point index computation."""
    value: int
    curve_radius: float
    samples_used: int
    min_displacement: float


def _winding(field, curve, initial: int, budget: int,
             vanish_tol: float):
    """Adaptive winding number of field along the closed curve.

    Returns (integer winding, samples used, min |field| seen).
    """
    def probe(t):
        v = np.asarray(field(curve(t)), dtype=float)
        n = math.hypot(v[0], v[1])
        if not np.isfinite(n) or n < vanish_tol:
            raise VanishingField(
                f"|field| = {n:.3e} below threshold {vanish_tol:.3e} "
                f"at curve parameter {t:.6g}")
        return math.atan2(v[1], v[0]), n

    ts = list(np.linspace(0.0, 1.0, max(3, initial)))
    data = [probe(t) for t in ts]
    used = len(ts)
    min_disp = min(d[1] for d in data)
    total = 0.0
    i = 0
    while i < len(ts) - 1:
        step = _principal(data[i + 1][0] - data[i][0])
        if abs(step) < STEP_GUARD:
            total += step
            i += 1
            continue
        if used >= budget:
            raise Aliased("sample budget exhausted before the step "
                          "guard held everywhere")
        tm = 0.5 * (ts[i] + ts[i + 1])
        if tm == ts[i] or tm == ts[i + 1]:
            raise Aliased("direction jump persists at machine resolution")
        ts.insert(i + 1, tm)
        d = probe(tm)
        data.insert(i + 1, d)
        min_disp = min(min_disp, d[1])
        used += 1
    k = total / TWO_PI
    value = int(round(k))
    if abs(k - value) > 0.25:
        raise Aliased(f"winding sum {k:.4f} is far from an integer")
    return value, used, min_disp


def brouwer_degree(field: Callable, curve, initial: int = 64,
                   budget: int = MAX_SAMPLES,
                   vanish_tol: Optional[float] = None) -> int:
    """Integer winding of the field direction along a closed curve.

    curve is a Circle, any callable t -> point on [0, 1] with matching
    endpoints, or a vertex array (treated as a closed polyline).
    """
    c = _as_curve(curve)
    if vanish_tol is None:
        scale = getattr(c, "scale", 1.0)
        vanish_tol = 1e-10 * scale
    value, _, _ = _winding(field, c, initial, budget, vanish_tol)
    return value


def lefschetz_index(map_obj, z0, radius: float, initial: int = 64,
                    budget: int = MAX_SAMPLES) -> IndexReport:
    """Winding of z -> f(z) - z on a circle around the fixed point z0.

    Screens that z0 is actually fixed, that no other fixed point sits
    within twice the radius, and that halving the radius leaves the
    integer unchanged.
    """
    z0 = np.asarray(z0, dtype=float)
    radius = float(radius)
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    fz0 = map_obj.forward(z0)
    if np.linalg.norm(fz0 - z0) > 1e-10:
        raise NotCritical(f"z0 moves by {np.linalg.norm(fz0 - z0):.3e}; "
                          "not a fixed point to 1e-10")

    def displacement(z):
        return map_obj.forward(z) - z

    # isolation screen on an annulus grid, keeping clear of z0 itself
    screen_tol = 1e-10 * radius
    for r in np.linspace(0.25 * radius, 2.0 * radius, 12):
        for a in np.linspace(0.0, TWO_PI, 24, endpoint=False):
            z = z0 + r * np.array([math.cos(a), math.sin(a)])
            d = np.linalg.norm(displacement(z))
            if d < screen_tol:
                if abs(r - radius) < 1e-12 * radius:
                    raise FixedPointOnCurve(
                        f"fixed point on the index curve at angle {a:.4f}")
                raise NotIsolated(
                    f"another fixed point candidate at distance {r:.4g} "
                    "from z0")

    try:
        value, used, min_disp = _winding(
            displacement, Circle(tuple(z0), radius), initial, budget,
            1e-10 * radius)
    except VanishingField as e:
        raise FixedPointOnCurve(str(e)) from None
    value_half, _, _ = _winding(
        displacement, Circle(tuple(z0), 0.5 * radius), initial, budget,
        1e-10 * 0.5 * radius)
    if value_half != value:
        raise NotIsolated(
            f"index changed from {value} to {value_half} under radius "
            "halving; the fixed point is not isolated at this scale")
    return IndexReport(value, radius, used, min_disp)


def _trajectory_turns(map_obj, z, z0, initial: int = 33,
                      budget: int = MAX_SAMPLES) -> tuple:
    """Unwrapped turns of s -> f_s(z) around z0, plus the endpoint."""
    if hasattr(map_obj, "isotopy_path"):
        cache = {}

        def curve(s):
            key = float(s)
            if key not in cache:
                cache[key] = map_obj.isotopy_path(z, [key])[0]
            return cache[key]

        # batch the initial grid in one call
        s_init = np.linspace(0.0, 1.0, initial)
        pts = map_obj.isotopy_path(z, s_init)
        for s, p in zip(s_init, pts):
            cache[float(s)] = p
    else:
        def curve(s):
            return map_obj(s).forward(z)

    lp = LiftedPath.from_curve(curve, z0, 0.0, 1.0, initial, budget)
    return lp.turns, lp.samples[-1]


def isotopy_index(map_family, z0, radius: float, initial: int = 64,
                  traj_samples: int = 33,
                  budget: int = MAX_SAMPLES) -> int:
    """Index of the isotopy around its fixed point z0.

    The circle of the given radius is carried to the universal cover of
    the punctured plane; a point at angle u turns by w(u) along its
    isotopy trajectory and lands at distance r1(u) from z0. The index is
    the winding of the closed loop

        u -> (w(u), radius - r1(u))

    over one fundamental segment of the cover. The radial coordinate is
    flipped because the covering chart reverses orientation.
    """
    z0 = np.asarray(z0, dtype=float)
    radius = float(radius)
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    if hasattr(map_family, "at_time"):
        family = map_family
    else:
        class _Wrap:
            def __init__(self, fn):
                self._fn = fn

            def at_time(self, t):
                return self._fn(t)

            def isotopy_path(self, z, s_values):
                return np.array([self._fn(s).forward(z)
                                 for s in np.asarray(s_values, float)])

        family = _Wrap(map_family)

    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        moved = np.linalg.norm(family.at_time(t).forward(z0) - z0)
        if moved > 1e-10:
            raise NotCritical(f"z0 moves by {moved:.3e} at isotopy time "
                              f"{t}; not fixed along the family")

    def displacement(u):
        a = TWO_PI * float(u)
        z = z0 + radius * np.array([math.cos(a), math.sin(a)])
        w, end = _trajectory_turns(family, z, z0, traj_samples, budget)
        return np.array([w, radius - np.linalg.norm(end - z0)])

    value, _, _ = _winding(lambda t: displacement(t),
                           lambda t: t, initial, budget, 1e-10 * radius)
    return value
