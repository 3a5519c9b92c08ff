"""Generating functions and the planar maps they define.

A generating function g with |d2d1 g| < 1 on a rectangular window defines an
area-preserving map (x, y) -> (X, Y) through

    X - x = t * d2g(X, y)
    Y - y = -t * d1g(X, y)

where t in [0, 1] is the isotopy time (t=1 is the full map, t=0 the
identity). Everything downstream (winding numbers, rotation numbers, action
chains) is built on the operations here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .backend import kernels
from .errors import (InvariantBreach, NonConvergence, NormalFormViolated,
                     NotCritical, OrbitEscaped, OutOfWindow)

Point = Sequence[float]

_CODE_OK = 0
_CODE_NO_ROOT = 1
_CODE_NO_CONVERGENCE = 2
_CODE_BAD_INPUT = 3
_CODE_ESCAPED = 4


@dataclass(frozen=True)
class Window:
    """Axis-aligned validity rectangle."""
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("window must have positive extent")

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def clip(self, x: float, y: float):
        return (min(max(x, self.xmin), self.xmax),
                min(max(y, self.ymin), self.ymax))

    @property
    def span(self) -> float:
        return max(self.xmax - self.xmin, self.ymax - self.ymin)

    def grid(self, n: int) -> np.ndarray:
        """n*n sample points covering the rectangle, corners included."""
        xs = np.linspace(self.xmin, self.xmax, n)
        ys = np.linspace(self.ymin, self.ymax, n)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def random_points(self, n: int, seed: int = 12345) -> np.ndarray:
        rng = np.random.default_rng(seed)
        xs = rng.uniform(self.xmin, self.xmax, n)
        ys = rng.uniform(self.ymin, self.ymax, n)
        return np.column_stack([xs, ys])

    def intersect(self, other: "Window") -> "Window":
        return Window(max(self.xmin, other.xmin), min(self.xmax, other.xmax),
                      max(self.ymin, other.ymin), min(self.ymax, other.ymax))

    def as_list(self):
        return [self.xmin, self.xmax, self.ymin, self.ymax]


def _fd_gradient(value, x, y, h):
    return ((value(x + h, y) - value(x - h, y)) / (2 * h),
            (value(x, y + h) - value(x, y - h)) / (2 * h))


@dataclass(frozen=True)
class GeneratingFunction:
    """Scalar function with gradient, Hessian, window and a twist bound.

    twist_bound is an upper bound for |d2d1 g| on the window and must be
    strictly below 1; it certifies that the implicit map equation has a
    unique solution.
    """
    value: Callable[[float, float], float]
    gradient: Callable[[float, float], np.ndarray]
    hessian: Callable[[float, float], np.ndarray]
    window: Window
    twist_bound: float
    terms: Optional[tuple] = None
    _pi: Optional[np.ndarray] = field(default=None, repr=False)
    _pj: Optional[np.ndarray] = field(default=None, repr=False)
    _co: Optional[np.ndarray] = field(default=None, repr=False)

    # -- constructors --------------------------------------------------

    @staticmethod
    def from_terms(terms, window, twist_bound: Optional[float] = None
                   ) -> "GeneratingFunction":
        """Build from [(i, j, c), ...] meaning sum of c * x^i * y^j.

        Derivatives are exact. When twist_bound is omitted it is set from
        a dense grid sup of |d2d1 g| with a 2 percent margin.
        """
        if isinstance(window, (list, tuple)):
            window = Window(*window)
        terms = tuple((int(i), int(j), float(c)) for i, j, c in terms)
        for i, j, _ in terms:
            if i < 0 or j < 0:
                raise ValueError("negative exponents are not allowed")
        pi = np.ascontiguousarray([t[0] for t in terms], dtype=np.int64)
        pj = np.ascontiguousarray([t[1] for t in terms], dtype=np.int64)
        co = np.ascontiguousarray([t[2] for t in terms], dtype=np.float64)
        if len(co) == 0:
            pi = np.zeros(1, dtype=np.int64)
            pj = np.zeros(1, dtype=np.int64)
            co = np.zeros(1, dtype=np.float64)

        def value(x, y):
            return kernels.poly_vgh(pi, pj, co, x, y)[0]

        def gradient(x, y):
            v = kernels.poly_vgh(pi, pj, co, x, y)
            return np.array([v[1], v[2]])

        def hessian(x, y):
            v = kernels.poly_vgh(pi, pj, co, x, y)
            return np.array([[v[3], v[4]], [v[4], v[5]]])

        if twist_bound is None:
            sup = _grid_twist_sup(hessian, window, 64)
            twist_bound = sup * 1.02 if sup > 0 else 0.0
        gf = GeneratingFunction(value, gradient, hessian, window,
                                float(twist_bound), terms, pi, pj, co)
        gf._check_twist_grid()
        return gf

    @staticmethod
    def from_callables(value, gradient, hessian, window, twist_bound,
                       audit: bool = True) -> "GeneratingFunction":
        """Wrap arbitrary callables; they must pass the derivative audit."""
        if isinstance(window, (list, tuple)):
            window = Window(*window)

        def grad_arr(x, y):
            return np.asarray(gradient(x, y), dtype=float)

        def hess_arr(x, y):
            return np.asarray(hessian(x, y), dtype=float)

        gf = GeneratingFunction(value, grad_arr, hess_arr, window,
                                float(twist_bound))
        if audit:
            gf.audit()
        return gf

    # -- scalar accessors ---------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return self._co is not None

    def d1(self, x, y):
        return float(self.gradient(x, y)[0])

    def d2(self, x, y):
        return float(self.gradient(x, y)[1])

    def d11(self, x, y):
        return float(self.hessian(x, y)[0, 0])

    def d12(self, x, y):
        return float(self.hessian(x, y)[0, 1])

    def d22(self, x, y):
        return float(self.hessian(x, y)[1, 1])

    # -- audits --------------------------------------------------------

    def audit(self, n_points: int = 16, seed: int = 12345):
        """Check gradient vs finite differences, Hessian symmetry and the
        twist bound; raises InvariantBreach on any failure."""
        pts = self.window.random_points(n_points, seed)
        h = 3e-6 * (1.0 + self.window.span)
        for x, y in pts:
            x, y = self.window.clip(x, y)
            # keep the finite-difference stencil inside the window
            x = min(max(x, self.window.xmin + h), self.window.xmax - h)
            y = min(max(y, self.window.ymin + h), self.window.ymax - h)
            gx, gy = self.gradient(x, y)
            fx, fy = _fd_gradient(self.value, x, y, h)
            scale = max(1.0, abs(gx), abs(gy))
            if abs(gx - fx) > 1e-6 * scale or abs(gy - fy) > 1e-6 * scale:
                raise InvariantBreach(
                    f"gradient does not match finite differences at "
                    f"({x:.6g}, {y:.6g})")
            H = self.hessian(x, y)
            if abs(H[0, 1] - H[1, 0]) > 1e-10 * max(1.0, np.abs(H).max()):
                raise InvariantBreach("hessian asymmetry beyond tolerance")
        self._check_twist_grid()

    def _check_twist_grid(self, n: int = 32):
        if not self.twist_bound < 1.0:
            raise InvariantBreach("twist bound must be below 1")
        for x, y in self.window.grid(n):
            v = abs(self.d12(x, y))
            if v > self.twist_bound + 1e-12:
                raise InvariantBreach(
                    f"|d2d1 g| = {v:.6g} exceeds the declared twist bound "
                    f"{self.twist_bound:.6g} at ({x:.6g}, {y:.6g})")


def _grid_twist_sup(hessian, window: Window, n: int) -> float:
    sup = 0.0
    for x, y in window.grid(n):
        sup = max(sup, abs(float(hessian(x, y)[0, 1])))
    return sup


# ---------------------------------------------------------------------------


def _raise_for_code(code: int, what: str, count: int = -1):
    if code == _CODE_OK:
        return
    if code in (_CODE_NO_ROOT, _CODE_BAD_INPUT):
        raise OutOfWindow(f"{what}: point or solution left the window")
    if code == _CODE_NO_CONVERGENCE:
        raise NonConvergence(f"{what}: iteration budget exhausted")
    if code == _CODE_ESCAPED:
        raise OrbitEscaped(f"{what}: orbit left the window after "
                           f"{count} steps")
    raise InvariantBreach(f"{what}: unknown solver code {code}")


@dataclass(frozen=True)
class GeneratedMap:
    """The map generated by t*g, with its solver settings."""
    g: GeneratingFunction
    t: float = 1.0
    solver_tol: float = 1e-12
    solver_max_iter: int = 64

    @property
    def window(self) -> Window:
        return self.g.window

    def at_time(self, t: float) -> "GeneratedMap":
        return replace(self, t=float(t))

    # -- single-point operations --------------------------------------

    def forward(self, z: Point, x_seed: Optional[float] = None) -> np.ndarray:
        x, y = float(z[0]), float(z[1])
        if self.g.is_polynomial:
            w = self.window
            X, Y, code = kernels.solve_forward(
                self.g._pi, self.g._pj, self.g._co, self.t, x, y,
                w.xmin, w.xmax, w.ymin, w.ymax,
                self.solver_tol, self.solver_max_iter,
                x if x_seed is None else float(x_seed))
            _raise_for_code(code, "forward")
            return np.array([X, Y])
        X, Y, code = _generic_forward(self.g, self.t, x, y, self.solver_tol,
                                      self.solver_max_iter,
                                      x if x_seed is None else float(x_seed))
        _raise_for_code(code, "forward")
        return np.array([X, Y])

    def inverse(self, z: Point) -> np.ndarray:
        X, Y = float(z[0]), float(z[1])
        if self.g.is_polynomial:
            w = self.window
            x, y, code = kernels.solve_inverse(
                self.g._pi, self.g._pj, self.g._co, self.t, X, Y,
                w.xmin, w.xmax, w.ymin, w.ymax,
                self.solver_tol, self.solver_max_iter)
            _raise_for_code(code, "inverse")
            return np.array([x, y])
        x, y, code = _generic_inverse(self.g, self.t, X, Y, self.solver_tol,
                                      self.solver_max_iter)
        _raise_for_code(code, "inverse")
        return np.array([x, y])

    def jacobian(self, z: Point) -> np.ndarray:
        """Derivative matrix at z, from the closed form at (X, y)."""
        x, y = float(z[0]), float(z[1])
        X, _ = self.forward(z)
        H = self.g.hessian(X, y)
        rho, sig, tau = H[0, 0], H[0, 1], H[1, 1]
        t = self.t
        pref = 1.0 / (1.0 - t * sig)
        return pref * np.array([
            [1.0, t * tau],
            [-t * rho, -t * t * rho * tau + (1.0 - t * sig) ** 2]])

    # -- orbit operations ---------------------------------------------

    def iterate(self, z: Point, n: int) -> np.ndarray:
        """(n+1, 2) orbit segment starting at z."""
        x, y = float(z[0]), float(z[1])
        if self.g.is_polynomial:
            w = self.window
            pts, count, code = kernels.iterate_orbit(
                self.g._pi, self.g._pj, self.g._co, self.t, x, y, int(n),
                w.xmin, w.xmax, w.ymin, w.ymax,
                self.solver_tol, self.solver_max_iter)
            _raise_for_code(code, "iterate", count)
            return pts
        pts = np.empty((n + 1, 2))
        pts[0] = (x, y)
        for i in range(n):
            try:
                pts[i + 1] = self.forward(pts[i])
            except OutOfWindow:
                raise OrbitEscaped(f"iterate: orbit left the window after "
                                   f"{i} steps") from None
        return pts

    def orbit_jacobian(self, z: Point, q: int):
        """(points (q+1, 2), chain-product Jacobian of the q-th iterate)."""
        x, y = float(z[0]), float(z[1])
        if self.g.is_polynomial:
            w = self.window
            pts, J, count, code = kernels.orbit_jacobian(
                self.g._pi, self.g._pj, self.g._co, self.t, x, y, int(q),
                w.xmin, w.xmax, w.ymin, w.ymax,
                self.solver_tol, self.solver_max_iter)
            _raise_for_code(code, "orbit_jacobian", count)
            return pts, J
        pts = np.empty((q + 1, 2))
        pts[0] = (x, y)
        J = np.eye(2)
        for i in range(q):
            J = self.jacobian(pts[i]) @ J
            pts[i + 1] = self.forward(pts[i])
        return pts, J

    def isotopy_path(self, z: Point, s_values) -> np.ndarray:
        """Points f_s(z) for each s in s_values."""
        x, y = float(z[0]), float(z[1])
        s_values = np.asarray(s_values, dtype=float)
        if self.g.is_polynomial:
            w = self.window
            pts, count, code = kernels.isotopy_points(
                self.g._pi, self.g._pj, self.g._co, s_values, x, y,
                w.xmin, w.xmax, w.ymin, w.ymax,
                self.solver_tol, self.solver_max_iter)
            _raise_for_code(code, "isotopy_path", count)
            return pts
        return np.array([self.at_time(s).forward(z) for s in s_values])


def _generic_forward(g: GeneratingFunction, t, x, y, tol, maxit, x_seed):
    """Window-bracketed Newton for non-polynomial generating functions.

    Mirrors the kernel algorithm so both paths behave identically.
    """
    w = g.window
    if not w.contains(x, y):
        return math.nan, math.nan, _CODE_BAD_INPUT
    if t == 0.0:
        return x, y, _CODE_OK
    lo, hi = w.xmin, w.xmax
    X = min(max(x_seed, lo), hi)
    for _ in range(maxit):
        gx, gy = g.gradient(X, y)
        e = X - x - t * gy
        if abs(e) < tol:
            return X, y - t * gx, _CODE_OK
        if e > 0.0:
            hi = X
        else:
            lo = X
        if hi - lo < 4e-16 * (1.0 + abs(X)):
            return math.nan, math.nan, _CODE_NO_ROOT
        d = 1.0 - t * g.d12(X, y)
        if d > 0.0:
            Xn = X - e / d
            if not (lo < Xn < hi):
                Xn = 0.5 * (lo + hi)
        else:
            Xn = 0.5 * (lo + hi)
        X = Xn
    return math.nan, math.nan, _CODE_NO_CONVERGENCE


def _generic_inverse(g: GeneratingFunction, t, X, Y, tol, maxit):
    w = g.window
    if not (w.xmin <= X <= w.xmax):
        return math.nan, math.nan, _CODE_BAD_INPUT
    if t == 0.0:
        if not (w.ymin <= Y <= w.ymax):
            return math.nan, math.nan, _CODE_BAD_INPUT
        return X, Y, _CODE_OK
    lo, hi = w.ymin, w.ymax
    yv = min(max(Y, lo), hi)
    for _ in range(maxit):
        gx, gy = g.gradient(X, yv)
        e = yv - t * gx - Y
        if abs(e) < tol:
            xv = X - t * gy
            if not (w.xmin <= xv <= w.xmax):
                return math.nan, math.nan, _CODE_NO_ROOT
            return xv, yv, _CODE_OK
        if e > 0.0:
            hi = yv
        else:
            lo = yv
        if hi - lo < 4e-16 * (1.0 + abs(yv)):
            return math.nan, math.nan, _CODE_NO_ROOT
        d = 1.0 - t * g.d12(X, yv)
        if d > 0.0:
            yn = yv - e / d
            if not (lo < yn < hi):
                yn = 0.5 * (lo + hi)
        else:
            yn = 0.5 * (lo + hi)
        yv = yn
    return math.nan, math.nan, _CODE_NO_CONVERGENCE


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MapFactorization:
    """Ordered factors g_0, ..., g_{k-1}; the composed map is
    f_{k-1} o ... o f_0."""
    factors: tuple
    solver_tol: float = 1e-12
    solver_max_iter: int = 64

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("factorization needs at least one factor")

    @property
    def k(self) -> int:
        return len(self.factors)

    @property
    def maps(self):
        return tuple(GeneratedMap(g, 1.0, self.solver_tol,
                                  self.solver_max_iter)
                     for g in self.factors)

    @property
    def window(self) -> Window:
        w = self.factors[0].window
        for g in self.factors[1:]:
            w = w.intersect(g.window)
        return w

    def forward(self, z: Point) -> np.ndarray:
        for m in self.maps:
            z = m.forward(z)
        return np.asarray(z, dtype=float)

    def inverse(self, z: Point) -> np.ndarray:
        for m in reversed(self.maps):
            z = m.inverse(z)
        return np.asarray(z, dtype=float)

    def jacobian(self, z: Point) -> np.ndarray:
        J = np.eye(2)
        for m in self.maps:
            J = m.jacobian(z) @ J
            z = m.forward(z)
        return J

    def iterate(self, z: Point, n: int) -> np.ndarray:
        pts = np.empty((n + 1, 2))
        pts[0] = np.asarray(z, dtype=float)
        for i in range(n):
            pts[i + 1] = self.forward(pts[i])
        return pts

    def orbit_jacobian(self, z: Point, q: int):
        pts = np.empty((q + 1, 2))
        pts[0] = np.asarray(z, dtype=float)
        J = np.eye(2)
        for i in range(q):
            J = self.jacobian(pts[i]) @ J
            pts[i + 1] = self.forward(pts[i])
        return pts, J

    def at_time(self, s: float) -> "_StagedMap":
        return _StagedMap(self, float(s))

    def isotopy_path(self, z: Point, s_values) -> np.ndarray:
        """The factor isotopies run one after another: stage j covers
        s in [j/k, (j+1)/k]."""
        return np.array([self.at_time(s).forward(z)
                         for s in np.asarray(s_values, dtype=float)])


@dataclass(frozen=True)
class _StagedMap:
    """Time-s snapshot of a factorization's concatenated isotopy."""
    factorization: MapFactorization
    s: float

    def forward(self, z: Point) -> np.ndarray:
        k = self.factorization.k
        s = min(max(self.s, 0.0), 1.0)
        stage = min(int(s * k), k - 1)
        local = s * k - stage
        maps = self.factorization.maps
        z = np.asarray(z, dtype=float)
        for j in range(stage):
            z = maps[j].forward(z)
        if local > 0.0:
            z = maps[stage].at_time(local).forward(z)
        return z


# ---------------------------------------------------------------------------


def eigenvector_transport_check(g: GeneratingFunction,
                                tol: float = 1e-9) -> Optional[np.ndarray]:
    """Unit kernel vector of Hess(g)(0), checked invariant under the
    isotopy's Jacobians at the origin; None when the Hessian is
    nondegenerate.

    For a degenerate Hessian [[rho, sig], [sig, tau]] the map generated by
    t*g has, at the origin, the Jacobian

        (1 / (1 - t*sig)) [[1, t*tau], [-t*rho, 1 - 2*t*sig]]

    and the zero-eigenvector of the Hessian is fixed by it for every t.
    """
    gx, gy = g.gradient(0.0, 0.0)
    if math.hypot(gx, gy) > 1e-10:
        raise NotCritical("the origin is not a critical point of g")
    H = np.asarray(g.hessian(0.0, 0.0), dtype=float)
    H = 0.5 * (H + H.T)
    lam, vec = np.linalg.eigh(H)
    scale = max(1.0, np.abs(lam).max())
    k = int(np.argmin(np.abs(lam)))
    if abs(lam[k]) > 1e-8 * scale:
        return None
    v = vec[:, k]
    rho, sig, tau = H[0, 0], H[0, 1], H[1, 1]
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        pref = 1.0 / (1.0 - t * sig)
        J = pref * np.array([
            [1.0, t * tau],
            [-t * rho, -t * t * rho * tau + (1.0 - t * sig) ** 2]])
        if np.linalg.norm(J @ v - v) > tol:
            raise InvariantBreach(
                f"kernel vector not transported at isotopy time {t}")
    return v


# ---------------------------------------------------------------------------


def _normal_form_constant(g: GeneratingFunction, tol: float = 1e-8) -> float:
    gx, gy = g.gradient(0.0, 0.0)
    if math.hypot(gx, gy) > 1e-10:
        raise NormalFormViolated("factor has a non-critical origin")
    H = np.asarray(g.hessian(0.0, 0.0), dtype=float)
    if abs(H[0, 0]) > tol or abs(H[0, 1]) > tol or abs(H[1, 0]) > tol:
        raise NormalFormViolated(
            "factor Hessian at the origin is not diag(0, c)")
    c = float(H[1, 1])
    if c > tol:
        raise NormalFormViolated("factor normal-form constant must be <= 0")
    return c


def compose(g0: GeneratingFunction, g1: GeneratingFunction, window,
            solver_tol: float = 1e-13, solver_max_iter: int = 80
            ) -> GeneratingFunction:
    """Generating function of f1 o f0 for factors in the normal form
    Hess(g_i)(0) = diag(0, c_i) with c_i <= 0.

    The construction solves, for each (x2, y0),

        y1 - y0 + d1g0(x1, y0) = 0
        x1 - x2 + d2g1(x2, y1) = 0

    for the inner point (x1, y1) and sets

        g(x2, y0) = g0(x1, y0) + g1(x2, y1) + (x2 - x1)(y0 - y1).

    Its gradient telescopes to (y0 - y2, x2 - x0), which is exactly the
    generating relation of the composition.
    """
    c0 = _normal_form_constant(g0)
    c1 = _normal_form_constant(g1)
    if isinstance(window, (list, tuple)):
        window = Window(*window)
    damp = 0.25 * (g0.window.span + g1.window.span)

    def inner(x2, y0):
        x1, y1 = x2, y0
        for _ in range(solver_max_iter):
            f1r = y1 - y0 + g0.d1(x1, y0)
            f2r = x1 - x2 + g1.d2(x2, y1)
            if math.hypot(f1r, f2r) < solver_tol:
                break
            a11 = g0.d11(x1, y0)
            a22 = g1.d22(x2, y1)
            det = a11 * a22 - 1.0
            if det == 0.0:
                raise NonConvergence("singular inner system in compose")
            sx = -(a22 * f1r - f2r) / det
            sy = -(-f1r + a11 * f2r) / det
            norm = math.hypot(sx, sy)
            if norm > damp:
                sx *= damp / norm
                sy *= damp / norm
            x1 += sx
            y1 += sy
        else:
            raise NonConvergence("inner point solve did not converge")
        if not g0.window.contains(x1, y0):
            raise OutOfWindow("inner point left the first factor's window")
        if not g1.window.contains(x2, y1):
            raise OutOfWindow("inner point left the second factor's window")
        return x1, y1

    def value(x2, y0):
        x1, y1 = inner(x2, y0)
        return (g0.value(x1, y0) + g1.value(x2, y1)
                + (x2 - x1) * (y0 - y1))

    def gradient(x2, y0):
        x1, y1 = inner(x2, y0)
        return np.array([g1.d1(x2, y1) + y0 - y1,
                         g0.d2(x1, y0) + x2 - x1])

    def hessian(x2, y0):
        x1, y1 = inner(x2, y0)
        a = np.array([[g0.d11(x1, y0), 1.0], [1.0, g1.d22(x2, y1)]])
        s0 = g0.d12(x1, y0)
        s1 = g1.d12(x2, y1)
        b = np.array([[0.0, s0 - 1.0], [s1 - 1.0, 0.0]])
        dphi = -np.linalg.solve(a, b)
        h11 = g1.d11(x2, y1) + (s1 - 1.0) * dphi[1, 0]
        h12 = 1.0 + (s1 - 1.0) * dphi[1, 1]
        h21 = 1.0 + (s0 - 1.0) * dphi[0, 0]
        h22 = g0.d22(x1, y0) + (s0 - 1.0) * dphi[0, 1]
        if abs(h12 - h21) > 1e-10 * max(1.0, abs(h11), abs(h22)):
            raise InvariantBreach("composed hessian lost symmetry")
        m = 0.5 * (h12 + h21)
        return np.array([[h11, m], [m, h22]])

    sup = _grid_twist_sup(hessian, window, 32)
    bound = sup * 1.05 if sup > 0 else 0.0
    if not bound < 1.0:
        raise InvariantBreach(
            f"composed twist reaches {sup:.4g} on this window; "
            "shrink the window")
    gf = GeneratingFunction.from_callables(value, gradient, hessian,
                                           window, bound)

    # spot-check that the result generates the composition; points whose
    # image leaves the declared window cannot be compared and are skipped
    f0 = GeneratedMap(g0)
    f1m = GeneratedMap(g1)
    fc = GeneratedMap(gf)
    compared = 0
    for x, y in window.grid(5):
        try:
            want = f1m.forward(f0.forward((x, y)))
        except OutOfWindow:
            continue
        if not window.contains(*want):
            continue
        got = fc.forward((x, y))
        if np.linalg.norm(got - want) > 1e-8:
            raise InvariantBreach(
                f"composed map mismatch at ({x:.6g}, {y:.6g})")
        compared += 1
    if compared < 5:
        raise InvariantBreach(
            "window leaves too few comparable points to certify the "
            "composition")
    # record the normal-form constants for downstream reporting
    object.__setattr__(gf, "normal_form_constants", (c0, c1))
    return gf
