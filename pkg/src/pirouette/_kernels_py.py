"""Pure numpy/python kernels: the fallback backend.

The compiled extension (_kernels.pyx) implements the same functions with the
same signatures and the same arithmetic. Status codes shared by both:

    0  converged
    1  solution (or preimage) outside the window
    2  iteration budget exhausted
    3  input point outside the window
    4  orbit left the window before the requested count
"""
import math

import numpy as np

BACKEND_NAME = "python"

OK = 0
NO_ROOT = 1
NO_CONVERGENCE = 2
BAD_INPUT = 3
ESCAPED = 4


def poly_vgh(pi, pj, co, x, y):
    """Value, gradient and Hessian of sum c*x^i*y^j at one point."""
    v = gx = gy = hxx = hxy = hyy = 0.0
    x = float(x)
    y = float(y)
    for k in range(len(co)):
        i = int(pi[k])
        j = int(pj[k])
        c = float(co[k])
        xi = x**i
        yj = y**j
        v += c * xi * yj
        if i > 0:
            gx += c * i * x**(i - 1) * yj
        if j > 0:
            gy += c * j * xi * y**(j - 1)
        if i > 1:
            hxx += c * i * (i - 1) * x**(i - 2) * yj
        if i > 0 and j > 0:
            hxy += c * i * j * x**(i - 1) * y**(j - 1)
        if j > 1:
            hyy += c * j * (j - 1) * xi * y**(j - 2)
    return v, gx, gy, hxx, hxy, hyy


def solve_forward(pi, pj, co, t, x, y, xmin, xmax, ymin, ymax,
                  tol, maxit, x_seed):
    """Solve X = x + t*d2g(X,y); return (X, Y, code).

    Newton seeded at x_seed, kept inside a shrinking bracket of the window
    x-range; bisection step whenever the Newton step leaves the bracket.
    The residual X - x - t*d2g(X,y) is strictly increasing in X because
    t*|d2d1 g| < 1 on the window, so the root is unique when it exists.
    """
    if not (xmin <= x <= xmax and ymin <= y <= ymax):
        return math.nan, math.nan, BAD_INPUT
    if t == 0.0:
        return x, y, OK
    lo = xmin
    hi = xmax
    X = min(max(x_seed, lo), hi)
    for _ in range(maxit):
        v, gx, gy, hxx, hxy, hyy = poly_vgh(pi, pj, co, X, y)
        e = X - x - t * gy
        if abs(e) < tol:
            return X, y - t * gx, OK
        if e > 0.0:
            hi = X
        else:
            lo = X
        if hi - lo < 4e-16 * (1.0 + abs(X)):
            # bracket collapsed at a window edge: the root lies outside
            return math.nan, math.nan, NO_ROOT
        d = 1.0 - t * hxy
        if d > 0.0:
            Xn = X - e / d
            if not (lo < Xn < hi):
                Xn = 0.5 * (lo + hi)
        else:
            Xn = 0.5 * (lo + hi)
        X = Xn
    return math.nan, math.nan, NO_CONVERGENCE


def solve_inverse(pi, pj, co, t, X, Y, xmin, xmax, ymin, ymax, tol, maxit):
    """Solve y - t*d1g(X,y) = Y for y, then x = X - t*d2g(X,y)."""
    if not (xmin <= X <= xmax):
        return math.nan, math.nan, BAD_INPUT
    if t == 0.0:
        if not (ymin <= Y <= ymax):
            return math.nan, math.nan, BAD_INPUT
        return X, Y, OK
    lo = ymin
    hi = ymax
    yv = min(max(Y, lo), hi)
    for _ in range(maxit):
        v, gx, gy, hxx, hxy, hyy = poly_vgh(pi, pj, co, X, yv)
        e = yv - t * gx - Y
        if abs(e) < tol:
            xv = X - t * gy
            if not (xmin <= xv <= xmax):
                return math.nan, math.nan, NO_ROOT
            return xv, yv, OK
        if e > 0.0:
            hi = yv
        else:
            lo = yv
        if hi - lo < 4e-16 * (1.0 + abs(yv)):
            return math.nan, math.nan, NO_ROOT
        d = 1.0 - t * hxy
        if d > 0.0:
            yn = yv - e / d
            if not (lo < yn < hi):
                yn = 0.5 * (lo + hi)
        else:
            yn = 0.5 * (lo + hi)
        yv = yn
    return math.nan, math.nan, NO_CONVERGENCE


def iterate_orbit(pi, pj, co, t, x, y, n, xmin, xmax, ymin, ymax, tol, maxit):
    """n forward steps; returns (points (n+1,2), count, code)."""
    pts = np.empty((n + 1, 2))
    pts[0, 0] = x
    pts[0, 1] = y
    for i in range(n):
        X, Y, code = solve_forward(pi, pj, co, t, x, y, xmin, xmax,
                                   ymin, ymax, tol, maxit, x)
        if code != OK:
            return pts, i, ESCAPED if code in (NO_ROOT, BAD_INPUT) else code
        x, y = X, Y
        pts[i + 1, 0] = x
        pts[i + 1, 1] = y
    return pts, n, OK


def orbit_jacobian(pi, pj, co, t, x, y, q, xmin, xmax, ymin, ymax, tol, maxit):
    """q forward steps with the chain-product Jacobian.

    Returns (points (q+1,2), J (2,2), count, code). The per-step matrix is
    evaluated at (X, y): the image x-coordinate and the source y-coordinate.
    """
    pts = np.empty((q + 1, 2))
    pts[0, 0] = x
    pts[0, 1] = y
    j11 = j22 = 1.0
    j12 = j21 = 0.0
    for i in range(q):
        X, Y, code = solve_forward(pi, pj, co, t, x, y, xmin, xmax,
                                   ymin, ymax, tol, maxit, x)
        if code != OK:
            J = np.array([[j11, j12], [j21, j22]])
            return pts, J, i, ESCAPED if code in (NO_ROOT, BAD_INPUT) else code
        v, gx, gy, hxx, hxy, hyy = poly_vgh(pi, pj, co, X, y)
        pref = 1.0 / (1.0 - t * hxy)
        a11 = pref
        a12 = pref * t * hyy
        a21 = -pref * t * hxx
        a22 = pref * (-t * t * hxx * hyy + (1.0 - t * hxy) ** 2)
        j11, j12, j21, j22 = (a11 * j11 + a12 * j21,
                              a11 * j12 + a12 * j22,
                              a21 * j11 + a22 * j21,
                              a21 * j12 + a22 * j22)
        x, y = X, Y
        pts[i + 1, 0] = x
        pts[i + 1, 1] = y
    return pts, np.array([[j11, j12], [j21, j22]]), q, OK


def isotopy_points(pi, pj, co, s_values, x, y, xmin, xmax, ymin, ymax,
                   tol, maxit):
    """Map one point through f_s for each s; returns (points (m,2), code).

    Solves are warm-started from the previous X, which is safe because the
    root is unique for every s.
    """
    m = len(s_values)
    pts = np.empty((m, 2))
    seed = x
    for i in range(m):
        X, Y, code = solve_forward(pi, pj, co, float(s_values[i]), x, y,
                                   xmin, xmax, ymin, ymax, tol, maxit, seed)
        if code != OK:
            return pts, i, code
        pts[i, 0] = X
        pts[i, 1] = Y
        seed = X
    return pts, m, OK


def spin(j11, j12, j21, j22, n, seed_angles):
    """Iterate v -> Jv/|Jv| n times; per-seed accumulated angle (radians)."""
    a = np.asarray(seed_angles, dtype=float)
    vx = np.cos(a)
    vy = np.sin(a)
    prev = a.copy()
    total = np.zeros_like(a)
    for _ in range(n):
        wx = j11 * vx + j12 * vy
        wy = j21 * vx + j22 * vy
        th = np.arctan2(wy, wx)
        d = th - prev
        d = (d + np.pi) % (2.0 * np.pi) - np.pi
        total += d
        prev = th
        norm = np.hypot(wx, wy)
        vx = wx / norm
        vy = wy / norm
    return total
