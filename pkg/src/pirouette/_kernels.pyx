# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: same functions, signatures and status codes as
_kernels_py. Keep the two files in lockstep."""
import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, atan2, cos, fabs, fmod, hypot, pow, sin

cnp.import_array()

BACKEND_NAME = "cython"

OK = 0
NO_ROOT = 1
NO_CONVERGENCE = 2
BAD_INPUT = 3
ESCAPED = 4

cdef double NAN_ = float("nan")


cdef struct VGH:
    double v
    double gx
    double gy
    double hxx
    double hxy
    double hyy


cdef inline void _vgh(const long long[::1] pi, const long long[::1] pj,
                      const double[::1] co, double x, double y,
                      VGH* out) noexcept:
    cdef Py_ssize_t k
    cdef long long i, j
    cdef double c, xi, yj
    out.v = out.gx = out.gy = out.hxx = out.hxy = out.hyy = 0.0
    for k in range(co.shape[0]):
        i = pi[k]
        j = pj[k]
        c = co[k]
        xi = pow(x, i)
        yj = pow(y, j)
        out.v += c * xi * yj
        if i > 0:
            out.gx += c * i * pow(x, i - 1) * yj
        if j > 0:
            out.gy += c * j * xi * pow(y, j - 1)
        if i > 1:
            out.hxx += c * i * (i - 1) * pow(x, i - 2) * yj
        if i > 0 and j > 0:
            out.hxy += c * i * j * pow(x, i - 1) * pow(y, j - 1)
        if j > 1:
            out.hyy += c * j * (j - 1) * xi * pow(y, j - 2)


def poly_vgh(pi, pj, co, double x, double y):
    cdef VGH o
    _vgh(pi, pj, co, x, y, &o)
    return o.v, o.gx, o.gy, o.hxx, o.hxy, o.hyy


cdef int _solve_forward(const long long[::1] pi, const long long[::1] pj,
                        const double[::1] co, double t, double x, double y,
                        double xmin, double xmax, double ymin, double ymax,
                        double tol, int maxit, double x_seed,
                        double* Xout, double* Yout) noexcept:
    cdef double lo, hi, X, e, d, Xn
    cdef VGH o
    cdef int it
    if not (xmin <= x <= xmax and ymin <= y <= ymax):
        Xout[0] = NAN_
        Yout[0] = NAN_
        return BAD_INPUT
    if t == 0.0:
        Xout[0] = x
        Yout[0] = y
        return OK
    lo = xmin
    hi = xmax
    X = x_seed
    if X < lo:
        X = lo
    if X > hi:
        X = hi
    for it in range(maxit):
        _vgh(pi, pj, co, X, y, &o)
        e = X - x - t * o.gy
        if fabs(e) < tol:
            Xout[0] = X
            Yout[0] = y - t * o.gx
            return OK
        if e > 0.0:
            hi = X
        else:
            lo = X
        if hi - lo < 4e-16 * (1.0 + fabs(X)):
            Xout[0] = NAN_
            Yout[0] = NAN_
            return NO_ROOT
        d = 1.0 - t * o.hxy
        if d > 0.0:
            Xn = X - e / d
            if not (lo < Xn < hi):
                Xn = 0.5 * (lo + hi)
        else:
            Xn = 0.5 * (lo + hi)
        X = Xn
    Xout[0] = NAN_
    Yout[0] = NAN_
    return NO_CONVERGENCE


def solve_forward(pi, pj, co, double t, double x, double y,
                  double xmin, double xmax, double ymin, double ymax,
                  double tol, int maxit, double x_seed):
    cdef double X, Y
    cdef int code
    code = _solve_forward(pi, pj, co, t, x, y, xmin, xmax, ymin, ymax,
                          tol, maxit, x_seed, &X, &Y)
    return X, Y, code


def solve_inverse(pi, pj, co, double t, double X, double Y,
                  double xmin, double xmax, double ymin, double ymax,
                  double tol, int maxit):
    cdef double lo, hi, yv, e, d, yn, xv
    cdef VGH o
    cdef int it
    if not (xmin <= X <= xmax):
        return NAN_, NAN_, BAD_INPUT
    if t == 0.0:
        if not (ymin <= Y <= ymax):
            return NAN_, NAN_, BAD_INPUT
        return X, Y, OK
    lo = ymin
    hi = ymax
    yv = Y
    if yv < lo:
        yv = lo
    if yv > hi:
        yv = hi
    for it in range(maxit):
        _vgh(pi, pj, co, X, yv, &o)
        e = yv - t * o.gx - Y
        if fabs(e) < tol:
            xv = X - t * o.gy
            if not (xmin <= xv <= xmax):
                return NAN_, NAN_, NO_ROOT
            return xv, yv, OK
        if e > 0.0:
            hi = yv
        else:
            lo = yv
        if hi - lo < 4e-16 * (1.0 + fabs(yv)):
            return NAN_, NAN_, NO_ROOT
        d = 1.0 - t * o.hxy
        if d > 0.0:
            yn = yv - e / d
            if not (lo < yn < hi):
                yn = 0.5 * (lo + hi)
        else:
            yn = 0.5 * (lo + hi)
        yv = yn
    return NAN_, NAN_, NO_CONVERGENCE


def iterate_orbit(pi, pj, co, double t, double x, double y, int n,
                  double xmin, double xmax, double ymin, double ymax,
                  double tol, int maxit):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.empty((n + 1, 2))
    cdef double X, Y
    cdef int i, code
    pts[0, 0] = x
    pts[0, 1] = y
    for i in range(n):
        code = _solve_forward(pi, pj, co, t, x, y, xmin, xmax, ymin, ymax,
                              tol, maxit, x, &X, &Y)
        if code != OK:
            return pts, i, ESCAPED if code in (NO_ROOT, BAD_INPUT) else code
        x = X
        y = Y
        pts[i + 1, 0] = x
        pts[i + 1, 1] = y
    return pts, n, OK


def orbit_jacobian(pi, pj, co, double t, double x, double y, int q,
                   double xmin, double xmax, double ymin, double ymax,
                   double tol, int maxit):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.empty((q + 1, 2))
    cdef double j11 = 1.0, j12 = 0.0, j21 = 0.0, j22 = 1.0
    cdef double X, Y, pref, a11, a12, a21, a22, n11, n12, n21, n22
    cdef VGH o
    cdef int i, code
    pts[0, 0] = x
    pts[0, 1] = y
    for i in range(q):
        code = _solve_forward(pi, pj, co, t, x, y, xmin, xmax, ymin, ymax,
                              tol, maxit, x, &X, &Y)
        if code != OK:
            J = np.array([[j11, j12], [j21, j22]])
            return pts, J, i, ESCAPED if code in (NO_ROOT, BAD_INPUT) else code
        _vgh(pi, pj, co, X, y, &o)
        pref = 1.0 / (1.0 - t * o.hxy)
        a11 = pref
        a12 = pref * t * o.hyy
        a21 = -pref * t * o.hxx
        a22 = pref * (-t * t * o.hxx * o.hyy + (1.0 - t * o.hxy) ** 2)
        n11 = a11 * j11 + a12 * j21
        n12 = a11 * j12 + a12 * j22
        n21 = a21 * j11 + a22 * j21
        n22 = a21 * j12 + a22 * j22
        j11 = n11
        j12 = n12
        j21 = n21
        j22 = n22
        x = X
        y = Y
        pts[i + 1, 0] = x
        pts[i + 1, 1] = y
    return pts, np.array([[j11, j12], [j21, j22]]), q, OK


def isotopy_points(pi, pj, co, s_values, double x, double y,
                   double xmin, double xmax, double ymin, double ymax,
                   double tol, int maxit):
    cdef double[::1] sv = np.ascontiguousarray(s_values, dtype=np.float64)
    cdef Py_ssize_t m = sv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pts = np.empty((m, 2))
    cdef double X, Y, seed = x
    cdef Py_ssize_t i
    cdef int code
    for i in range(m):
        code = _solve_forward(pi, pj, co, sv[i], x, y, xmin, xmax, ymin, ymax,
                              tol, maxit, seed, &X, &Y)
        if code != OK:
            return pts, i, code
        pts[i, 0] = X
        pts[i, 1] = Y
        seed = X
    return pts, m, OK


def spin(double j11, double j12, double j21, double j22, int n, seed_angles):
    cdef double[::1] a = np.ascontiguousarray(seed_angles, dtype=np.float64)
    cdef Py_ssize_t s, m = a.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] total = np.zeros(m)
    cdef double vx, vy, wx, wy, th, prev, d, norm, acc
    cdef int i
    for s in range(m):
        vx = cos(a[s])
        vy = sin(a[s])
        prev = a[s]
        acc = 0.0
        for i in range(n):
            wx = j11 * vx + j12 * vy
            wy = j21 * vx + j22 * vy
            th = atan2(wy, wx)
            d = fmod(th - prev + M_PI, 2.0 * M_PI)
            if d < 0.0:
                d += 2.0 * M_PI
            acc += d - M_PI
            prev = th
            norm = hypot(wx, wy)
            vx = wx / norm
            vy = wy / norm
        total[s] = acc
    return total
