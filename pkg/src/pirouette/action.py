"""Discrete symplectic action of a factorized map.

A chain z = (z_0, ..., z_{kq-1}) of planar points has action

    W(z) = sum_j [ <y_j, x_j - x_{j+1}> + g_{j mod k}(x_{j+1}, y_j) ]

with indices cyclic mod kq. Critical chains of W are exactly the
(q-fold) periodic orbits of the factorized map, which turns orbit
finding into root finding on the analytic gradient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (ConvergedToPuncture, IllConditioned, InvariantBreach,
                     NonConvergence, OutOfWindow)
from .genfun import MapFactorization


@dataclass(frozen=True)
class ActionChain:
    """kq chain points for the q-fold action of a k-factor map.

    points[j] = (x_j, y_j); the flat variable order is
    (x_0, y_0, x_1, y_1, ...).
    """
    factorization: MapFactorization
    q: int
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if self.q < 1:
            raise ValueError("q must be at least 1")
        n = self.factorization.k * self.q
        if pts.shape != (n, 2):
            raise ValueError(f"chain needs shape ({n}, 2), got "
                             f"{pts.shape}")

    @property
    def n(self) -> int:
        return len(self.points)

    def factor(self, j: int):
        return self.factorization.factors[j % self.factorization.k]

    def flat(self) -> np.ndarray:
        return self.points.reshape(-1).copy()

    def with_points(self, flat: np.ndarray) -> "ActionChain":
        return ActionChain(self.factorization, self.q,
                           np.asarray(flat, dtype=float).reshape(-1, 2))

    @staticmethod
    def from_orbit(factorization: MapFactorization, q: int, z0
                   ) -> "ActionChain":
        """Thread z0 through the factor maps for q rounds."""
        maps = factorization.maps
        k = factorization.k
        pts = np.empty((k * q, 2))
        pts[0] = np.asarray(z0, dtype=float)
        for i in range(k * q - 1):
            pts[i + 1] = maps[i % k].forward(pts[i])
        return ActionChain(factorization, q, pts)


def _check_windows(chain: ActionChain):
    pts = chain.points
    n = chain.n
    for j in range(n):
        jp = (j + 1) % n
        g = chain.factor(j)
        if not g.window.contains(pts[jp, 0], pts[j, 1]):
            raise OutOfWindow(
                f"pair (x_{jp}, y_{j}) leaves the window of factor "
                f"{j % chain.factorization.k}")


def action_value(chain: ActionChain) -> float:
    """The cyclic action sum."""
    _check_windows(chain)
    pts = chain.points
    n = chain.n
    total = 0.0
    for j in range(n):
        jp = (j + 1) % n
        total += pts[j, 1] * (pts[j, 0] - pts[jp, 0])
        total += chain.factor(j).value(pts[jp, 0], pts[j, 1])
    return float(total)


def action_gradient(chain: ActionChain) -> np.ndarray:
    """Analytic gradient, flat (x_0, y_0, x_1, y_1, ...) order.

    d/dx_j = y_j - y_{j-1} + d1 g_{j-1}(x_j, y_{j-1})
    d/dy_j = x_j - x_{j+1} + d2 g_j(x_{j+1}, y_j)
    """
    _check_windows(chain)
    pts = chain.points
    n = chain.n
    grad = np.empty(2 * n)
    for j in range(n):
        jm = (j - 1) % n
        jp = (j + 1) % n
        grad[2 * j] = (pts[j, 1] - pts[jm, 1]
                       + chain.factor(jm).d1(pts[j, 0], pts[jm, 1]))
        grad[2 * j + 1] = (pts[j, 0] - pts[jp, 0]
                           + chain.factor(j).d2(pts[jp, 0], pts[j, 1]))
    return grad


def action_hessian(chain: ActionChain) -> np.ndarray:
    """Analytic symmetric Hessian, assembled row by row from the two
    gradient formulas; coincident columns accumulate, so the q = k = 1
    case collapses exactly to the factor's own Hessian."""
    _check_windows(chain)
    pts = chain.points
    n = chain.n
    H = np.zeros((2 * n, 2 * n))
    for j in range(n):
        jm = (j - 1) % n
        jp = (j + 1) % n
        gm = chain.factor(jm)
        gj = chain.factor(j)
        hm = gm.hessian(pts[j, 0], pts[jm, 1])
        hj = gj.hessian(pts[jp, 0], pts[j, 1])
        # row of d/dx_j
        H[2 * j, 2 * j] += hm[0, 0]
        H[2 * j, 2 * j + 1] += 1.0
        H[2 * j, 2 * jm + 1] += -1.0 + hm[0, 1]
        # row of d/dy_j
        H[2 * j + 1, 2 * j + 1] += hj[1, 1]
        H[2 * j + 1, 2 * j] += 1.0
        H[2 * j + 1, 2 * jp] += -1.0 + hj[0, 1]
    return H


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalReport:
    """Outcome of a critical-point search on the action.

    When converged is False the chain is the best iterate and the Morse
    fields are None.
    """
    chain: ActionChain
    grad_norm: float
    morse_index: Optional[int]
    nullity: Optional[int]
    orbit_point: np.ndarray
    converged: bool = True
    iterations: int = 0
    p: Optional[int] = None
    message: str = ""

    def as_record(self) -> dict:
        return {
            "q": self.chain.q,
            "p": self.p,
            "x0": float(self.orbit_point[0]),
            "y0": float(self.orbit_point[1]),
            "grad_norm": self.grad_norm,
            "morse_index": self.morse_index,
            "nullity": self.nullity,
            "finder": "action",
        }


def morse_data(chain: ActionChain, grad_tol: float = 1e-8):
    """(morse_index, nullity) of the action Hessian at a critical chain.

    Eigenvalues within 1e-6 * max |eigenvalue| of zero count as null;
    strictly more negative ones count toward the index.
    """
    gn = float(np.linalg.norm(action_gradient(chain)))
    if gn > grad_tol:
        raise InvariantBreach(
            f"morse data needs a critical chain; |grad| = {gn:.3e}")
    H = action_hessian(chain)
    lam, vec = np.linalg.eigh(H)
    scale = float(np.abs(lam).max())
    for i in range(len(lam)):
        res = np.linalg.norm(H @ vec[:, i] - lam[i] * vec[:, i])
        if res > 1e-6 * max(1.0, scale):
            raise IllConditioned(
                f"eigen-residual {res:.3e} too large to trust")
    eps = 1e-6 * scale
    index = int(np.sum(lam < -eps))
    nullity = int(np.sum(np.abs(lam) <= eps))
    return index, nullity


def find_critical_point(factorization: MapFactorization, q: int,
                        seed_chain, tol: float = 1e-10,
                        max_iter: int = 200,
                        puncture=None, strict: bool = False
                        ) -> CriticalReport:
    """Levenberg-damped Newton root search on the action gradient.

    Critical points are usually saddles of W, so this is root finding on
    grad W with the analytic Hessian as Jacobian, not a minimization.
    On convergence the chain is cross-checked to be a genuine periodic
    orbit of the composed map. puncture, when given, is the studied
    fixed point: landing on it is the trivial critical point and raises
    ConvergedToPuncture. A failed search returns the best iterate with
    converged=False, or raises NonConvergence when strict=True.
    """
    if isinstance(seed_chain, ActionChain):
        chain = seed_chain
    else:
        chain = ActionChain(factorization, q, seed_chain)

    def grad_of(flat):
        return action_gradient(chain.with_points(flat))

    z = chain.flat()
    try:
        g = grad_of(z)
    except OutOfWindow:
        raise
    gn = float(np.linalg.norm(g))
    best_z, best_gn = z.copy(), gn
    lam = 1e-3
    n_var = len(z)
    it = 0
    while it < max_iter and best_gn >= tol:
        it += 1
        H = action_hessian(chain.with_points(z))
        accepted = False
        for _ in range(40):
            A = H @ H + (lam * lam) * np.eye(n_var)
            try:
                step = np.linalg.solve(A, -(H @ g))
            except np.linalg.LinAlgError:
                lam = max(lam * 4.0, 1e-8)
                continue
            trial = z + step
            try:
                gt = grad_of(trial)
            except OutOfWindow:
                lam *= 4.0
                continue
            gtn = float(np.linalg.norm(gt))
            if np.isfinite(gtn) and gtn < gn:
                z, g, gn = trial, gt, gtn
                lam = max(lam * 0.25, 1e-12)
                accepted = True
                break
            lam *= 4.0
            if lam > 1e14:
                break
        if gn < best_gn:
            best_z, best_gn = z.copy(), gn
        if not accepted:
            break

    out_chain = chain.with_points(best_z)
    z0 = out_chain.points[0].copy()
    if best_gn >= tol:
        if strict:
            raise NonConvergence(
                f"|grad| stalled at {best_gn:.3e} after {it} steps")
        return CriticalReport(out_chain, best_gn, None, None, z0,
                              converged=False, iterations=it,
                              message=f"stalled at |grad| = {best_gn:.3e}")

    # a critical chain must be a periodic orbit of the composed map
    w = z0
    for _ in range(q):
        w = factorization.forward(w)
    drift = float(np.linalg.norm(w - z0))
    if drift > 1e-8:
        raise InvariantBreach(
            f"critical chain is not a periodic orbit: q-fold image "
            f"moves by {drift:.3e}")
    if puncture is not None:
        pz = np.asarray(puncture, dtype=float)
        if float(np.linalg.norm(z0 - pz)) < 1e-9:
            raise ConvergedToPuncture(
                "search landed on the studied fixed point")

    p = None
    if puncture is not None:
        from .rotation import orbit_rotation_number
        sample = orbit_rotation_number(factorization, z0,
                                       np.asarray(puncture, float), q)
        p = int(round(sample.rho_n * q))
    index, nullity = morse_data(out_chain, grad_tol=max(1e-8, 10 * tol))
    return CriticalReport(out_chain, best_gn, index, nullity, z0,
                          converged=True, iterations=it, p=p)
