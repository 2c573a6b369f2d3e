"""Shared numerical substrate: quadrature, bracketed root finding, linear
two-point boundary value problems, and 1/m asymptotic-slope extraction.

Everything here is a pure function of its inputs; all randomness, file IO and
state live in the verification driver, never in this layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

_EPS = float(np.finfo(float).eps)


class NumericsError(ArithmeticError):
    """Base class for numerical failures that should map to exit code 3."""


class BracketError(NumericsError):
    """The supplied interval does not bracket a sign change."""


class PoleRootError(NumericsError):
    """The bracketed sign change is a pole, not a root."""


class RootConvergenceError(NumericsError):
    """Root iteration exhausted max_iter; carries the last bracket."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


class ShootingError(NumericsError):
    """The boundary value problem could not be solved."""


class FitError(NumericsError):
    """Degenerate least-squares design matrix."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Absolute/relative tolerance pair plus an iteration cap."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_iter: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol >= 0.0 and self.rel_tol >= 0.0):
            raise ValueError("tolerances must be nonnegative")
        if self.abs_tol + self.rel_tol <= 0.0:
            raise ValueError("abs_tol + rel_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class AsymptoticFit:
    """Result of a least-squares fit value ~ limit + slope/m over an m-grid."""

    limit: float
    slope: float
    residual_norm: float
    m_grid: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.m_grid) < 3:
            raise ValueError("an asymptotic fit needs at least 3 grid points")
        grid = np.asarray(self.m_grid, dtype=float)
        if not (np.all(np.diff(grid) > 0.0) and np.all(grid > 0.0)):
            raise ValueError("m_grid must be strictly increasing and positive")
        if not math.isfinite(self.residual_norm) or self.residual_norm < 0.0:
            raise ValueError("residual_norm must be finite and nonnegative")


# ----------------------------------------------------------------------------
# Quadrature
# ----------------------------------------------------------------------------

_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if n_nodes not in _LEGGAUSS_CACHE:
        _LEGGAUSS_CACHE[n_nodes] = np.polynomial.legendre.leggauss(n_nodes)
    return _LEGGAUSS_CACHE[n_nodes]


def panel_nodes(a: float, b: float, max_panel: float = 0.25, n_nodes: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [a, b] with panels <= max_panel."""
    if not (b > a):
        raise ValueError("panel_nodes requires b > a")
    n_panels = max(1, int(math.ceil((b - a) / max_panel)))
    edges = np.linspace(a, b, n_panels + 1)
    xi, wi = _leggauss(n_nodes)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    w = (half[:, None] * wi[None, :]).ravel()
    return x, w


def integrate_panels(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    max_panel: float = 0.25,
    n_nodes: int = 16,
) -> float:
    """Integral of a smooth vectorized integrand by composite Gauss-Legendre."""
    x, w = panel_nodes(a, b, max_panel, n_nodes)
    return float(np.dot(w, f(x)))


def mesh_aligned_nodes(mesh: np.ndarray, n_nodes: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on the panels of a given ascending mesh.

    With 16 nodes the rule is exact for polynomials up to degree 31 on each
    panel, so functionals of a piecewise-polynomial dense ODE output are
    integrated without quadrature error when the mesh is the solver's own.
    """
    mesh = np.asarray(mesh, dtype=float)
    if mesh.ndim != 1 or len(mesh) < 2 or np.any(np.diff(mesh) <= 0.0):
        raise ValueError("mesh must be ascending with at least two points")
    xi, wi = _leggauss(n_nodes)
    half = 0.5 * (mesh[1:] - mesh[:-1])
    mid = 0.5 * (mesh[1:] + mesh[:-1])
    x = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    w = (half[:, None] * wi[None, :]).ravel()
    return x, w


# ----------------------------------------------------------------------------
# Bracketed root finding
# ----------------------------------------------------------------------------

_POLE_FACTOR = 1e6


def find_root_bracketed(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: ToleranceConfig | None = None,
) -> float:
    """Deterministic Brent iteration with guaranteed bisection fallback.

    Converges when |f| <= abs_tol or the bracket half-width falls below
    rel_tol*|x| (plus the machine floor).  A sign change across which |f|
    diverges instead of vanishing is reported as a pole, not a root.  An
    initial pre-pass over 8 subintervals selects the leftmost sign change so
    the result is reproducible when the bracket happens to contain several
    roots.
    """
    tol = tol or ToleranceConfig()
    a, b = float(bracket[0]), float(bracket[1])
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise BracketError(f"invalid bracket {bracket!r}")
    fa = float(f(a))
    fb = float(f(b))
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"f has the same sign at both ends of {bracket!r}")
    f_entry_scale = 1.0 + min(abs(fa), abs(fb))

    # Leftmost sign-change pre-pass.
    grid = np.linspace(a, b, 9)
    x_prev, f_prev = a, fa
    for x_next in grid[1:]:
        f_next = float(f(x_next))
        if f_next == 0.0:
            return float(x_next)
        if math.copysign(1.0, f_prev) != math.copysign(1.0, f_next):
            a, fa, b, fb = x_prev, f_prev, float(x_next), f_next
            break
        x_prev, f_prev = float(x_next), f_next

    # Brent: b is the best iterate, a the previous one, c brackets with b.
    c, fc = a, fa
    d = e = b - a
    converged = False
    for _ in range(tol.max_iter):
        if math.copysign(1.0, fb) == math.copysign(1.0, fc):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol_x = 2.0 * _EPS * abs(b) + 0.5 * tol.rel_tol * abs(b) + 1e-300
        m = 0.5 * (c - b)
        if abs(fb) <= tol.abs_tol or abs(m) <= tol_x:
            converged = True
            break
        if abs(e) < tol_x or abs(fa) <= abs(fb):
            d = e = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol_x * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                d = e = m
        a, fa = b, fb
        if abs(d) > tol_x:
            b += d
        else:
            b += math.copysign(tol_x, m)
        fb = float(f(b))
        if fb == 0.0:
            converged = True
            break
    if not converged:
        raise RootConvergenceError(
            f"no convergence after {tol.max_iter} iterations", (min(b, c), max(b, c))
        )
    if abs(fb) > _POLE_FACTOR * f_entry_scale and abs(fb) > 1e3:
        raise PoleRootError(f"sign change at x={b!r} is a pole, not a root (|f|={abs(fb):.3e})")
    return float(b)


# ----------------------------------------------------------------------------
# Linear second-order boundary value problems by shooting
# ----------------------------------------------------------------------------


def _zero_rhs(t: float) -> float:
    return 0.0


@dataclass(frozen=True)
class SecondOrderODE:
    """Descriptor for u'' + p(t) u' + q(t) u = r(t) with continuous coefficients."""

    p: Callable[[float], float]
    q: Callable[[float], float]
    r: Callable[[float], float] = _zero_rhs


@dataclass(frozen=True)
class ShootingSolution:
    """Sampled BVP solution plus its left derivative and a dense evaluator.

    ``mesh`` holds the integrator's own step points (ascending); quadrature of
    functionals of the solution should use panels aligned with it, where the
    dense output is polynomial.
    """

    tau: np.ndarray
    u: np.ndarray
    du: np.ndarray
    deriv_left: float
    mesh: np.ndarray
    _dense: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]

    def evaluate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Values and first derivatives at arbitrary points of the interval."""
        return self._dense(np.asarray(t, dtype=float))


def solve_bvp_shooting(
    ode: SecondOrderODE,
    interval: tuple[float, float],
    left_value: float,
    right_value: float,
    tol: ToleranceConfig | None = None,
    samples: int = 401,
) -> ShootingSolution:
    """Solve the linear BVP u(a)=left_value, u(b)=right_value.

    The problem is linear, so shooting reduces to integrating two terminal
    value problems from b backwards (the stable direction for the decaying
    profiles this package meets) and superposing them exactly.  Integration
    uses an adaptive 8th(5,3)-order embedded pair with local error controlled
    by the supplied tolerances.
    """
    tol = tol or ToleranceConfig()
    a, b = float(interval[0]), float(interval[1])
    if not (math.isfinite(a) and math.isfinite(b) and b > a):
        raise ShootingError(f"invalid interval {interval!r}")

    def rhs_full(t, y):
        return (y[1], ode.r(t) - ode.p(t) * y[1] - ode.q(t) * y[0])

    def rhs_homogeneous(t, y):
        return (y[1], -ode.p(t) * y[1] - ode.q(t) * y[0])

    rtol = min(max(tol.rel_tol, 450.0 * _EPS), 1e-3)
    atol = max(tol.abs_tol, 1e-30)

    def integrate(rhs, y_terminal):
        sol = solve_ivp(
            rhs,
            (b, a),
            y_terminal,
            method="DOP853",
            rtol=rtol,
            atol=atol,
            dense_output=True,
        )
        if not sol.success:
            raise ShootingError(f"ODE integration failed: {sol.message}")
        return sol

    sol_h = integrate(rhs_homogeneous, (0.0, 1.0))  # homogeneous-at-b direction
    uh0 = float(sol_h.sol(a)[0])
    if right_value == 0.0 and ode.r is _zero_rhs:
        sol_p = None
        up0 = 0.0
    else:
        sol_p = integrate(rhs_full, (float(right_value), 0.0))
        up0 = float(sol_p.sol(a)[0])
    # Resonance: the terminal-homogeneous shot vanishes at the left endpoint
    # (relative to its size over the interval), so no superposition can match
    # a generic left value.
    probe = np.linspace(a, b, 33)
    uh_scale = float(np.max(np.abs(sol_h.sol(probe)[0])))
    if abs(uh0) < 1e-12 * max(uh_scale, 1e-300):
        raise ShootingError(
            "resonant boundary value problem: homogeneous solution vanishes at the left end"
        )
    c = (float(left_value) - up0) / uh0

    def dense(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        yh = sol_h.sol(t)
        if sol_p is None:
            return c * yh[0], c * yh[1]
        yp = sol_p.sol(t)
        return yp[0] + c * yh[0], yp[1] + c * yh[1]

    tau = np.linspace(a, b, samples)
    u, du = dense(tau)
    # Pin the boundary samples to the imposed data (they match to rounding).
    u = u.copy()
    u[0], u[-1] = left_value, right_value
    mesh = np.unique(np.clip(sol_h.t, a, b))
    if sol_p is not None:
        mesh = np.unique(np.concatenate([mesh, np.clip(sol_p.t, a, b)]))
    return ShootingSolution(
        tau=tau, u=u, du=du, deriv_left=float(du[0]), mesh=mesh, _dense=dense
    )


# ----------------------------------------------------------------------------
# Asymptotic slope extraction
# ----------------------------------------------------------------------------


def fit_inverse_m(points: Sequence[tuple[float, float]]) -> AsymptoticFit:
    """Least-squares fit of value ~ limit + slope/m.

    Exact (zero residual) on data affine in 1/m; the m-grid must contain at
    least three distinct positive masses.
    """
    pts = sorted((float(m), float(v)) for m, v in points)
    if len(pts) < 3:
        raise FitError("fit_inverse_m needs at least 3 points")
    ms = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    if np.any(ms <= 0.0) or np.any(np.diff(ms) == 0.0):
        raise FitError("masses must be distinct and positive")
    if not np.all(np.isfinite(ys)):
        raise FitError("values must be finite")
    design = np.column_stack([np.ones_like(ms), 1.0 / ms])
    coef, _, rank, _ = np.linalg.lstsq(design, ys, rcond=None)
    if rank < 2:
        raise FitError("degenerate design matrix")
    residual = float(np.linalg.norm(design @ coef - ys))
    return AsymptoticFit(
        limit=float(coef[0]),
        slope=float(coef[1]),
        residual_norm=residual,
        m_grid=tuple(ms.tolist()),
    )


def slope_drift(points: Sequence[tuple[float, float]]) -> tuple[AsymptoticFit, AsymptoticFit, float]:
    """Stability diagnostic: refit with the smallest mass dropped.

    Returns (full fit, truncated fit, relative slope drift).  A shrinking
    drift as coarse masses are dropped is the signature of a genuine
    limit + slope/m law with higher-order pollution.
    """
    pts = sorted((float(m), float(v)) for m, v in points)
    if len(pts) < 4:
        raise FitError("slope_drift needs at least 4 points")
    fit_all = fit_inverse_m(pts)
    fit_trunc = fit_inverse_m(pts[1:])
    denom = max(abs(fit_all.slope), 1e-300)
    return fit_all, fit_trunc, abs(fit_trunc.slope - fit_all.slope) / denom
