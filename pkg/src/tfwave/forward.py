"""Eigenfunction-expansion solvers for the time-fractional wave equation
of order alpha in (1, 2), and the fractional integral operator they share.

The homogeneous solution is evaluated mode by mode from
    u_n(t) = E_{alpha,1}(-lambda_n t^alpha) u0_n
             + t E_{alpha,2}(-lambda_n t^alpha) u1_n,
the separated-source solution from the convolution
    mu_n(t) = int_0^t (t-s)^{alpha-1} E_{alpha,alpha}(-lambda_n (t-s)^alpha)
              rho(s) ds,
discretized by product integration: the weakly singular power (t-s)^{alpha-1}
is integrated exactly against piecewise-linear interpolation of the remaining
smooth factor, giving second-order accuracy.

Summation order is fixed (ascending mode, then ascending time index), so
results are deterministic regardless of any outer parallelism; all
functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensystem import Eigensystem, SpectralField, evaluate_at
from .gammafn import gamma
from .ml import ml_vec
from .timegrid import TimeGrid

__all__ = [
    "HomogeneousProblem",
    "SeparatedSource",
    "PointTrajectory",
    "CoefficientHistory",
    "solve_homogeneous",
    "solution_at",
    "solve_inhomogeneous",
    "solve_inhomogeneous_modal",
    "rl_integral",
    "rl_matrix",
    "observe",
    "singular_weight_matrix",
]


@dataclass(frozen=True)
class HomogeneousProblem:
    """No forcing; initial displacement u0 and velocity u1."""

    es: Eigensystem
    alpha: float
    u0: SpectralField
    u1: SpectralField

    def __post_init__(self):
        if not 1.0 < self.alpha <= 2.0:
            raise ValueError(
                f"alpha must be in (1, 2] (2 only as cross-check anchor), got {self.alpha}"
            )
        for f in (self.u0, self.u1):
            if len(f) != self.es.n_modes:
                raise ValueError("initial data length must match the eigensystem")


@dataclass(frozen=True)
class SeparatedSource:
    """Forcing rho(t) f(x); rho given by samples on a grid, read as
    piecewise linear."""

    rho: np.ndarray
    f: SpectralField
    grid: TimeGrid

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        object.__setattr__(self, "rho", rho)
        if rho.shape != self.grid.nodes.shape:
            raise ValueError("rho sample count must match its grid")


@dataclass(frozen=True)
class PointTrajectory:
    """Values of a field at a fixed spatial point over a time grid."""

    x0: float
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.shape != self.grid.nodes.shape:
            raise ValueError("trajectory length must match its grid")


@dataclass(frozen=True)
class CoefficientHistory:
    """Spectral coefficients of a solution at every grid node."""

    grid: TimeGrid
    coeffs: np.ndarray      # shape (K+1, N)

    def field(self, k: int) -> SpectralField:
        return SpectralField(self.coeffs[k])

    def __len__(self) -> int:
        return self.coeffs.shape[0]


def solve_homogeneous(problem: HomogeneousProblem, grid: TimeGrid) -> CoefficientHistory:
    """Exact per-mode evaluation of the homogeneous solution on a grid;
    returns u0 exactly at t = 0."""
    lam = problem.es.lambdas
    t = grid.nodes
    ta = t**problem.alpha
    out = np.zeros((len(t), len(lam)))
    for n in range(len(lam)):
        c0 = problem.u0.coeffs[n]
        c1 = problem.u1.coeffs[n]
        if c0 == 0.0 and c1 == 0.0:
            continue
        if c0 != 0.0:
            out[:, n] += c0 * ml_vec(problem.alpha, 1.0, -lam[n] * ta)
        if c1 != 0.0:
            out[:, n] += c1 * t * ml_vec(problem.alpha, 2.0, -lam[n] * ta)
    return CoefficientHistory(grid=grid, coeffs=out)


def solution_at(problem: HomogeneousProblem, t: float) -> SpectralField:
    """Homogeneous solution coefficients at a single time."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    lam = problem.es.lambdas
    ta = t**problem.alpha
    e1 = ml_vec(problem.alpha, 1.0, -lam * ta)
    e2 = ml_vec(problem.alpha, 2.0, -lam * ta)
    return SpectralField(e1 * problem.u0.coeffs + t * e2 * problem.u1.coeffs)


# ---------------------------------------------------------------------------
# product integration of int_0^{t_k} (t_k - s)^p G(s) ds, G piecewise linear


def _moments(p: float, a, b):
    """Exact hat-function moments of tau^p over [a, b] (tau = t - s):
    returns (weight of the node at tau=b, weight of the node at tau=a)."""
    m1 = (b ** (p + 1.0) - a ** (p + 1.0)) / (p + 1.0)
    m2 = (b ** (p + 2.0) - a ** (p + 2.0)) / (p + 2.0)
    h = b - a
    w_left = (m2 - a * m1) / h     # multiplies G at the node with tau = b
    w_right = (b * m1 - m2) / h    # multiplies G at the node with tau = a
    return w_left, w_right


def _uniform_stencil(p: float, h: float, kmax: int):
    """Convolution weights w_m for uniform grids: the coefficient of
    G_{k-m} in the product integral up to t_k, plus the left-edge
    correction subtracted from the m = k term."""
    m = np.arange(kmax + 1, dtype=float)
    _, w_right = _moments(p, m * h, (m + 1.0) * h)
    w = w_right.copy()
    if kmax >= 1:
        wl, _ = _moments(p, (m[1:] - 1.0) * h, m[1:] * h)
        w[1:] += wl
    # at j = 0 (m = k) only the left-hat contribution belongs; the caller
    # subtracts edge[k] * G_0 where edge[m] = w_right[m]
    return w, w_right


def singular_weight_matrix(p: float, grid: TimeGrid) -> np.ndarray:
    """Dense lower-triangular matrix L with (L g)_k = int_0^{t_k}
    (t_k - s)^p g(s) ds for piecewise-linear g; exact for affine g."""
    t = grid.nodes
    K = len(t) - 1
    L = np.zeros((K + 1, K + 1))
    for j in range(K):                      # cell [t_j, t_{j+1}]
        h = t[j + 1] - t[j]
        ks = np.arange(j + 1, K + 1)
        a = t[ks] - t[j + 1]
        b = t[ks] - t[j]
        w_left, w_right = _moments(p, a, b)
        L[ks, j] += w_right
        L[ks, j + 1] += w_left
    return L


def _product_integrate(p: float, G: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """(int_0^{t_k} (t_k - s)^p G_k(s) ds)_k where G is the (K+1, K+1)
    lower array G[k, j] = smooth factor at (target k, node j), piecewise
    linear in j.  For convolution-type G (G[k, j] = g_{k-j}) use the
    uniform fast path via _convolve_pl."""
    t = grid.nodes
    K = len(t) - 1
    out = np.zeros(K + 1)
    for j in range(K):
        h = t[j + 1] - t[j]
        ks = np.arange(j + 1, K + 1)
        a = t[ks] - t[j + 1]
        b = t[ks] - t[j]
        w_left, w_right = _moments(p, a, b)
        out[ks] += w_right * G[ks, j] + w_left * G[ks, j + 1]
    return out


def _convolve_pl(p: float, kernel_vals: np.ndarray, rho: np.ndarray, h: float) -> np.ndarray:
    """Uniform-grid fast path: target-k values of the product integral of
    (t_k - s)^p * [kernel(t_k - s) * rho(s)] with the bracket piecewise
    linear; kernel_vals[m] = kernel(m h)."""
    K = len(rho) - 1
    w, edge = _uniform_stencil(p, h, K)
    g = kernel_vals * w
    full = np.convolve(rho, g)[: K + 1]
    corr = edge * kernel_vals * rho[0]
    out = full - corr
    out[0] = 0.0
    return out


def solve_inhomogeneous_modal(modal_rho: np.ndarray, es: Eigensystem,
                              alpha: float, grid: TimeGrid) -> CoefficientHistory:
    """General source given per-mode time samples modal_rho[k, n] of
    (F(., t_k), phi_n); mode-n coefficient is the weakly singular
    convolution mu_n with rho = modal_rho[:, n]."""
    if not 1.0 < alpha < 2.0:
        raise ValueError(f"alpha must be in (1, 2) for the source solver, got {alpha}")
    modal_rho = np.asarray(modal_rho, dtype=float)
    t = grid.nodes
    K = len(t) - 1
    if modal_rho.shape[0] != K + 1 or modal_rho.shape[1] != es.n_modes:
        raise ValueError("modal source shape must be (K+1, n_modes)")
    p = alpha - 1.0
    out = np.zeros_like(modal_rho)
    uniform = grid.is_uniform
    h = t[1] - t[0]
    for n in range(es.n_modes):
        rho_n = modal_rho[:, n]
        if not np.any(rho_n):
            continue
        lam = es.lambdas[n]
        if uniform:
            kern = ml_vec(alpha, alpha, -lam * (np.arange(K + 1) * h) ** alpha)
            out[:, n] = _convolve_pl(p, kern, rho_n, h)
        else:
            tau = t[:, None] - t[None, :]
            tau = np.where(tau > 0.0, tau, 0.0)
            kern = ml_vec(alpha, alpha, -(lam * tau.ravel() ** alpha)).reshape(tau.shape)
            out[:, n] = _product_integrate(p, kern * rho_n[None, :], grid)
    return CoefficientHistory(grid=grid, coeffs=out)


def solve_inhomogeneous(source: SeparatedSource, es: Eigensystem,
                        alpha: float, grid: TimeGrid) -> CoefficientHistory:
    """Separated source rho(t) f(x): mode-n coefficient mu_n(t_k) f_n."""
    if source.grid.nodes.shape != grid.nodes.shape or np.any(source.grid.nodes != grid.nodes):
        raise ValueError("source grid must coincide with the solver grid")
    if len(source.f) != es.n_modes:
        raise ValueError("source field length must match the eigensystem")
    modal = np.where(source.f.coeffs[None, :] != 0.0, source.rho[:, None], 0.0)
    hist = solve_inhomogeneous_modal(modal, es, alpha, grid)
    return CoefficientHistory(grid=grid, coeffs=hist.coeffs * source.f.coeffs[None, :])


def rl_integral(beta: float, samples, grid: TimeGrid) -> np.ndarray:
    """Riemann-Liouville integral (J^beta g)(t_k), beta in (0, 1], by
    product integration against piecewise-linear g; exact for affine g."""
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    samples = np.asarray(samples, dtype=float)
    if samples.shape != grid.nodes.shape:
        raise ValueError("sample count must match the grid")
    p = beta - 1.0
    pref = 1.0 / gamma(beta)
    if grid.is_uniform:
        h = grid.nodes[1] - grid.nodes[0]
        ones = np.ones_like(samples)
        return pref * _convolve_pl(p, ones, samples, h)
    G = np.repeat(samples[None, :], len(samples), axis=0)
    return pref * _product_integrate(p, G, grid)


def rl_matrix(beta: float, grid: TimeGrid) -> np.ndarray:
    """Dense matrix of the discrete J^beta (used for noise propagation)."""
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must be in (0, 1], got {beta}")
    return singular_weight_matrix(beta - 1.0, grid) / gamma(beta)


def observe(history: CoefficientHistory, x0: float, es: Eigensystem) -> PointTrajectory:
    """Trajectory of the solution at a fixed point."""
    phi = es.phi_at(x0)
    return PointTrajectory(x0=x0, grid=history.grid,
                           values=history.coeffs @ phi)
