"""Eigensystem of the elliptic operator with Dirichlet ends, spectral
fields, and the discrete fractional-power norms built on them.

Bundled providers are one-dimensional: the exact Dirichlet Laplacian on an
interval and a symmetric finite-difference Sturm-Liouville discretization
of -(a u')' + c u.  The Eigensystem abstraction itself carries no
dimension assumption.

Instances are immutable after construction and all operations here are
read-only, so everything is safe for concurrent callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "Eigensystem",
    "SpectralField",
    "dirichlet_laplacian_1d",
    "sturm_liouville_fd",
    "project",
    "dnorm",
    "apply_inverse_A",
    "evaluate_at",
    "truncation_tail_bound",
]


@dataclass
class Eigensystem:
    """Eigenpairs (lambda_n, phi_n), n = 1..N, of a symmetric elliptic
    operator with Dirichlet boundary, plus a quadrature rule that is
    (near-)exact for products of the bundled eigenfunctions."""

    lambdas: np.ndarray          # ascending, strictly positive
    nodes: np.ndarray            # quadrature nodes covering [lo, hi]
    weights: np.ndarray          # quadrature weights
    phi_nodes: np.ndarray        # (N, len(nodes)) eigenfunction samples
    interval: tuple[float, float]
    provider: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lambdas = np.asarray(self.lambdas, dtype=float)
        if self.lambdas.ndim != 1 or len(self.lambdas) == 0:
            raise ValueError("lambdas must be a non-empty vector")
        if not np.all(self.lambdas > 0.0):
            raise ValueError("eigenvalues must be strictly positive")
        if np.any(np.diff(self.lambdas) < 0.0):
            raise ValueError("eigenvalues must be nondecreasing")

    @property
    def n_modes(self) -> int:
        return len(self.lambdas)

    def phi(self, n: int, x: float) -> float:
        """Eigenfunction phi_n at a point; n is 1-based."""
        if not 1 <= n <= self.n_modes:
            raise ValueError(f"mode index {n} outside 1..{self.n_modes}")
        return float(self.phi_at(x)[n - 1])

    def phi_at(self, x: float) -> np.ndarray:
        """All N eigenfunctions evaluated at x."""
        lo, hi = self.interval
        if not lo <= x <= hi:
            raise ValueError(f"x = {x} outside the domain [{lo}, {hi}]")
        if self.provider == "dirichlet_laplacian_1d":
            length = hi - lo
            n = np.arange(1, self.n_modes + 1)
            return np.sqrt(2.0 / length) * np.sin(n * math.pi * (x - lo) / length)
        cols = np.empty(self.n_modes)
        for i in range(self.n_modes):
            cols[i] = np.interp(x, self.nodes, self.phi_nodes[i])
        return cols

    def to_dict(self) -> dict:
        """JSON-ready description sufficient to rebuild the eigensystem."""
        d = {
            "provider": self.provider,
            "interval": [self.interval[0], self.interval[1]],
            "n_modes": self.n_modes,
            "lambdas": self.lambdas.tolist(),
            "meta": {
                k: (v.tolist() if isinstance(v, np.ndarray) else v)
                for k, v in self.meta.items()
            },
        }
        return d

    @staticmethod
    def from_dict(d: dict) -> "Eigensystem":
        provider = d["provider"]
        lo, hi = d["interval"]
        if provider == "dirichlet_laplacian_1d":
            es = dirichlet_laplacian_1d(d["n_modes"], hi - lo, lo=lo)
        elif provider == "sturm_liouville_fd":
            es = _fd_build(
                np.asarray(d["meta"]["a_mid"], dtype=float),
                np.asarray(d["meta"]["c_interior"], dtype=float),
                (lo, hi),
                d["n_modes"],
            )
        else:
            raise ValueError(f"unknown provider {provider!r}")
        stored = np.asarray(d["lambdas"], dtype=float)
        if not np.allclose(stored, es.lambdas, rtol=1e-10, atol=1e-12):
            raise ValueError("stored eigenvalues disagree with rebuilt provider")
        return es


@dataclass
class SpectralField:
    """Coefficients (g, phi_n), n = 1..N, of a field in the eigenbasis."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.ndim != 1:
            raise ValueError("coeffs must be a vector")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coeffs must be finite")

    def __len__(self) -> int:
        return len(self.coeffs)


def dirichlet_laplacian_1d(n_modes: int, length: float, lo: float = 0.0) -> Eigensystem:
    """Exact eigensystem of -d^2/dx^2 on (lo, lo+length), Dirichlet ends:
    lambda_n = (n pi / L)^2, phi_n = sqrt(2/L) sin(n pi (x-lo)/L)."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    if not length > 0.0:
        raise ValueError("length must be positive")
    n = np.arange(1, n_modes + 1)
    lambdas = (n * math.pi / length) ** 2
    # uniform trapezoid rule: discrete sine orthogonality makes it exact
    # for products of the first n_modes eigenfunctions when cells > 2 N
    cells = max(4 * n_modes, 256)
    nodes = lo + np.linspace(0.0, length, cells + 1)
    weights = np.full(cells + 1, length / cells)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    xs = (nodes - lo)[None, :]
    phi_nodes = np.sqrt(2.0 / length) * np.sin(n[:, None] * math.pi * xs / length)
    return Eigensystem(
        lambdas=lambdas,
        nodes=nodes,
        weights=weights,
        phi_nodes=phi_nodes,
        interval=(lo, lo + length),
        provider="dirichlet_laplacian_1d",
        meta={"length": length},
    )


def _fd_build(a_mid: np.ndarray, c_int: np.ndarray, interval, n_modes: int) -> Eigensystem:
    lo, hi = interval
    m = len(a_mid)                       # cells
    if len(c_int) != m - 1:
        raise ValueError("c samples must live on the interior nodes")
    h = (hi - lo) / m
    if np.min(a_mid) <= 0.0:
        raise ValueError("diffusion coefficient must be strictly positive")
    if np.min(c_int) < 0.0:
        raise ValueError("potential c must be nonnegative")
    diag = (a_mid[:-1] + a_mid[1:]) / h**2 + c_int
    off = -a_mid[1:-1] / h**2
    vals, vecs = eigh_tridiagonal(diag, off, select="i",
                                  select_range=(0, n_modes - 1))
    if vals[0] <= 0.0:
        raise ValueError(
            f"nonpositive eigenvalue {vals[0]}: c < 0 or mesh pathology"
        )
    # normalize under the trapezoid inner product (zero Dirichlet ends)
    vecs = vecs / math.sqrt(h)
    nodes = lo + np.linspace(0.0, hi - lo, m + 1)
    weights = np.full(m + 1, h)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    phi_nodes = np.zeros((n_modes, m + 1))
    phi_nodes[:, 1:-1] = vecs.T
    return Eigensystem(
        lambdas=vals,
        nodes=nodes,
        weights=weights,
        phi_nodes=phi_nodes,
        interval=(lo, hi),
        provider="sturm_liouville_fd",
        meta={"mesh_cells": m, "a_mid": a_mid, "c_interior": c_int},
    )


def sturm_liouville_fd(a, c, mesh_size: int, n_modes: int, interval=(0.0, math.pi)) -> Eigensystem:
    """Eigensystem of -(a u')' + c u with Dirichlet ends via the symmetric
    three-point flux discretization on a uniform mesh of `mesh_size` cells;
    a sampled at cell midpoints, c at interior nodes."""
    if n_modes > mesh_size - 1:
        raise ValueError("n_modes must be <= mesh_size - 1")
    lo, hi = interval
    h = (hi - lo) / mesh_size
    x_mid = lo + h * (np.arange(mesh_size) + 0.5)
    x_int = lo + h * np.arange(1, mesh_size)
    a_mid = np.asarray([a(x) for x in x_mid], dtype=float)
    c_int = np.asarray([c(x) for x in x_int], dtype=float)
    return _fd_build(a_mid, c_int, (lo, hi), n_modes)


def project(samples, es: Eigensystem) -> SpectralField:
    """Quadrature approximation of the coefficients (g, phi_n) from samples
    of g on the eigensystem's quadrature nodes."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != es.nodes.shape:
        raise ValueError(
            f"expected {es.nodes.shape[0]} samples on the quadrature nodes, "
            f"got {samples.shape}"
        )
    return SpectralField(es.phi_nodes @ (es.weights * samples))


def dnorm(fld: SpectralField, s: float, es: Eigensystem) -> float:
    """Discrete fractional-power norm (sum_n lambda_n^{2s} c_n^2)^(1/2);
    defined for s >= -1."""
    if s < -1.0:
        raise ValueError(f"norm order s must be >= -1, got {s}")
    _check(fld, es)
    return float(np.sqrt(np.sum((es.lambdas**s * fld.coeffs) ** 2)))


def apply_inverse_A(fld: SpectralField, es: Eigensystem) -> SpectralField:
    """Coefficients of the inverse operator: c_n -> c_n / lambda_n."""
    _check(fld, es)
    return SpectralField(fld.coeffs / es.lambdas)


def evaluate_at(fld: SpectralField, x: float, es: Eigensystem) -> float:
    """Pointwise value sum_n c_n phi_n(x)."""
    _check(fld, es)
    return float(fld.coeffs @ es.phi_at(x))


def truncation_tail_bound(fld: SpectralField, es: Eigensystem, n_keep: int | None = None) -> float:
    """Diagnostic lambda_N^{-1} * ||coefficients beyond n_keep||, making the
    error of truncating the infinite expansions observable."""
    _check(fld, es)
    if n_keep is None:
        n_keep = es.n_modes // 2
    return float(np.linalg.norm(fld.coeffs[n_keep:]) / es.lambdas[-1])


def _check(fld: SpectralField, es: Eigensystem):
    if len(fld) != es.n_modes:
        raise ValueError(
            f"field has {len(fld)} coefficients, eigensystem has {es.n_modes}"
        )
