"""Long-time behaviour: the two-term algebraic expansion of the
homogeneous solution, decay-rate fitting, and sign-stabilization
detection at a fixed observation point.

For t >> 1 the solution approaches
    t^{-alpha} A^{-1}u0 / Gamma(1-alpha) + t^{1-alpha} A^{-1}u1 / Gamma(2-alpha),
with Gamma(1-alpha) < 0 for alpha in (1,2); this sign flip is what makes
the solution eventually take the sign opposite to A^{-1}u0(x) when the
velocity term is absent, and the sign of A^{-1}u1(x) otherwise.  The
detectors below only ever bracket the existential onset times: the first
grid node after which the observed sign stays fixed is an upper bound for
them.

Stateless analyses over immutable inputs; concurrently callable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .eigensystem import SpectralField, apply_inverse_A, dnorm, evaluate_at
from .forward import HomogeneousProblem, PointTrajectory, observe, solution_at, solve_homogeneous
from .gammafn import gamma
from .timegrid import TimeGrid

__all__ = [
    "AsymptoticsReport",
    "InconclusiveSignError",
    "leading_term",
    "remainder_norm",
    "fit_decay_rate",
    "detect_sign",
    "sign_change_census",
    "count_sign_changes",
]

# Relative tolerance bridging float noise around zero crossings.
_SIGN_ATOL_FACTOR = 1e-14


class InconclusiveSignError(RuntimeError):
    """No stabilized sign found within the trajectory; not a violation of
    the long-time sign law, just insufficient horizon."""


@dataclass
class AsymptoticsReport:
    """Results of long-time analyses; fields unused by a given analysis
    stay None."""

    window: tuple[float, float]
    fitted_norm_slope: float | None = None
    fitted_remainder_slope: float | None = None
    empirical_constant: float | None = None
    sign_onset: float | None = None
    stabilized_sign: int | None = None
    sign_change_count: int = 0
    predicted_sign: int | None = None
    sign_agrees: bool | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.window
        if not (0.0 < lo < hi):
            raise ValueError("window must satisfy 0 < t_lo < t_hi")
        if self.sign_change_count < 0:
            raise ValueError("sign_change_count must be nonnegative")


def leading_term(problem: HomogeneousProblem, t: float) -> SpectralField:
    """Two-term long-time expansion
    t^{-alpha}/Gamma(1-alpha) A^{-1}u0 + t^{1-alpha}/Gamma(2-alpha) A^{-1}u1."""
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    alpha = problem.alpha
    if not 1.0 < alpha < 2.0:
        raise ValueError("leading_term requires alpha strictly inside (1, 2)")
    w0 = apply_inverse_A(problem.u0, problem.es).coeffs
    w1 = apply_inverse_A(problem.u1, problem.es).coeffs
    c = (t**-alpha / gamma(1.0 - alpha)) * w0 + (t ** (1.0 - alpha) / gamma(2.0 - alpha)) * w1
    return SpectralField(c)


def remainder_norm(problem: HomogeneousProblem, t: float, s: float) -> float:
    """||u(., t) - leading_term(t)|| in the order-s discrete norm."""
    u = solution_at(problem, t)
    lead = leading_term(problem, t)
    return dnorm(SpectralField(u.coeffs - lead.coeffs), s, problem.es)


def fit_decay_rate(times, values, window: tuple[float, float]) -> float:
    """Least-squares slope of log(value) against log(t) inside the window.

    Requires at least 5 samples there, all strictly positive (a
    nonpositive value means the sign has not stabilized yet: widen the
    window instead)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (times >= lo) & (times <= hi)
    if mask.sum() < 5:
        raise ValueError(f"need at least 5 samples in window [{lo}, {hi}]")
    v = values[mask]
    if np.any(v <= 0.0):
        raise ValueError(
            "nonpositive values in the fit window (sign not stabilized; widen the window)"
        )
    return float(np.polyfit(np.log(times[mask]), np.log(v), 1)[0])


def _signs(values: np.ndarray, atol: float) -> np.ndarray:
    s = np.zeros(len(values), dtype=int)
    s[values > atol] = 1
    s[values < -atol] = -1
    return s


def count_sign_changes(values, atol: float | None = None) -> int:
    """Strict sign alternations, bridging samples within atol of zero."""
    values = np.asarray(values, dtype=float)
    if atol is None:
        atol = _SIGN_ATOL_FACTOR * np.max(np.abs(values), initial=0.0)
    s = _signs(values, atol)
    nz = s[s != 0]
    if len(nz) == 0:
        return 0
    return int(np.sum(nz[1:] != nz[:-1]))


def detect_sign(trajectory: PointTrajectory, a_inv_u0_x0: float,
                a_inv_u1_x0: float) -> AsymptoticsReport:
    """Find the time after which the observed sign stays fixed and check
    it against the long-time prediction: opposite to sign(A^{-1}u0(x0))
    when A^{-1}u1(x0) = 0, equal to sign(A^{-1}u1(x0)) otherwise.

    Raises InconclusiveSignError when no stabilization is visible in the
    trajectory (e.g. the purely oscillatory alpha = 2 limit)."""
    t = trajectory.grid.nodes
    v = trajectory.values
    pos = t > 0.0
    t, v = t[pos], v[pos]
    scale = float(np.max(np.abs(v), initial=0.0))
    atol = _SIGN_ATOL_FACTOR * scale
    s = _signs(v, atol)
    changes = count_sign_changes(v, atol)
    window = (float(t[0]), float(t[-1]))

    ref = abs(a_inv_u0_x0) + abs(a_inv_u1_x0)
    predicted: int | None = None
    if abs(a_inv_u1_x0) > 1e-12 * ref:
        predicted = 1 if a_inv_u1_x0 > 0 else -1
    elif abs(a_inv_u0_x0) > 1e-12 * ref:
        predicted = -1 if a_inv_u0_x0 > 0 else 1

    if scale == 0.0 or s[-1] == 0:
        raise InconclusiveSignError("trajectory ends at zero; no stabilized sign")
    trailing = s[-1]
    idx = len(s) - 1
    while idx > 0 and s[idx - 1] == trailing:
        idx -= 1
    if idx > 0:
        # the trailing constant-sign run must dominate the earlier
        # oscillation scale, otherwise (e.g. the alpha = 2 cosine) the run
        # is just the tail of one more half-period
        nz = np.nonzero(s != 0)[0]
        flips = nz[1:][s[nz][1:] != s[nz][:-1]]
        cross_times = t[flips]
        if len(cross_times) >= 2:
            ref_gap = float(np.max(np.diff(cross_times)))
        elif len(cross_times) == 1:
            ref_gap = float(cross_times[0] - t[0])
        else:
            ref_gap = float(t[-1] - t[0])
        run = float(t[-1] - t[idx])
        if len(s) - idx < 3 or run < 3.0 * ref_gap:
            raise InconclusiveSignError(
                f"no stabilized sign within t <= {t[-1]:g} (trailing run "
                f"{run:.3g} vs oscillation gap {ref_gap:.3g}; extend the horizon)"
            )
    report = AsymptoticsReport(
        window=window,
        sign_onset=float(t[idx]),
        stabilized_sign=int(trailing),
        sign_change_count=changes,
        predicted_sign=predicted,
        sign_agrees=None if predicted is None else bool(predicted == trailing),
        diagnostics={"n_samples": int(len(s)), "zero_bridged": int(np.sum(s == 0))},
    )
    return report


def sign_change_census(alphas, es, u0: SpectralField, u1: SpectralField,
                       x0: float, horizon: float, cells: int = 4096):
    """Observational table of sign-change counts of u(x0, .) on (0, T]
    per fractional order; no monotonicity is asserted."""
    grid = TimeGrid.uniform(horizon, cells)
    rows = []
    for alpha in alphas:
        problem = HomogeneousProblem(es, float(alpha), u0, u1)
        traj = observe(solve_homogeneous(problem, grid), x0, es)
        count = count_sign_changes(traj.values[1:])
        try:
            rep = detect_sign(traj, evaluate_at(apply_inverse_A(u0, es), x0, es),
                              evaluate_at(apply_inverse_A(u1, es), x0, es))
            onset = rep.sign_onset
        except InconclusiveSignError:
            onset = None
        rows.append({"alpha": float(alpha), "sign_changes": count,
                     "onset_estimate": onset})
    return rows
