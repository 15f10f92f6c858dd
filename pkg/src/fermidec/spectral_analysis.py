"""Decoherence rates and bounds derived from a channel generator ``X``.

With ``X = -H - P`` (``H`` skew, ``P`` symmetric) one has
``||e^{Xt}|| <= ||e^{-Pt}|| = e^{-lambda_P t}`` and therefore, for two
states evolving under the same channel,
``||delta(t)|| <= e^{-2 lambda t} ||delta(0)|| <= 2 e^{-2 lambda t}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .closed_dynamics import expm
from .errors import DomainError, InvariantError, PhysicsContractError
from .majorana_core import operator_norm


@dataclass(frozen=True)
class GeneratorParts:
    h: np.ndarray
    p: np.ndarray


def split_generator(x) -> GeneratorParts:
    """``H = -(X - X^T)/2``, ``P = -(X + X^T)/2`` so that ``X = -H - P``."""
    x = np.asarray(x, dtype=float)
    return GeneratorParts(h=-0.5 * (x - x.T), p=-0.5 * (x + x.T))


def min_eigenvalue(sym) -> float:
    sym = np.asarray(sym, dtype=float)
    return float(np.linalg.eigvalsh(0.5 * (sym + sym.T))[0]) if sym.size else 0.0


@dataclass(frozen=True)
class BhatiaReport:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    slack: float

    @property
    def max_violation(self) -> float:
        return float(np.max(self.lhs - self.rhs, initial=-np.inf))

    @property
    def holds(self) -> bool:
        return bool(np.all(self.lhs <= self.rhs + self.slack))


def bhatia_bound_check(x, times: Sequence[float], slack: float = 1e-10, raise_on_violation: bool = True) -> BhatiaReport:
    """Evaluate ``||e^{Xt}||`` against ``||e^{(X + X^T) t / 2}||`` on ``times``."""
    x = np.asarray(x, dtype=float)
    sym = 0.5 * (x + x.T)
    times = np.asarray(times, dtype=float)
    lhs = np.array([operator_norm(expm(x, t)) for t in times])
    rhs = np.array([operator_norm(expm(sym, t)) for t in times])
    rep = BhatiaReport(times, lhs, rhs, slack)
    if raise_on_violation and not rep.holds:
        raise InvariantError(f"||e^(Xt)|| exceeds ||e^(Re(X) t)|| by {rep.max_violation:.3g}")
    return rep


@dataclass(frozen=True)
class RateReport:
    lambda_p: float
    lambda_pg: float
    gap: float

    def bound(self, t) -> np.ndarray:
        """Ground-space bound ``2 e^{-2 lambda_PG t}``."""
        return 2.0 * np.exp(-2.0 * self.lambda_pg * np.asarray(t, dtype=float))

    def to_dict(self) -> dict:
        return {"lambda_p": self.lambda_p, "lambda_pg": self.lambda_pg, "gap": self.gap}


def rate_report(x, x_g=None, gap: float = 0.0, tol_neg: float = 1e-9) -> RateReport:
    """``lambda_P`` of the full generator and ``lambda_PG`` of its ground block."""
    lam_p = min_eigenvalue(split_generator(x).p)
    lam_pg = lam_p if x_g is None else min_eigenvalue(split_generator(x_g).p)
    for name, lam in (("P", lam_p), ("P_G", lam_pg)):
        if lam < -tol_neg:
            raise PhysicsContractError(f"{name} has a negative eigenvalue {lam:.3g}")
    # + 0.0 turns a -0.0 into 0.0
    return RateReport(lam_p + 0.0, lam_pg + 0.0, float(gap))


@dataclass(frozen=True)
class DecoherenceCurves:
    times: np.ndarray
    delta_norms: np.ndarray
    tight_bound: np.ndarray
    bound: np.ndarray


def decoherence_bound(x_g, gamma_psi_g, gamma_phi_g, times, x_full=None, gap: float = 0.0,
                      slack: float = 1e-10):
    """Exact ``||delta_G(t)||`` under ``e^{X_G t}`` with its exponential bounds.

    Returns ``(RateReport, DecoherenceCurves)``. ``tight_bound`` is
    ``e^{-2 lambda_PG t} ||Gamma_psi - Gamma_phi||`` and ``bound`` is
    ``2 e^{-2 lambda_PG t}``; both are asserted at every sample.
    """
    x_g = np.asarray(x_g, dtype=float)
    rep = rate_report(x_full if x_full is not None else x_g, x_g, gap)
    diff = np.asarray(gamma_psi_g, dtype=float) - np.asarray(gamma_phi_g, dtype=float)
    times = np.asarray(times, dtype=float)
    dn = np.array([operator_norm(expm(x_g, t) @ diff @ expm(x_g, t).T) for t in times])
    decay = np.exp(-2.0 * rep.lambda_pg * times)
    tight = decay * operator_norm(diff)
    bound = 2.0 * decay
    if np.any(dn > tight + slack) or np.any(dn > bound + slack):
        raise InvariantError("||delta(t)|| exceeds its exponential bound")
    return rep, DecoherenceCurves(times, dn, tight, bound)


@dataclass(frozen=True)
class PositiveTypeReport:
    min_real: float
    max_abs_imag: float
    min_kernel_eigenvalue: float
    grid_spacing: float
    tol: float

    @property
    def positive(self) -> bool:
        return self.min_real >= -self.tol and self.max_abs_imag <= self.tol and self.min_kernel_eigenvalue >= -self.tol


def positive_type_check(grid, samples, points, weights, tol: float = 1e-9) -> PositiveTypeReport:
    """Numerical test that ``f`` is a function of positive type.

    Parameters
    ----------
    grid : array
        Uniform, symmetric sample times ``s_k``.
    samples : array
        ``f(s_k)``; should satisfy ``f(-s) = conj(f(s))``.
    points : array
        Real evaluation points ``t_n``. They are first snapped to multiples
        of the grid spacing so every difference ``t_n - t_m`` is itself a
        grid sample; mapping raw differences independently would break the
        positivity being tested.
    weights : array, shape (n_trials, n_points)
        Complex trial vectors ``z``; each yields the form
        ``sum_nm conj(z_n) z_m f(t_n - t_m)``.

    The smallest eigenvalue of the Hermitian part of the kernel matrix
    ``F[n, m] = f(t_n - t_m)`` is also reported: it is the worst case over
    all trial vectors.
    """
    grid = np.asarray(grid, dtype=float)
    samples = np.asarray(samples, dtype=complex)
    points = np.asarray(points, dtype=float)
    weights = np.atleast_2d(np.asarray(weights, dtype=complex))
    ds = float(grid[1] - grid[0])
    points = ds * np.rint(points / ds)
    diffs = points[:, None] - points[None, :]
    idx = np.rint((diffs - grid[0]) / ds).astype(int)
    if idx.min() < 0 or idx.max() >= grid.size:
        raise DomainError("point differences fall outside the sample grid")
    kern = samples[idx]
    forms = np.einsum("tn,nm,tm->t", weights.conj(), kern, weights)
    herm = 0.5 * (kern + kern.conj().T)
    scale = max(1.0, float(np.abs(kern).max()))
    return PositiveTypeReport(
        min_real=float(forms.real.min() / scale),
        max_abs_imag=float(np.abs(forms.imag).max() / scale),
        min_kernel_eigenvalue=float(np.linalg.eigvalsh(herm)[0] / scale),
        grid_spacing=ds,
        tol=tol,
    )


@dataclass(frozen=True)
class DistinguishabilityBound:
    gaussian: float
    trace_route: Optional[float]


def distinguishability_bound(delta_norm: float, rate: Optional[float] = None,
                             t: Optional[float] = None) -> DistinguishabilityBound:
    """Upper bounds on the success probability of telling two states apart.

    ``gaussian`` is ``1/2 + ||delta||/2`` clipped to ``[1/2, 1]`` (a single
    quadratic measurement). With ``rate = lambda_PG`` and ``t`` given,
    ``trace_route`` is ``1/2 + e^{-2 lambda t}`` (also clipped), which covers
    arbitrary measurements.
    """
    if delta_norm < 0:
        raise DomainError("delta_norm must be non-negative")
    g = float(np.clip(0.5 + 0.5 * delta_norm, 0.5, 1.0))
    tr = None
    if rate is not None and t is not None:
        tr = float(np.clip(0.5 + np.exp(-2.0 * rate * t), 0.5, 1.0))
    return DistinguishabilityBound(g, tr)


def fit_decay_rate(times, values) -> float:
    """Least-squares slope of ``-log(values)`` against ``times``."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    slope = np.polyfit(times, np.log(values), 1)[0]
    return float(-slope)
