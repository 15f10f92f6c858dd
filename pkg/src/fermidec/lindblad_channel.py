"""Gaussian dissipative channels ``dGamma/dt = X Gamma + Gamma X^T + Y``.

A master equation

    drho/dt = -i[H^, rho] + sum_mu (2 L_mu rho L_mu^dag - {L_mu^dag L_mu, rho})

with quadratic ``H^`` and linear ``L_mu = sum_j l[mu, j] c_j`` maps to

    X = H - DISSIPATION_SCALE * (M + M^*),   Y = INHOMOGENEITY_SCALE * Im(M),

where ``M[j, k] = sum_mu l[mu, j] conj(l[mu, k])``. The two scale constants
were fixed against the exact density-matrix evolution in
:mod:`fermidec.exact_oracle` (single-mode loss must relax to the vacuum at
rate 2, single-mode gain to the filled mode) and are asserted in the tests.

``convention="literal"`` instead returns the literal ``X = -H - (M + M^*)``
with ``Y = 4 Im(M)``: dissipation rates are half the calibrated ones and the
unitary part runs backwards. It exists to reproduce quoted closed-form rates
such as ``||e^{Xt}|| = exp(-eta^2 t / 2)`` for the lossy Kitaev wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import tolerances as tol
from .closed_dynamics import expm
from .errors import MarginalSteadyStateError, PhysicsContractError, StructuralError, ToleranceError
from .majorana_core import antisymmetrize, check_hamiltonian, skew_defect, validate_covariance

DISSIPATION_SCALE = 2.0
INHOMOGENEITY_SCALE = 8.0
LITERAL_DISSIPATION_SCALE = 1.0
LITERAL_INHOMOGENEITY_SCALE = 4.0

CONVENTIONS = ("calibrated", "literal")


@dataclass(frozen=True)
class LindbladSpec:
    """Coefficient vectors ``l_mu`` of linear Lindblad operators."""

    ls: tuple

    def __post_init__(self):
        vecs = tuple(np.asarray(v, dtype=complex).ravel() for v in self.ls)
        if not vecs:
            raise StructuralError("LindbladSpec needs at least one coefficient vector")
        n = vecs[0].size
        if n == 0 or n % 2:
            raise StructuralError(f"coefficient vectors need even, nonzero length (got {n})")
        if any(v.size != n for v in vecs):
            raise StructuralError("all Lindblad coefficient vectors must have the same length")
        object.__setattr__(self, "ls", vecs)

    @property
    def dim(self) -> int:
        return self.ls[0].size

    @property
    def n_modes(self) -> int:
        return self.dim // 2

    def __len__(self):
        return len(self.ls)


def build_m(spec: LindbladSpec) -> np.ndarray:
    """Hermitian PSD matrix ``M = sum_mu l_mu l_mu^dag``."""
    ls = np.array(spec.ls)
    return ls.T @ ls.conj()


@dataclass(frozen=True)
class GaussianChannel:
    """Generator pair ``(X, Y)``.

    On construction ``Y`` must be skew-symmetric and, when ``validate`` is
    true, the dissipative part ``P = -(X + X^T)/2`` positive semidefinite.
    """

    x: np.ndarray
    y: np.ndarray
    convention: str = "calibrated"
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2 or x.shape[0] != x.shape[1] or y.shape != x.shape:
            raise StructuralError(f"X and Y must be square and equal-sized, got {x.shape}, {y.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise StructuralError("channel has non-finite entries")
        if self.convention not in CONVENTIONS:
            raise StructuralError(f"unknown convention {self.convention!r}")
        scale = max(1.0, float(np.abs(y).max(initial=0.0)))
        if skew_defect(y) > tol.TOL_SKEW * scale:
            raise StructuralError(f"Y is not skew-symmetric (defect {skew_defect(y):.3g})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", antisymmetrize(y))
        if self.validate:
            lam = self.min_dissipation
            if lam < -tol.TOL_PSD * max(1.0, float(np.linalg.norm(x, 2))):
                raise PhysicsContractError(
                    f"dissipative part is not positive semidefinite (min eigenvalue {lam:.3g})"
                )

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> np.ndarray:
        return -0.5 * (self.x + self.x.T)

    @property
    def h(self) -> np.ndarray:
        return -0.5 * (self.x - self.x.T)

    @property
    def min_dissipation(self) -> float:
        return float(np.linalg.eigvalsh(self.p)[0]) if self.dim else 0.0

    def rhs(self, gamma) -> np.ndarray:
        gamma = np.asarray(gamma, dtype=float)
        return self.x @ gamma + gamma @ self.x.T + self.y


def build_channel(h, spec: Optional[LindbladSpec] = None, convention: str = "calibrated") -> GaussianChannel:
    """Channel generated by quadratic ``h`` and linear Lindblad operators ``spec``."""
    h = check_hamiltonian(h)
    if convention not in CONVENTIONS:
        raise StructuralError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    if spec is None:
        m = np.zeros(h.shape, dtype=complex)
    else:
        if spec.dim != h.shape[0]:
            raise StructuralError(f"Lindblad vectors have length {spec.dim}, Hamiltonian is {h.shape[0]}")
        m = build_m(spec)
    re2 = (m + m.conj()).real
    im = m.imag
    if convention == "calibrated":
        x = h - DISSIPATION_SCALE * re2
        y = INHOMOGENEITY_SCALE * im
    else:
        x = -h - LITERAL_DISSIPATION_SCALE * re2
        y = LITERAL_INHOMOGENEITY_SCALE * im
    return GaussianChannel(x, antisymmetrize(y), convention)


def _is_stable(x, tol_stab):
    ev = np.linalg.eigvals(x)
    return bool(np.all(ev.real < -tol_stab)), ev


def steady_state(ch: GaussianChannel, tol_stab: Optional[float] = None, residual_tol: float = 1e-10,
                 check_physical: bool = True) -> np.ndarray:
    """Unique solution of ``X G + G X^T = -Y``.

    Requires every eigenvalue of ``X`` to have real part below
    ``-tol_stab`` (default ``1e-12 * ||X||``); otherwise raises
    ``MarginalSteadyStateError`` carrying the spectrum. The Lyapunov
    equation is solved by the Bartels-Stewart algorithm.
    """
    x = ch.x
    if tol_stab is None:
        tol_stab = tol.TOL_STAB_REL * max(1.0, float(np.linalg.norm(x, 2)))
    stable, ev = _is_stable(x, tol_stab)
    if not stable:
        worst = float(ev.real.max())
        raise MarginalSteadyStateError(
            f"X is not Hurwitz stable (max eigenvalue real part {worst:.3g}); steady state not unique",
            spectrum=ev,
        )
    g = antisymmetrize(scipy.linalg.solve_continuous_lyapunov(x, -ch.y))
    res = np.linalg.norm(x @ g + g @ x.T + ch.y, 2)
    if res > residual_tol:
        raise ToleranceError(f"Lyapunov residual {res:.3g} exceeds {residual_tol:.1g}")
    if check_physical:
        rep = validate_covariance(g)
        if not rep.valid:
            raise PhysicsContractError(
                f"steady state is unphysical (max singular value {rep.max_singular_value:.6g})"
            )
    return g


def lyapunov_residual(ch: GaussianChannel, gamma) -> float:
    return float(np.linalg.norm(ch.rhs(gamma), 2))


def propagate(ch: GaussianChannel, gamma0, t: float, gamma_ss=None) -> np.ndarray:
    """``Gamma(t) = e^{Xt} (Gamma(0) - Gamma_ss) e^{X^T t} + Gamma_ss``."""
    gamma0 = np.asarray(gamma0, dtype=float)
    if gamma0.shape != ch.x.shape:
        raise StructuralError(f"covariance {gamma0.shape} does not match channel of size {ch.dim}")
    if gamma_ss is None:
        gamma_ss = steady_state(ch)
    e = expm(ch.x, t)
    return antisymmetrize(e @ (gamma0 - gamma_ss) @ e.T + gamma_ss)


def propagate_many(ch: GaussianChannel, gamma0, times: Sequence[float], gamma_ss=None) -> np.ndarray:
    if gamma_ss is None:
        gamma_ss = steady_state(ch)
    return np.array([propagate(ch, gamma0, t, gamma_ss) for t in times])
