"""Unitary covariance evolution and the system-bath propagator slice ``D(t)``.

For a joint Hamiltonian ``H`` and an uncorrelated initial state
``Gamma_S (+) Gamma_B`` the reduced system covariance is

    Gamma_S(t) = D(t) Gamma_S D(t)^T + {e^{Ht} (0 (+) Gamma_B) e^{H^T t}}_B,
    D(t) = {e^{Ht}}_B,

so the difference of two runs that share the bath state,
``delta(t) = D(t) (Gamma_S - Gamma_S~) D(t)^T``, does not depend on the bath
state (and hence not on its temperature) at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import PhysicsContractError, StructuralError, ToleranceError
from .majorana_core import (
    PartitionedSystem,
    antisymmetrize,
    check_hamiltonian,
    direct_sum,
    operator_norm,
)


def expm(m, t: float = 1.0) -> np.ndarray:
    """``exp(m t)`` by scaling and squaring with a degree-13 Pade approximant."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"expm needs a square matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m)) and np.isfinite(t)):
        raise FloatingPointError("expm input has non-finite entries")
    return scipy.linalg.expm(m * t)


def evolve_closed(gamma0, h, t: float) -> np.ndarray:
    """``Gamma(t) = e^{Ht} Gamma(0) e^{H^T t}``."""
    h = check_hamiltonian(h)
    gamma0 = np.asarray(gamma0, dtype=float)
    if gamma0.shape != h.shape:
        raise StructuralError(f"dimension mismatch: Gamma {gamma0.shape} vs H {h.shape}")
    u = expm(h, t)
    return antisymmetrize(u @ gamma0 @ u.T)


def joint_evolve_and_reduce(p: PartitionedSystem, h_joint, t: float) -> np.ndarray:
    """Evolve the joint covariance in ``p`` under ``h_joint`` and return ``{.}_B``."""
    h_joint = check_hamiltonian(h_joint)
    if h_joint.shape != p.joint.shape:
        raise StructuralError(
            f"partition of size {p.joint.shape[0]} does not match Hamiltonian of size {h_joint.shape[0]}"
        )
    g = evolve_closed(p.joint, h_joint, t)
    idx = p.sys_indices
    return g[np.ix_(idx, idx)]


@dataclass(frozen=True)
class PropagatorSlice:
    d: np.ndarray
    t: float

    @property
    def norm(self) -> float:
        return operator_norm(self.d)


def propagator_slice(h_joint, sys_indices: Sequence[int], t: float) -> PropagatorSlice:
    """System block ``D(t) = {e^{Ht}}_B`` of the joint propagator."""
    h_joint = check_hamiltonian(h_joint)
    idx = tuple(int(i) for i in sys_indices)
    if any(i < 0 or i >= h_joint.shape[0] for i in idx):
        raise StructuralError("system index out of range")
    u = expm(h_joint, t)
    return PropagatorSlice(u[np.ix_(idx, idx)], float(t))


@dataclass(frozen=True)
class DeltaTrace:
    """``||delta(t)||`` and ``||D(t)||`` sampled on a time grid.

    ``deltas`` holds the full ``delta(t)`` matrices (via the ``D(t)`` route);
    ``route_deviation`` is the largest entrywise gap between that route and
    the difference of two full joint evolutions.
    """

    times: np.ndarray
    delta_norms: np.ndarray
    d_norms: np.ndarray
    deltas: np.ndarray
    route_deviation: float

    @property
    def bound(self) -> np.ndarray:
        return 2.0 * self.d_norms**2

    def check_bound(self, slack: float = 1e-9) -> bool:
        return bool(np.all(self.delta_norms <= self.bound + slack))


def delta_trace(gamma_s_rho, gamma_s_rho_tilde, h_joint, bath_gamma, times,
                sys_indices: Optional[Sequence[int]] = None, bath_gamma_tilde=None,
                route_tol: float = 1e-10) -> DeltaTrace:
    """Evolve two system states against the same bath and track their difference.

    ``delta(t)`` is computed twice: from two full joint evolutions of
    ``Gamma_S (+) Gamma_B`` and as ``D(t) (Gamma_S - Gamma_S~) D(t)^T``. The
    two must agree to ``route_tol`` (``ToleranceError`` otherwise). The
    system occupies the leading indices unless ``sys_indices`` says otherwise.

    Passing ``bath_gamma_tilde`` that differs from ``bath_gamma`` raises
    ``PhysicsContractError``: the comparison is only meaningful for a shared
    bath.
    """
    h_joint = check_hamiltonian(h_joint)
    gs = np.asarray(gamma_s_rho, dtype=float)
    gt = np.asarray(gamma_s_rho_tilde, dtype=float)
    gb = np.asarray(bath_gamma, dtype=float)
    if bath_gamma_tilde is not None and not np.array_equal(gb, np.asarray(bath_gamma_tilde)):
        raise PhysicsContractError("both runs must start from the same bath covariance")
    if gs.shape != gt.shape:
        raise StructuralError("system covariances differ in shape")
    n_sys = gs.shape[0]
    dim = h_joint.shape[0]
    if n_sys + gb.shape[0] != dim:
        raise StructuralError("system + bath dimensions do not match the joint Hamiltonian")
    if sys_indices is None:
        sys_idx = tuple(range(n_sys))
    else:
        sys_idx = tuple(int(i) for i in sys_indices)
    bath_idx = tuple(i for i in range(dim) if i not in set(sys_idx))
    order = np.array(sys_idx + bath_idx)

    def joint_state(g_s):
        g = np.zeros((dim, dim))
        g[np.ix_(order, order)] = direct_sum(g_s, gb)
        return g

    j_rho, j_tilde = joint_state(gs), joint_state(gt)
    diff0 = gs - gt
    times = np.asarray(times, dtype=float)
    deltas, dn, dd = [], [], []
    worst = 0.0
    for t in times:
        u = expm(h_joint, t)
        d = u[np.ix_(sys_idx, sys_idx)]
        delta = d @ diff0 @ d.T
        a = (u @ j_rho @ u.T)[np.ix_(sys_idx, sys_idx)]
        b = (u @ j_tilde @ u.T)[np.ix_(sys_idx, sys_idx)]
        worst = max(worst, float(np.abs((a - b) - delta).max(initial=0.0)))
        deltas.append(delta)
        dn.append(operator_norm(delta))
        dd.append(operator_norm(d))
    if worst > route_tol:
        raise ToleranceError(f"joint-evolution and D(t) routes disagree by {worst:.3g}")
    return DeltaTrace(times, np.array(dn), np.array(dd), np.array(deltas), worst)
