"""Born-Markov derivation of a Gaussian channel from a system-bath Hamiltonian.

The joint Hamiltonian is ``[[H_S, -H_I^T], [H_I, H_B]]`` with ``H_I`` the
bath-rows by system-columns coupling block. In the interaction picture of
``Gamma(t) = e^{Ht} Gamma e^{H^T t}`` the coupling becomes
``K(t) = e^{-H_B t} H_I e^{H_S t}``. Second order perturbation theory with
the Born-Markov replacement and a stationary bath (``[Gamma_B, H_B] = 0``)
gives, back in the Schroedinger picture,

    X = H_S - int_0^inf H_I^T e^{H_B s} H_I e^{-H_S s} ds
    Y = F - F^T,   F = int_0^inf H_I^T Gamma_B e^{H_B s} H_I e^{-H_S s} ds.

Writing ``H_S = sum_k i w_k |k><k|``, each integral acts on ``|k>`` through
the damped resolvent ``R(w) = (eps + i w - H_B)^{-1}``; ``eps > 0`` is a line
broadening that makes the half-line integrals converge for finite baths.
The secular approximation keeps only blocks between equal frequencies,
which is a projection onto the eigenspaces of ``H_S``. ``Gamma_B`` never
enters ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from . import tolerances as tol
from .closed_dynamics import expm
from .errors import (
    DomainError,
    EmptyGroundSpaceError,
    NonStationaryBathError,
    StructuralError,
    ToleranceError,
)
from .lindblad_channel import GaussianChannel
from .majorana_core import antisymmetrize, check_hamiltonian, joint_matrix

SECULAR_MODES = ("full", "relaxed", "none")


@dataclass(frozen=True)
class SystemEigenbasis:
    """Eigen-decomposition ``H_S |j> = i w_j |j>`` grouped into degeneracy classes.

    ``classes`` is a tuple of index tuples, one per distinct frequency (within
    ``tol_omega``), ordered by increasing frequency.
    """

    omegas: np.ndarray
    vectors: np.ndarray
    classes: tuple
    tol_omega: float

    def class_frequency(self, c: int) -> float:
        return float(np.mean(self.omegas[list(self.classes[c])]))

    def projector(self, c: int) -> np.ndarray:
        v = self.vectors[:, list(self.classes[c])]
        return v @ v.conj().T

    @property
    def zero_class(self) -> Optional[int]:
        for c in range(len(self.classes)):
            if abs(self.class_frequency(c)) <= self.tol_omega:
                return c
        return None

    @property
    def gap(self) -> float:
        """Smallest nonzero ``|w_j|``; ``inf`` if every frequency is zero."""
        nz = np.abs(self.omegas)[np.abs(self.omegas) > self.tol_omega]
        return float(nz.min()) if nz.size else float("inf")


def system_eigenbasis(h_s, tol_omega: Optional[float] = None) -> SystemEigenbasis:
    """Diagonalise ``H_S`` via the Hermitian matrix ``i H_S``.

    ``tol_omega`` defaults to ``1e-8 * max|w|`` (with an absolute floor of
    ``1e-12``); classes are built by single-linkage clustering of the sorted
    frequencies.
    """
    h_s = check_hamiltonian(h_s)
    lam, v = np.linalg.eigh(1j * h_s)
    omegas = -lam  # H_S v = -i lam v
    order = np.argsort(omegas, kind="stable")
    omegas, v = omegas[order], v[:, order]
    if tol_omega is None:
        tol_omega = max(tol.TOL_OMEGA_REL * float(np.abs(omegas).max(initial=0.0)), 1e-12)
    classes = []
    current = [0] if omegas.size else []
    for i in range(1, omegas.size):
        if omegas[i] - omegas[i - 1] <= tol_omega:
            current.append(i)
        else:
            classes.append(tuple(current))
            current = [i]
    if current:
        classes.append(tuple(current))
    return SystemEigenbasis(omegas, v, tuple(classes), float(tol_omega))


@dataclass(frozen=True)
class BathCorrelation:
    h_i: np.ndarray
    h_b: np.ndarray
    epsilon: float

    def __post_init__(self):
        h_b = check_hamiltonian(self.h_b)
        h_i = np.asarray(self.h_i, dtype=float)
        if h_i.ndim != 2 or h_i.shape[0] != h_b.shape[0]:
            raise StructuralError(f"H_I must have {h_b.shape[0]} rows (bath dimension), got {h_i.shape}")
        if not self.epsilon > 0:
            raise DomainError("regularisation epsilon must be > 0")
        object.__setattr__(self, "h_b", h_b)
        object.__setattr__(self, "h_i", h_i)

    @property
    def sys_dim(self) -> int:
        return self.h_i.shape[1]

    def resolvent(self, omega: float) -> np.ndarray:
        """``R(w) = (eps + i w - H_B)^{-1} = int_0^inf e^{-(eps + i w) s} e^{H_B s} ds``."""
        n = self.h_b.shape[0]
        a = (self.epsilon + 1j * omega) * np.eye(n) - self.h_b
        return np.linalg.solve(a, np.eye(n))

    def correlation(self, s: float) -> np.ndarray:
        """Undamped kernel ``H_I^T e^{H_B s} H_I``."""
        return self.h_i.T @ expm(self.h_b, s) @ self.h_i


def default_epsilon(h_b, fraction: float = 0.01) -> float:
    """``fraction`` times the single-particle bandwidth of ``h_b``."""
    from .models import spectral_bandwidth

    bw = spectral_bandwidth(h_b)
    if bw <= 0:
        raise DomainError("bath has zero bandwidth; pass epsilon explicitly")
    return fraction * bw


def half_line_fourier(bc: BathCorrelation, omega: float) -> np.ndarray:
    """``G(w) = H_I^T R(w) H_I = int_0^inf e^{-i w s} e^{-eps s} H_I^T e^{H_B s} H_I ds``."""
    n = bc.h_b.shape[0]
    a = (bc.epsilon + 1j * omega) * np.eye(n) - bc.h_b
    if np.linalg.cond(a) > 1e14:
        raise DomainError(f"resolvent is singular at omega={omega}; increase epsilon")
    return bc.h_i.T @ np.linalg.solve(a, bc.h_i.astype(complex))


@dataclass(frozen=True)
class InteractionPictureReport:
    coupling_defect: float
    block_defect: float

    @property
    def max_defect(self) -> float:
        return max(self.coupling_defect, self.block_defect)


def interaction_picture_coupling(h_s, h_b, h_i, t: float) -> np.ndarray:
    """``K(t) = e^{-H_B t} H_I e^{H_S t}``."""
    return expm(h_b, -t) @ np.asarray(h_i, dtype=float) @ expm(h_s, t)


def interaction_picture_check(h_s, h_b, h_i, t: float) -> InteractionPictureReport:
    """Compare the conjugated interaction block with the ``K(t)`` block form.

    ``block_defect`` measures ``e^{-H0 t} V e^{H0 t}`` (with ``H0 = H_S (+) H_B``
    and ``V`` the off-diagonal coupling) against ``[[0, -K^T], [K, 0]]``;
    ``coupling_defect`` checks ``K^T(t)`` against its directly conjugated form.
    """
    h_s = check_hamiltonian(h_s)
    h_b = check_hamiltonian(h_b)
    h_i = np.asarray(h_i, dtype=float)
    ns = h_s.shape[0]
    v = joint_matrix(np.zeros_like(h_s), np.zeros_like(h_b), h_i)
    h0 = scipy.linalg.block_diag(h_s, h_b)
    vint = expm(h0, -t) @ v @ expm(h0, t)
    k = interaction_picture_coupling(h_s, h_b, h_i, t)
    block = joint_matrix(np.zeros_like(h_s), np.zeros_like(h_b), k)
    kt_direct = expm(h_s, -t) @ h_i.T @ expm(h_b, t)
    return InteractionPictureReport(
        coupling_defect=float(np.abs(kt_direct + vint[:ns, ns:]).max(initial=0.0)),
        block_defect=float(np.abs(vint - block).max(initial=0.0)),
    )


@dataclass(frozen=True)
class DerivationReport:
    omegas: np.ndarray
    classes: tuple
    epsilon: float
    secular: str
    class_g_norms: tuple
    imag_residue: float
    commutator_defect: float
    min_dissipation: float
    stationarity_defect: float
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "omegas": [float(w) for w in self.omegas],
            "degeneracy_classes": [list(map(int, c)) for c in self.classes],
            "epsilon": float(self.epsilon),
            "secular": self.secular,
            "class_G_norms": [float(g) for g in self.class_g_norms],
            "imag_residue": float(self.imag_residue),
            "commutator_defect": float(self.commutator_defect),
            "min_dissipation": float(self.min_dissipation),
            "stationarity_defect": float(self.stationarity_defect),
            **self.extras,
        }


def stationarity_defect(gamma_b, h_b) -> float:
    gamma_b = np.asarray(gamma_b, dtype=float)
    h_b = np.asarray(h_b, dtype=float)
    c = gamma_b @ h_b - h_b @ gamma_b
    return float(np.linalg.norm(c, 2))


def _commutator_ratio(x, h_s) -> float:
    nx, nh = np.linalg.norm(x, 2), np.linalg.norm(h_s, 2)
    if nx == 0 or nh == 0:
        return 0.0
    return float(np.linalg.norm(x @ h_s - h_s @ x, 2) / (nx * nh))


def derive_generator(h_s, bc: BathCorrelation, gamma_b, tol_omega: Optional[float] = None,
                     secular: str = "full", tol_stationary: float = 1e-9, tol_real: float = tol.TOL_REAL,
                     full_output: bool = False):
    """Weak-coupling Gaussian channel for the system.

    Parameters
    ----------
    h_s : array
        System Hamiltonian matrix.
    bc : BathCorrelation
        Coupling, bath Hamiltonian and line broadening.
    gamma_b : array
        Bath covariance; must commute with ``bc.h_b``.
    secular : {"full", "relaxed", "none"}
        ``"full"`` keeps only equal-frequency blocks. ``"relaxed"`` only
        separates the zero-frequency (ground) class from the rest and leaves
        the excitation block unprojected. ``"none"`` is the plain
        Born-Markov (Redfield-type) generator; neither of the latter is
        guaranteed to have a positive dissipative part, so the returned
        channel is not validated for it.
    full_output : bool
        Also return a :class:`DerivationReport`.
    """
    if secular not in SECULAR_MODES:
        raise StructuralError(f"secular must be one of {SECULAR_MODES}")
    h_s = check_hamiltonian(h_s)
    if h_s.shape[0] != bc.sys_dim:
        raise StructuralError(f"H_I has {bc.sys_dim} system columns, H_S is {h_s.shape[0]}")
    gamma_b = np.asarray(gamma_b, dtype=float)
    if gamma_b.shape != bc.h_b.shape:
        raise StructuralError("bath covariance does not match the bath Hamiltonian")
    stat = stationarity_defect(gamma_b, bc.h_b)
    scale = max(1.0, float(np.linalg.norm(bc.h_b, 2)))
    if stat > tol_stationary * scale:
        raise NonStationaryBathError(f"[Gamma_B, H_B] has norm {stat:.3g}; bath state is not stationary")

    basis = system_eigenbasis(h_s, tol_omega)
    dim = h_s.shape[0]
    hi = bc.h_i.astype(complex)
    x_diss = np.zeros((dim, dim), dtype=complex)
    f = np.zeros((dim, dim), dtype=complex)
    g_norms = []
    zero = basis.zero_class
    if secular == "relaxed" and zero is None:
        raise EmptyGroundSpaceError("relaxed secular approximation needs a zero-frequency class")
    q_exc = np.eye(dim) - (basis.projector(zero) if zero is not None else 0.0)

    for c in range(len(basis.classes)):
        w = basis.class_frequency(c)
        proj = basis.projector(c)
        r = bc.resolvent(w)
        g = hi.T @ r @ hi
        fb = hi.T @ gamma_b @ r @ hi
        g_norms.append(float(np.linalg.norm(g, 2)))
        if secular == "full":
            left = proj
        elif secular == "relaxed":
            left = proj if c == zero else q_exc
        else:
            left = np.eye(dim)
        x_diss -= left @ g @ proj
        f += left @ fb @ proj

    imag = max(float(np.abs(x_diss.imag).max(initial=0.0)), float(np.abs(f.imag).max(initial=0.0)))
    ref = max(1.0, float(np.abs(x_diss).max(initial=0.0)), float(np.abs(f).max(initial=0.0)))
    if imag > tol_real * ref:
        raise ToleranceError(
            f"derived generator has imaginary residue {imag:.3g}; degeneracy classes are probably misclassified"
        )
    x = h_s + x_diss.real
    fr = f.real
    y = antisymmetrize(fr - fr.T)
    ch = GaussianChannel(x, y, "calibrated", validate=(secular == "full"))
    if not full_output:
        return ch
    report = DerivationReport(
        omegas=basis.omegas,
        classes=basis.classes,
        epsilon=bc.epsilon,
        secular=secular,
        class_g_norms=tuple(g_norms),
        imag_residue=imag,
        commutator_defect=_commutator_ratio(x, h_s),
        min_dissipation=ch.min_dissipation,
        stationarity_defect=stat,
    )
    return ch, report


@dataclass(frozen=True)
class BlockDecomposition:
    """``x = o @ (x_g (+) x_e) @ o.T`` up to the reported ``leakage``."""

    x_g: np.ndarray
    x_e: np.ndarray
    o: np.ndarray
    n_ground: int
    leakage: float
    reconstruction_defect: float


def ground_space_basis(basis: SystemEigenbasis) -> np.ndarray:
    """Real orthonormal basis of the zero-frequency eigenspace."""
    zero = basis.zero_class
    if zero is None:
        raise EmptyGroundSpaceError("H_S has no zero-frequency (ground) degeneracy class")
    v = basis.vectors[:, list(basis.classes[zero])]
    stacked = np.hstack([v.real, v.imag])
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    rank = len(basis.classes[zero])
    return u[:, :rank]


def block_decompose(x, basis: SystemEigenbasis) -> BlockDecomposition:
    """Split ``x`` into the ground block (kernel of ``H_S``) and its complement."""
    x = np.asarray(x, dtype=float)
    g = ground_space_basis(basis)
    full, _ = np.linalg.qr(np.hstack([g, np.eye(x.shape[0])]))
    comp = full[:, g.shape[1]:x.shape[0]]
    o = np.hstack([g, comp])
    xr = o.T @ x @ o
    k = g.shape[1]
    x_g, x_e = xr[:k, :k], xr[k:, k:]
    leak = max(float(np.abs(xr[:k, k:]).max(initial=0.0)), float(np.abs(xr[k:, :k]).max(initial=0.0)))
    recon = o @ scipy.linalg.block_diag(x_g, x_e) @ o.T
    return BlockDecomposition(x_g, x_e, o, k, leak, float(np.abs(recon - x).max(initial=0.0)))


def bath_correlation_function(bc: BathCorrelation, v, s) -> np.ndarray:
    """``f(s) = v^dag H_I^T e^{H_B s} H_I v`` on an array of (possibly negative) times.

    This is a function of positive type for every vector ``v``.
    """
    v = np.asarray(v, dtype=complex)
    u = bc.h_i.astype(complex) @ v
    lam, w = np.linalg.eigh(1j * bc.h_b)  # e^{H_B s} = W e^{-i lam s} W^dag
    coeff = w.conj().T @ u
    weights = np.abs(coeff) ** 2
    s = np.atleast_1d(np.asarray(s, dtype=float))
    return np.exp(-1j * np.outer(s, lam)) @ weights
