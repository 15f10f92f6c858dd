"""Majorana covariance matrices, quadratic Hamiltonians and their normal form.

Conventions used throughout the package (0-based indices):

* Dirac mode ``k`` owns Majorana operators ``c[2k] = a_k + a_k^dag`` and
  ``c[2k+1] = i (a_k - a_k^dag)``, so ``{c_j, c_k} = 2 delta_jk`` and
  ``c_j^2 = 1``.
* ``Gamma[j, k] = (i/2) tr[(c_j c_k - c_k c_j) rho]``; the empty (vacuum) mode
  has the block ``STANDARD_BLOCK = [[0, 1], [-1, 0]]``.
* A real skew-symmetric ``H`` stands for ``(i/4) sum_jk H[j, k] c_j c_k`` and
  generates ``Gamma(t) = e^{Ht} Gamma(0) e^{H^T t}``.

Covariance matrices and Hamiltonians are plain ``numpy`` arrays; the
functions below validate and transform them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import block_diag, schur

from . import tolerances as tol
from .errors import DomainError, StructuralError

STANDARD_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class ModeLayout:
    """Bookkeeping between Dirac modes and Majorana indices."""

    n_dirac: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.n_dirac < 0:
            raise StructuralError("n_dirac must be non-negative")
        if self.labels is not None and len(self.labels) != self.n_dirac:
            raise StructuralError("need one label per Dirac mode")

    @property
    def majorana_count(self) -> int:
        return 2 * self.n_dirac

    def majoranas_of(self, mode: int) -> tuple[int, int]:
        if not 0 <= mode < self.n_dirac:
            raise StructuralError(f"mode {mode} out of range for {self.n_dirac} modes")
        return 2 * mode, 2 * mode + 1

    def mode_of(self, majorana: int) -> int:
        if not 0 <= majorana < self.majorana_count:
            raise StructuralError(f"Majorana index {majorana} out of range")
        return majorana // 2


@dataclass(frozen=True)
class ValidationReport:
    skew_defect: float
    singular_excess: float
    purity_defect: float
    max_singular_value: float
    valid: bool
    pure: bool


def _square_even(m, name="matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"{name} must be square, got shape {m.shape}")
    if m.shape[0] % 2:
        raise StructuralError(f"{name} must have even dimension, got {m.shape[0]}")
    if np.iscomplexobj(m):
        if np.abs(m.imag).max(initial=0.0) > 0:
            raise StructuralError(f"{name} must be real")
        m = m.real
    if not np.all(np.isfinite(m)):
        raise StructuralError(f"{name} has non-finite entries")
    return m.astype(float, copy=False)


def skew_defect(m) -> float:
    m = np.asarray(m)
    return float(np.abs(m + m.T).max(initial=0.0))


def validate_covariance(gamma, tol_skew: float = tol.TOL_SKEW, tol_state: float = tol.TOL_STATE,
                        tol_pure: float = tol.TOL_PURE) -> ValidationReport:
    """Check skew-symmetry, physicality (singular values <= 1) and purity.

    Raises ``StructuralError`` for non-square or odd-dimensional input; a
    well-formed but unphysical matrix is reported with ``valid=False``.
    """
    g = _square_even(gamma, "covariance matrix")
    s = np.linalg.svd(g, compute_uv=False) if g.size else np.zeros(0)
    smax = float(s.max(initial=0.0))
    sd = skew_defect(g)
    purity = float(np.abs(g @ g.T - np.eye(g.shape[0])).max(initial=0.0))
    valid = sd <= tol_skew and smax <= 1.0 + tol_state
    return ValidationReport(
        skew_defect=sd,
        singular_excess=max(0.0, smax - 1.0),
        purity_defect=purity,
        max_singular_value=smax,
        valid=valid,
        pure=valid and purity <= tol_pure,
    )


def check_covariance(gamma, **kwargs) -> np.ndarray:
    """Return ``gamma`` as a float array, raising if it is not a valid covariance."""
    rep = validate_covariance(gamma, **kwargs)
    if not rep.valid:
        raise StructuralError(
            f"not a physical covariance matrix (skew defect {rep.skew_defect:.3g}, "
            f"max singular value {rep.max_singular_value:.6g})"
        )
    return np.asarray(gamma, dtype=float)


def check_hamiltonian(h, tol_skew: float = tol.TOL_SKEW) -> np.ndarray:
    h = _square_even(h, "Hamiltonian")
    scale = max(1.0, float(np.abs(h).max(initial=0.0)))
    if skew_defect(h) > tol_skew * scale:
        raise StructuralError(f"Hamiltonian is not skew-symmetric (defect {skew_defect(h):.3g})")
    return h


def antisymmetrize(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    return 0.5 * (m - m.T)


def direct_sum(a, b) -> np.ndarray:
    """Block-diagonal joint matrix ``a (+) b`` with zero correlation block."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    for m in (a, b):
        if m.size:
            _square_even(m)
    return block_diag(a, b)


def joint_matrix(system, bath, coupling=None) -> np.ndarray:
    """Assemble ``[[S, -C^T], [C, B]]``.

    ``coupling`` is the bath-rows by system-columns block (``Gamma_C`` for a
    state, ``H_I`` for a Hamiltonian); ``None`` means uncorrelated.
    """
    s = np.asarray(system, dtype=float)
    b = np.asarray(bath, dtype=float)
    c = np.zeros((b.shape[0], s.shape[0])) if coupling is None else np.asarray(coupling, dtype=float)
    if c.shape != (b.shape[0], s.shape[0]):
        raise StructuralError(
            f"coupling block must have shape {(b.shape[0], s.shape[0])}, got {c.shape}"
        )
    return np.block([[s, -c.T], [c, b]])


@dataclass(frozen=True)
class PartitionedSystem:
    """A joint system+bath matrix together with the index split."""

    joint: np.ndarray
    sys_indices: tuple
    bath_indices: tuple

    def __post_init__(self):
        joint = np.asarray(self.joint, dtype=float)
        dim = joint.shape[0]
        if joint.ndim != 2 or joint.shape[1] != dim:
            raise StructuralError("joint matrix must be square")
        sys_idx = tuple(int(i) for i in self.sys_indices)
        bath_idx = tuple(int(i) for i in self.bath_indices)
        allidx = sys_idx + bath_idx
        if any(i < 0 or i >= dim for i in allidx):
            raise StructuralError("partition index out of range")
        if len(set(allidx)) != len(allidx) or len(allidx) != dim:
            raise StructuralError("system and bath indices must be disjoint and cover every row")
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "sys_indices", sys_idx)
        object.__setattr__(self, "bath_indices", bath_idx)

    @classmethod
    def contiguous(cls, joint, n_sys: int) -> "PartitionedSystem":
        """System on the first ``n_sys`` Majorana indices, bath on the rest."""
        dim = np.asarray(joint).shape[0]
        return cls(joint, tuple(range(n_sys)), tuple(range(n_sys, dim)))

    @property
    def system(self) -> np.ndarray:
        return self.joint[np.ix_(self.sys_indices, self.sys_indices)]

    @property
    def bath(self) -> np.ndarray:
        return self.joint[np.ix_(self.bath_indices, self.bath_indices)]

    @property
    def correlation(self) -> np.ndarray:
        return self.joint[np.ix_(self.bath_indices, self.sys_indices)]

    def with_joint(self, joint) -> "PartitionedSystem":
        return PartitionedSystem(joint, self.sys_indices, self.bath_indices)


def reduce_to_system(p: PartitionedSystem) -> np.ndarray:
    """Covariance reduction ``{Gamma}_B``: the system sub-block."""
    return p.system.copy()


@dataclass(frozen=True)
class NormalForm:
    """``m = o @ blocks(epsilons) @ o.T`` with 2x2 blocks ``eps_j * STANDARD_BLOCK``.

    ``epsilons`` are sorted in descending order; ``kernel`` lists the block
    indices whose coefficient is numerically zero (always the trailing ones).
    """

    o: np.ndarray
    epsilons: np.ndarray
    kernel: tuple = field(default=())

    def blocks(self, coefficients=None) -> np.ndarray:
        coeffs = self.epsilons if coefficients is None else np.asarray(coefficients, dtype=float)
        return block_diag(*[c * STANDARD_BLOCK for c in coeffs]) if len(coeffs) else np.zeros((0, 0))

    def reconstruct(self, coefficients=None) -> np.ndarray:
        return self.o @ self.blocks(coefficients) @ self.o.T

    @property
    def kernel_majoranas(self) -> tuple:
        return tuple(i for j in self.kernel for i in (2 * j, 2 * j + 1))


def skew_normal_form(m, tol_skew: float = tol.TOL_SKEW, tol_zero: Optional[float] = None) -> NormalForm:
    """Orthogonal reduction of a real skew-symmetric matrix to 2x2 canonical blocks.

    Uses the real Schur decomposition; each 2x2 diagonal block is rotated to
    ``eps * [[0, 1], [-1, 0]]`` with ``eps >= 0`` and 1x1 zero blocks are
    paired up. Blocks are ordered by descending ``eps`` (ties keep Schur
    order). ``tol_zero`` defaults to ``1e-10 * ||m||``.
    """
    m = check_hamiltonian(m, tol_skew)
    dim = m.shape[0]
    if dim == 0:
        return NormalForm(np.zeros((0, 0)), np.zeros(0), ())
    norm = float(np.linalg.norm(m, 2))
    if tol_zero is None:
        tol_zero = tol.TOL_ZERO_REL * norm

    t, z = schur(m, output="real")
    pairs = []
    singles = []
    i = 0
    while i < dim:
        if i + 1 < dim and t[i + 1, i] != 0.0:
            pairs.append((z[:, i], z[:, i + 1]))
            i += 2
        else:
            singles.append(z[:, i])
            i += 1
    if len(singles) % 2:
        raise StructuralError("odd number of real Schur 1x1 blocks; input is not skew-symmetric")
    pairs += [(singles[k], singles[k + 1]) for k in range(0, len(singles), 2)]

    cols = []
    eps = []
    for u, v in pairs:
        e = float(u @ m @ v)
        if e < 0:
            u, v, e = v, u, -e
        cols += [u, v]
        eps.append(e)
    eps = np.array(eps)
    o = np.column_stack(cols)
    # stable sort keeps Schur order among ties
    order = np.argsort(-eps, kind="stable")
    perm = np.ravel([[2 * j, 2 * j + 1] for j in order])
    o = o[:, perm]
    eps = eps[order]
    kernel = tuple(int(j) for j in np.nonzero(eps <= tol_zero)[0])
    return NormalForm(o, eps, kernel)


def thermal_covariance(h, beta: float, tol_zero: Optional[float] = None) -> np.ndarray:
    """Covariance matrix of the Gibbs state ``exp(-beta H^)/Z``.

    Each normal-form block ``eps * A`` of ``h`` maps to ``-tanh(beta*eps/2) * A``
    (the occupied level is the lower one under the Hamiltonian convention in
    the module docstring). ``beta = 0`` gives the zero matrix and
    ``beta = inf`` the ground state, maximally mixed over exact zero modes.
    The result commutes with ``h``.
    """
    if beta is None or np.isnan(beta) or beta < 0:
        raise DomainError(f"inverse temperature must be >= 0, got {beta}")
    nf = skew_normal_form(h, tol_zero=tol_zero)
    if np.isinf(beta):
        coeffs = -np.ones_like(nf.epsilons)
        coeffs[list(nf.kernel)] = 0.0
    else:
        coeffs = -np.tanh(0.5 * beta * nf.epsilons)
    return antisymmetrize(nf.reconstruct(coeffs))


def random_skew(dim: int, rng=None, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(rng)
    a = rng.normal(scale=scale, size=(dim, dim))
    return a - a.T


def random_pure_covariance(n_modes: int, rng=None) -> np.ndarray:
    """Covariance of a random pure Gaussian state: ``O (+)A O^T`` with Haar-ish ``O``."""
    rng = np.random.default_rng(rng)
    q, r = np.linalg.qr(rng.normal(size=(2 * n_modes, 2 * n_modes)))
    q = q * np.sign(np.diag(r))
    g = q @ block_diag(*[STANDARD_BLOCK] * n_modes) @ q.T
    return antisymmetrize(g)


def random_covariance(n_modes: int, rng=None) -> np.ndarray:
    """Random mixed Gaussian covariance with block coefficients uniform in [-1, 1]."""
    rng = np.random.default_rng(rng)
    q, r = np.linalg.qr(rng.normal(size=(2 * n_modes, 2 * n_modes)))
    q = q * np.sign(np.diag(r))
    lam = rng.uniform(-1, 1, size=n_modes)
    g = q @ block_diag(*[l * STANDARD_BLOCK for l in lam]) @ q.T
    return antisymmetrize(g)


def operator_norm(m) -> float:
    """Largest singular value (exact SVD)."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def as_index_tuple(idx: Sequence[int]) -> tuple:
    return tuple(int(i) for i in idx)
