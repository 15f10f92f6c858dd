"""Full Fock-space reference implementation for a handful of modes.

Everything here works with dense ``2^n x 2^n`` density matrices and is meant
to certify the covariance-matrix formulas, not to scale. Basis states are
occupation strings ``|n_0 n_1 ... n_{n-1}>`` with mode 0 the most
significant bit; fermionic signs come from a Jordan-Wigner string.

The Hamiltonian part of the master equation is ``-i[H^, rho]`` so that
unitary evolution reproduces ``Gamma(t) = e^{Ht} Gamma(0) e^{H^T t}``.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, StructuralError, ToleranceError
from .lindblad_channel import LindbladSpec
from .majorana_core import check_hamiltonian

MAX_MODES = 6

_I2 = np.eye(2)
_Z = np.diag([1.0, -1.0])
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]])  # a|1> = |0>


@dataclass(frozen=True)
class FockOperatorSet:
    n: int
    a: tuple
    c: tuple

    @property
    def dim(self) -> int:
        return 2**self.n

    @property
    def adag(self) -> tuple:
        return tuple(op.conj().T for op in self.a)

    @property
    def parity(self) -> np.ndarray:
        """``(-1)^N``, diagonal in the occupation basis."""
        occ = np.array([bin(i).count("1") for i in range(self.dim)])
        return np.diag((-1.0) ** occ)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


def fock_operators(n: int, verify: bool = True) -> FockOperatorSet:
    """Jordan-Wigner annihilators and Majorana operators for ``n`` modes."""
    if n < 1 or n > MAX_MODES:
        raise StructuralError(f"oracle supports 1..{MAX_MODES} Dirac modes, got {n}")
    a = []
    for k in range(n):
        a.append(reduce(np.kron, [_Z] * k + [_LOWER] + [_I2] * (n - k - 1)).astype(complex))
    c = []
    for ak in a:
        c.append(ak + ak.conj().T)
        c.append(1j * (ak - ak.conj().T))
    ops = FockOperatorSet(n, tuple(a), tuple(c))
    if verify:
        check_anticommutation(ops)
    return ops


def check_anticommutation(ops: FockOperatorSet, atol: float = 1e-12) -> float:
    eye = np.eye(ops.dim)
    worst = 0.0
    for j, cj in enumerate(ops.c):
        worst = max(worst, np.abs(cj - cj.conj().T).max())
        for k, ck in enumerate(ops.c[j:], start=j):
            target = 2.0 * eye if j == k else 0.0
            worst = max(worst, np.abs(cj @ ck + ck @ cj - target).max())
    if worst > atol:
        raise ToleranceError(f"Majorana operators violate the anticommutation relations by {worst:.3g}")
    return float(worst)


def _ops_for(dim: int, ops: Optional[FockOperatorSet]) -> FockOperatorSet:
    if dim % 2:
        raise StructuralError("odd Majorana dimension")
    if ops is None:
        return fock_operators(dim // 2)
    if len(ops.c) != dim:
        raise StructuralError(f"operator set has {len(ops.c)} Majoranas, need {dim}")
    return ops


def quadratic_operator(h, ops: Optional[FockOperatorSet] = None) -> np.ndarray:
    """``H^ = (i/4) sum_jk H[j, k] c_j c_k``."""
    h = check_hamiltonian(h)
    ops = _ops_for(h.shape[0], ops)
    out = np.zeros((ops.dim, ops.dim), dtype=complex)
    m = h.shape[0]
    for j in range(m):
        for k in range(m):
            if h[j, k] != 0.0:
                out += h[j, k] * (ops.c[j] @ ops.c[k])
    out *= 0.25j
    return 0.5 * (out + out.conj().T)


def linear_operator(coeffs, ops: FockOperatorSet) -> np.ndarray:
    return sum(l * cj for l, cj in zip(coeffs, ops.c))


def covariance_of(rho, ops: Optional[FockOperatorSet] = None, imag_tol: float = 1e-10) -> np.ndarray:
    """``Gamma[j, k] = (i/2) tr[(c_j c_k - c_k c_j) rho]``."""
    rho = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(rho.shape[0])))
    ops = _ops_for(2 * n, ops)
    m = len(ops.c)
    g = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for k in range(j + 1, m):
            comm = ops.c[j] @ ops.c[k] - ops.c[k] @ ops.c[j]
            g[j, k] = 0.5j * np.trace(comm @ rho)
            g[k, j] = -g[j, k]
    resid = float(np.abs(g.imag).max(initial=0.0))
    if resid > imag_tol:
        raise ToleranceError(f"covariance has imaginary residue {resid:.3g}; convention bug")
    return g.real


def first_moments(rho, ops: Optional[FockOperatorSet] = None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(rho.shape[0])))
    ops = _ops_for(2 * n, ops)
    return np.array([np.trace(cj @ rho) for cj in ops.c])


def check_density_matrix(rho, atol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StructuralError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > atol:
        raise StructuralError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise StructuralError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -atol:
        raise StructuralError("density matrix has negative eigenvalues")
    return rho


def pure_state(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def liouvillian(h_op, lindblad_ops: Sequence[np.ndarray] = ()) -> np.ndarray:
    """Superoperator acting on row-major ``rho.reshape(-1)``.

    ``vec(A rho B) = kron(A, B^T) vec(rho)`` in this ordering.
    """
    d = h_op.shape[0]
    eye = np.eye(d)
    out = -1j * (np.kron(h_op, eye) - np.kron(eye, h_op.T))
    for lop in lindblad_ops:
        ldl = lop.conj().T @ lop
        out += 2.0 * np.kron(lop, lop.conj()) - np.kron(ldl, eye) - np.kron(eye, ldl.T)
    return out


def _lindblad_setup(h, spec, ops):
    h = check_hamiltonian(h)
    ops = _ops_for(h.shape[0], ops)
    lops = []
    if spec is not None:
        if spec.dim != h.shape[0]:
            raise StructuralError("Lindblad vectors do not match the Hamiltonian dimension")
        lops = [linear_operator(l, ops) for l in spec.ls]
    return liouvillian(quadratic_operator(h, ops), lops), ops


def lindblad_trajectory(rho0, h, spec: Optional[LindbladSpec], times, ops=None) -> np.ndarray:
    """Exact ``rho(t)`` at each time by exponentiating the Liouvillian."""
    lv, ops = _lindblad_setup(h, spec, ops)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (ops.dim, ops.dim):
        raise StructuralError(f"rho0 has shape {rho0.shape}, expected {(ops.dim, ops.dim)}")
    v0 = rho0.reshape(-1)
    out = []
    for t in times:
        rho = (scipy.linalg.expm(lv * t) @ v0).reshape(ops.dim, ops.dim)
        out.append(0.5 * (rho + rho.conj().T))
    return np.array(out)


def lindblad_evolve(rho0, h, spec: Optional[LindbladSpec], t: float, ops=None) -> np.ndarray:
    return lindblad_trajectory(rho0, h, spec, [t], ops)[0]


def gibbs_state(h, beta: float, ops: Optional[FockOperatorSet] = None) -> np.ndarray:
    """``exp(-beta H^)/Z``; ``beta = inf`` gives the uniform mixture over the ground space."""
    if beta < 0 or np.isnan(beta):
        raise DomainError(f"inverse temperature must be >= 0, got {beta}")
    hop = quadratic_operator(h, ops)
    w, v = np.linalg.eigh(hop)
    w = w - w[0]
    if np.isinf(beta):
        scale = max(1.0, float(np.abs(w).max()))
        p = (w <= 1e-9 * scale).astype(float)
    else:
        p = np.exp(-beta * w)
    p /= p.sum()
    return (v * p) @ v.conj().T


def trace_norm(a) -> float:
    return float(np.linalg.svd(np.asarray(a), compute_uv=False).sum())


def trace_distance(rho, rho_tilde) -> float:
    """``||rho - rho~||_tr`` (sum of singular values; 2 for orthogonal pure states)."""
    rho = np.asarray(rho)
    rho_tilde = np.asarray(rho_tilde)
    if rho.shape != rho_tilde.shape:
        raise StructuralError("states differ in dimension")
    return trace_norm(rho - rho_tilde)


def success_probability(observable, rho, rho_tilde) -> float:
    """``(1 + tr[M (rho - rho~)]) / 2`` for a +-1 valued observable ``M``."""
    return float(0.5 * (1.0 + np.trace(observable @ (rho - rho_tilde)).real))


def partial_trace_tail(rho, n_keep: int) -> np.ndarray:
    """Trace out every mode after the first ``n_keep``.

    For parity-even states this equals the fermionic partial trace, so the
    result's covariance is the leading ``2 n_keep`` block of the input's.
    """
    rho = np.asarray(rho)
    n = int(round(np.log2(rho.shape[0])))
    dk, dt = 2**n_keep, 2 ** (n - n_keep)
    return np.einsum("iaja->ij", rho.reshape(dk, dt, dk, dt))


@dataclass(frozen=True)
class TensorNormReport:
    product_lhs: float
    product_rhs: float
    sum_lhs: float
    sum_rhs: float

    @property
    def product_defect(self) -> float:
        return abs(self.product_lhs - self.product_rhs)

    @property
    def sum_defect(self) -> float:
        return abs(self.sum_lhs - self.sum_rhs)


def tensor_norm_identities_check(a, b) -> TensorNormReport:
    """Compare ``||A (x) B||_tr`` with the product and ``||A (+) B||_tr`` with the sum."""
    a = np.asarray(a)
    b = np.asarray(b)
    return TensorNormReport(
        product_lhs=trace_norm(np.kron(a, b)),
        product_rhs=trace_norm(a) * trace_norm(b),
        sum_lhs=trace_norm(scipy.linalg.block_diag(a, b)),
        sum_rhs=trace_norm(a) + trace_norm(b),
    )


def encoded_qubit_states(ops: Optional[FockOperatorSet] = None) -> dict:
    """Even-parity logical states of one qubit stored in 4 Majorana modes.

    Returns state vectors ``'0'`` (both modes empty), ``'1'`` (both filled)
    and ``'+'`` (their equal superposition).
    """
    ops = ops or fock_operators(2)
    if ops.n != 2:
        raise StructuralError("the encoded qubit uses exactly two Dirac modes")
    vac = ops.vacuum()
    one = ops.adag[0] @ ops.adag[1] @ vac
    plus = (vac + one) / np.sqrt(2.0)
    return {"0": vac, "1": one, "+": plus}


def random_gaussian_pure_state(n: int, rng=None, ops: Optional[FockOperatorSet] = None) -> np.ndarray:
    """Density matrix of ``exp(-i H^) |vac>`` for a random quadratic ``H^``."""
    rng = np.random.default_rng(rng)
    ops = ops or fock_operators(n)
    a = rng.normal(size=(2 * n, 2 * n))
    hop = quadratic_operator(a - a.T, ops)
    psi = scipy.linalg.expm(-1j * hop) @ ops.vacuum()
    return pure_state(psi)


def _content_hash(*arrays, extra=None) -> str:
    h = hashlib.sha256()
    for arr in arrays:
        arr = np.ascontiguousarray(arr)
        h.update(str(arr.shape).encode())
        h.update(arr.tobytes())
    if extra is not None:
        h.update(json.dumps(extra, sort_keys=True).encode())
    return h.hexdigest()[:16]


def cached_covariance_trajectory(rho0, h, spec: Optional[LindbladSpec], times, cache_dir=None) -> np.ndarray:
    """Oracle covariances along ``times``, cached as CSV keyed by an input hash.

    ``cache_dir`` defaults to ``$FERMIDEC_CACHE`` or ``.fermidec_cache``.
    Rows are ``t, Gamma.ravel()``.
    """
    cache_dir = Path(cache_dir or os.environ.get("FERMIDEC_CACHE", ".fermidec_cache"))
    times = np.asarray(times, dtype=float)
    ls = np.array(spec.ls) if spec is not None else np.zeros(0)
    key = _content_hash(np.asarray(rho0, dtype=complex), np.asarray(h, dtype=float), ls, times)
    path = cache_dir / f"oracle_{key}.csv"
    m = np.asarray(h).shape[0]
    if path.exists():
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        return data[:, 1:].reshape(len(times), m, m)
    rhos = lindblad_trajectory(rho0, h, spec, times)
    covs = np.array([covariance_of(r) for r in rhos])
    cache_dir.mkdir(parents=True, exist_ok=True)
    rows = np.column_stack([times, covs.reshape(len(times), -1)])
    np.savetxt(path, rows, delimiter=",", fmt="%.17g", header=f"oracle cache {key}")
    return covs
