"""Concrete Hamiltonians, couplings and Lindblad specs.

The Kitaev wire and the bath lattice use the Fock-space form

    H^ = sum_j -mu (n_j - 1/2) + sum_<jk> [-t (a_j^dag a_k + h.c.) + Delta (a_j a_k + h.c.)]

translated to Majorana matrices. A bond ``(j, k)`` contributes
``H[2j, 2k+1] = t - Delta`` and ``H[2j+1, 2k] = -(t + Delta)``; the on-site
term gives ``H[2j, 2j+1] = mu``. At ``mu = 0, t = Delta`` the outermost
Majoranas ``c[0]`` and ``c[2n-1]`` drop out of the Hamiltonian entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, EmptyGroundSpaceError, StructuralError
from .lindblad_channel import LindbladSpec
from .majorana_core import skew_normal_form


@dataclass(frozen=True)
class KitaevParams:
    n_sites: int
    t_hop: float = 1.0
    delta_sc: float = 1.0
    mu: float = 0.0

    def __post_init__(self):
        if self.n_sites < 2:
            raise StructuralError("a Kitaev wire needs at least 2 sites")


@dataclass(frozen=True)
class BathParams:
    lx: int
    ly: int = 1
    hopping: float = 1.0
    boundary: str = "open"

    def __post_init__(self):
        if self.lx < 1 or self.ly < 1:
            raise StructuralError("lattice extents must be >= 1")
        if self.boundary not in ("open", "periodic"):
            raise StructuralError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    @property
    def n_sites(self) -> int:
        return self.lx * self.ly


def _add_bond(h, j, k, t_hop, delta):
    h[2 * j, 2 * k + 1] += t_hop - delta
    h[2 * j + 1, 2 * k] += -(t_hop + delta)


def _finish(h):
    return h - h.T


def kitaev_wire(p: KitaevParams) -> np.ndarray:
    n = p.n_sites
    h = np.zeros((2 * n, 2 * n))
    for j in range(n):
        h[2 * j, 2 * j + 1] += p.mu
    for j in range(n - 1):
        _add_bond(h, j, j + 1, p.t_hop, p.delta_sc)
    return _finish(h)


def _lattice_bonds(p: BathParams):
    def site(x, y):
        return y * p.lx + x

    bonds = set()
    for y in range(p.ly):
        for x in range(p.lx):
            for dx, dy in ((1, 0), (0, 1)):
                nx, ny = x + dx, y + dy
                if p.boundary == "periodic":
                    nx, ny = nx % p.lx, ny % p.ly
                elif nx >= p.lx or ny >= p.ly:
                    continue
                a, b = site(x, y), site(nx, ny)
                if a != b:
                    bonds.add((min(a, b), max(a, b)))
    return sorted(bonds)


def bath_lattice(p: BathParams) -> np.ndarray:
    """Nearest-neighbour hopping ``-J (a_j^dag a_k + h.c.)`` on an ``lx x ly`` lattice.

    Periodic boundaries on an extent of 2 would double-count the bond; bonds
    are deduplicated so each neighbouring pair is coupled once.
    """
    n = p.n_sites
    h = np.zeros((2 * n, 2 * n))
    for j, k in _lattice_bonds(p):
        _add_bond(h, j, k, p.hopping, 0.0)
    return _finish(h)


def single_particle_energies(h) -> np.ndarray:
    """Normal-form coefficients ``eps_j >= 0`` in descending order."""
    return skew_normal_form(h).epsilons


def spectral_bandwidth(h) -> float:
    """Width ``max eps_j - min eps_j`` of the single-particle excitation band."""
    eps = single_particle_energies(h)
    return float(eps.max() - eps.min()) if eps.size else 0.0


def ground_state_pair(h) -> tuple:
    """Two ground states of ``h`` differing only in the parity of the first zero mode.

    Every excitation block is empty (coefficient ``-1``); the first kernel
    block gets ``-1`` in one state and ``+1`` in the other, remaining kernel
    blocks ``-1``. The states are Gaussian, pure and orthogonal.
    """
    nf = skew_normal_form(h)
    if not nf.kernel:
        raise EmptyGroundSpaceError("Hamiltonian has no zero modes")
    c0 = -np.ones_like(nf.epsilons)
    c1 = c0.copy()
    c1[nf.kernel[0]] = 1.0
    return nf.reconstruct(c0), nf.reconstruct(c1)


def endpoint_coupling(sys_dim: int, bath_dim: int, strength: float, bath_site: int = 0,
                      sys_majorana: int = 0) -> np.ndarray:
    """Coupling block ``H_I`` (bath rows x system columns) for ``H_int = A_bath c_1``.

    The single nonzero entry ``strength`` sits at ``(bath_site, sys_majorana)``;
    both are Majorana indices.
    """
    if not 0 <= bath_site < bath_dim or not 0 <= sys_majorana < sys_dim:
        raise StructuralError("coupling index out of range")
    hi = np.zeros((bath_dim, sys_dim))
    hi[bath_site, sys_majorana] = strength
    return hi


def uniform_loss_spec(n_modes: int, eta: float) -> LindbladSpec:
    """``L_mu = eta a_mu^dag = (eta/2)(c_{2mu} + i c_{2mu+1})`` on every mode."""
    if eta < 0:
        raise DomainError("eta must be non-negative")
    ls = []
    for mu in range(n_modes):
        v = np.zeros(2 * n_modes, dtype=complex)
        v[2 * mu] = eta / 2
        v[2 * mu + 1] = 1j * eta / 2
        ls.append(v)
    return LindbladSpec(tuple(ls))


@dataclass(frozen=True)
class ModelEntry:
    kind: str
    params_type: type
    build: Callable


MODEL_REGISTRY = {
    "kitaev": ModelEntry("hamiltonian", KitaevParams, kitaev_wire),
    "bath2d": ModelEntry("hamiltonian", BathParams, bath_lattice),
    "endpoint": ModelEntry("coupling", dict, endpoint_coupling),
    "uniform_loss": ModelEntry("lindblad", dict, uniform_loss_spec),
}
