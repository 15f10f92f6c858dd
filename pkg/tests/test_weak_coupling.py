import numpy as np
import pytest
import scipy.integrate
from hypothesis import given, strategies as st

from fermidec.errors import DomainError, EmptyGroundSpaceError, NonStationaryBathError, StructuralError
from fermidec.majorana_core import STANDARD_BLOCK as A, direct_sum, random_covariance, random_skew, thermal_covariance
from fermidec.models import BathParams, KitaevParams, bath_lattice, endpoint_coupling, kitaev_wire
from fermidec.weak_coupling import (
    BathCorrelation,
    block_decompose,
    default_epsilon,
    derive_generator,
    ground_space_basis,
    half_line_fourier,
    interaction_picture_check,
    interaction_picture_coupling,
    system_eigenbasis,
)

seeds = st.integers(0, 2**32 - 1)


def _commutator_ratio(x, h):
    return np.linalg.norm(x @ h - h @ x, 2) / (np.linalg.norm(x, 2) * np.linalg.norm(h, 2))


def test_eigenbasis_invariants(rng):
    h = random_skew(8, rng)
    b = system_eigenbasis(h)
    v = b.vectors
    assert np.abs(h @ v - v * (1j * b.omegas)).max() < 1e-10
    assert np.abs(v.conj().T @ v - np.eye(8)).max() < 1e-12
    assert np.allclose(np.sort(b.omegas), np.sort(-b.omegas), atol=1e-12)
    assert sorted(i for c in b.classes for i in c) == list(range(8))


def test_eigenbasis_degeneracy_classes():
    h = direct_sum(direct_sum(2 * A, 2 * A), np.zeros((2, 2)))
    b = system_eigenbasis(h)
    sizes = sorted(len(c) for c in b.classes)
    assert sizes == [2, 2, 2]
    assert b.zero_class is not None and b.gap == pytest.approx(2.0)


def test_interaction_picture_examples(rng):
    hs, hb, hi = random_skew(4, rng), random_skew(6, rng), rng.normal(size=(6, 4))
    assert np.array_equal(interaction_picture_coupling(hs, hb, hi, 0.0), hi)
    z4, z6 = np.zeros((4, 4)), np.zeros((6, 6))
    for t in (0.5, 3.0):
        assert np.array_equal(interaction_picture_coupling(z4, z6, hi, t), hi)
    for t in (0.3, 1.7, 4.0):
        assert interaction_picture_check(hs, hb, hi, t).max_defect < 1e-11


def test_half_line_trivial(rng):
    hi = rng.normal(size=(4, 2))
    bc = BathCorrelation(hi, np.zeros((4, 4)), 1.0)
    assert np.abs(half_line_fourier(bc, 0.0) - hi.T @ hi).max() < 1e-14


def test_half_line_single_mode_resonance():
    eb = 1.5
    hi = np.array([[1.0, 0.0], [0.0, 0.0]])
    w = np.linspace(-3, 3, 6001)
    widths = []
    for eps in (0.02, 0.04):
        bc = BathCorrelation(hi, eb * A, eps)
        # spectral weight: Hermitian part of G
        s = np.array([np.linalg.eigvalsh(g + g.conj().T)[-1] for g in (half_line_fourier(bc, x) for x in w)])
        peaks = w[np.argsort(s)[-2:]]
        assert np.allclose(np.sort(np.abs(peaks)), [eb, eb], atol=2e-3)
        pos = w > 0
        half = s[pos] >= s[pos].max() / 2
        widths.append(np.ptp(w[pos][half]))
    assert widths[1] / widths[0] == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("omega", [0.0, 0.7, -1.3])
def test_half_line_vs_quadrature(omega, rng):
    hb = random_skew(6, rng)
    hi = rng.normal(size=(6, 2))
    eps = 0.5
    bc = BathCorrelation(hi, hb, eps)
    lam, w = np.linalg.eigh(1j * hb)

    def integrand(s):
        eh = (w * np.exp(-1j * lam * s)) @ w.conj().T
        return (np.exp(-(eps + 1j * omega) * s) * (hi.T @ eh @ hi)).ravel()

    val, _ = scipy.integrate.quad_vec(integrand, 0.0, 40 / eps, epsabs=1e-11, epsrel=1e-11, limit=2000)
    assert np.abs(val.reshape(2, 2) - half_line_fourier(bc, omega)).max() < 1e-6


@given(seeds, st.floats(-3, 3))
def test_half_line_conjugation(seed, omega):
    r = np.random.default_rng(seed)
    bc = BathCorrelation(r.normal(size=(6, 4)), random_skew(6, r), 0.3)
    g, gm = half_line_fourier(bc, omega), half_line_fourier(bc, -omega)
    # real Majorana-basis kernel: G(w)^* = G(-w), f(-s) = f(s)^T
    assert np.abs(g.conj() - gm).max() < 1e-10
    assert np.abs(bc.correlation(-0.8) - bc.correlation(0.8).T).max() < 1e-12
    # the full-line transform G + G^dag is PSD
    assert np.linalg.eigvalsh(g + g.conj().T)[0] > -1e-10


def test_half_line_singular():
    bc = BathCorrelation(np.eye(2), A, 1e-17)
    with pytest.raises(DomainError):
        half_line_fourier(bc, 1.0)


def test_bath_correlation_validation():
    with pytest.raises(DomainError):
        BathCorrelation(np.eye(2), A, 0.0)
    with pytest.raises(StructuralError):
        BathCorrelation(np.eye(4)[:, :2], A, 0.1)


def test_default_epsilon():
    hb = bath_lattice(BathParams(40))
    assert default_epsilon(hb) == pytest.approx(0.01 * (np.ptp(np.linalg.eigvalsh(1j * hb)[40:])), rel=1e-10)


def _setup(rng, n_s=3, n_b=30, g=0.2):
    hs = kitaev_wire(KitaevParams(n_s))
    hb = bath_lattice(BathParams(n_b))
    hi = endpoint_coupling(2 * n_s, 2 * n_b, g)
    return hs, hb, BathCorrelation(hi, hb, 0.1)


def test_zero_coupling():
    hs = kitaev_wire(KitaevParams(3, mu=0.3))
    hb = bath_lattice(BathParams(10))
    bc = BathCorrelation(np.zeros((20, 6)), hb, 0.1)
    ch = derive_generator(hs, bc, thermal_covariance(hb, 1.0))
    assert np.array_equal(ch.x, hs) and not ch.y.any()


def _generic_setup(rng, n_s=3, n_b=30, g=0.2):
    # couples several system Majoranas so that Y is nonzero and leakage is possible
    hs = kitaev_wire(KitaevParams(n_s))
    hb = bath_lattice(BathParams(n_b))
    return hs, hb, BathCorrelation(g * rng.normal(size=(2 * n_b, 2 * n_s)), hb, 0.1)


def test_x_temperature_independent(rng):
    hs, hb, bc = _generic_setup(rng)
    a = derive_generator(hs, bc, thermal_covariance(hb, 0.1))
    b = derive_generator(hs, bc, thermal_covariance(hb, 10.0))
    assert np.abs(a.x - b.x).max() <= 1e-12
    assert np.abs(a.y - b.y).max() > 1e-6


def test_secular_contract_and_positivity(rng):
    hs, hb, bc = _setup(rng)
    ch, rep = derive_generator(hs, bc, thermal_covariance(hb, 1.0), full_output=True)
    assert _commutator_ratio(ch.x, hs) < 1e-8
    assert rep.commutator_defect < 1e-8
    assert ch.min_dissipation >= -1e-9
    d = rep.to_dict()
    for key in ("omegas", "degeneracy_classes", "epsilon", "class_G_norms"):
        assert key in d


@given(seeds, st.floats(0.0, 20.0))
def test_random_derivation_positive(seed, beta):
    r = np.random.default_rng(seed)
    hs, hb = random_skew(4, r), random_skew(10, r)
    bc = BathCorrelation(0.3 * r.normal(size=(10, 4)), hb, 0.2)
    ch = derive_generator(hs, bc, thermal_covariance(hb, beta))
    assert ch.min_dissipation >= -1e-9
    assert _commutator_ratio(ch.x, hs) < 1e-8


def test_nonstationary_bath(rng):
    hs, hb, bc = _setup(rng)
    with pytest.raises(NonStationaryBathError):
        derive_generator(hs, bc, random_covariance(30, rng))


def test_secular_modes(rng):
    hs, hb, bc = _generic_setup(rng)
    gb = thermal_covariance(hb, 1.0)
    basis = system_eigenbasis(hs)
    relaxed = derive_generator(hs, bc, gb, secular="relaxed")
    none = derive_generator(hs, bc, gb, secular="none")
    assert block_decompose(relaxed.x, basis).leakage < 1e-12
    assert block_decompose(none.x, basis).leakage > 1e-6
    with pytest.raises(StructuralError):
        derive_generator(hs, bc, gb, secular="bogus")


def test_ground_space_kitaev():
    n = 4
    hs = kitaev_wire(KitaevParams(n))
    g = ground_space_basis(system_eigenbasis(hs))
    assert g.shape == (2 * n, 2)
    # spans the two edge Majoranas c[0], c[2n-1]
    proj = g @ g.T
    target = np.zeros((2 * n, 2 * n))
    target[0, 0] = target[-1, -1] = 1.0
    assert np.abs(proj - target).max() < 1e-10


def test_block_decompose(rng):
    hs = kitaev_wire(KitaevParams(3))
    basis = system_eigenbasis(hs)
    x = hs - 0.1 * np.eye(6)
    bd = block_decompose(x, basis)
    assert bd.leakage < 1e-14 and bd.reconstruction_defect < 1e-10
    assert bd.n_ground == 2 and np.abs(bd.x_g + 0.1 * np.eye(2)).max() < 1e-14
    assert np.abs(bd.o.T @ bd.o - np.eye(6)).max() < 1e-12


def test_block_decompose_no_ground(rng):
    hs = kitaev_wire(KitaevParams(3, mu=2.5))
    with pytest.raises(EmptyGroundSpaceError):
        block_decompose(hs, system_eigenbasis(hs))
