import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermidec import exact_oracle as eo
from fermidec.errors import MarginalSteadyStateError, PhysicsContractError, StructuralError
from fermidec.lindblad_channel import (
    DISSIPATION_SCALE,
    INHOMOGENEITY_SCALE,
    GaussianChannel,
    LindbladSpec,
    build_channel,
    build_m,
    lyapunov_residual,
    propagate,
    propagate_many,
    steady_state,
)
from fermidec.majorana_core import (
    STANDARD_BLOCK as A,
    direct_sum,
    operator_norm,
    random_covariance,
    random_skew,
    validate_covariance,
)
from fermidec.models import KitaevParams, kitaev_wire, uniform_loss_spec

seeds = st.integers(0, 2**32 - 1)
LOSS = LindbladSpec(([0.5, -0.5j],))   # L = a
GAIN = LindbladSpec(([0.5, 0.5j],))    # L = a^dag


def random_spec(n, k, rng, scale=0.5):
    ls = scale * (rng.normal(size=(k, 2 * n)) + 1j * rng.normal(size=(k, 2 * n)))
    return LindbladSpec(tuple(ls))


def test_spec_validation():
    with pytest.raises(StructuralError):
        LindbladSpec(())
    with pytest.raises(StructuralError):
        LindbladSpec(([1.0, 0.0, 0.0],))
    with pytest.raises(StructuralError):
        LindbladSpec(([1.0, 0.0], [1.0, 0.0, 0.0, 0.0]))


def test_build_m_examples(rng):
    eta = 0.7
    m = build_m(uniform_loss_spec(1, eta))
    # with c[1] = i(a - a^dag) the imaginary part comes out with the opposite
    # sign to the quoted block; the real part, which sets the rate, agrees
    assert np.allclose(m, eta**2 / 4 * np.array([[1, -1j], [1j, 1]]), atol=1e-15)
    assert np.allclose(m.real, eta**2 / 4 * np.eye(2), atol=1e-15)
    assert not build_m(LindbladSpec(([0.0, 0.0],))).any()
    spec = random_spec(2, 2, rng)
    l1, l2 = spec.ls
    m = build_m(spec)
    assert np.allclose(m, np.outer(l1, l1.conj()) + np.outer(l2, l2.conj()), atol=1e-15)
    assert np.linalg.eigvalsh(m)[0] > -1e-14


def test_calibrated_constants():
    assert (DISSIPATION_SCALE, INHOMOGENEITY_SCALE) == (2.0, 8.0)


def test_calibration_loss_and_gain():
    # the constants are pinned by these two exact oracle runs
    h = np.zeros((2, 2))
    ops = eo.fock_operators(1)
    full = eo.pure_state([0.0, 1.0])   # |1>, occupied
    empty = eo.pure_state([1.0, 0.0])
    for spec, start, target in ((LOSS, full, A), (GAIN, empty, -A)):
        ch = build_channel(h, spec)
        gss = steady_state(ch)
        assert np.abs(gss - target).max() < 1e-14
        g0 = eo.covariance_of(start, ops)
        for t in (0.1, 0.5, 2.0):
            g_or = eo.covariance_of(eo.lindblad_evolve(start, h, spec, t, ops), ops)
            assert np.abs(propagate(ch, g0, t, gss) - g_or).max() < 1e-12
            # relaxation at rate 2
            assert operator_norm(g_or - target) == pytest.approx(2 * np.exp(-2 * t), rel=1e-10)


def test_kitaev_literal_convention(rng):
    eta = 0.6
    h = kitaev_wire(KitaevParams(4, 1.3, 0.7, 0.2))
    ch = build_channel(h, uniform_loss_spec(4, eta), "literal")
    assert np.abs(ch.x - (-h - eta**2 / 2 * np.eye(8))).max() < 1e-15
    ch = build_channel(h, uniform_loss_spec(4, eta))
    assert np.abs(ch.x - (h - eta**2 * np.eye(8))).max() < 1e-15


def test_empty_spec_is_closed(rng):
    h = random_skew(4, rng)
    ch = build_channel(h)
    assert np.array_equal(ch.x, h) and not ch.y.any()
    assert np.array_equal(build_channel(h, convention="literal").x, -h)


def test_dimension_mismatch(rng):
    with pytest.raises(StructuralError):
        build_channel(random_skew(4, rng), LOSS)
    with pytest.raises(StructuralError):
        build_channel(random_skew(2, rng), LOSS, convention="other")


def test_channel_invariants():
    with pytest.raises(StructuralError):
        GaussianChannel(np.zeros((2, 2)), np.eye(2))
    with pytest.raises(PhysicsContractError):
        GaussianChannel(np.eye(2), np.zeros((2, 2)))
    GaussianChannel(np.eye(2), np.zeros((2, 2)), validate=False)


def test_steady_state_trivial():
    ch = GaussianChannel(-0.5 * np.eye(4), direct_sum(A, A))
    assert np.abs(steady_state(ch) - direct_sum(A, A)).max() < 1e-15


def test_steady_state_marginal(rng):
    ch = build_channel(random_skew(4, rng))
    with pytest.raises(MarginalSteadyStateError) as ei:
        steady_state(ch)
    assert ei.value.spectrum is not None and len(ei.value.spectrum) == 4


def test_kitaev_loss_steady_state():
    for eta in (0.2, 0.5, 1.0):
        ch = build_channel(kitaev_wire(KitaevParams(10)), uniform_loss_spec(10, eta))
        gss = steady_state(ch)
        assert lyapunov_residual(ch, gss) < 1e-10
        assert validate_covariance(gss).valid


def test_steady_state_long_time_oracle(rng):
    eta = 0.8
    h = kitaev_wire(KitaevParams(2, 1.0, 0.6, 0.3))
    spec = uniform_loss_spec(2, eta)
    ops = eo.fock_operators(2)
    rho = eo.lindblad_evolve(eo.pure_state(ops.vacuum()), h, spec, 50 / eta**2, ops)
    assert np.abs(steady_state(build_channel(h, spec)) - eo.covariance_of(rho, ops)).max() < 1e-6


def test_propagate_examples(rng):
    ch = build_channel(random_skew(4, rng), random_spec(2, 3, rng))
    g0 = random_covariance(2, rng)
    assert np.abs(propagate(ch, g0, 0.0) - g0).max() < 1e-15
    gss = steady_state(ch)
    for t in (0.5, 3.0, 40.0):
        assert np.abs(propagate(ch, gss, t) - gss).max() < 1e-13
    assert np.abs(propagate(ch, g0, 200.0) - gss).max() < 1e-10


def test_kitaev_literal_envelope(rng):
    eta = 0.5
    ch = build_channel(kitaev_wire(KitaevParams(4)), uniform_loss_spec(4, eta), "literal")
    gss = steady_state(ch)
    g0 = random_covariance(4, rng)
    d0 = operator_norm(g0 - gss)
    for t in (1.0, 4.0, 10.0):
        # e^{Xt} is e^{-eta^2 t/2} times an orthogonal matrix
        assert operator_norm(propagate(ch, g0, t, gss) - gss) == pytest.approx(d0 * np.exp(-eta**2 * t), rel=1e-10)


@given(seeds, st.integers(1, 4), st.floats(0.05, 5.0))
def test_propagate_solves_ode(seed, n, t):
    r = np.random.default_rng(seed)
    ch = build_channel(random_skew(2 * n, r), random_spec(n, 2, r))
    gss = steady_state(ch)
    g0 = random_covariance(n, r)
    dt = 1e-5
    fd = (propagate(ch, g0, t + dt, gss) - propagate(ch, g0, t - dt, gss)) / (2 * dt)
    assert np.abs(fd - ch.rhs(propagate(ch, g0, t, gss))).max() < 1e-6


@given(seeds, st.integers(1, 4))
def test_dissipation_psd_and_physical(seed, n):
    r = np.random.default_rng(seed)
    ch = build_channel(random_skew(2 * n, r), random_spec(n, r.integers(1, 4), r))
    assert ch.min_dissipation >= -1e-10
    gss = steady_state(ch)
    for g in propagate_many(ch, random_covariance(n, r), np.linspace(0, 5, 6), gss):
        assert validate_covariance(g).max_singular_value <= 1 + 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_oracle_equivalence(n, rng):
    h = random_skew(2 * n, rng)
    spec = random_spec(n, 2, rng)
    ops = eo.fock_operators(n)
    rho0 = eo.random_gaussian_pure_state(n, rng, ops)
    ch = build_channel(h, spec)
    gss = steady_state(ch)
    g0 = eo.covariance_of(rho0, ops)
    times = np.sort(rng.uniform(0, 3, size=10))
    for t, rho in zip(times, eo.lindblad_trajectory(rho0, h, spec, times, ops)):
        assert np.abs(eo.covariance_of(rho, ops) - propagate(ch, g0, t, gss)).max() < 1e-8
