import numpy as np
import pytest
from hypothesis import given, strategies as st

from fermidec import exact_oracle as eo
from fermidec.errors import DomainError
from fermidec.lindblad_channel import LindbladSpec, build_channel
from fermidec.markov_db import (
    balance_ratio,
    build_p_eta,
    channel_to_affine,
    continuous_transition,
    converge,
    eta_max,
    gaussian_to_transition,
    predicted_distance,
)

alphas = st.floats(0.0, 1.0)


def test_p_eta_examples():
    assert np.array_equal(build_p_eta(0.3, 0.0).transition, np.eye(2))
    p = build_p_eta(0.3, 1.0).transition
    assert np.allclose(p[:, 0], [0.3, 0.7]) and np.allclose(p[:, 1], [0.3, 0.7])
    assert np.allclose(build_p_eta(0.3, 0.5).transition, [[0.65, 0.15], [0.35, 0.85]], atol=1e-15)


def test_p_eta_domain():
    with pytest.raises(DomainError, match=r"min\[1/alpha, 1/\(1-alpha\)\]"):
        build_p_eta(0.3, 1.5)
    with pytest.raises(DomainError):
        build_p_eta(1.2, 0.5)
    with pytest.raises(DomainError):
        build_p_eta(0.5, -0.1)
    assert eta_max(0.5) == 2.0 and eta_max(0.0) == 1.0


@given(alphas, st.floats(0.0, 1.0))
def test_p_eta_invariants(alpha, frac):
    ch = build_p_eta(alpha, frac * eta_max(alpha))
    p = ch.transition
    assert np.allclose(p.sum(axis=0), 1.0, atol=1e-15)
    assert np.all(p >= -1e-15) and np.all(p <= 1 + 1e-15)
    assert ch.balance_defect() <= 1e-14
    assert np.allclose(p @ ch.pi, ch.pi, atol=1e-15)


def test_converge_examples():
    ch = build_p_eta(0.4, 0.7)
    tr = converge(ch, ch.pi, 10)
    assert np.allclose(tr.v, ch.pi, atol=1e-15)
    # same offset p from pi at two temperatures
    p = 0.05
    a = converge(build_p_eta(0.1, 0.3), [0.1 + p, 0.9 - p], 25)
    b = converge(build_p_eta(0.9, 0.3), [0.9 + p, 0.1 - p], 25)
    assert np.allclose(a.dist, b.dist, rtol=1e-10, atol=1e-15)
    with pytest.raises(DomainError):
        converge(ch, [0.5, 0.6], 3)


@given(st.floats(0.05, 0.95), st.floats(0.05, 1.0), st.floats(0.0, 1.0))
def test_converge_closed_form(alpha, frac, v1):
    eta = frac * eta_max(alpha)
    ch = build_p_eta(alpha, eta)
    tr = converge(ch, [v1, 1 - v1], 20)
    pred = predicted_distance(ch, [v1, 1 - v1], tr.steps)
    assert np.abs(tr.dist - pred).max() < 1e-12
    assert np.all(tr.dist_max <= tr.dist + 1e-15)


def test_decay_factor_regression():
    t = np.arange(15)
    for alpha in np.linspace(0.1, 0.9, 9):
        tr = converge(build_p_eta(alpha, 0.3), [1.0, 0.0], 14)
        slope = np.polyfit(t, np.log(tr.dist), 1)[0]
        assert np.exp(slope) == pytest.approx(0.7, abs=1e-10)


def test_gaussian_transition_examples():
    assert np.array_equal(gaussian_to_transition(1.0, 0.0).transition, np.eye(2))
    ch = gaussian_to_transition(0.0, 0.0)
    assert np.allclose(ch.transition, 0.5) and ch.alpha == 0.5
    with pytest.raises(DomainError):
        gaussian_to_transition(0.5, 0.8)


@given(st.floats(-1.0, 0.999), st.floats(-1.0, 1.0))
def test_gaussian_transition_balance(x, u):
    # admissible y: |y| <= 1 - |x|
    y = u * (1 - abs(x))
    ch = gaussian_to_transition(x, y)
    p = ch.transition
    if abs(1 - x - y) > 1e-9:
        assert p[0, 1] / p[1, 0] == pytest.approx(balance_ratio(x, y), rel=1e-12)
    assert ch.balance_defect() < 1e-12
    assert ch.alpha == pytest.approx((1 - x + y) / (2 * (1 - x)))


def test_channel_transition_vs_oracle():
    # loss and gain on one mode
    spec = LindbladSpec(([0.4, -0.4j], [0.25, 0.25j]))
    h = np.array([[0.0, 0.8], [-0.8, 0.0]])
    ch = build_channel(h, spec)
    ops = eo.fock_operators(1)
    n_op = ops.adag[0] @ ops.a[0]
    for t in (0.2, 1.0, 3.0):
        x, y = channel_to_affine(ch, t)
        p = gaussian_to_transition(x, y).transition
        for col, start in ((0, [0.0, 1.0]), (1, [1.0, 0.0])):
            rho = eo.lindblad_evolve(eo.pure_state(start), h, spec, t, ops)
            occ = np.trace(n_op @ rho).real
            assert p[0, col] == pytest.approx(occ, abs=1e-9)


def test_continuous_transition():
    q = continuous_transition(0.3, 2.0, 0.0)
    assert np.allclose(q, np.eye(2))
    q = continuous_transition(0.3, 2.0, 50.0)
    assert np.allclose(q[:, 0], [0.3, 0.7]) and np.allclose(q.sum(axis=0), 1.0)
    q = continuous_transition(0.3, 2.0, 0.4)
    assert abs(q[1, 0] * 0.3 - q[0, 1] * 0.7) < 1e-14
