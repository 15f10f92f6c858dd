"""Two-state Markov chains obeying detailed balance.

Column ``k`` of a transition matrix holds the probabilities of leaving state
``k``, so ``v(t+1) = P v(t)``. The one-parameter family

    P_eta = (1 - eta) * identity + eta * P_pi,   P_pi = [[a, a], [1-a, 1-a]]

satisfies detailed balance for the stationary state ``pi = (a, 1-a)`` and
contracts ``v - pi`` by ``1 - eta`` per step regardless of ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closed_dynamics import expm
from .errors import DomainError
from .lindblad_channel import GaussianChannel, propagate, steady_state
from .majorana_core import STANDARD_BLOCK

_RHO_TILDE = np.array([1.0, -1.0])


@dataclass(frozen=True)
class TwoStateChain:
    alpha: float
    eta: float
    transition: np.ndarray

    @property
    def pi(self) -> np.ndarray:
        return np.array([self.alpha, 1.0 - self.alpha])

    def balance_defect(self) -> float:
        """``|P_{1->2} alpha - P_{2->1} (1 - alpha)|``."""
        p = self.transition
        return float(abs(p[1, 0] * self.alpha - p[0, 1] * (1.0 - self.alpha)))


def eta_max(alpha: float) -> float:
    if alpha <= 0 or alpha >= 1:
        return 1.0 / max(alpha, 1.0 - alpha)
    return min(1.0 / alpha, 1.0 / (1.0 - alpha))


def build_p_eta(alpha: float, eta: float) -> TwoStateChain:
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    bound = eta_max(alpha)
    if eta < 0 or eta > bound:
        raise DomainError(f"eta={eta} outside [0, {bound:.6g}] (eta <= min[1/alpha, 1/(1-alpha)])")
    p = np.array([
        [eta * alpha + (1.0 - eta), eta * alpha],
        [eta * (1.0 - alpha), eta * (1.0 - alpha) + (1.0 - eta)],
    ])
    return TwoStateChain(float(alpha), float(eta), p)


@dataclass(frozen=True)
class Trajectory:
    steps: np.ndarray
    v: np.ndarray
    dist: np.ndarray
    dist_max: np.ndarray


def converge(chain: TwoStateChain, v0, t_steps: int) -> Trajectory:
    """Iterate ``v(t) = P^t v0``; distances to ``pi`` in the 1-norm and max-norm."""
    v0 = np.asarray(v0, dtype=float)
    if v0.shape != (2,) or np.any(v0 < 0) or abs(v0.sum() - 1.0) > 1e-12:
        raise DomainError("v0 must be a probability vector of length 2")
    vs = [v0]
    for _ in range(t_steps):
        vs.append(chain.transition @ vs[-1])
    vs = np.array(vs)
    d = vs - chain.pi
    return Trajectory(np.arange(t_steps + 1), vs, np.abs(d).sum(axis=1), np.abs(d).max(axis=1))


def predicted_distance(chain: TwoStateChain, v0, t) -> np.ndarray:
    """Closed form ``|p| |1 - eta|^t ||(1, -1)||_1`` with ``v0 = pi + p (1, -1)``."""
    p = float(np.asarray(v0)[0] - chain.alpha)
    return abs(p) * np.abs(1.0 - chain.eta) ** np.asarray(t, dtype=float) * np.abs(_RHO_TILDE).sum()


def gaussian_to_transition(x: float, y: float, atol: float = 1e-12) -> TwoStateChain:
    """Transition matrix of a single-mode Gaussian map ``lambda -> x lambda + y``.

    ``lambda = 2 p - 1`` with ``p`` the probability of state 1. The chain's
    ``alpha`` is the stationary ``p_ss = (1 - x + y) / (2 (1 - x))`` (``1/2``
    for the identity map) and ``eta = 1 - x``.
    """
    p = 0.5 * np.array([[1 + x + y, 1 - x + y], [1 - x - y, 1 + x - y]])
    if np.any(p < -atol) or np.any(p > 1 + atol):
        raise DomainError(f"(x, y) = ({x}, {y}) does not give a stochastic matrix")
    p = np.clip(p, 0.0, 1.0)
    alpha = 0.5 if x == 1.0 else (1 - x + y) / (2 * (1 - x))
    return TwoStateChain(float(alpha), float(1.0 - x), p)


def balance_ratio(x: float, y: float) -> float:
    """``(1 - x + y) / (1 - x - y)``, which equals ``P_{2->1} / P_{1->2}``."""
    return (1 - x + y) / (1 - x - y)


def _lam(gamma) -> float:
    # lambda = 2 <n> - 1 = -Gamma[0, 1]
    return float(-gamma[0, 1])


def channel_to_affine(ch: GaussianChannel, t: float):
    """``(x, y)`` such that a single mode's ``lambda`` maps to ``x lambda + y`` after time ``t``."""
    if ch.dim != 2:
        raise DomainError("channel_to_affine needs a single-mode (2x2) channel")
    gss = steady_state(ch)
    y = _lam(propagate(ch, np.zeros((2, 2)), t, gss))
    # lambda = -1 initially (empty mode has Gamma = STANDARD_BLOCK)
    x = y - _lam(propagate(ch, STANDARD_BLOCK, t, gss))
    return x, y


def continuous_transition(alpha: float, rate: float, t: float) -> np.ndarray:
    """``Q(t) = exp(t * rate * (P_pi - identity))`` for the continuous-time chain."""
    gen = rate * (build_p_eta(alpha, 1.0).transition - np.eye(2))
    return expm(gen, t)
