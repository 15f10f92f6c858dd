"""Convergence speed of a two-state chain does not depend on its stationary state.

P_eta = (1 - eta) 1 + eta P_pi satisfies detailed balance for pi = (a, 1 - a)
and contracts the distance to pi by |1 - eta| per step, for any a.
"""

import numpy as np

from fermidec.markov_db import build_p_eta, converge, gaussian_to_transition

eta = 0.7
print(f"eta = {eta}: per-step contraction of ||v - pi||_1")
for a in (0.1, 0.3, 0.5, 0.7, 0.9):
    chain = build_p_eta(a, eta)
    tr = converge(chain, (1.0, 0.0), 8)
    ratio = tr.dist[1:] / tr.dist[:-1]
    print(f"alpha={a:.1f}  balance defect={chain.balance_defect():.1e}  ratios={np.round(ratio, 12)}")

print("\nsingle-mode Gaussian map lambda -> x lambda + y as a chain")
for x, y in ((0.5, 0.2), (0.2, -0.6), (-0.3, 0.1)):
    c = gaussian_to_transition(x, y)
    p = c.transition
    print(f"x={x:+.1f} y={y:+.1f}  P21/P12 = {p[0, 1] / p[1, 0]:.6f}  (1-x+y)/(1-x-y) = {(1 - x + y) / (1 - x - y):.6f}")
