"""How distinguishable do two encoded states stay under Kitaev loss?

Two Dirac modes (four Majoranas) store one qubit. The exact Fock-space
evolution gives the trace distance between the evolved states, compared with
2 e^{-2 lambda t}, where lambda is the smallest eigenvalue of the dissipative
part of the ground block. The bound holds for |0> vs |+>. For |0> vs |1>
(both modes filled) it is exceeded: their covariance difference does saturate
2 e^{-2 lambda t}, but the full density matrices stay further apart.
"""

import numpy as np

from fermidec import build_channel
from fermidec import exact_oracle as eo
from fermidec.majorana_core import operator_norm
from fermidec.models import KitaevParams, kitaev_wire, uniform_loss_spec

eta = 0.5
h = kitaev_wire(KitaevParams(2))
spec = uniform_loss_spec(2, eta)
lam = build_channel(h, spec).min_dissipation
ops = eo.fock_operators(2)
states = {k: eo.pure_state(v) for k, v in eo.encoded_qubit_states(ops).items()}
times = np.linspace(0.0, 4.0, 9)
traj = {k: eo.lindblad_trajectory(rho, h, spec, times, ops) for k, rho in states.items()}

print(f"lambda = {lam:.4f}")
print("   t   bound    tr(0,+)  tr(0,1)  ||dGamma(0,1)||")
for i, t in enumerate(times):
    bound = 2 * np.exp(-2 * lam * t)
    d_plus = eo.trace_distance(traj["0"][i], traj["+"][i])
    d_one = eo.trace_distance(traj["0"][i], traj["1"][i])
    dg = operator_norm(eo.covariance_of(traj["0"][i], ops) - eo.covariance_of(traj["1"][i], ops))
    print(f"{t:5.2f}  {bound:.4f}   {d_plus:.4f}   {d_one:.4f}   {dg:.4f}")
