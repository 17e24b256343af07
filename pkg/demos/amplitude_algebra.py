"""Tour of the amplitude algebra on a small hand-built net.

A three-node net lam -> x -> y with complex tables. The joint amplitude
is the product of table entries; squared norms of its slices are
genuine probabilities, and conditionals are ratios of squared norms.
"""

import numpy as np

from qbnets import (
    Dag,
    QBNet,
    amplitude_tensor,
    conditional_amplitude,
    joint_amplitude,
    marginal_probability,
    node_tpm,
    posterior_oracle,
    vector_amplitude,
)

rt2 = 1 / np.sqrt(2)

dag = Dag([("lam", 2), ("x", 2), ("y", 2)], [(0, 1), (1, 2)])
net = QBNet(
    dag,
    [
        node_tpm(0, (), [rt2, rt2 * 1j]),
        node_tpm(1, (0,), np.array([[rt2, 0.6], [rt2 * 1j, 0.8j]])),
        node_tpm(2, (1,), np.array([[1.0, rt2], [0.0, -rt2]])),
    ],
)

print("joint amplitudes A(lam, x, y):")
for lam in range(2):
    for x in range(2):
        for y in range(2):
            print(f"  A({lam},{x},{y}) = {joint_amplitude(net, [lam, x, y]):.4f}")

amp = amplitude_tensor(net)
print("\nglobal squared norm (should be 1):", np.sum(np.abs(amp.data) ** 2))

# the ket with x clamped: entries indexed by (lam, y)
ket = vector_amplitude(net, [1], (1,))
print("\nvector amplitude with x=1, a ket over (lam, y):")
print(ket.data)
print("its squared norm equals P(x=1):", ket.norm() ** 2)
print("marginal table P(x):", marginal_probability(net, [1]))

# conditional vector amplitude: a pair of kets, never a division
cond = conditional_amplitude(net, b=[2], a=[1], b_values=(0,), a_values=(1,))
print("\nP(y=0 | x=1) from the squared-norm ratio:", cond.probability)
print("P(y | x=1) from the exact posterior:", posterior_oracle(net, [2], {1: 1}))
