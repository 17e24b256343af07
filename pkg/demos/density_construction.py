"""Round trip between block-diagonal density matrices and five-node nets.

Any ensemble {P(lam), rho^lam over (x, y)} becomes a net on
(lam, x0, y0, x, y): eigenvalues supply classical square-root tables,
eigenvectors the complex ones. Tracing the net's joint ket back down to
(x, y, lam) and dephasing lam reproduces the assembled input to
machine precision. Nets whose x table ignores y0 additionally collapse
to three nodes with composite states.
"""

import numpy as np

from qbnets import (
    amplitude_tensor,
    density_to_qbnet,
    net_to_density,
    reduce_qbnet,
    regrouped_reduced_tensor,
    reordered,
)
from qbnets.sampling import random_diagonal_extension, random_reducible_net

rng = np.random.default_rng(5)
ext = random_diagonal_extension(rng, dims=(2, 2), lam_card=2)

net = density_to_qbnet(ext)
print("emitted net:", net.dag)
print("table shapes:", [t.table.shape for t in net.tpms])

rho = net_to_density(net, keep=[3, 4], diag=[0])
target = reordered(ext.assemble("lam"), rho.names)
err = np.max(np.abs(rho.matrix - target.matrix))
print(f"reconstruction deviation: {err:.2e}")

# reduction of a net whose x table never looks at y0
reducible = random_reducible_net(rng)
reduced = reduce_qbnet(reducible)
print("\nreducible net:", reducible.dag)
print("reduced to:   ", reduced.dag)
regrouped = regrouped_reduced_tensor(reduced, reducible.dag.cardinalities)
err = np.max(np.abs(regrouped - amplitude_tensor(reducible).data))
print(f"joint amplitude deviation after regrouping: {err:.2e}")
