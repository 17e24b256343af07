import numpy as np
import pytest

from qbnets import (
    ConvergenceError,
    FactorGraphNet,
    StructureError,
    bipartite_beliefs,
    bipartite_iterate,
    factor_graph_to_qbnet,
    init_messages,
    posterior_oracle,
    run_bipartite,
)
from qbnets.sampling import random_factor_tree


def pair_factor_net(table=None):
    table = table if table is not None else np.array([[1.0, 2.0], [0.5, 1.0j]])
    return FactorGraphNet(
        roots=[("x0", 2), ("x1", 2)], factors=[("f0", (0, 1), table)]
    )


class TestFactorGraphNet:
    def test_cycle_rejected(self):
        with pytest.raises(StructureError):
            FactorGraphNet(
                roots=[("a", 2), ("b", 2)],
                factors=[
                    ("f", (0, 1), np.ones((2, 2))),
                    ("g", (0, 1), np.ones((2, 2))),
                ],
            )

    def test_zero_table_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            FactorGraphNet(roots=[("a", 2)], factors=[("f", (0,), np.zeros(2))])

    def test_repeated_neighbor_rejected(self):
        with pytest.raises(ValueError, match="twice"):
            FactorGraphNet(roots=[("a", 2)], factors=[("f", (0, 0), np.ones((2, 2)))])


class TestIteration:
    def test_single_unary_factor_converges_in_one_step(self):
        net = FactorGraphNet(roots=[("a", 2)], factors=[("f", (0,), [3.0, 4.0])])
        state = bipartite_iterate(net, init_messages(net))
        again = bipartite_iterate(net, state)
        np.testing.assert_allclose(
            state.to_root[(0, 0)].data, again.to_root[(0, 0)].data, atol=1e-15
        )
        beliefs = bipartite_beliefs(net, state)
        np.testing.assert_allclose(beliefs.roots[0].table, [9 / 25, 16 / 25], atol=1e-12)

    def test_pair_factor_message_carries_far_root(self):
        net = pair_factor_net()
        state = bipartite_iterate(net, init_messages(net))
        msg = state.to_root[(0, 0)]
        assert msg.labels == (0, 1)
        # profile over the carrier: sum |f|^2 over the hidden far root
        profile = (np.abs(msg.data) ** 2).sum(axis=1)
        expect = (np.abs(net.factors[0].table) ** 2).sum(axis=1)
        np.testing.assert_allclose(profile / profile.sum(), expect / expect.sum(), atol=1e-12)

    def test_tree_reaches_fixed_point_within_diameter(self):
        for seed in range(8):
            rng = np.random.default_rng([41, seed])
            net = random_factor_tree(rng)
            edges = sum(len(f.neighbors) for f in net.factors)
            state = init_messages(net)
            for _ in range(edges + 2):
                state = bipartite_iterate(net, state)
            again = bipartite_iterate(net, state)
            for key, amp in state.to_root.items():
                assert amp.labels == again.to_root[key].labels
                np.testing.assert_allclose(
                    amp.data, again.to_root[key].data, atol=1e-12
                )

    def test_beliefs_refuse_unconverged_state(self):
        net = FactorGraphNet(
            roots=[("a", 2), ("b", 2), ("c", 2)],
            factors=[
                ("f", (0, 1), np.array([[1.0, 0.2], [0.1, 1.0]])),
                ("g", (1, 2), np.array([[1.0, 0.9], [0.3, 1.0]])),
            ],
        )
        with pytest.raises(ConvergenceError):
            bipartite_beliefs(net, init_messages(net))


class TestBeliefs:
    def test_single_unary_factor_squared_table(self):
        net = FactorGraphNet(roots=[("a", 3)], factors=[("f", (0,), [1.0, 1.0j, 2.0])])
        beliefs = run_bipartite(net)
        np.testing.assert_allclose(beliefs.roots[0].table, [1 / 6, 1 / 6, 4 / 6], atol=1e-12)

    def test_disconnected_root_uniform(self):
        net = FactorGraphNet(
            roots=[("a", 2), ("lonely", 3)], factors=[("f", (0,), [1.0, 2.0])]
        )
        beliefs = run_bipartite(net)
        np.testing.assert_allclose(beliefs.roots[1].table, np.full(3, 1 / 3), atol=1e-12)

    def test_matches_equivalent_qbnet_oracle(self):
        for seed in range(12):
            rng = np.random.default_rng([43, seed])
            fg = random_factor_tree(rng)
            beliefs = run_bipartite(fg)
            net, evidence = factor_graph_to_qbnet(fg)
            for i, rb in beliefs.roots.items():
                expect = posterior_oracle(net, [i], evidence)
                np.testing.assert_allclose(rb.table, expect, atol=1e-8)
            for a, fb in beliefs.factors.items():
                nb = fg.factors[a].neighbors
                expect = posterior_oracle(net, nb, evidence)
                srt = tuple(sorted(nb))
                expect = np.transpose(expect, tuple(srt.index(i) for i in nb))
                np.testing.assert_allclose(fb.table, expect, atol=1e-8)


class TestEquivalentQbnet:
    def test_structure(self):
        fg = pair_factor_net()
        net, evidence = factor_graph_to_qbnet(fg)
        assert net.dag.names == ("x0", "x1", "f0")
        assert net.dag.cardinalities == (2, 2, 2)
        assert evidence == {2: 1}

    def test_scaling_does_not_change_beliefs(self):
        t = np.array([[1.0, 2.0], [0.5, 1.0j]])
        b1 = run_bipartite(pair_factor_net(t))
        b2 = run_bipartite(pair_factor_net(3.7 * t))
        np.testing.assert_allclose(b1.roots[0].table, b2.roots[0].table, atol=1e-12)
