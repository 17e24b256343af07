"""Shared fixtures and independent brute-force oracles.

The oracles here recompute quantities by direct enumeration with their
own lookup code, so the library's tensor algebra is never checking
itself.
"""

import itertools

import numpy as np
import pytest

from qbnets import Dag


@pytest.fixture
def cross_pair_dag():
    """Five nodes (lam, x0, y0, x, y) with every construction edge,
    including x -> y. The pair (x, y) is not d-separated by lam."""
    return Dag(
        nodes=[("lam", 2), ("x0", 2), ("y0", 2), ("x", 2), ("y", 2)],
        edges=[
            (0, 1),
            (1, 2), (0, 2),
            (1, 3), (2, 3), (0, 3),
            (3, 4), (1, 4), (2, 4), (0, 4),
        ],
    )


@pytest.fixture
def screened_pair_dag():
    """Five nodes where lam screens x from y: x0 -> x, y0 -> y, lam -> all."""
    return Dag(
        nodes=[("lam", 2), ("x0", 2), ("y0", 2), ("x", 2), ("y", 2)],
        edges=[(0, 1), (0, 2), (1, 3), (0, 3), (2, 4), (0, 4)],
    )


def assignments(dag):
    return itertools.product(*(range(dag.cardinality(i)) for i in range(dag.node_count)))


def brute_joint(net, assignment):
    """Joint amplitude by direct table lookups (no tensor machinery)."""
    value = 1.0 + 0.0j
    for j, tpm in enumerate(net.tpms):
        idx = [assignment[j]] + [assignment[p] for p in tpm.parents]
        value *= complex(tpm.table[tuple(idx)])
    return value


def brute_joint_table(net):
    """|amplitude|^2 over all assignments, as a dense array."""
    dag = net.dag
    table = np.zeros(dag.cardinalities)
    for a in assignments(dag):
        table[a] = abs(brute_joint(net, a)) ** 2
    return table


def brute_posterior(net, query, evidence):
    """Posterior over the sorted query nodes by direct enumeration."""
    dag = net.dag
    query = sorted(query)
    shape = tuple(dag.cardinality(i) for i in query)
    table = np.zeros(shape)
    total = 0.0
    for a in assignments(dag):
        if any(a[k] != v for k, v in evidence.items()):
            continue
        w = abs(brute_joint(net, a)) ** 2
        total += w
        table[tuple(a[i] for i in query)] += w
    return table / total


def brute_d_separated(dag, a, b, z):
    """Active-trail reachability oracle, independent of moralization.

    Standard two-direction walk: a node left "upward" spreads to parents
    and children unless conditioned on; a node entered "downward" spreads
    to children unless conditioned on, and bounces to parents only if it
    is a conditioning node or an ancestor of one (collider activation).
    """
    a, b, z = set(a), set(b), set(z)
    if not a or not b:
        return True
    anc_of_z = set(z)
    changed = True
    while changed:
        changed = False
        for p, c in dag.edges:
            if c in anc_of_z and p not in anc_of_z:
                anc_of_z.add(p)
                changed = True

    visited = set()
    frontier = [(x, "up") for x in a]
    while frontier:
        node, direction = frontier.pop()
        if (node, direction) in visited:
            continue
        visited.add((node, direction))
        if node not in z and node in b:
            return False
        if direction == "up" and node not in z:
            for p in dag.parents(node):
                frontier.append((p, "up"))
            for c in dag.children(node):
                frontier.append((c, "down"))
        elif direction == "down":
            if node not in z:
                for c in dag.children(node):
                    frontier.append((c, "down"))
            if node in anc_of_z:
                for p in dag.parents(node):
                    frontier.append((p, "up"))
    return True
