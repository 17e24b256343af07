"""Quantum Bayesian networks and their exact amplitude algebra.

A net attaches one complex table per node: the entry ``A(x_j | pa)`` is
a probability amplitude, and each parent configuration's column has unit
2-norm, so the squared joint amplitude is a bona fide joint probability.
The functions below realize the vector-amplitude algebra on top of that:
joint tensors, kets over a multinode's complement, marginals,
conditionals, and the brute-force posterior used as the inference oracle
throughout the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .amplitudes import LabeledAmplitude, labeled, product
from .errors import CapacityError, ImpossibleEvidenceError, ZeroProbabilityError
from .graph import Dag, as_multinode

#: Largest dense joint tensor (in amplitudes) the exact routines will build.
DEFAULT_CAP = 2**20

COLUMN_NORM_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class NodeTpm:
    """The complex transition table attached to one node.

    ``table[x, p1, p2, ...]`` is ``A(x | p1, p2, ...)`` with parent axes
    in the node's declared parent order. Every column (fixed parent
    configuration) must have unit 2-norm.
    """

    node: int
    parents: tuple[int, ...]
    table: np.ndarray

    def column_norm_error(self) -> float:
        sums = np.abs(self.table) ** 2
        sums = sums.sum(axis=0)
        return float(np.max(np.abs(sums - 1.0))) if sums.size else 0.0


def node_tpm(node: int, parents: Sequence[int], table, atol: float = COLUMN_NORM_ATOL) -> NodeTpm:
    arr = np.asarray(table, dtype=np.complex128)
    parents = tuple(int(p) for p in parents)
    if arr.ndim != 1 + len(parents):
        raise ValueError(
            f"node {node}: table rank {arr.ndim} but {len(parents)} parents"
        )
    tpm = NodeTpm(int(node), parents, arr)
    err = tpm.column_norm_error()
    if err > atol:
        raise ValueError(
            f"node {node}: a parent configuration's amplitudes deviate from "
            f"unit norm by {err:.3g} (allowed {atol:.3g})"
        )
    return tpm


class QBNet:
    """A Dag plus one unit-column complex table per node."""

    __slots__ = ("dag", "tpms")

    def __init__(self, dag: Dag, tpms: Sequence[NodeTpm]) -> None:
        if len(tpms) != dag.node_count:
            raise ValueError(
                f"{dag.node_count} nodes but {len(tpms)} tables"
            )
        for j, tpm in enumerate(tpms):
            if tpm.node != j:
                raise ValueError(f"table {j} is declared for node {tpm.node}")
            if tpm.parents != dag.parents(j):
                raise ValueError(
                    f"node {j}: table parents {tpm.parents} do not match "
                    f"graph parents {dag.parents(j)}"
                )
            expect = (dag.cardinality(j),) + tuple(
                dag.cardinality(p) for p in tpm.parents
            )
            if tpm.table.shape != expect:
                raise ValueError(
                    f"node {j}: table shape {tpm.table.shape}, expected {expect}"
                )
        object.__setattr__(self, "dag", dag)
        object.__setattr__(self, "tpms", tuple(tpms))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("QBNet is immutable")

    def __repr__(self) -> str:
        return f"QBNet({self.dag!r})"


def validate_evidence(dag: Dag, evidence: Mapping[int, int]) -> dict[int, int]:
    out = {}
    for node, value in evidence.items():
        node, value = int(node), int(value)
        if not 0 <= node < dag.node_count:
            raise ValueError(f"evidence names node {node}, out of range")
        if not 0 <= value < dag.cardinality(node):
            raise ValueError(
                f"evidence state {value} out of range for node "
                f"{dag.name(node)} (cardinality {dag.cardinality(node)})"
            )
        out[node] = value
    return out


def tpm_amplitude(net: QBNet, node: int) -> LabeledAmplitude:
    """Node table as a labeled tensor over {node} and its parents."""
    tpm = net.tpms[node]
    return labeled((node,) + tpm.parents, tpm.table)


def _check_cap(dims: Sequence[int], cap: int) -> None:
    total = math.prod(dims) if dims else 1
    if total > cap:
        raise CapacityError(
            f"joint tensor would hold {total} amplitudes, above the cap of {cap}"
        )


def joint_amplitude(net: QBNet, assignment: Sequence[int]) -> complex:
    """Product of table entries at one full assignment."""
    dag = net.dag
    if len(assignment) != dag.node_count:
        raise ValueError(
            f"assignment length {len(assignment)} for {dag.node_count} nodes"
        )
    for j, x in enumerate(assignment):
        if not 0 <= x < dag.cardinality(j):
            raise ValueError(
                f"state {x} out of range for node {dag.name(j)}"
            )
    value = 1.0 + 0.0j
    for j, tpm in enumerate(net.tpms):
        idx = (assignment[j],) + tuple(assignment[p] for p in tpm.parents)
        value *= tpm.table[idx]
    return value


def amplitude_tensor(net: QBNet, cap: int = DEFAULT_CAP) -> LabeledAmplitude:
    """The full joint amplitude as a tensor over every node.

    Its global squared norm is 1 up to roundoff, by the unit-column
    condition on every table.
    """
    _check_cap(net.dag.cardinalities, cap)
    return product(tpm_amplitude(net, j) for j in range(net.dag.node_count))


def vector_amplitude(
    net: QBNet, a, a_values: Sequence[int], cap: int = DEFAULT_CAP
) -> LabeledAmplitude:
    """The ket over the complement of ``a`` with ``a`` fixed at ``a_values``.

    ``a_values`` aligns with the multinode's sorted members. The squared
    norm of the result equals the marginal probability of the assignment.
    Boundary cases: an empty ``a`` returns the full joint tensor, and
    ``a`` = all nodes returns a zero-axis tensor holding the joint
    amplitude.
    """
    a = as_multinode(a)
    a.validate(net.dag)
    if len(a_values) != len(a):
        raise ValueError(f"{len(a)} nodes in multinode but {len(a_values)} values")
    fix = dict(zip(a.members, (int(v) for v in a_values)))
    fix = validate_evidence(net.dag, fix)
    amp = amplitude_tensor(net, cap)
    return amp.slice_at(fix)


def marginal_probability(net: QBNet, a, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Probability table over the multinode ``a`` (axes in sorted order)."""
    a = as_multinode(a)
    a.validate(net.dag)
    amp = amplitude_tensor(net, cap)
    squared = np.abs(amp.data) ** 2
    drop = tuple(k for k, l in enumerate(amp.labels) if l not in a)
    return squared.sum(axis=drop) if drop else squared


@dataclass(frozen=True, eq=False)
class ConditionalAmplitude:
    """The pair of kets behind a conditional vector amplitude.

    Written like a quotient, but never divided: the object is the tuple
    (ket with both multinodes fixed, ket with the conditioning multinode
    fixed). Its squared-norm ratio is the conditional probability.
    """

    numerator: LabeledAmplitude
    denominator: LabeledAmplitude

    @property
    def probability(self) -> float:
        return self.numerator.norm() ** 2 / self.denominator.norm() ** 2


def conditional_amplitude(
    net: QBNet,
    b,
    a,
    b_values: Sequence[int],
    a_values: Sequence[int],
    cap: int = DEFAULT_CAP,
) -> ConditionalAmplitude:
    a, b = as_multinode(a), as_multinode(b)
    if not a.isdisjoint(b):
        raise ValueError("conditioned and conditioning multinodes must be disjoint")
    denominator = vector_amplitude(net, a, a_values, cap)
    if denominator.norm() == 0.0:
        raise ZeroProbabilityError(
            "conditioning assignment has zero probability; the quotient "
            "of kets is undefined there"
        )
    joint = a | b
    fix = dict(zip(a.members, a_values))
    fix.update(zip(b.members, b_values))
    joint_values = [fix[m] for m in joint.members]
    numerator = vector_amplitude(net, joint, joint_values, cap)
    return ConditionalAmplitude(numerator, denominator)


def posterior_oracle(
    net: QBNet,
    query,
    evidence: Mapping[int, int],
    cap: int = DEFAULT_CAP,
) -> np.ndarray:
    """Exact posterior over ``query`` given ``evidence``, by brute force.

    Slices the full joint tensor at the evidence, squares, sums out the
    hidden nodes, and normalizes. Deliberately exponential; this is the
    reference answer every message-passing routine is tested against.
    """
    query = as_multinode(query)
    query.validate(net.dag)
    evidence = validate_evidence(net.dag, evidence)
    if any(q in evidence for q in query):
        raise ValueError("query nodes must be disjoint from evidence nodes")

    amp = amplitude_tensor(net, cap)
    clamped = amp.slice_at(evidence)
    squared = np.abs(clamped.data) ** 2
    total = float(squared.sum())
    if total == 0.0:
        raise ImpossibleEvidenceError("impossible evidence: the observed states have zero probability")
    drop = tuple(k for k, l in enumerate(clamped.labels) if l not in query)
    table = squared.sum(axis=drop) if drop else squared
    return table / total
