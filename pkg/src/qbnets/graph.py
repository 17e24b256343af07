"""Directed acyclic graphs, multinode set algebra, and d-separation.

The d-separation predicate here is purely topological: it never looks at
amplitudes or probabilities, so the same function serves the classical
and the quantum independence theorems.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Iterator, Sequence


class Multinode:
    """A set of DAG node indices treated as one composite variable.

    Members are stored sorted and duplicate-free, so two multinodes over
    the same nodes compare equal structurally.
    """

    __slots__ = ("members",)

    def __init__(self, members: Iterable[int] = ()) -> None:
        seen = sorted({int(m) for m in members})
        if seen and seen[0] < 0:
            raise ValueError("node indices must be nonnegative")
        object.__setattr__(self, "members", tuple(seen))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Multinode is immutable")

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, item: int) -> bool:
        return item in self.members

    def __eq__(self, other) -> bool:
        if isinstance(other, Multinode):
            return self.members == other.members
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.members)

    def __repr__(self) -> str:
        return f"Multinode({list(self.members)})"

    def __or__(self, other: "Multinode") -> "Multinode":
        return Multinode(self.members + as_multinode(other).members)

    def __and__(self, other: "Multinode") -> "Multinode":
        other = as_multinode(other)
        return Multinode(m for m in self.members if m in other)

    def isdisjoint(self, other: "Multinode") -> bool:
        return not set(self.members) & set(as_multinode(other).members)

    def complement(self, dag: "Dag") -> "Multinode":
        """All nodes of ``dag`` not in this multinode."""
        self.validate(dag)
        inside = set(self.members)
        return Multinode(i for i in range(dag.node_count) if i not in inside)

    def validate(self, dag: "Dag") -> None:
        if self.members and self.members[-1] >= dag.node_count:
            raise ValueError(
                f"node index {self.members[-1]} out of range for a "
                f"{dag.node_count}-node graph"
            )


def as_multinode(obj) -> Multinode:
    """Coerce an iterable of node indices (or a Multinode) to a Multinode."""
    if isinstance(obj, Multinode):
        return obj
    if isinstance(obj, int):
        return Multinode((obj,))
    return Multinode(obj)


class Dag:
    """A directed acyclic graph with named nodes and per-node state counts.

    Parameters
    ----------
    nodes : sequence of (name, cardinality)
        Node names must be unique and nonempty; cardinalities >= 1.
    edges : sequence of (parent index, child index)
        No self loops, no duplicates, no directed cycle. The order in
        which a node's in-edges appear fixes its declared parent order.
    """

    __slots__ = ("_nodes", "_edges", "_parents", "_children", "_index")

    def __init__(
        self,
        nodes: Sequence[tuple[str, int]],
        edges: Sequence[tuple[int, int]] = (),
    ) -> None:
        clean_nodes = []
        for name, card in nodes:
            name = str(name)
            card = int(card)
            if not name:
                raise ValueError("node names must be nonempty")
            if card < 1:
                raise ValueError(f"node {name!r} has cardinality {card}; need >= 1")
            clean_nodes.append((name, card))
        names = [n for n, _ in clean_nodes]
        if len(set(names)) != len(names):
            raise ValueError("node names must be unique")

        n = len(clean_nodes)
        parents: list[list[int]] = [[] for _ in range(n)]
        children: list[list[int]] = [[] for _ in range(n)]
        clean_edges = []
        seen = set()
        for p, c in edges:
            p, c = int(p), int(c)
            if not (0 <= p < n and 0 <= c < n):
                raise ValueError(f"edge ({p}, {c}) out of range")
            if p == c:
                raise ValueError(f"self loop on node {p}")
            if (p, c) in seen:
                raise ValueError(f"duplicate edge ({p}, {c})")
            seen.add((p, c))
            clean_edges.append((p, c))
            parents[c].append(p)
            children[p].append(c)

        object.__setattr__(self, "_nodes", tuple(clean_nodes))
        object.__setattr__(self, "_edges", tuple(clean_edges))
        object.__setattr__(self, "_parents", tuple(tuple(ps) for ps in parents))
        object.__setattr__(self, "_children", tuple(tuple(cs) for cs in children))
        object.__setattr__(self, "_index", {name: i for i, (name, _) in enumerate(clean_nodes)})

        # raises on a directed cycle
        topological_order(self)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Dag is immutable")

    @property
    def nodes(self) -> tuple[tuple[str, int], ...]:
        return self._nodes

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self._nodes)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(card for _, card in self._nodes)

    def name(self, i: int) -> str:
        return self._nodes[i][0]

    def cardinality(self, i: int) -> int:
        return self._nodes[i][1]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown node name {name!r}") from None

    def parents(self, i: int) -> tuple[int, ...]:
        """Parents of node ``i`` in declared (edge) order."""
        return self._parents[i]

    def children(self, i: int) -> tuple[int, ...]:
        return self._children[i]

    def neighbors(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(set(self._parents[i]) | set(self._children[i])))

    def __eq__(self, other) -> bool:
        # same nodes and same declared parent order per node; the global
        # interleaving of edges across children carries no meaning
        if isinstance(other, Dag):
            return self._nodes == other._nodes and self._parents == other._parents
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self._nodes, self._parents))

    def __repr__(self) -> str:
        spec = ", ".join(f"{n}:{c}" for n, c in self._nodes)
        arcs = ", ".join(f"{p}->{c}" for p, c in self._edges)
        return f"Dag([{spec}], [{arcs}])"


def topological_order(dag: Dag) -> list[int]:
    """Parents-before-children node order; ties broken by node index."""
    n = dag.node_count
    indegree = [len(dag.parents(i)) for i in range(n)]
    ready = [i for i in range(n) if indegree[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for c in dag.children(i):
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != n:
        raise ValueError("edges contain a directed cycle")
    return order


def is_polytree(dag: Dag) -> bool:
    """True iff the undirected skeleton is acyclic (a forest counts)."""
    root = list(range(dag.node_count))

    def find(i: int) -> int:
        while root[i] != i:
            root[i] = root[root[i]]
            i = root[i]
        return i

    for p, c in dag.edges:
        rp, rc = find(p), find(c)
        if rp == rc:
            return False
        root[rp] = rc
    return True


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _parent_masks(dag: Dag) -> list[int]:
    masks = [0] * dag.node_count
    for p, c in dag.edges:
        masks[c] |= 1 << p
    return masks


def _d_separated_masks(parents: Sequence[int], a: int, b: int, z: int) -> bool:
    """Bitmask core of the d-separation test.

    Reachability on the moralized ancestral graph of ``a | b | z``:
    take the ancestral closure, marry co-parents, drop edge directions,
    delete the conditioning nodes, and ask whether ``a`` still reaches
    ``b``.
    """
    n = len(parents)
    anc = a | b | z
    frontier = anc
    while frontier:
        step = 0
        for i in _bits(frontier):
            step |= parents[i]
        frontier = step & ~anc
        anc |= frontier

    adj = [0] * n
    for c in _bits(anc):
        ps = parents[c] & anc
        for p in _bits(ps):
            adj[p] |= 1 << c
            adj[c] |= 1 << p
            adj[p] |= ps & ~(1 << p)

    alive = anc & ~z
    reach = a & alive
    frontier = reach
    while frontier:
        step = 0
        for i in _bits(frontier):
            step |= adj[i]
        frontier = step & alive & ~reach
        reach |= frontier
    return not reach & b


def d_separated(dag: Dag, a, b, z=()) -> bool:
    """Test whether node sets ``a`` and ``b`` are d-separated given ``z``.

    Parameters
    ----------
    dag : Dag
    a, b, z : Multinode or iterable of node indices
        Must be pairwise disjoint; ``z`` may be empty.

    Returns
    -------
    bool
        True iff every undirected path between ``a`` and ``b`` is blocked
        by ``z`` in the usual sense (chains and forks blocked by observed
        middles, colliders blocked unless they or a descendant are
        observed).
    """
    a, b, z = as_multinode(a), as_multinode(b), as_multinode(z)
    for m in (a, b, z):
        m.validate(dag)
    if not (a.isdisjoint(b) and a.isdisjoint(z) and b.isdisjoint(z)):
        raise ValueError("multinodes a, b, z must be pairwise disjoint")

    def mask(m: Multinode) -> int:
        out = 0
        for i in m:
            out |= 1 << i
        return out

    return _d_separated_masks(_parent_masks(dag), mask(a), mask(b), mask(z))
