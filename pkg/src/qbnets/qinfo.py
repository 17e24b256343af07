"""Density matrices, entropies, dephasing, and block-diagonal extensions.

Entropies are in nats throughout. Quantum conditional and mutual
informations are the usual linear combinations of von Neumann entropies
of partial traces; their classical twins operate on plain probability
tables. A :class:`DiagonalExtension` is an ensemble {P(lam), rho^lam}
whose assembled state is block diagonal in the lam basis; its
conditional mutual information reduces to a weighted sum of per-block
mutual informations.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import CapacityError, InvalidStateError
from .graph import as_multinode
from .network import DEFAULT_CAP, QBNet, amplitude_tensor

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
EIG_REJECT = -1e-8

Labels = tuple[tuple[str, int], ...]


def _clean_labels(labels) -> Labels:
    out = []
    for name, dim in labels:
        name, dim = str(name), int(dim)
        if dim < 1:
            raise ValueError(f"label {name!r} has dimension {dim}")
        out.append((name, dim))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise ValueError("label names must be unique")
    return tuple(out)


def _group(g) -> tuple[str, ...]:
    if isinstance(g, str):
        return (g,)
    return tuple(str(x) for x in g)


class DensityMatrix:
    """A labeled Hermitian positive-semidefinite trace-one matrix.

    ``labels`` is an ordered tuple of (name, dimension) pairs; the
    matrix acts on their tensor product, row-major in label order.
    """

    __slots__ = ("labels", "matrix")

    def __init__(self, labels, matrix) -> None:
        labels = _clean_labels(labels)
        arr = np.array(matrix, dtype=np.complex128)
        dim = int(np.prod([d for _, d in labels])) if labels else 1
        if arr.shape != (dim, dim):
            raise ValueError(f"matrix shape {arr.shape}, expected {(dim, dim)}")
        herm = float(np.max(np.abs(arr - arr.conj().T))) if dim else 0.0
        if herm > HERMITIAN_ATOL:
            raise InvalidStateError(f"matrix deviates from Hermitian by {herm:.3g}")
        tr = complex(np.trace(arr))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvalidStateError(f"trace is {tr:.12g}, expected 1")
        w = np.linalg.eigvalsh(arr)
        if w.size and float(w.min()) < EIG_REJECT:
            raise InvalidStateError(
                f"smallest eigenvalue {float(w.min()):.3g} is below {EIG_REJECT:.1g}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", arr)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("DensityMatrix is immutable")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.labels)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.labels)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dim_of(self, name: str) -> int:
        for n, d in self.labels:
            if n == name:
                return d
        raise ValueError(f"unknown label {name!r}")

    def tensor(self) -> np.ndarray:
        """View of the matrix with one row axis and one column axis per label."""
        return self.matrix.reshape(self.dims + self.dims)

    def __repr__(self) -> str:
        spec = ", ".join(f"{n}:{d}" for n, d in self.labels)
        return f"DensityMatrix([{spec}])"


def reordered(rho: DensityMatrix, names: Sequence[str]) -> DensityMatrix:
    """The same state with its labels permuted into the given order."""
    names = tuple(names)
    if sorted(names) != sorted(rho.names):
        raise ValueError("new order must be a permutation of the labels")
    if names == rho.names:
        return rho
    perm = tuple(rho.names.index(n) for n in names)
    k = len(perm)
    tens = rho.tensor().transpose(perm + tuple(k + p for p in perm))
    new_dims = tuple(rho.dims[p] for p in perm)
    d = rho.dim
    return DensityMatrix(
        tuple((n, rho.dim_of(n)) for n in names), tens.reshape(d, d)
    )


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every label not named in ``keep`` (original order kept)."""
    keep = set(_group(keep))
    unknown = keep - set(rho.names)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}")
    kept = tuple((n, d) for n, d in rho.labels if n in keep)
    if len(kept) == len(rho.labels):
        return rho
    k = len(rho.labels)
    row = list(range(k))
    col = [k + i if rho.labels[i][0] in keep else i for i in range(k)]
    out = [i for i in range(k) if rho.labels[i][0] in keep]
    out += [k + i for i in range(k) if rho.labels[i][0] in keep]
    reduced = np.einsum(rho.tensor(), row + col, out)
    d = int(np.prod([dd for _, dd in kept])) if kept else 1
    reduced = reduced.reshape(d, d)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityMatrix(kept, reduced)


def dephase(rho: DensityMatrix, labels) -> DensityMatrix:
    """Zero every block off-diagonal in the computational basis of ``labels``.

    Idempotent and trace preserving; realizes conditioning on a variable
    that has been measured without recording the outcome.
    """
    names = set(_group(labels))
    unknown = names - set(rho.names)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}")
    if not names:
        return rho
    d = rho.dim
    idx = np.arange(d)
    mask = np.ones((d, d), dtype=bool)
    stride = d
    for name, dim_ in rho.labels:
        stride //= dim_
        if name in names:
            comp = (idx // stride) % dim_
            mask &= comp[:, None] == comp[None, :]
    return DensityMatrix(rho.labels, rho.matrix * mask)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Shannon entropy of the spectrum, in nats; 0 ln 0 := 0."""
    w = np.linalg.eigvalsh(rho.matrix)
    if w.size and float(w.min()) < EIG_REJECT:
        raise InvalidStateError(
            f"smallest eigenvalue {float(w.min()):.3g} is below {EIG_REJECT:.1g}"
        )
    w = np.clip(w.real, 0.0, 1.0)
    w = w[w > 0.0]
    return float(-(w * np.log(w)).sum())


def _entropy_of(rho: DensityMatrix, names) -> float:
    return von_neumann_entropy(partial_trace(rho, names))


def _check_partition(rho: DensityMatrix, *groups) -> None:
    flat: list[str] = []
    for g in groups:
        flat.extend(g)
    if len(set(flat)) != len(flat):
        raise ValueError("label groups must be disjoint")
    if set(flat) != set(rho.names):
        raise ValueError(
            f"groups {sorted(flat)} must partition the labels {sorted(rho.names)}"
        )


def quantum_conditional_entropy(rho: DensityMatrix, x, y) -> float:
    """S(x|y) = S(x,y) - S(y)."""
    x, y = _group(x), _group(y)
    _check_partition(rho, x, y)
    return von_neumann_entropy(rho) - _entropy_of(rho, y)


def quantum_mutual_information(rho: DensityMatrix, x, y) -> float:
    """S(x:y) = S(x) + S(y) - S(x,y)."""
    x, y = _group(x), _group(y)
    _check_partition(rho, x, y)
    return _entropy_of(rho, x) + _entropy_of(rho, y) - von_neumann_entropy(rho)


def quantum_cmi(rho: DensityMatrix, x, y, z=()) -> float:
    """S(x:y|z) = S(x,z) + S(y,z) - S(z) - S(x,y,z).

    With an empty ``z`` this is the mutual information.
    """
    x, y, z = _group(x), _group(y), _group(z)
    _check_partition(rho, x, y, z)
    if not z:
        return quantum_mutual_information(rho, x, y)
    return (
        _entropy_of(rho, x + z)
        + _entropy_of(rho, y + z)
        - _entropy_of(rho, z)
        - von_neumann_entropy(rho)
    )


class ClassicalDistribution:
    """A labeled nonnegative real table summing to one."""

    __slots__ = ("labels", "table")

    def __init__(self, labels, table) -> None:
        labels = _clean_labels(labels)
        arr = np.array(table, dtype=float)
        dims = tuple(d for _, d in labels)
        if arr.shape != dims:
            raise ValueError(f"table shape {arr.shape}, expected {dims}")
        if arr.size and float(arr.min()) < -1e-12:
            raise ValueError(f"negative probability mass {float(arr.min()):.3g}")
        arr = np.clip(arr, 0.0, None)
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"table sums to {total!r}, expected 1")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "table", arr)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("ClassicalDistribution is immutable")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.labels)

    def marginal(self, names) -> np.ndarray:
        keep = set(_group(names))
        unknown = keep - set(self.names)
        if unknown:
            raise ValueError(f"unknown labels {sorted(unknown)}")
        drop = tuple(i for i, (n, _) in enumerate(self.labels) if n not in keep)
        return self.table.sum(axis=drop) if drop else self.table


def _shannon(table: np.ndarray) -> float:
    p = table[table > 0.0]
    return float(-(p * np.log(p)).sum())


def classical_entropy(dist: ClassicalDistribution, of=None) -> float:
    if of is None:
        return _shannon(dist.table)
    return _shannon(dist.marginal(of))


def classical_conditional_entropy(dist: ClassicalDistribution, x, y) -> float:
    x, y = _group(x), _group(y)
    return classical_entropy(dist, x + y) - classical_entropy(dist, y)


def classical_mutual_information(dist: ClassicalDistribution, x, y) -> float:
    x, y = _group(x), _group(y)
    return (
        classical_entropy(dist, x)
        + classical_entropy(dist, y)
        - classical_entropy(dist, x + y)
    )


def classical_cmi(dist: ClassicalDistribution, x, y, z=()) -> float:
    x, y, z = _group(x), _group(y), _group(z)
    if not z:
        return classical_mutual_information(dist, x, y)
    return (
        classical_entropy(dist, x + z)
        + classical_entropy(dist, y + z)
        - classical_entropy(dist, z)
        - classical_entropy(dist, x + y + z)
    )


class DiagonalExtension:
    """Weights P(lam) with one component state per lam value.

    Assembles to a state over (lam, components' labels) that is block
    diagonal in lam.
    """

    __slots__ = ("weights", "components")

    def __init__(self, weights, components: Sequence[DensityMatrix]) -> None:
        w = np.array(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty vector")
        if float(w.min()) < -1e-12:
            raise ValueError(f"negative weight {float(w.min()):.3g}")
        w = np.clip(w, 0.0, None)
        if abs(float(w.sum()) - 1.0) > 1e-10:
            raise ValueError(f"weights sum to {float(w.sum())!r}, expected 1")
        components = tuple(components)
        if len(components) != w.size:
            raise ValueError(
                f"{w.size} weights but {len(components)} components"
            )
        first = components[0].labels
        for comp in components[1:]:
            if comp.labels != first:
                raise ValueError("all components must carry identical labels")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("DiagonalExtension is immutable")

    @property
    def lam_cardinality(self) -> int:
        return int(self.weights.size)

    @property
    def component_labels(self) -> Labels:
        return self.components[0].labels

    def assemble(self, lam_name: str = "lam") -> DensityMatrix:
        """The block-diagonal state over (lam, component labels)."""
        if lam_name in [n for n, _ in self.component_labels]:
            raise ValueError(f"label {lam_name!r} already used by the components")
        d = self.components[0].dim
        L = self.lam_cardinality
        big = np.zeros((L * d, L * d), dtype=np.complex128)
        for k in range(L):
            big[k * d : (k + 1) * d, k * d : (k + 1) * d] = (
                self.weights[k] * self.components[k].matrix
            )
        labels = ((lam_name, L),) + self.component_labels
        return DensityMatrix(labels, big)


def diagonal_blocks(rho: DensityMatrix, lam_name: str, atol: float = 1e-10) -> DiagonalExtension:
    """Split a lam-block-diagonal state into its weighted components."""
    front = reordered(rho, (lam_name,) + tuple(n for n in rho.names if n != lam_name))
    L = front.dims[0]
    d = front.dim // L
    mat = front.matrix
    off = mat.copy()
    for k in range(L):
        off[k * d : (k + 1) * d, k * d : (k + 1) * d] = 0.0
    residual = float(np.max(np.abs(off))) if off.size else 0.0
    if residual > atol:
        raise ValueError(
            f"state is not block diagonal in {lam_name!r}: off-block residual {residual:.3g}"
        )
    weights = []
    components = []
    labels = front.labels[1:]
    dim_rest = d
    for k in range(L):
        block = mat[k * d : (k + 1) * d, k * d : (k + 1) * d]
        p = float(np.trace(block).real)
        p = max(p, 0.0)
        weights.append(p)
        if p > 0.0:
            components.append(DensityMatrix(labels, block / p))
        else:
            components.append(
                DensityMatrix(labels, np.eye(dim_rest, dtype=np.complex128) / dim_rest)
            )
    weights = np.array(weights)
    weights = weights / weights.sum()
    return DiagonalExtension(weights, components)


def cmi_diagonal(ext: DiagonalExtension, x=None, y=None) -> float:
    """Conditional mutual information of a block-diagonal extension.

    Equals ``sum_lam P(lam) [S(rho^lam_x) + S(rho^lam_y) - S(rho^lam)]``,
    which agrees with :func:`quantum_cmi` of the assembled state. With
    two-label components the (x, y) split defaults to (first, second).
    """
    names = [n for n, _ in ext.component_labels]
    if x is None and y is None:
        if len(names) != 2:
            raise ValueError(
                "components carry more than two labels; pass the x and y groups"
            )
        x, y = (names[0],), (names[1],)
    x, y = _group(x), _group(y)
    _check_partition(ext.components[0], x, y)
    total = 0.0
    for p, comp in zip(ext.weights, ext.components):
        if p == 0.0:
            continue
        total += p * (
            _entropy_of(comp, x) + _entropy_of(comp, y) - von_neumann_entropy(comp)
        )
    return float(total)


def net_to_density(net: QBNet, keep, diag=(), cap: int = DEFAULT_CAP) -> DensityMatrix:
    """Reduced state of a net's joint ket, dephased on the ``diag`` nodes.

    Forms the pure projector of the joint amplitude tensor, traces out
    every node outside ``keep | diag``, and zeroes the blocks
    off-diagonal in the ``diag`` computational basis. This is the class
    of states a graph can generate when the conditioning nodes are read
    out without keeping coherences.
    """
    keep, diag = as_multinode(keep), as_multinode(diag)
    keep.validate(net.dag)
    diag.validate(net.dag)
    if not keep.isdisjoint(diag):
        raise ValueError("keep and diag multinodes must be disjoint")
    amp = amplitude_tensor(net, cap)
    held = keep | diag
    if not held:
        raise ValueError("keep | diag must name at least one node")
    held_dim = int(np.prod([net.dag.cardinality(i) for i in held]))
    if held_dim > cap:
        raise CapacityError(
            f"reduced state would be {held_dim}-dimensional, above the cap of {cap}"
        )
    axes = tuple(amp.labels.index(i) for i in held)
    rest = tuple(k for k in range(len(amp.labels)) if k not in axes)
    mat = amp.data.transpose(axes + rest).reshape(held_dim, -1)
    rho = mat @ mat.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    labels = tuple((net.dag.name(i), net.dag.cardinality(i)) for i in held)
    out = DensityMatrix(labels, rho)
    if diag:
        out = dephase(out, [net.dag.name(i) for i in diag])
    return out
