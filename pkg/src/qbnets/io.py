"""JSON file formats for nets, graphs, states, extensions, and factor graphs.

Complex numbers are written as ``[re, im]`` pairs of decimal doubles.
Net tables are flattened with the node's own state varying fastest,
then the parents in declared order; factor tables with the first
neighbor's state varying fastest. Loaders validate structure and the
unit-norm table condition (rejecting deviations beyond 1e-8, then
renormalizing the surviving roundoff away).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .bipartite import FactorGraphNet
from .graph import Dag
from .network import QBNet, node_tpm
from .qinfo import DensityMatrix, DiagonalExtension

LOAD_NORM_ATOL = 1e-8


def _pairs(flat: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in flat]


def _from_pairs(pairs, what: str) -> np.ndarray:
    try:
        arr = np.array(pairs, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{what}: entries must be [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{what}: entries must be [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def _expect(obj: Any, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ValueError(f"{what}: missing key {key!r}")
    return obj[key]


# -- qbnets -----------------------------------------------------------------


def qbnet_to_json(net: QBNet) -> dict:
    dag = net.dag
    nodes = [
        {
            "name": dag.name(j),
            "states": dag.cardinality(j),
            "parents": [dag.name(p) for p in dag.parents(j)],
        }
        for j in range(dag.node_count)
    ]
    tpms = {
        dag.name(j): _pairs(net.tpms[j].table.ravel(order="F"))
        for j in range(dag.node_count)
    }
    return {"nodes": nodes, "tpms": tpms}


def dag_from_json(obj: dict) -> Dag:
    nodes_spec = _expect(obj, "nodes", "net file")
    names = []
    nodes = []
    for entry in nodes_spec:
        name = str(_expect(entry, "name", "node entry"))
        states = int(_expect(entry, "states", f"node {name!r}"))
        names.append(name)
        nodes.append((name, states))
    index = {name: i for i, name in enumerate(names)}
    if len(index) != len(names):
        raise ValueError("net file: duplicate node names")
    edges = []
    for entry in nodes_spec:
        child = index[str(entry["name"])]
        for pname in entry.get("parents", []):
            if pname not in index:
                raise ValueError(
                    f"node {entry['name']!r} lists unknown parent {pname!r}"
                )
            edges.append((index[pname], child))
    return Dag(nodes, edges)


def qbnet_from_json(obj: dict) -> QBNet:
    dag = dag_from_json(obj)
    tables = _expect(obj, "tpms", "net file")
    tpms = []
    for j in range(dag.node_count):
        name = dag.name(j)
        if name not in tables:
            raise ValueError(f"net file: no table for node {name!r}")
        flat = _from_pairs(tables[name], f"table of {name!r}")
        shape = (dag.cardinality(j),) + tuple(
            dag.cardinality(p) for p in dag.parents(j)
        )
        if flat.size != int(np.prod(shape)):
            raise ValueError(
                f"table of {name!r} has {flat.size} entries, expected {int(np.prod(shape))}"
            )
        table = flat.reshape(shape, order="F")
        sums = (np.abs(table) ** 2).sum(axis=0)
        err = float(np.max(np.abs(sums - 1.0))) if sums.size else 0.0
        if err > LOAD_NORM_ATOL:
            raise ValueError(
                f"table of {name!r} violates the unit-norm condition by {err:.3g}"
            )
        table = table / np.sqrt(sums)
        tpms.append(node_tpm(j, dag.parents(j), table))
    return QBNet(dag, tpms)


# -- density matrices and extensions ----------------------------------------


def _labels_to_json(labels) -> list[dict]:
    return [{"name": n, "dim": d} for n, d in labels]


def _labels_from_json(spec, what: str):
    out = []
    for entry in spec:
        out.append((str(_expect(entry, "name", what)), int(_expect(entry, "dim", what))))
    return tuple(out)


def _matrix_to_json(mat: np.ndarray) -> list:
    return [
        [[float(v.real), float(v.imag)] for v in row]
        for row in mat
    ]


def _matrix_from_json(rows, what: str) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{what}: matrix entries must be [re, im] pairs") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{what}: matrix must be square with [re, im] entries")
    return arr[..., 0] + 1j * arr[..., 1]


def density_to_json(rho: DensityMatrix) -> dict:
    return {
        "labels": _labels_to_json(rho.labels),
        "matrix": _matrix_to_json(rho.matrix),
    }


def density_from_json(obj: dict) -> DensityMatrix:
    labels = _labels_from_json(_expect(obj, "labels", "state file"), "state label")
    matrix = _matrix_from_json(_expect(obj, "matrix", "state file"), "state file")
    return DensityMatrix(labels, matrix)


def extension_to_json(ext: DiagonalExtension) -> dict:
    return {
        "weights": [float(w) for w in ext.weights],
        "components": [_matrix_to_json(c.matrix) for c in ext.components],
        "labels": _labels_to_json(ext.component_labels),
    }


def extension_from_json(obj: dict) -> DiagonalExtension:
    weights = _expect(obj, "weights", "extension file")
    comps = _expect(obj, "components", "extension file")
    mats = [
        _matrix_from_json(entry, f"extension component {k}")
        for k, entry in enumerate(comps)
    ]
    if "labels" in obj:
        labels = _labels_from_json(obj["labels"], "extension label")
    else:
        # the format allows omitting labels; a square split is the only
        # unambiguous default
        dim = mats[0].shape[0] if mats else 0
        side = int(round(dim**0.5))
        if side * side != dim:
            raise ValueError(
                "extension file has no labels and the component dimension "
                f"{dim} is not a perfect square; add a 'labels' key"
            )
        labels = (("x", side), ("y", side))
    components = [DensityMatrix(labels, m) for m in mats]
    return DiagonalExtension(weights, components)


# -- factor graphs -----------------------------------------------------------


def factor_graph_to_json(net: FactorGraphNet) -> dict:
    roots = [{"name": n, "states": c} for n, c in net.roots]
    factors = []
    for f in net.factors:
        factors.append(
            {
                "name": f.name,
                "nb": [net.roots[i][0] for i in f.neighbors],
                "table": _pairs(f.table.ravel(order="F")),
            }
        )
    return {"roots": roots, "factors": factors}


def factor_graph_from_json(obj: dict) -> FactorGraphNet:
    roots_spec = _expect(obj, "roots", "factor graph file")
    roots = [
        (str(_expect(r, "name", "root entry")), int(_expect(r, "states", "root entry")))
        for r in roots_spec
    ]
    index = {name: i for i, (name, _) in enumerate(roots)}
    factors = []
    for entry in _expect(obj, "factors", "factor graph file"):
        name = str(_expect(entry, "name", "factor entry"))
        nb = []
        for rname in _expect(entry, "nb", f"factor {name!r}"):
            if rname not in index:
                raise ValueError(f"factor {name!r} names unknown root {rname!r}")
            nb.append(index[rname])
        flat = _from_pairs(_expect(entry, "table", f"factor {name!r}"), f"table of {name!r}")
        shape = tuple(roots[i][1] for i in nb)
        expected = int(np.prod(shape)) if shape else 1
        if flat.size != expected:
            raise ValueError(
                f"table of factor {name!r} has {flat.size} entries, expected {expected}"
            )
        table = flat.reshape(shape, order="F")
        factors.append((name, nb, table))
    return FactorGraphNet(roots, factors)


# -- path helpers ------------------------------------------------------------


def load_json(path) -> dict:
    text = Path(path).read_text()
    return json.loads(text)


def save_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=False) + "\n")
