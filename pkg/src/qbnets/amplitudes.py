"""Dense complex tensors with integer-labeled axes.

A :class:`LabeledAmplitude` pairs a complex ndarray with a sorted tuple
of node indices, one index per axis. Everything amplitude-shaped in this
package (joint tensors, kets over hidden variables, belief-propagation
messages) is one of these, so the alignment and broadcasting rules live
here and nowhere else.

Labels are canonicalized to ascending order; products align shared
labels entrywise and never sum. Summation is always explicit, via
:func:`marginalize` / :meth:`LabeledAmplitude.sum_over`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np


@dataclass(frozen=True, eq=False)
class LabeledAmplitude:
    labels: tuple[int, ...]
    data: np.ndarray

    def card(self, label: int) -> int:
        return self.data.shape[self.labels.index(label)]

    @property
    def size(self) -> int:
        return int(self.data.size)

    def __mul__(self, other: "LabeledAmplitude") -> "LabeledAmplitude":
        return multiply(self, other)

    def sum_over(self, labels: Iterable[int]) -> "LabeledAmplitude":
        drop = sorted(set(labels))
        if not drop:
            return self
        axes = tuple(self.labels.index(l) for l in drop)
        keep = tuple(l for l in self.labels if l not in set(drop))
        return LabeledAmplitude(keep, self.data.sum(axis=axes))

    def slice_at(self, values: Mapping[int, int]) -> "LabeledAmplitude":
        """Fix the given labels at the given states, removing their axes."""
        if not values:
            return self
        idx = tuple(values.get(l, slice(None)) for l in self.labels)
        keep = tuple(l for l in self.labels if l not in values)
        return LabeledAmplitude(keep, self.data[idx])

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def unit(self) -> "LabeledAmplitude":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize an all-zero amplitude")
        return LabeledAmplitude(self.labels, self.data / n)

    def scaled(self, factor: complex) -> "LabeledAmplitude":
        return LabeledAmplitude(self.labels, self.data * factor)

    def item(self) -> complex:
        return complex(self.data.reshape(()).item())

    def allclose(self, other: "LabeledAmplitude", atol: float = 1e-10) -> bool:
        return self.labels == other.labels and np.allclose(
            self.data, other.data, rtol=0.0, atol=atol
        )

    def __repr__(self) -> str:
        return f"LabeledAmplitude(labels={self.labels}, shape={self.data.shape})"


def labeled(labels: Iterable[int], data) -> LabeledAmplitude:
    """Build a LabeledAmplitude, sorting axes into ascending label order."""
    labels = tuple(int(l) for l in labels)
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct")
    arr = np.asarray(data, dtype=np.complex128)
    if arr.ndim != len(labels):
        raise ValueError(
            f"{len(labels)} labels for a rank-{arr.ndim} tensor"
        )
    order = tuple(sorted(range(len(labels)), key=lambda k: labels[k]))
    if order != tuple(range(len(labels))):
        arr = np.transpose(arr, order)
        labels = tuple(labels[k] for k in order)
    return LabeledAmplitude(labels, arr)


def scalar(value: complex) -> LabeledAmplitude:
    return LabeledAmplitude((), np.asarray(value, dtype=np.complex128))


def one_hot(label: int, card: int, value: int) -> LabeledAmplitude:
    if not 0 <= value < card:
        raise ValueError(f"state {value} out of range for cardinality {card}")
    data = np.zeros(card, dtype=np.complex128)
    data[value] = 1.0
    return LabeledAmplitude((int(label),), data)


def multiply(a: LabeledAmplitude, b: LabeledAmplitude) -> LabeledAmplitude:
    """Entrywise product aligning shared labels; result over the label union."""
    out_labels = tuple(sorted(set(a.labels) | set(b.labels)))
    for l in set(a.labels) & set(b.labels):
        if a.card(l) != b.card(l):
            raise ValueError(
                f"label {l} has cardinality {a.card(l)} on one side "
                f"and {b.card(l)} on the other"
            )

    def expand(t: LabeledAmplitude) -> np.ndarray:
        shape = [1] * len(out_labels)
        mine = set(t.labels)
        k = 0
        for pos, l in enumerate(out_labels):
            if l in mine:
                shape[pos] = t.data.shape[k]
                k += 1
        return t.data.reshape(shape)

    return LabeledAmplitude(out_labels, expand(a) * expand(b))


def product(parts: Iterable[LabeledAmplitude]) -> LabeledAmplitude:
    out = scalar(1.0)
    for p in parts:
        out = multiply(out, p)
    return out


def marginalize(amp: LabeledAmplitude, over: Iterable[int]) -> LabeledAmplitude:
    """Complex entrywise sum over the given labels.

    The amplitude analogue of marginalizing a probability table: the
    dropped axes are summed, not squared.
    """
    over = tuple(sorted({int(l) for l in over}))
    unknown = set(over) - set(amp.labels)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}")
    return amp.sum_over(over)
