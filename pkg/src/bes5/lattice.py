"""Superset/subset reductions over arrays indexed by rule bitmasks.

Base ``i`` of a universe with ``n`` rules is the set of rules whose bits are
set in ``i``.  An axis of length ``2**n`` can therefore be folded over all
supersets (or subsets) of each index in ``n`` vectorised passes.
"""
from __future__ import annotations

import numpy as np


def _fold(arr: np.ndarray, nbits: int, axis: int, op, upward: bool) -> np.ndarray:
    out = np.moveaxis(np.array(arr, copy=True), axis, 0)
    out = np.ascontiguousarray(out)
    size = out.shape[0]
    if size != 1 << nbits:
        raise ValueError(f"axis length {size} is not 2**{nbits}")
    rest = out.shape[1:]
    for j in range(nbits):
        view = out.reshape((size >> (j + 1), 2, 1 << j) + rest)
        if upward:
            op(view[:, 0], view[:, 1], out=view[:, 0])
        else:
            op(view[:, 1], view[:, 0], out=view[:, 1])
    return np.moveaxis(out, 0, axis)


def all_supersets(arr, nbits, axis=0):
    """``out[i] = AND of arr[j] over all j ⊇ i``."""
    return _fold(arr, nbits, axis, np.logical_and, True)


def any_superset(arr, nbits, axis=0):
    return _fold(arr, nbits, axis, np.logical_or, True)


def all_subsets(arr, nbits, axis=0):
    return _fold(arr, nbits, axis, np.logical_and, False)


def any_subset(arr, nbits, axis=0):
    return _fold(arr, nbits, axis, np.logical_or, False)


def or_supersets(arr, nbits, axis=0):
    """Bitwise OR of integer labels over all supersets."""
    return _fold(arr, nbits, axis, np.bitwise_or, True)


def popcount(x: int) -> int:
    return bin(x).count("1")
