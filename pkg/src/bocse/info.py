"""Plug-in entropy, mutual information and conditional mutual information.

All quantities are in bits and use empirical relative frequencies of the
observed joint patterns (no bias correction). Arguments are either
:class:`ColumnSet` objects or plain arrays: a 1-D array is one column, a 2-D
``(T, k)`` array is ``k`` columns. ``None`` or a zero-column selection is the
empty variable.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .boolean import Dataset

# products of alphabet sizes below this are packed into one int64 key
_PACK_LIMIT = 1 << 62


@dataclass(frozen=True)
class ColumnSet:
    """A selection of input and/or output columns of one dataset."""

    dataset: Dataset
    inputs: tuple = ()
    outputs: tuple = ()

    def __post_init__(self):
        ins = tuple(int(j) for j in self.inputs)
        outs = tuple(int(j) for j in self.outputs)
        for j in ins:
            if not 0 <= j < self.dataset.n_inputs:
                raise IndexError(f"input column {j} out of range")
        for j in outs:
            if not 0 <= j < self.dataset.n_outputs:
                raise IndexError(f"output column {j} out of range")
        object.__setattr__(self, "inputs", ins)
        object.__setattr__(self, "outputs", outs)

    @property
    def T(self) -> int:
        return self.dataset.T

    def values(self) -> np.ndarray:
        X = self.dataset.inputs[:, list(self.inputs)]
        Y = self.dataset.outputs[:, list(self.outputs)]
        return np.concatenate([X, Y], axis=1)

    def alphabet_sizes(self) -> tuple:
        a = self.dataset.alphabet_sizes
        return tuple(a[j] for j in self.inputs) + (2,) * len(self.outputs)

    def __or__(self, other: "ColumnSet") -> "ColumnSet":
        if other.dataset is not self.dataset:
            raise ValueError("column sets belong to different datasets")
        ins = self.inputs + tuple(j for j in other.inputs if j not in self.inputs)
        outs = self.outputs + tuple(j for j in other.outputs if j not in self.outputs)
        return ColumnSet(self.dataset, ins, outs)


@dataclass(frozen=True)
class PatternCounts:
    """Observed joint patterns and their counts; zero counts are never stored."""

    counts: dict
    total: int


def _matrix(obj):
    """Return ``(values (T, k), alphabet sizes, owning dataset or None)``."""
    if isinstance(obj, ColumnSet):
        return obj.values(), obj.alphabet_sizes(), obj.dataset
    arr = np.asarray(obj)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("expected a column or a (T, k) matrix")
    if arr.size and (arr.min() < 0 or arr.max() > 254):
        raise ValueError("symbols must lie in [0, 255)")
    arr = arr.astype(np.uint8)
    sizes = tuple(max(2, int(c.max()) + 1) for c in arr.T) if arr.size else (1,) * arr.shape[1]
    return arr, sizes, None


def _collect(*objs):
    """Resolve arguments to matrices; check that they share rows and dataset."""
    mats, owner, T = [], None, None
    for obj in objs:
        if obj is None:
            mats.append(None)
            continue
        M, sizes, ds = _matrix(obj)
        if ds is not None:
            if owner is not None and ds is not owner:
                raise ValueError("columns come from different datasets")
            owner = ds
        if T is not None and M.shape[0] != T:
            raise ValueError("columns have different numbers of rows")
        T = M.shape[0]
        mats.append((M, sizes))
    if T is None or T < 1:
        raise ValueError("entropy of an empty dataset is undefined")
    return T, [(np.zeros((T, 0), np.uint8), ()) if m is None else m for m in mats]


def joint_codes(M: np.ndarray, sizes=None) -> np.ndarray:
    """Dense codes ``0..m-1`` identifying the distinct rows of ``M``.

    Rows are packed into one int64 key when the product of the alphabet sizes
    fits, otherwise compared as byte rows. Codes are ordered by key, so they
    do not depend on row order.
    """
    T, k = M.shape
    if k == 0:
        return np.zeros(T, dtype=np.int64)
    if sizes is None:
        sizes = tuple(max(2, int(c.max()) + 1) for c in M.T)
    radix = 1
    strides = np.empty(k, dtype=np.int64)
    for j, a in enumerate(sizes):
        strides[j] = radix
        radix *= int(a)
        if radix >= _PACK_LIMIT:
            break
    else:
        key = M.astype(np.int64) @ strides
        return np.unique(key, return_inverse=True)[1].astype(np.int64)
    rows = np.ascontiguousarray(M, dtype=np.uint8).view(np.dtype((np.void, k)))[:, 0]
    return np.unique(rows, return_inverse=True)[1].astype(np.int64)


def pattern_counts(cols) -> PatternCounts:
    T, [(M, _)] = _collect(cols)
    return PatternCounts(dict(Counter(map(tuple, M.tolist()))), T)


def _sum_xlogx(codes, T):
    counts = np.bincount(codes)
    counts = counts[counts > 0]
    return float((counts * np.log2(counts)).sum())


def _entropy_of(M, sizes, T):
    if M.shape[1] == 0:
        return 0.0
    s = _sum_xlogx(joint_codes(M, sizes), T)
    h = float(np.log2(T)) - s / T
    return h if h > kernels.ZERO_TOL else 0.0


def entropy(cols) -> float:
    """Plug-in Shannon entropy of the joint pattern of ``cols`` (bits)."""
    T, [(M, sizes)] = _collect(cols)
    return _entropy_of(M, sizes, T)


def joint_entropy(*cols) -> float:
    T, mats = _collect(*cols)
    M = np.concatenate([m for m, _ in mats], axis=1)
    sizes = sum((s for _, s in mats), ())
    return _entropy_of(M, sizes, T)


def conditional_entropy(Y, X=None) -> float:
    """``H(Y | X) = H(X, Y) - H(X)``; clipped at 0."""
    T, [(MY, sy), (MX, sx)] = _collect(Y, X)
    hxy = _entropy_of(np.concatenate([MX, MY], axis=1), sx + sy, T)
    h = hxy - _entropy_of(MX, sx, T)
    return h if h > kernels.ZERO_TOL else 0.0


def mutual_information(X, Y) -> float:
    """``I(X;Y)``; equal to the CMI with an empty conditioning set."""
    return conditional_mutual_information(X, Y, None)


@lru_cache(maxsize=8)
def _xlogx(T):
    return kernels.xlog2x_table(T)


def xlog2x(T):
    """Shared ``c*log2(c)`` lookup for tables with total count ``T``."""
    return _xlogx(int(T))


@dataclass(frozen=True)
class Cells:
    """Rows grouped into ``(z, y)`` cells, cells of equal ``z`` contiguous."""

    cell: np.ndarray     # (T,) cell id per row
    starts: np.ndarray   # first cell of each z group
    ncell: int
    T: int


def make_cells(y_codes: np.ndarray, z_codes: np.ndarray) -> Cells:
    y = np.asarray(y_codes, dtype=np.int64)
    z = np.asarray(z_codes, dtype=np.int64)
    ay = int(y.max()) + 1
    key = z * ay + y
    ukey, cell = np.unique(key, return_inverse=True)
    zc = ukey // ay
    starts = np.flatnonzero(np.r_[True, zc[1:] != zc[:-1]])
    return Cells(cell.astype(np.int64), starts.astype(np.int64), int(ukey.size), int(y.size))


def cmi_batch(xs: np.ndarray, ax: int, cells: Cells) -> np.ndarray:
    """``I(X_j; Y | Z)`` for every column ``j`` of ``xs`` against prepared cells."""
    counts = kernels.contingency(xs, cells.cell, ax, cells.ncell)
    return kernels.cmi_from_counts(counts, cells.starts, xlog2x(cells.T), cells.T)


def conditional_mutual_information(X, Y, Z=None) -> float:
    """Plug-in ``I(X;Y|Z)`` in bits; ``Z=None`` gives the mutual information."""
    T, [(MX, sx), (MY, sy), (MZ, sz)] = _collect(X, Y, Z)
    if MX.shape[1] == 0 or MY.shape[1] == 0:
        return 0.0
    x = joint_codes(MX, sx)
    cells = make_cells(joint_codes(MY, sy), joint_codes(MZ, sz))
    ax = int(x.max()) + 1
    if ax > 255:
        # wide joint X: fall back to the entropy identity
        v = (joint_entropy(X, Z) + joint_entropy(Y, Z)
             - joint_entropy(X, Y, Z) - (entropy(Z) if Z is not None else 0.0))
        return float(v) if v > kernels.ZERO_TOL else 0.0
    return float(cmi_batch(x[:, None].astype(np.uint8), ax, cells)[0])
