"""Hot counting kernels with interchangeable numba and numpy backends.

Every kernel exists twice: a ``_nb`` loop version compiled with numba and a
vectorised ``_np`` version. The public names dispatch on
:data:`bocse._accel.USE_NUMBA`; :data:`BACKENDS` exposes both so the
benchmark and the equivalence tests can call either one explicitly.

Information quantities are computed from integer count tables through the
identity ``T*H = T*log2(T) - sum(c*log2(c))``; the ``T*log2(T)`` terms cancel
in a conditional mutual information, so only ``sum(c*log2(c))`` sums are
needed. ``c*log2(c)`` comes from a shared lookup table, which keeps the two
backends within a few ulps of each other.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

#: CMI values below this many bits are treated as exactly zero.
ZERO_TOL = 1e-12


def xlog2x_table(n):
    """Return ``L`` with ``L[c] = c * log2(c)`` for ``c = 0..n`` (``L[0] = 0``)."""
    c = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1, dtype=np.float64)
    out[1:] = c[1:] * np.log2(c[1:])
    return out


# --------------------------------------------------------------------------
# contingency tables
# --------------------------------------------------------------------------

def _contingency_np(xs, cell, ax, ncell):
    T, J = xs.shape
    idx = (np.arange(J, dtype=np.int64) * ax + xs.astype(np.int64)) * ncell
    idx += cell[:, None]
    counts = np.bincount(idx.ravel(), minlength=J * ax * ncell)
    return counts.reshape(J, ax, ncell)


def _contingency_py(xs, cell, ax, ncell):
    T, J = xs.shape
    out = np.zeros((J, ax, ncell), dtype=np.int64)
    for t in range(T):
        c = cell[t]
        for j in range(J):
            out[j, xs[t, j], c] += 1
    return out


def _permuted_contingency_np(x, perms, cell, ax, ncell):
    R, T = perms.shape
    xs = x[perms].astype(np.int64)
    idx = (np.arange(R, dtype=np.int64)[:, None] * ax + xs) * ncell
    idx += cell[None, :]
    counts = np.bincount(idx.ravel(), minlength=R * ax * ncell)
    return counts.reshape(R, ax, ncell)


def _permuted_contingency_py(x, perms, cell, ax, ncell):
    R, T = perms.shape
    out = np.zeros((R, ax, ncell), dtype=np.int64)
    for r in range(R):
        for t in range(T):
            out[r, x[perms[r, t]], cell[t]] += 1
    return out


# --------------------------------------------------------------------------
# conditional mutual information from count tables
# --------------------------------------------------------------------------

def _cmi_from_counts_np(counts, starts, L, T):
    # counts: (R, ax, ncell), cells grouped by z; starts: first cell of each z
    s_xyz = L[counts].sum(axis=(1, 2))
    xz = np.add.reduceat(counts, starts, axis=2)
    s_xz = L[xz].sum(axis=(1, 2))
    yz = counts.sum(axis=1)
    s_yz = L[yz].sum(axis=1)
    z = np.add.reduceat(yz, starts, axis=1)
    s_z = L[z].sum(axis=1)
    out = ((s_xyz - s_xz) + (s_z - s_yz)) / T
    out[out < ZERO_TOL] = 0.0
    return out


def _cmi_from_counts_py(counts, starts, L, T):
    R, ax, ncell = counts.shape
    nz = starts.shape[0]
    out = np.empty(R, dtype=np.float64)
    for r in range(R):
        s_xyz = 0.0
        s_xz = 0.0
        s_yz = 0.0
        s_z = 0.0
        for g in range(nz):
            lo = starts[g]
            hi = starts[g + 1] if g + 1 < nz else ncell
            for x in range(ax):
                acc = 0
                for c in range(lo, hi):
                    v = counts[r, x, c]
                    s_xyz += L[v]
                    acc += v
                s_xz += L[acc]
            ztot = 0
            for c in range(lo, hi):
                tot = 0
                for x in range(ax):
                    tot += counts[r, x, c]
                s_yz += L[tot]
                ztot += tot
            s_z += L[ztot]
        v = ((s_xyz - s_xz) + (s_z - s_yz)) / T
        out[r] = v if v >= ZERO_TOL else 0.0
    return out


# --------------------------------------------------------------------------
# synchronous network simulation
# --------------------------------------------------------------------------

def _simulate_np(parents, arity, tables, flips, init):
    """Iterate the network; return (states, t_bad) with t_bad = -1 on success.

    On failure only ``states[: t_bad + 1]`` is meaningful.
    """
    T, n = flips.shape
    states = np.empty((T + 1, n), dtype=np.uint8)
    states[0] = init
    kmax = parents.shape[1]
    weights = np.zeros((n, kmax), dtype=np.int64)
    for j in range(kmax):
        weights[:, j] = np.where(j < arity, 1 << j, 0)
    rows = np.arange(n)
    for t in range(T):
        idx = (states[t][parents].astype(np.int64) * weights).sum(axis=1)
        out = tables[rows, idx]
        if (out < 0).any():
            return states, t
        states[t + 1] = out.astype(np.uint8) ^ flips[t]
    return states, -1


def _simulate_py(parents, arity, tables, flips, init):
    T, n = flips.shape
    states = np.empty((T + 1, n), dtype=np.uint8)
    for i in range(n):
        states[0, i] = init[i]
    for t in range(T):
        for i in range(n):
            idx = 0
            for j in range(arity[i]):
                idx |= np.int64(states[t, parents[i, j]]) << j
            v = tables[i, idx]
            if v < 0:
                return states, t
            states[t + 1, i] = np.uint8(v) ^ flips[t, i]
    return states, -1


_contingency_nb = njit(_contingency_py)
_permuted_contingency_nb = njit(_permuted_contingency_py)
_cmi_from_counts_nb = njit(_cmi_from_counts_py)
_simulate_nb = njit(_simulate_py)

BACKENDS = {
    "numpy": {
        "contingency": _contingency_np,
        "permuted_contingency": _permuted_contingency_np,
        "cmi_from_counts": _cmi_from_counts_np,
        "simulate": _simulate_np,
    },
    "numba": {
        "contingency": _contingency_nb,
        "permuted_contingency": _permuted_contingency_nb,
        "cmi_from_counts": _cmi_from_counts_nb,
        "simulate": _simulate_nb,
    },
}

_active = BACKENDS["numba" if USE_NUMBA else "numpy"]


def contingency(xs, cell, ax, ncell):
    """Count table ``out[j, x, c]`` of candidate column ``j`` against cell ids.

    ``xs`` is a ``(T, J)`` symbol matrix with values ``< ax``; ``cell`` holds
    ``T`` cell ids ``< ncell``.
    """
    xs = np.ascontiguousarray(xs, dtype=np.uint8)
    cell = np.ascontiguousarray(cell, dtype=np.int64)
    return _active["contingency"](xs, cell, int(ax), int(ncell))


def permuted_contingency(x, perms, cell, ax, ncell):
    """Count tables of ``x[perms[r]]`` against ``cell`` for each row of ``perms``."""
    x = np.ascontiguousarray(x, dtype=np.uint8)
    perms = np.ascontiguousarray(perms, dtype=np.int64)
    cell = np.ascontiguousarray(cell, dtype=np.int64)
    return _active["permuted_contingency"](x, perms, cell, int(ax), int(ncell))


def cmi_from_counts(counts, starts, L, T):
    """Plug-in ``I(X;Y|Z)`` in bits for each ``(ax, ncell)`` table in ``counts``.

    Cells must be sorted so that all cells sharing a ``z`` value are
    contiguous; ``starts`` lists the first cell of every ``z`` group.
    Values below :data:`ZERO_TOL` are returned as exactly 0.
    """
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    return _active["cmi_from_counts"](counts, starts, L, float(T))


def simulate_states(parents, arity, tables, flips, init):
    parents = np.ascontiguousarray(parents, dtype=np.int64)
    arity = np.ascontiguousarray(arity, dtype=np.int64)
    tables = np.ascontiguousarray(tables, dtype=np.int8)
    flips = np.ascontiguousarray(flips, dtype=np.uint8)
    init = np.ascontiguousarray(init, dtype=np.uint8)
    return _active["simulate"](parents, arity, tables, flips, init)
