"""Brute-force references for small instances.

``exhaustive_minimal_subset`` solves the minimal-sufficient-subset problem by
enumerating every input subset up to a given size; ``exact_support`` reads the
essential inputs straight off a truth table. Both are used as ground truth
for the greedy search.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .boolean import BooleanNetwork, BooleanTable, Dataset
from .info import _sum_xlogx, joint_codes

MAX_SUBSETS = 10**7
_TIE = 1e-12


@dataclass(frozen=True)
class OracleResult:
    minimal_sets: tuple   # tuples of 0-based column ids, each sorted
    max_mi: float


def exhaustive_minimal_subset(data: Dataset, target: int, kmax: int) -> OracleResult:
    """All smallest input subsets (size <= ``kmax``) maximising ``I(X^K; Y)``."""
    n = data.n_inputs
    if not 0 <= kmax <= n:
        raise ValueError(f"kmax must lie in [0, {n}]")
    budget = sum(comb(n, k) for k in range(kmax + 1))
    if budget > MAX_SUBSETS:
        raise ValueError(f"{budget} subsets exceed the enumeration budget of {MAX_SUBSETS}")
    T = data.T
    y = data.outputs[:, target].astype(np.int64)
    s_y = _sum_xlogx(y, T)
    h_y = float(np.log2(T)) - s_y / T
    scored = []
    for k in range(kmax + 1):
        for K in itertools.combinations(range(n), k):
            sizes = tuple(data.alphabet_sizes[j] for j in K)
            x = joint_codes(data.inputs[:, list(K)], sizes)
            # I = H(X) + H(Y) - H(X,Y), written with sum c*log2(c) terms
            s_x = _sum_xlogx(x, T)
            s_xy = _sum_xlogx(x * 2 + y, T)
            mi = h_y + (s_xy - s_x) / T
            scored.append((K, max(mi, 0.0)))
    best = max(v for _, v in scored)
    optimal = [K for K, v in scored if v >= best - _TIE]
    m = min(len(K) for K in optimal)
    return OracleResult(tuple(K for K in optimal if len(K) == m), float(best))


def essential_inputs(table: BooleanTable) -> tuple:
    """Positions ``j`` such that flipping input ``j`` changes the output somewhere."""
    if table.has_na:
        raise ValueError("table has undefined (NA) entries")
    idx = np.arange(table.size)
    return tuple(j for j in range(table.arity)
                 if (table.entries != table.entries[idx ^ (1 << j)]).any())


def exact_support(net: BooleanNetwork, node: int) -> tuple:
    """Declared parents of ``node`` that its truth table actually depends on."""
    if net.noise[node] != 0:
        raise ValueError("exact support is defined for noiseless nodes only")
    parents = net.neighbors[node]
    return tuple(parents[j] for j in essential_inputs(net.tables[node]))


def essential_adjacency(net: BooleanNetwork) -> np.ndarray:
    A = np.zeros((net.n, net.n), dtype=np.uint8)
    for i in range(net.n):
        A[i, list(exact_support(net.with_noise(0.0), i))] = 1
    return A
