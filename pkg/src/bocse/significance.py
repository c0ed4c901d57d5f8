"""Permutation significance test for conditional mutual information.

The null hypothesis ``I(X;Y|Z) = 0`` is probed by recomputing the CMI after a
uniformly random reordering of the rows of ``X`` alone. Two generators of the
null are available:

``"shuffle"``
    draw explicit row permutations and recount the tables;
``"hypergeometric"``
    sample the shuffled contingency table of ``X`` against the ``(y, z)``
    cells directly. The table of a uniformly permuted column, with its margins
    fixed, follows a sequence of hypergeometric draws, so this gives the same
    null distribution at a cost independent of ``T``.

``"auto"`` picks whichever is cheaper for the table at hand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .info import Cells, _collect, joint_codes, make_cells, xlog2x

NULL_METHODS = ("auto", "hypergeometric", "shuffle")


@dataclass(frozen=True)
class SignificanceConfig:
    """Test level, replicate count and master seed.

    ``alpha_backward`` defaults to ``alpha``.
    """

    alpha: float = 0.05
    permutations: int = 1000
    seed: int = 0
    alpha_backward: float | None = None
    null: str = "auto"

    def __post_init__(self):
        for a in (self.alpha, self.backward_alpha):
            if not 0.0 < a < 1.0:
                raise ValueError("alpha must lie strictly between 0 and 1")
        if int(self.permutations) < 1:
            raise ValueError("permutations must be at least 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.null not in NULL_METHODS:
            raise ValueError(f"null must be one of {NULL_METHODS}")

    @property
    def backward_alpha(self) -> float:
        return self.alpha if self.alpha_backward is None else self.alpha_backward


@dataclass(frozen=True)
class CmiTestResult:
    estimate: float
    null_samples: np.ndarray = field(repr=False)
    threshold: float
    p_value: float
    significant: bool


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent stream for ``(seed, key...)``; stable across runs and schedules."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def order_statistic_threshold(null: np.ndarray, alpha: float) -> float:
    """The ``ceil((1 - alpha) N)``-th smallest null sample."""
    N = null.size
    k = min(max(math.ceil((1.0 - alpha) * N - 1e-9), 1), N)
    return float(np.partition(null, k - 1)[k - 1])


def hypergeometric_tables(margin_x, sizes, N, rng) -> np.ndarray:
    """``N`` random ``(ax, ncell)`` tables with row sums ``margin_x`` and
    column sums ``sizes``, distributed as the table of a uniformly permuted
    column against fixed cells."""
    margin_x = np.asarray(margin_x, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.int64)
    ax, ncell = margin_x.size, sizes.size
    tables = np.zeros((N, ax, ncell), dtype=np.int64)
    rem = np.tile(margin_x, (N, 1))
    live = np.flatnonzero(margin_x)
    for c in range(ncell - 1):
        left = np.full(N, sizes[c], dtype=np.int64)
        pool = rem.sum(axis=1)
        for x in live[:-1]:
            good = rem[:, x]
            bad = pool - good
            k = rng.hypergeometric(good, bad, left)
            tables[:, x, c] = k
            rem[:, x] -= k
            left -= k
            pool = bad
        if live.size:
            tables[:, live[-1], c] = left
            rem[:, live[-1]] -= left
    tables[:, :, ncell - 1] = rem
    return tables


def _null_method(cfg, ax, ncell, T):
    if cfg.null != "auto":
        return cfg.null
    return "hypergeometric" if 3 * ncell * max(ax - 1, 1) <= T else "shuffle"


def null_tables(x, ax, cells: Cells, observed, cfg, rng) -> np.ndarray:
    N = int(cfg.permutations)
    if _null_method(cfg, ax, cells.ncell, cells.T) == "hypergeometric":
        return hypergeometric_tables(observed.sum(axis=1), observed.sum(axis=0), N, rng)
    perms = rng.permuted(np.tile(np.arange(cells.T, dtype=np.int64), (N, 1)), axis=1)
    return kernels.permuted_contingency(x, perms, cells.cell, ax, cells.ncell)


def test_prepared(x, ax, cells: Cells, cfg: SignificanceConfig, rng,
                  alpha: float | None = None) -> CmiTestResult:
    """Permutation test of ``X`` against cells already built from ``(Y, Z)``."""
    alpha = cfg.alpha if alpha is None else alpha
    L = xlog2x(cells.T)
    observed = kernels.contingency(x[:, None], cells.cell, ax, cells.ncell)
    estimate = float(kernels.cmi_from_counts(observed, cells.starts, L, cells.T)[0])
    tables = null_tables(x, ax, cells, observed[0], cfg, rng)
    null = kernels.cmi_from_counts(tables, cells.starts, L, cells.T)
    threshold = order_statistic_threshold(null, alpha)
    exceed = int(np.count_nonzero(null >= estimate - kernels.ZERO_TOL))
    p_value = (1 + exceed) / (1 + null.size)
    significant = estimate > threshold + kernels.ZERO_TOL
    return CmiTestResult(estimate, null, threshold, p_value, bool(significant))


def permutation_test(X, Y, Z=None, cfg: SignificanceConfig | None = None,
                     key=(), alpha: float | None = None) -> CmiTestResult:
    """Test whether the plug-in ``I(X;Y|Z)`` is significantly above zero.

    Only ``X`` is shuffled; ``Y`` and ``Z`` stay aligned. ``key`` selects the
    random stream under ``cfg.seed``, so equal ``(cfg, key)`` give equal
    null samples.
    """
    cfg = cfg or SignificanceConfig()
    T, [(MX, sx), (MY, sy), (MZ, sz)] = _collect(X, Y, Z)
    x = joint_codes(MX, sx)
    ax = int(x.max()) + 1
    if ax > 255:
        raise ValueError("X has too many distinct joint symbols")
    cells = make_cells(joint_codes(MY, sy), joint_codes(MZ, sz))
    return test_prepared(x.astype(np.uint8), ax, cells, cfg, derive_rng(cfg.seed, *key), alpha)
