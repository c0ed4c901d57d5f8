"""Experiment harness: random-network benchmarks, hold-out evaluation,
uncertainty curves and sub-sampling stability.

Every realization draws from its own stream ``derive_rng(seed, tag, ...)``,
so results do not depend on scheduling and ``jobs > 1`` (process pool)
reproduces the serial numbers exactly.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .boolean import BooleanNetwork, Dataset, random_network, simulate
from .inference import InferenceResult, infer_function, infer_network
from .info import conditional_entropy
from .oracle import essential_adjacency
from .significance import SignificanceConfig, derive_rng

# stream tags under the master seed
_NET, _DATA, _SUB = 11, 12, 13


def geometric_grid(lo: int = 16, hi: int = 16384, factor: float = 2.0) -> list[int]:
    """Integers ``lo, lo*factor, ...`` up to and including ``hi``."""
    if lo < 1 or hi < lo or factor <= 1:
        raise ValueError("need 1 <= lo <= hi and factor > 1")
    out, v = [], float(lo)
    while v <= hi * (1 + 1e-9):
        t = int(round(v))
        if not out or t > out[-1]:
            out.append(t)
        v *= factor
    return out


@dataclass
class BenchResult:
    """Per grid point mean and standard deviation of each metric."""

    grid_name: str
    grid: list
    metrics: dict            # name -> (means, stds), both lists aligned with grid
    reps: int
    seed: int
    extra: dict = field(default_factory=dict)   # name -> list aligned with grid

    def rows(self) -> list[dict]:
        out = []
        for i, g in enumerate(self.grid):
            row = {self.grid_name: g}
            for name, (mu, sd) in self.metrics.items():
                row[f"{name}_mean"] = mu[i]
                row[f"{name}_std"] = sd[i]
            for name, vals in self.extra.items():
                row[name] = vals[i]
            row["reps"] = self.reps
            row["seed"] = self.seed
            out.append(row)
        return out

    def to_csv(self) -> str:
        rows = self.rows()
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"grid_name": self.grid_name, "grid": list(self.grid), "reps": self.reps,
                "seed": self.seed,
                "metrics": {k: {"mean": list(m), "std": list(s)}
                            for k, (m, s) in self.metrics.items()},
                "extra": {k: list(v) for k, v in self.extra.items()}}


def _fmt(v):
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return v


def _summarize(samples: np.ndarray):
    """Column means and population standard deviations, ignoring NaN."""
    samples = np.asarray(samples, dtype=float)
    ok = ~np.isnan(samples)
    cnt = ok.sum(axis=0)
    tot = np.where(ok, samples, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mu = np.where(cnt > 0, tot / np.maximum(cnt, 1), np.nan)
        var = np.where(ok, (samples - mu) ** 2, 0.0).sum(axis=0) / np.maximum(cnt, 1)
    sd = np.where(cnt > 0, np.sqrt(var), np.nan)
    return [float(x) for x in mu], [float(x) for x in sd]


def _check_grid(grid, name):
    grid = [int(t) for t in grid]
    if not grid:
        raise ValueError(f"{name} is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"{name} must be strictly ascending")
    if grid[0] < 1:
        raise ValueError(f"{name} values must be positive")
    return grid


def _map(func, tasks, jobs):
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [func(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, tasks))


# --------------------------------------------------------------------------
# random-network data and scoring
# --------------------------------------------------------------------------

def network_pairs(net: BooleanNetwork, T: int, rng: np.random.Generator,
                  segment: int | None = None) -> Dataset:
    """``T`` transition pairs ``(s(t), s(t+1))`` from a network.

    With ``segment=None`` the pairs come from one trajectory started at a
    uniform random state. Otherwise the trajectory is restarted from a fresh
    uniform state every ``segment`` steps, which keeps deterministic networks
    from settling on a short attractor; ``segment=1`` gives i.i.d. uniform
    inputs.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    seg = T if segment is None else int(segment)
    if seg < 1:
        raise ValueError("segment must be at least 1")
    X, Y = [], []
    left = T
    while left > 0:
        m = min(seg, left)
        init = rng.integers(0, 2, size=net.n, dtype=np.uint8)
        s = simulate(net, init, m, rng)
        X.append(s[:-1])
        Y.append(s[1:])
        left -= m
    names = tuple(net.names) if net.names else tuple(f"x{j + 1}" for j in range(net.n))
    return Dataset(np.concatenate(X), np.concatenate(Y), names,
                   tuple(f"{s}'" for s in names), (2,) * net.n)


def edge_errors(A_true: np.ndarray, A_hat: np.ndarray, self_loops: bool = False) -> dict:
    """False-positive and false-negative rates of an inferred adjacency.

    ``A[i, j] = 1`` means ``j`` is a parent of ``i``. Without self-loops the
    diagonal is left out of both rates and its positives are counted apart.
    """
    A_true = np.asarray(A_true, dtype=bool)
    A_hat = np.asarray(A_hat, dtype=bool)
    n = A_true.shape[0]
    mask = np.ones((n, n), dtype=bool)
    if not self_loops:
        np.fill_diagonal(mask, False)
    pos = int((A_true & mask).sum())
    neg = int(mask.sum()) - pos
    fp = int((A_hat & ~A_true & mask).sum())
    fn = int((A_true & ~A_hat & mask).sum())
    return {
        "fpr": fp / neg if neg else float("nan"),
        "fnr": fn / pos if pos else float("nan"),
        "fp": fp,
        "fn": fn,
        "self_fp": 0 if self_loops else int(np.diag(A_hat & ~A_true).sum()),
    }


def _sweep(data, T_grid, cfg, max_parents):
    """Inferred adjacency for each prefix length in ``T_grid``."""
    for T in T_grid:
        sub = data.subset(np.arange(T))
        yield T, infer_network(sub, cfg, max_parents, fit=False).adjacency()


def _realization(seed, tag, n, K, rep, T_max, segment, self_loops, noise):
    net = random_network(n, K, derive_rng(seed, _NET, tag, n, K, rep), include_self=self_loops)
    truth = essential_adjacency(net)
    if noise:
        net = net.with_noise(noise)
    data = network_pairs(net, T_max, derive_rng(seed, _DATA, tag, n, K, rep), segment)
    return net, truth, data


def _min_samples_task(args):
    seed, n, K, rep, T_grid, cfg, segment, self_loops, noise, max_parents = args
    _, truth, data = _realization(seed, 1, n, K, rep, T_grid[-1], segment, self_loops, noise)
    for T, A in _sweep(data, T_grid, cfg, max_parents):
        if np.array_equal(A.astype(bool), truth.astype(bool)):
            return T, False
    return T_grid[-1], True


def bench_min_samples(n_grid, K: int, reps: int, T_grid=None,
                      cfg: SignificanceConfig | None = None, seed: int = 0,
                      segment: int | None = 20, self_loops: bool = False, noise: float = 0.0,
                      max_parents: int | None = None, jobs: int = 1) -> BenchResult:
    """Smallest grid ``T`` at which the whole network is recovered exactly.

    Runs that never match are recorded at the grid maximum and counted in the
    ``censored`` column.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    T_grid = _check_grid(T_grid or geometric_grid(), "T grid")
    n_grid = _check_grid(n_grid, "n grid")
    cfg = cfg or SignificanceConfig()
    tasks = [(seed, n, K, r, T_grid, cfg, segment, self_loops, noise, max_parents)
             for n in n_grid for r in range(reps)]
    out = _map(_min_samples_task, tasks, jobs)
    minT = np.array([t for t, _ in out], dtype=float).reshape(len(n_grid), reps)
    cens = np.array([c for _, c in out]).reshape(len(n_grid), reps)
    mu, sd = _summarize(minT.T)
    return BenchResult("n", n_grid, {"min_T": (mu, sd)}, reps, seed,
                       {"censored": [int(c) for c in cens.sum(axis=1)]})


def _error_task(args):
    seed, n, K, rep, T_grid, cfg, segment, self_loops, noise, max_parents = args
    _, truth, data = _realization(seed, 2, n, K, rep, T_grid[-1], segment, self_loops, noise)
    res = []
    for _, A in _sweep(data, T_grid, cfg, max_parents):
        e = edge_errors(truth, A, self_loops)
        res.append((e["fpr"], e["fnr"], e["self_fp"]))
    return res


def bench_error_ratios(n: int = 50, K: int = 3, T_grid=None, reps: int = 50,
                       cfg: SignificanceConfig | None = None, seed: int = 0,
                       segment: int | None = 20, self_loops: bool = False,
                       noise: float = 0.0, max_parents: int | None = None,
                       jobs: int = 1) -> BenchResult:
    """Mean FPR and FNR against the essential supports for each ``T``.

    The data of one realization are nested: the ``T``-sample dataset is the
    first ``T`` pairs of the largest one.
    """
    if reps < 1:
        raise ValueError("reps must be at least 1")
    T_grid = _check_grid(T_grid or geometric_grid(), "T grid")
    cfg = cfg or SignificanceConfig()
    tasks = [(seed, n, K, r, T_grid, cfg, segment, self_loops, noise, max_parents)
             for r in range(reps)]
    out = np.array(_map(_error_task, tasks, jobs), dtype=float)   # (reps, grid, 3)
    return BenchResult("T", T_grid,
                       {"fpr": _summarize(out[:, :, 0]), "fnr": _summarize(out[:, :, 1])},
                       reps, seed, {"self_fp_total": [int(v) for v in out[:, :, 2].sum(axis=0)]})


# --------------------------------------------------------------------------
# hold-out evaluation and curves
# --------------------------------------------------------------------------

def _test_columns(result: InferenceResult, test: Dataset):
    if result.input_names:
        missing = [result.input_names[p] for p in result.parents
                   if result.input_names[p] not in test.input_names]
        if missing:
            raise KeyError(f"test data lacks columns {missing}")
        cols = [test.input_names.index(result.input_names[p]) for p in result.parents]
        name = result.target_name
        if name and name in test.output_names:
            target = test.output_names.index(name)
        elif test.n_outputs == 1:
            target = 0
        else:
            raise KeyError(f"test data lacks output column {name!r}")
    else:
        if result.parents and max(result.parents) >= test.n_inputs:
            raise KeyError("test data has fewer input columns than the model needs")
        cols, target = list(result.parents), result.target
        if target >= test.n_outputs:
            raise KeyError("test data lacks the target column")
    return cols, target


def eval_accuracy(result: InferenceResult, test: Dataset, na_policy: str = "majority"):
    """``(accuracy, FPR, FNR)`` of the fitted table on held-out rows.

    Label 1 is the positive class. A rate with an empty denominator is NaN.
    """
    cols, target = _test_columns(result, test)
    X = np.zeros((test.T, max(result.parents, default=-1) + 1), dtype=np.uint8)
    X[:, list(result.parents)] = test.inputs[:, cols]
    pred = result.predict(X, na_policy).astype(bool)
    y = test.outputs[:, target].astype(bool)
    acc = float((pred == y).mean())
    neg, pos = int((~y).sum()), int(y.sum())
    fpr = float((pred & ~y).sum() / neg) if neg else float("nan")
    fnr = float((~pred & y).sum() / pos) if pos else float("nan")
    return acc, fpr, fnr


def uncertainty_curve(data: Dataset, order, target: int = 0) -> list[float]:
    """``[H(Y), H(Y|X_o1), H(Y|X_o1, X_o2), ...]`` for the given column order."""
    order = [int(j) for j in order]
    for j in order:
        if not 0 <= j < data.n_inputs:
            raise IndexError(f"input column {j} out of range")
    if len(set(order)) != len(order):
        raise ValueError("order repeats a column")
    Y = data.outputs_of([target])
    return [conditional_entropy(Y, data.inputs_of(order[:k])) for k in range(len(order) + 1)]


def _downsample_task(args):
    data, target, size, rep, cfg, seed, full, max_parents = args
    rng = derive_rng(seed, _SUB, target, size, rep)
    rows = np.sort(rng.choice(data.T, size=size, replace=False))
    got = set(infer_function(data.subset(rows), target, cfg, max_parents, fit=False).parents)
    return len(got - full), len(full - got)


def downsample_stability(data: Dataset, target: int, sizes, reps: int = 50,
                         cfg: SignificanceConfig | None = None, seed: int = 0,
                         max_parents: int | None = None, jobs: int = 1) -> BenchResult:
    """Mean false positive / negative parent counts on random sub-samples,
    measured against the parents inferred from all rows."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    sizes = _check_grid(sizes, "sizes")
    if sizes[-1] > data.T:
        raise ValueError(f"sample size {sizes[-1]} exceeds T = {data.T}")
    cfg = cfg or SignificanceConfig()
    full = set(infer_function(data, target, cfg, max_parents, fit=False).parents)
    tasks = [(data, target, s, r, cfg, seed, full, max_parents)
             for s in sizes for r in range(reps)]
    out = np.array(_map(_downsample_task, tasks, jobs), dtype=float).reshape(len(sizes), reps, 2)
    return BenchResult("size", sizes,
                       {"fp": _summarize(out[:, :, 0].T), "fn": _summarize(out[:, :, 1].T)},
                       reps, seed, {"full_parents": [" ".join(map(str, sorted(full)))] * len(sizes)})
