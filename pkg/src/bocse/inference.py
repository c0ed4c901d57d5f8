"""Greedy causation-entropy search for minimal Boolean functions.

For one output column the search runs in two stages:

* forward selection appends, one at a time, the input with the largest
  conditional mutual information with the output given the inputs chosen so
  far, as long as that value passes the permutation test;
* backward elimination then repeatedly drops the selected input whose
  conditional mutual information given the others is smallest, for as long as
  that value is *not* significant.

The surviving inputs are tabulated into a truth table by majority vote per
observed pattern. Column ids are 0-based everywhere in the API.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .boolean import NA, BooleanTable, Dataset, pattern_indices
from .info import cmi_batch, conditional_entropy, joint_codes, make_cells
from .significance import CmiTestResult, SignificanceConfig, derive_rng, test_prepared

FORWARD, BACKWARD = 0, 1
_TIE = 1e-12


class Selection(NamedTuple):
    column: int
    gain: float
    p_value: float


@dataclass(frozen=True)
class InferenceResult:
    target: int
    forward: tuple          # Selection per forward step, in order
    parents: tuple          # surviving columns, sorted ascending
    table: BooleanTable | None
    occurrences: np.ndarray | None
    residual_uncertainty: float
    majority: int           # majority output in the training data (ties -> 1)
    eliminated: tuple = ()  # (column, cmi, p_value) per backward removal
    input_names: tuple = ()
    target_name: str = ""

    @property
    def forward_order(self) -> tuple:
        return tuple(s.column for s in self.forward)

    def predict(self, inputs: np.ndarray, na_policy: str = "majority") -> np.ndarray:
        """Evaluate the fitted table on rows of the full input matrix.

        ``na_policy`` decides unseen patterns: ``"majority"`` (training
        majority class), ``"default0"`` or ``"error"``.
        """
        if self.table is None:
            raise ValueError("no truth table was fitted")
        inputs = np.asarray(inputs)
        if self.parents:
            cols = inputs[:, list(self.parents)]
            if (cols > 1).any():
                raise ValueError("parent columns must be Boolean")
            idx = pattern_indices(cols)
        else:
            idx = np.zeros(inputs.shape[0], dtype=np.int64)
        out = self.table.entries[idx].astype(np.int64)
        missing = out == NA
        if missing.any():
            if na_policy == "error":
                raise ValueError(f"{int(missing.sum())} rows hit unobserved patterns")
            if na_policy == "majority":
                out[missing] = self.majority
            elif na_policy == "default0":
                out[missing] = 0
            else:
                raise ValueError(f"unknown na_policy {na_policy!r}")
        return out.astype(np.uint8)

    def to_dict(self, data: Dataset | None = None) -> dict:
        xn = data.input_names if data is not None else None
        doc = {
            "target": self.target,
            "forward": [
                {"column": s.column, "gain": s.gain, "p_value": s.p_value} for s in self.forward
            ],
            "parents": list(self.parents),
            "eliminated": [
                {"column": c, "cmi": v, "p_value": p} for c, v, p in self.eliminated
            ],
            "residual_uncertainty": self.residual_uncertainty,
            "majority": self.majority,
        }
        if xn is None and self.input_names:
            xn = self.input_names
        if xn is not None:
            doc["target_name"] = (data.output_names[self.target] if data is not None
                                  else self.target_name)
            doc["input_names"] = list(xn)
            doc["forward_names"] = [xn[s.column] for s in self.forward]
            doc["parent_names"] = [xn[j] for j in self.parents]
        if self.table is not None:
            doc["table"] = {
                "arity": self.table.arity,
                "entries": self.table.to_string(),
                "counts": self.table.counts.tolist(),
                "fractions": [None if np.isnan(f) else float(f) for f in self.table.fractions],
            }
            doc["occurrences"] = self.occurrences.tolist()
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "InferenceResult":
        """Inverse of :meth:`to_dict`."""
        forward = tuple(Selection(int(s["column"]), float(s["gain"]), float(s["p_value"]))
                        for s in doc["forward"])
        table = occ = None
        if "table" in doc:
            t = doc["table"]
            fr = np.array([np.nan if f is None else f for f in t["fractions"]], dtype=float)
            entries = BooleanTable.from_string(t["entries"]).entries
            table = BooleanTable(int(t["arity"]), entries,
                                 np.asarray(t["counts"], dtype=np.int64), fr)
            occ = np.asarray(doc["occurrences"], dtype=float)
        elim = tuple((int(e["column"]), float(e["cmi"]), float(e["p_value"]))
                     for e in doc.get("eliminated", ()))
        return cls(int(doc["target"]), forward, tuple(int(p) for p in doc["parents"]), table,
                   occ, float(doc["residual_uncertainty"]), int(doc["majority"]), elim,
                   tuple(doc.get("input_names", ())), doc.get("target_name", ""))

    def report(self, data: Dataset) -> str:
        """Human-readable summary with the fitted table and occurrence column."""
        xn = data.input_names
        lines = [f"target: {data.output_names[self.target]}"]
        lines.append("forward selection:")
        for s in self.forward:
            lines.append(f"  {xn[s.column]:<24} gain={s.gain:.6f} bits  p={s.p_value:.4f}")
        for c, v, p in self.eliminated:
            lines.append(f"  eliminated {xn[c]} (cmi={v:.6f}, p={p:.4f})")
        lines.append("parents: " + (", ".join(xn[j] for j in self.parents) or "(none)"))
        lines.append(f"residual uncertainty H(Y|parents) = {self.residual_uncertainty:.6f} bits")
        if self.table is not None:
            lines.append(self.table.format([xn[j] for j in self.parents],
                                           data.output_names[self.target], self.occurrences))
        return "\n".join(lines)


@dataclass(frozen=True)
class NetworkInferenceResult:
    nodes: tuple

    def adjacency(self) -> np.ndarray:
        """``A[i, j] = 1`` iff input ``j`` is a parent of output ``i``."""
        n = len(self.nodes)
        width = max([n] + [len(r.input_names) for r in self.nodes]
                    + [max(r.parents) + 1 for r in self.nodes if r.parents])
        A = np.zeros((n, width), dtype=np.uint8)
        for i, res in enumerate(self.nodes):
            A[i, list(res.parents)] = 1
        return A

    def to_dict(self, data: Dataset | None = None) -> dict:
        return {
            "nodes": [r.to_dict(data) for r in self.nodes],
            "adjacency": self.adjacency().tolist(),
        }

    def to_json(self, data: Dataset | None = None, **kwargs) -> str:
        return json.dumps(self.to_dict(data), **kwargs)


# --------------------------------------------------------------------------

def _check(data: Dataset, target: int) -> np.ndarray:
    if not isinstance(data, Dataset):
        raise TypeError("data must be a Dataset")
    if not 0 <= target < data.n_outputs:
        raise IndexError(f"output column {target} out of range")
    return data.outputs[:, target].astype(np.int64)


def _cells(data: Dataset, y, cond):
    cond = list(cond)
    sizes = tuple(data.alphabet_sizes[j] for j in cond)
    return make_cells(y, joint_codes(data.inputs[:, cond], sizes))


def _argbest(values, columns, best):
    """Lowest column id among those within tolerance of the best value."""
    values = np.asarray(values)
    target = best(values)
    hits = [c for v, c in zip(values, columns) if abs(v - target) <= _TIE]
    return min(hits), float(target)


def forward_select(data: Dataset, target: int, cfg: SignificanceConfig | None = None,
                   max_parents: int | None = None) -> list[Selection]:
    """Greedy forward stage; returns the selections in the order made."""
    selected, _ = _forward(data, target, cfg or SignificanceConfig(), max_parents)
    return selected


def _forward(data, target, cfg, max_parents):
    y = _check(data, target)
    n = data.n_inputs
    limit = n if max_parents is None else min(n, int(max_parents))
    chosen: list[int] = []
    out: list[Selection] = []
    tests: list[CmiTestResult] = []
    while len(chosen) < limit:
        cand = [j for j in range(n) if j not in chosen]
        cells = _cells(data, y, chosen)
        ax = max(data.alphabet_sizes[j] for j in cand)
        gains = cmi_batch(data.inputs[:, cand], ax, cells)
        k, gain = _argbest(gains, cand, np.max)
        rng = derive_rng(cfg.seed, target, FORWARD, len(chosen))
        res = test_prepared(data.inputs[:, k], data.alphabet_sizes[k], cells, cfg, rng,
                            cfg.alpha)
        tests.append(res)
        if not res.significant:
            break
        chosen.append(k)
        out.append(Selection(k, gain, res.p_value))
    return out, tests


def backward_eliminate(data: Dataset, target: int, candidates: Sequence[int],
                       cfg: SignificanceConfig | None = None) -> list[int]:
    """Backward stage; returns the surviving columns in their original order."""
    kept, _ = _backward(data, target, candidates, cfg or SignificanceConfig())
    return kept


def _backward(data, target, candidates, cfg):
    y = _check(data, target)
    kept = [int(c) for c in candidates]
    if len(set(kept)) != len(kept):
        raise ValueError("candidate columns must be distinct")
    removed = []
    step = 0
    while kept:
        values = []
        prepared = []
        for j in kept:
            rest = [c for c in kept if c != j]
            cells = _cells(data, y, rest)
            v = cmi_batch(data.inputs[:, [j]], data.alphabet_sizes[j], cells)[0]
            values.append(v)
            prepared.append(cells)
        k, v = _argbest(values, kept, np.min)
        cells = prepared[kept.index(k)]
        rng = derive_rng(cfg.seed, target, BACKWARD, step)
        res = test_prepared(data.inputs[:, k], data.alphabet_sizes[k], cells, cfg, rng,
                            cfg.backward_alpha)
        if res.significant:
            break
        kept.remove(k)
        removed.append((k, v, res.p_value))
        step += 1
    return kept, removed


def fit_truth_table(data: Dataset, target: int, parents: Sequence[int]):
    """Majority-vote truth table over ``parents`` (sorted ascending).

    Returns ``(table, occurrences)`` where ``occurrences[i]`` is the fraction
    of rows showing pattern ``i``. Unobserved patterns are NA. A pattern whose
    outputs split exactly evenly maps to 1.
    """
    y = _check(data, target)
    parents = sorted(int(p) for p in parents)
    if len(set(parents)) != len(parents):
        raise ValueError("parents must be distinct")
    for p in parents:
        if not 0 <= p < data.n_inputs:
            raise IndexError(f"input column {p} out of range")
        if data.alphabet_sizes[p] > 2:
            raise ValueError(f"input column {data.input_names[p]!r} is not Boolean")
    k = len(parents)
    if k:
        idx = pattern_indices(data.inputs[:, parents])
    else:
        idx = np.zeros(data.T, dtype=np.int64)
    counts = np.bincount(idx, minlength=1 << k)
    ones = np.bincount(idx, weights=y, minlength=1 << k)
    seen = counts > 0
    fractions = np.full(1 << k, np.nan)
    fractions[seen] = ones[seen] / counts[seen]
    entries = np.full(1 << k, NA, dtype=np.int8)
    entries[seen] = (2 * ones[seen] >= counts[seen]).astype(np.int8)
    table = BooleanTable(k, entries, counts, fractions)
    return table, counts / data.T


def infer_function(data: Dataset, target: int, cfg: SignificanceConfig | None = None,
                   max_parents: int | None = None, fit: bool = True) -> InferenceResult:
    """Forward selection, backward elimination, then truth-table fitting.

    With ``fit=False`` no table is built, which allows non-Boolean inputs.
    """
    cfg = cfg or SignificanceConfig()
    forward, _ = _forward(data, target, cfg, max_parents)
    kept, removed = _backward(data, target, [s.column for s in forward], cfg)
    parents = tuple(sorted(kept))
    y = data.outputs[:, target]
    table = occ = None
    if fit:
        table, occ = fit_truth_table(data, target, parents)
    residual = conditional_entropy(data.outputs_of([target]), data.inputs_of(parents))
    majority = int(2 * int(y.sum()) >= data.T)
    return InferenceResult(target, tuple(forward), parents, table, occ, residual,
                           majority, tuple(removed), tuple(data.input_names),
                           data.output_names[target])


def infer_network(data: Dataset, cfg: SignificanceConfig | None = None,
                  max_parents: int | None = None, fit: bool = True,
                  jobs: int = 1) -> NetworkInferenceResult:
    """Run :func:`infer_function` on every output column.

    Each node draws from its own seeded streams, so ``jobs > 1`` (thread
    pool) returns exactly the serial result.
    """
    cfg = cfg or SignificanceConfig()
    targets = range(data.n_outputs)
    if jobs == 1:
        nodes = [infer_function(data, i, cfg, max_parents, fit) for i in targets]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            nodes = list(pool.map(lambda i: infer_function(data, i, cfg, max_parents, fit),
                                  targets))
    return NetworkInferenceResult(tuple(nodes))
