"""Boolean functions, Boolean tables and (stochastic) Boolean networks.

Pattern indexing convention used throughout the package: for a table over
inputs ``(u_0, ..., u_{k-1})`` the pattern index is ``sum(u_j << j)``, i.e.
the first input is bit 0. Printed tables list patterns lexicographically with
the first input as the most significant column.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels

#: Marker for table cells whose pattern was never observed.
NA = -1

NA_POLICIES = ("error", "default0")


class MissingPatternError(ValueError):
    """Raised when a function is evaluated on a pattern with no defined output."""


def pattern_index(bits) -> int:
    """Map an input bit-string (first input = bit 0) to its table row."""
    idx = 0
    for j, b in enumerate(bits):
        b = int(b)
        if b not in (0, 1):
            raise ValueError(f"input bit {j} is {b}, expected 0 or 1")
        idx |= b << j
    return idx


def pattern_bits(index: int, arity: int) -> tuple[int, ...]:
    """Inverse of :func:`pattern_index`."""
    if not 0 <= index < (1 << arity):
        raise ValueError(f"pattern index {index} out of range for arity {arity}")
    return tuple((index >> j) & 1 for j in range(arity))


def pattern_indices(bits: np.ndarray) -> np.ndarray:
    """Vectorised :func:`pattern_index` over the rows of a ``(T, k)`` bit matrix."""
    bits = np.asarray(bits)
    if bits.ndim != 2:
        raise ValueError("expected a 2-D bit matrix")
    weights = np.left_shift(np.int64(1), np.arange(bits.shape[1], dtype=np.int64))
    return bits.astype(np.int64) @ weights


@dataclass(frozen=True, eq=False)
class BooleanTable:
    """A k-ary truth table, possibly with undetermined (NA) rows.

    ``entries[i]`` is 0, 1 or :data:`NA`; ``counts[i]`` is the number of
    observations of pattern ``i`` and ``fractions[i]`` the observed mean
    output (NaN when unobserved). Tables built from a rule rather than from
    data carry ``counts = 1`` and ``fractions = entries`` on every row.
    """

    arity: int
    entries: np.ndarray
    counts: np.ndarray
    fractions: np.ndarray

    def __post_init__(self):
        k = int(self.arity)
        if k < 0:
            raise ValueError("arity must be nonnegative")
        size = 1 << k
        entries = np.asarray(self.entries, dtype=np.int8).reshape(-1)
        counts = np.asarray(self.counts, dtype=np.int64).reshape(-1)
        fractions = np.asarray(self.fractions, dtype=np.float64).reshape(-1)
        if not (entries.size == counts.size == fractions.size == size):
            raise ValueError(f"a table of arity {k} needs {size} cells")
        if not np.isin(entries, (0, 1, NA)).all():
            raise ValueError("entries must be 0, 1 or NA")
        na = entries == NA
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        if not np.array_equal(na, counts == 0) or not np.array_equal(na, np.isnan(fractions)):
            raise ValueError("NA cells must coincide with zero counts and NaN fractions")
        f = fractions[~na]
        if ((f < 0) | (f > 1)).any():
            raise ValueError("fractions must lie in [0, 1]")
        for name, arr in (("entries", entries), ("counts", counts), ("fractions", fractions)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "arity", k)

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_entries(cls, entries: Sequence[int]) -> "BooleanTable":
        """Build a rule table from a full column of outputs (NA allowed)."""
        entries = np.asarray(entries, dtype=np.int8)
        size = entries.size
        k = size.bit_length() - 1
        if size == 0 or (1 << k) != size:
            raise ValueError("number of entries must be a power of two")
        na = entries == NA
        counts = np.where(na, 0, 1)
        fractions = np.where(na, np.nan, entries.astype(np.float64))
        return cls(k, entries, counts, fractions)

    @classmethod
    def from_string(cls, text: str) -> "BooleanTable":
        """Parse ``'0'``/``'1'``/``'-'`` characters, one per pattern index."""
        lookup = {"0": 0, "1": 1, "-": NA}
        try:
            return cls.from_entries([lookup[ch] for ch in text])
        except KeyError as exc:
            raise ValueError(f"bad table character {exc.args[0]!r}") from None

    @classmethod
    def from_function(cls, func, arity: int) -> "BooleanTable":
        """Tabulate ``func(*bits)`` over all ``2**arity`` patterns."""
        return cls.from_entries(
            [int(bool(func(*pattern_bits(i, arity)))) for i in range(1 << arity)]
        )

    @classmethod
    def constant(cls, value: int, arity: int = 0) -> "BooleanTable":
        return cls.from_entries([int(value)] * (1 << arity))

    # -- queries -----------------------------------------------------------
    @property
    def size(self) -> int:
        return 1 << self.arity

    @property
    def has_na(self) -> bool:
        return bool((self.entries == NA).any())

    def to_string(self) -> str:
        return "".join("-" if e == NA else str(int(e)) for e in self.entries)

    def __eq__(self, other):
        if not isinstance(other, BooleanTable):
            return NotImplemented
        return (
            self.arity == other.arity
            and np.array_equal(self.entries, other.entries)
            and np.array_equal(self.counts, other.counts)
            and np.allclose(self.fractions, other.fractions, equal_nan=True)
        )

    def __hash__(self):
        return hash((self.arity, self.entries.tobytes()))

    def __repr__(self):
        return f"BooleanTable(arity={self.arity}, entries='{self.to_string()}')"

    def format(self, names: Sequence[str] | None = None, output: str = "y",
               occurrences: Sequence[float] | None = None) -> str:
        """Render the table as aligned text, one row per input pattern.

        Rows are in lexicographic order with the first input as the leftmost
        (most significant) column. NA outputs print as ``N/A``.
        """
        k = self.arity
        names = list(names) if names is not None else [f"x{j + 1}" for j in range(k)]
        if len(names) != k:
            raise ValueError("one name per input is required")
        header = names + [output]
        if occurrences is not None:
            header.append("occurrence")
        rows = []
        for lex in range(1 << k):
            bits = [(lex >> (k - 1 - j)) & 1 for j in range(k)]
            i = pattern_index(bits)
            e = self.entries[i]
            row = [str(b) for b in bits] + ["N/A" if e == NA else str(int(e))]
            if occurrences is not None:
                row.append(f"{100.0 * occurrences[i]:.2f}%")
            rows.append(row)
        widths = [max(len(h), *(len(r[c]) for r in rows)) if rows else len(h)
                  for c, h in enumerate(header)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
        return "\n".join(lines)


def eval_function(table: BooleanTable, bits, na_policy: str = "error") -> int:
    """Evaluate a deterministic Boolean table on one input bit-string."""
    if na_policy not in NA_POLICIES:
        raise ValueError(f"na_policy must be one of {NA_POLICIES}")
    bits = tuple(bits)
    if len(bits) != table.arity:
        raise ValueError(f"expected {table.arity} input bits, got {len(bits)}")
    value = int(table.entries[pattern_index(bits)])
    if value == NA:
        if na_policy == "error":
            raise MissingPatternError(f"pattern {bits} has no defined output")
        return 0
    return value


def eval_stochastic(table: BooleanTable, bits, q: float, rng: np.random.Generator,
                    na_policy: str = "error") -> int:
    """Evaluate ``f(bits) XOR xi`` with ``xi ~ Bernoulli(q)`` drawn from ``rng``."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    value = eval_function(table, bits, na_policy)
    return value ^ int(rng.random() < q)


@dataclass(frozen=True, eq=False)
class BooleanNetwork:
    """Stochastic Boolean network: parents, truth tables and noise levels.

    Parent lists are stored sorted ascending and each table's bit order
    follows that order. ``noise[i]`` is the flip probability of node ``i``.
    """

    neighbors: tuple
    tables: tuple
    noise: np.ndarray = field(default=None)
    names: tuple | None = None

    def __post_init__(self):
        nbrs = tuple(tuple(int(j) for j in row) for row in self.neighbors)
        n = len(nbrs)
        tables = tuple(self.tables)
        if len(tables) != n:
            raise ValueError("one table per node is required")
        noise = np.zeros(n) if self.noise is None else np.asarray(self.noise, dtype=np.float64)
        if noise.shape != (n,):
            raise ValueError("noise must have one entry per node")
        if ((noise < 0) | (noise > 1)).any():
            raise ValueError("noise levels must lie in [0, 1]")
        for i, (row, tab) in enumerate(zip(nbrs, tables)):
            if len(set(row)) != len(row):
                raise ValueError(f"node {i} lists a parent twice")
            if any(not 0 <= j < n for j in row):
                raise ValueError(f"node {i} has a parent outside [0, {n})")
            if list(row) != sorted(row):
                raise ValueError(f"parents of node {i} must be sorted ascending")
            if tab.arity != len(row):
                raise ValueError(f"table of node {i} has arity {tab.arity}, expected {len(row)}")
        if self.names is not None and len(self.names) != n:
            raise ValueError("one name per node is required")
        noise.setflags(write=False)
        object.__setattr__(self, "neighbors", nbrs)
        object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "noise", noise)
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))

    @property
    def n(self) -> int:
        return len(self.neighbors)

    @property
    def deterministic(self) -> bool:
        return not self.noise.any()

    def adjacency(self) -> np.ndarray:
        """``A[i, j] = 1`` iff ``j`` is a parent of ``i``."""
        A = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, row in enumerate(self.neighbors):
            A[i, list(row)] = 1
        return A

    def with_noise(self, noise) -> "BooleanNetwork":
        noise = np.broadcast_to(np.asarray(noise, dtype=np.float64), (self.n,))
        return BooleanNetwork(self.neighbors, self.tables, noise.copy(), self.names)

    def __eq__(self, other):
        if not isinstance(other, BooleanNetwork):
            return NotImplemented
        return (
            self.neighbors == other.neighbors
            and all(a == b for a, b in zip(self.tables, other.tables))
            and np.array_equal(self.noise, other.noise)
        )

    __hash__ = None

    # -- serialisation -------------------------------------------------------
    def to_dict(self) -> dict:
        doc = {
            "n": self.n,
            "neighbors": [list(row) for row in self.neighbors],
            "tables": [{"arity": t.arity, "entries": t.to_string()} for t in self.tables],
            "noise": [float(q) for q in self.noise],
        }
        if self.names is not None:
            doc["names"] = list(self.names)
        return doc

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "BooleanNetwork":
        try:
            n = int(doc["n"])
            tables = []
            for spec in doc["tables"]:
                tab = BooleanTable.from_string(spec["entries"])
                if tab.arity != int(spec["arity"]):
                    raise ValueError("table arity does not match its entries")
                tables.append(tab)
            net = cls(doc["neighbors"], tables, doc.get("noise"), doc.get("names"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed network document: {exc}") from None
        if net.n != n:
            raise ValueError("'n' disagrees with the neighbor lists")
        return net

    @classmethod
    def from_json(cls, text: str) -> "BooleanNetwork":
        return cls.from_dict(json.loads(text))

    # -- packed form for the simulation kernel ---------------------------------
    def _packed(self):
        n = self.n
        kmax = max([len(r) for r in self.neighbors] + [0])
        parents = np.zeros((n, max(kmax, 1)), dtype=np.int64)
        arity = np.zeros(n, dtype=np.int64)
        tables = np.full((n, 1 << kmax), NA, dtype=np.int8)
        for i, (row, tab) in enumerate(zip(self.neighbors, self.tables)):
            parents[i, : len(row)] = row
            arity[i] = len(row)
            tables[i, : tab.size] = tab.entries
        return parents, arity, tables


def neighbors_from_adjacency(A) -> tuple:
    """Sorted parent lists from an adjacency matrix (inverse of ``adjacency``)."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency matrix must be square")
    return tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in A)


def step_network(net: BooleanNetwork, state, rng: np.random.Generator,
                 na_policy: str = "error") -> np.ndarray:
    """One synchronous update: every node reads the same input ``state``.

    Draws exactly ``n`` uniforms from ``rng`` (one per node), so ``T`` calls
    consume the same stream as :func:`simulate` with ``T`` steps.
    """
    state = np.asarray(state, dtype=np.uint8)
    if state.shape != (net.n,):
        raise ValueError(f"state must have length {net.n}")
    flips = rng.random(net.n) < net.noise
    out = np.empty(net.n, dtype=np.uint8)
    for i, (row, tab) in enumerate(zip(net.neighbors, net.tables)):
        out[i] = eval_function(tab, state[list(row)], na_policy) ^ int(flips[i])
    return out


def simulate(net: BooleanNetwork, init, T: int, rng: np.random.Generator) -> np.ndarray:
    """Return the ``(T + 1, n)`` trajectory ``s(0) = init, s(t) = step(s(t-1))``."""
    if T < 1:
        raise ValueError("T must be at least 1")
    init = np.asarray(init, dtype=np.uint8)
    if init.shape != (net.n,) or (init > 1).any():
        raise ValueError(f"init must be a bit-vector of length {net.n}")
    flips = (rng.random((T, net.n)) < net.noise).astype(np.uint8)
    parents, arity, tables = net._packed()
    states, t_bad = kernels.simulate_states(parents, arity, tables, flips, init)
    if t_bad >= 0:
        raise MissingPatternError(f"undefined table pattern reached at step {t_bad}")
    return states


def random_network(n: int, K: int, rng: np.random.Generator,
                   include_self: bool = False) -> BooleanNetwork:
    """Random ``n``-node network with in-degree ``K`` and fair-coin truth tables."""
    hi = n if include_self else n - 1
    if not 1 <= K <= hi:
        raise ValueError(f"K must lie in [1, {hi}] for n={n}")
    neighbors = []
    tables = []
    for i in range(n):
        pool = np.arange(n) if include_self else np.delete(np.arange(n), i)
        parents = np.sort(rng.choice(pool, size=K, replace=False))
        neighbors.append(tuple(int(j) for j in parents))
        tables.append(BooleanTable.from_entries(rng.integers(0, 2, size=1 << K)))
    return BooleanNetwork(tuple(neighbors), tuple(tables))


def shift_register(n: int) -> BooleanNetwork:
    """``x_i(t+1) = x_{i-1 mod n}(t)``: a cyclic permutation network."""
    ident = BooleanTable.from_entries([0, 1])
    return BooleanNetwork(tuple(((i - 1) % n,) for i in range(n)), (ident,) * n)


# --------------------------------------------------------------------------
# datasets
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Dataset:
    """``T`` rows pairing categorical inputs ``x(t)`` with Boolean outputs ``y(t)``.

    ``inputs`` is a ``(T, n)`` uint8 matrix with column ``j`` taking values
    below ``alphabet_sizes[j]``; ``outputs`` is a ``(T, l)`` bit matrix.
    """

    inputs: np.ndarray
    outputs: np.ndarray
    input_names: tuple | None = None
    output_names: tuple | None = None
    alphabet_sizes: tuple | None = None

    def __post_init__(self):
        X = np.asarray(self.inputs)
        Y = np.asarray(self.outputs)
        if X.ndim == 1:
            X = X[:, None]
        if Y.ndim == 1:
            Y = Y[:, None]
        if X.ndim != 2 or Y.ndim != 2:
            raise ValueError("inputs and outputs must be 2-D")
        if X.shape[0] < 1:
            raise ValueError("a dataset needs at least one row")
        if X.shape[0] != Y.shape[0]:
            raise ValueError("inputs and outputs must have the same number of rows")
        if X.size and ((X < 0).any() or (X > 254).any()):
            raise ValueError("input symbols must lie in [0, 255)")
        if not np.isin(Y, (0, 1)).all():
            raise ValueError("outputs must be 0 or 1")
        X = np.ascontiguousarray(X, dtype=np.uint8)
        Y = np.ascontiguousarray(Y, dtype=np.uint8)
        if self.alphabet_sizes is None:
            sizes = tuple(max(2, int(c.max()) + 1) for c in X.T) if X.size else ()
        else:
            sizes = tuple(int(a) for a in self.alphabet_sizes)
        if len(sizes) != X.shape[1]:
            raise ValueError("one alphabet size per input column is required")
        if X.shape[1] and (X.max(axis=0) >= np.asarray(sizes)).any():
            raise ValueError("input symbol exceeds its column's alphabet size")
        if any(not 1 <= a <= 255 for a in sizes):
            raise ValueError("alphabet sizes must lie in [1, 255]")
        xn = tuple(self.input_names) if self.input_names is not None else \
            tuple(f"x{j + 1}" for j in range(X.shape[1]))
        yn = tuple(self.output_names) if self.output_names is not None else \
            tuple(f"y{j + 1}" for j in range(Y.shape[1]))
        if len(xn) != X.shape[1] or len(yn) != Y.shape[1]:
            raise ValueError("column names must align with columns")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "outputs", Y)
        object.__setattr__(self, "input_names", xn)
        object.__setattr__(self, "output_names", yn)
        object.__setattr__(self, "alphabet_sizes", sizes)

    @property
    def T(self) -> int:
        return self.inputs.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.inputs.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.outputs.shape[1]

    def input_index(self, key) -> int:
        """Resolve an input column given as an int index or a name."""
        return _resolve(key, self.input_names, "input")

    def output_index(self, key) -> int:
        return _resolve(key, self.output_names, "output")

    def subset(self, rows) -> "Dataset":
        """A new dataset on the selected rows (names and alphabets kept)."""
        rows = np.asarray(rows)
        return Dataset(self.inputs[rows], self.outputs[rows], self.input_names,
                       self.output_names, self.alphabet_sizes)

    def inputs_of(self, cols) -> "ColumnSet":
        from .info import ColumnSet

        return ColumnSet(self, tuple(self.input_index(c) for c in cols), ())

    def outputs_of(self, cols) -> "ColumnSet":
        from .info import ColumnSet

        return ColumnSet(self, (), tuple(self.output_index(c) for c in cols))


def _resolve(key, names, kind):
    if isinstance(key, (int, np.integer)):
        if not 0 <= key < len(names):
            raise IndexError(f"{kind} column {key} out of range")
        return int(key)
    try:
        return names.index(key)
    except ValueError:
        raise KeyError(f"unknown {kind} column {key!r}") from None


def pairs_from_timeseries(series, names: Sequence[str] | None = None) -> Dataset:
    """Rearrange a ``(T, n)`` state sequence into pairs ``(x(t), x(t+1))``."""
    series = np.asarray(series, dtype=np.uint8)
    if series.ndim != 2 or series.shape[0] < 2:
        raise ValueError("a time series needs at least two states")
    n = series.shape[1]
    names = tuple(names) if names is not None else tuple(f"x{j + 1}" for j in range(n))
    return Dataset(series[:-1], series[1:], names, tuple(f"{s}'" for s in names), (2,) * n)
