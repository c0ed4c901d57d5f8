import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bocse import (NA, BooleanNetwork, BooleanTable, Dataset, MissingPatternError, eval_function,
                   eval_stochastic, pairs_from_timeseries, random_network, shift_register,
                   simulate, step_network)
from bocse.boolean import neighbors_from_adjacency, pattern_bits, pattern_index

AND = BooleanTable.from_entries([0, 0, 0, 1])


def test_and_table_evaluation():
    assert eval_function(AND, (1, 1)) == 1
    assert eval_function(AND, (0, 1)) == 0


def test_table_over_x1_x3_reads_first_input_as_bit0():
    # AND of (X1, X3): input (1, 0) -> 0
    assert eval_function(AND, (1, 0)) == 0


def test_arity_mismatch_and_na_policies():
    with pytest.raises(ValueError):
        eval_function(AND, (1,))
    t = BooleanTable.from_string("01-1")
    with pytest.raises(MissingPatternError):
        eval_function(t, (0, 1))
    assert eval_function(t, (0, 1), na_policy="default0") == 0


def test_table_invariants_rejected():
    with pytest.raises(ValueError):
        BooleanTable(2, [0, 1, 0], [1, 1, 1], [0.0, 1.0, 0.0])
    with pytest.raises(ValueError):  # NA must pair with zero count
        BooleanTable(1, [NA, 1], [3, 1], [np.nan, 1.0])
    with pytest.raises(ValueError):
        BooleanTable.from_string("01x")


@given(st.integers(0, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, 2**k - 1))))
def test_pattern_index_roundtrip(args):
    k, i = args
    assert pattern_index(pattern_bits(i, k)) == i


def test_stochastic_extremes():
    rng = np.random.default_rng(0)
    assert all(eval_stochastic(AND, (1, 1), 0.0, rng) == 1 for _ in range(50))
    assert all(eval_stochastic(AND, (1, 1), 1.0, rng) == 0 for _ in range(50))


def test_stochastic_flip_rate():
    rng = np.random.default_rng(1)
    zeros = sum(eval_stochastic(AND, (1, 1), 0.2, rng) == 0 for _ in range(100_000))
    assert abs(zeros / 100_000 - 0.2) <= 0.01


def test_shift_register_step_and_period():
    net = shift_register(5)
    rng = np.random.default_rng(0)
    s = step_network(net, [1, 0, 0, 0, 0], rng)
    assert s.tolist() == [0, 1, 0, 0, 0]
    traj = simulate(net, [1, 0, 0, 0, 0], 5, rng)
    assert traj.shape == (6, 5)
    assert traj[5].tolist() == [1, 0, 0, 0, 0]


def test_constant_network_and_full_noise():
    zero = BooleanTable.constant(0, 1)
    net = BooleanNetwork(tuple((j,) for j in (1, 2, 3, 4, 0)), (zero,) * 5)
    rng = np.random.default_rng(0)
    assert step_network(net, [1, 1, 0, 1, 0], rng).tolist() == [0] * 5
    reg = shift_register(5)
    state = np.array([1, 1, 0, 1, 0], dtype=np.uint8)
    clean = step_network(reg, state, rng)
    noisy = step_network(reg.with_noise(1.0), state, rng)
    assert (noisy == 1 - clean).all()


def test_simulate_matches_repeated_steps():
    net = random_network(8, 2, np.random.default_rng(5)).with_noise(0.1)
    init = np.array([1, 0, 1, 1, 0, 0, 1, 0], dtype=np.uint8)
    traj = simulate(net, init, 30, np.random.default_rng(9))
    rng = np.random.default_rng(9)
    flips = rng.random((30, 8)) < net.noise  # same stream layout as simulate
    s = init
    for t in range(30):
        clean = step_network(net.with_noise(0.0), s, rng)
        s = clean ^ flips[t].astype(np.uint8)
        assert (traj[t + 1] == s).all()


def test_simulate_deterministic_and_flip_rate():
    net = random_network(6, 2, np.random.default_rng(3))
    a = simulate(net, np.zeros(6, np.uint8), 50, np.random.default_rng(7))
    b = simulate(net, np.zeros(6, np.uint8), 50, np.random.default_rng(7))
    assert (a == b).all()
    ident = BooleanNetwork(((0,),), (BooleanTable.from_entries([0, 1]),), noise=(0.1,))
    s = simulate(ident, [0], 100_000, np.random.default_rng(11))[:, 0]
    assert abs(float((s[1:] != s[:-1]).mean()) - 0.1) <= 0.01


def test_simulate_rejects_bad_arguments():
    net = shift_register(3)
    with pytest.raises(ValueError):
        simulate(net, [0, 1, 0], 0, np.random.default_rng())
    with pytest.raises(ValueError):
        simulate(net, [0, 2, 0], 3, np.random.default_rng())
    partial = BooleanNetwork(((0,),), (BooleanTable.from_string("1-"),))
    with pytest.raises(MissingPatternError):
        simulate(partial, [0], 3, np.random.default_rng())


def test_pairs_from_timeseries():
    series = np.array([[0, 1], [1, 1]])
    d = pairs_from_timeseries(series)
    assert d.T == 1 and d.n_outputs == 2
    with pytest.raises(ValueError):
        pairs_from_timeseries(series[:1])
    traj = simulate(shift_register(5), [1, 0, 1, 1, 0], 12, np.random.default_rng())
    d = pairs_from_timeseries(traj)
    assert (d.outputs == np.roll(d.inputs, 1, axis=1)).all()


def test_pairs_consistent_with_tables():
    net = random_network(7, 3, np.random.default_rng(21))
    d = pairs_from_timeseries(simulate(net, np.ones(7, np.uint8), 40, np.random.default_rng(2)))
    for t in range(d.T):
        for i in range(net.n):
            bits = d.inputs[t, list(net.neighbors[i])]
            assert d.outputs[t, i] == eval_function(net.tables[i], bits)


def test_random_network_shape_and_reproducibility():
    net = random_network(3, 1, np.random.default_rng(0))
    assert all(len(p) == 1 and i not in p for i, p in enumerate(net.neighbors))
    big = random_network(50, 3, np.random.default_rng(4))
    assert (big.adjacency().sum(axis=1) == 3).all()
    again = random_network(50, 3, np.random.default_rng(4))
    assert big == again
    with pytest.raises(ValueError):
        random_network(4, 4, np.random.default_rng())
    assert len(random_network(4, 4, np.random.default_rng(), include_self=True).neighbors[0]) == 4


def test_random_tables_are_fair_coins():
    ones = total = 0
    for seed in range(200):
        net = random_network(10, 3, np.random.default_rng(seed))
        ones += sum(int(t.entries.sum()) for t in net.tables)
        total += 10 * 8
    sigma = np.sqrt(0.25 / total)
    assert abs(ones / total - 0.5) <= 3 * sigma


def test_adjacency_roundtrip_and_json():
    net = random_network(9, 2, np.random.default_rng(8)).with_noise(0.05)
    assert neighbors_from_adjacency(net.adjacency()) == net.neighbors
    doc = json.loads(net.to_json())
    assert set(doc) >= {"n", "neighbors", "tables", "noise"}
    assert BooleanNetwork.from_json(net.to_json()) == net


def test_step_is_pure_without_noise():
    net = random_network(12, 3, np.random.default_rng(1))
    s = np.random.default_rng(2).integers(0, 2, 12)
    a = step_network(net, s, np.random.default_rng(3))
    b = step_network(net, s, np.random.default_rng(99))
    assert (a == b).all()


def test_table_format_marks_unseen_rows():
    t = BooleanTable(2, [0, NA, 1, 1], [3, 0, 2, 5], [0.0, np.nan, 1.0, 1.0])
    text = t.format(["a", "b"], "y", occurrences=[0.3, 0.0, 0.2, 0.5])
    assert "N/A" in text and "30.00%" in text


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), np.full((3, 1), 2))
    with pytest.raises(ValueError):
        Dataset(np.zeros((0, 2)), np.zeros((0, 1)))
    d = Dataset(np.array([[0, 2], [1, 0]]), np.array([[1], [0]]))
    assert d.alphabet_sizes == (2, 3)
    with pytest.raises(ValueError):
        Dataset(np.array([[0, 2]]), np.array([[1]]), alphabet_sizes=(2, 2))
