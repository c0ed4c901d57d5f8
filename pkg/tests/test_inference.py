import json

import numpy as np
import pytest
from scipy.stats import entropy as scipy_entropy

from bocse import (NA, BooleanNetwork, BooleanTable, Dataset, InferenceResult,
                   SignificanceConfig, backward_eliminate, conditional_entropy, fit_truth_table,
                   forward_select, infer_function, infer_network, pairs_from_timeseries,
                   random_network, shift_register, simulate)

from conftest import all_patterns

CFG = SignificanceConfig(permutations=300, seed=1)


def _h(p):
    return float(scipy_entropy([p, 1 - p], base=2)) if 0 < p < 1 else 0.0


def and_data():
    X = np.tile(all_patterns(3), (25, 1))      # X3 irrelevant, T = 200
    return Dataset(X, (X[:, 0] & X[:, 1])[:, None])


def test_forward_and_gate_gains():
    sel = forward_select(and_data(), 0, CFG)
    assert [s.column for s in sel] == [0, 1]
    # exact distribution: H(Y) = h(1/4), H(Y|X1) = h(1/2)/2, H(Y|X1,X2) = 0
    hy, hy_x1 = _h(0.25), 0.5 * _h(0.5)
    assert sel[0].gain == pytest.approx(hy - hy_x1, abs=1e-12)     # 0.3113
    assert sel[1].gain == pytest.approx(hy_x1, abs=1e-12)          # 0.5


def test_forward_constant_and_xor():
    X = all_patterns(3)
    assert forward_select(Dataset(X, np.zeros((8, 1), int)), 0, CFG) == []
    xor = Dataset(np.tile(all_patterns(2), (10, 1)),
                  np.tile(all_patterns(2)[:, 0] ^ all_patterns(2)[:, 1], 10)[:, None])
    assert forward_select(xor, 0, CFG) == []


def test_forward_tie_prefers_lowest_column():
    X = np.tile(all_patterns(2), (20, 1))
    d = Dataset(X, (X[:, 0] & X[:, 1])[:, None])  # symmetric in both inputs
    assert [s.column for s in forward_select(d, 0, CFG)] == [0, 1]


def test_forward_respects_max_parents():
    assert len(forward_select(and_data(), 0, CFG, max_parents=1)) == 1


def test_backward_duplicate_removed_by_tie_rule():
    X = np.tile(all_patterns(2), (30, 1))
    X = np.column_stack([X, X[:, 0]])            # column 2 duplicates column 0
    d = Dataset(X, (X[:, 0] & X[:, 1])[:, None])
    kept = backward_eliminate(d, 0, [0, 1, 2], CFG)
    assert len(kept) == 2 and 1 in kept
    assert sorted(kept) == [1, 2]                # lowest duplicate goes first


def test_backward_keeps_exact_parents_and_empty():
    d = and_data()
    assert sorted(backward_eliminate(d, 0, [0, 1], CFG)) == [0, 1]
    assert backward_eliminate(d, 0, [], CFG) == []


def test_fit_truth_table_urinary(urinary):
    table, occ = fit_truth_table(urinary, 1, [0, 2])
    assert table.to_string() == "0001"
    # lexicographic (X1, X3) rows: 00, 01, 10, 11 -> indices 0, 2, 1, 3
    lex = [occ[0], occ[2], occ[1], occ[3]]
    np.testing.assert_allclose(lex, [40 / 120, 20 / 120, 10 / 120, 50 / 120])
    table, occ = fit_truth_table(urinary, 0, [3, 4, 5])
    idx = [sum(b << j for j, b in enumerate(bits))
           for bits in all_patterns(3)]          # lexicographic -> bit index
    assert [int(table.entries[i]) for i in idx] == [0, NA, 0, NA, 1, 0, 1, 1]
    np.testing.assert_allclose([occ[i] * 120 for i in idx], [30, 0, 10, 0, 10, 21, 20, 29])
    assert occ.sum() == pytest.approx(1.0)


def test_fit_truth_table_majority_and_errors():
    X = np.array([[0], [0], [0], [1], [1]])
    d = Dataset(X, np.array([[1], [1], [0], [0], [1]]))
    table, _ = fit_truth_table(d, 0, [0])
    assert table.to_string() == "11"              # 2/3 -> 1, tie 1/2 -> 1
    np.testing.assert_allclose(table.fractions, [2 / 3, 0.5])
    tern = Dataset(np.array([[0], [2]]), np.array([[0], [1]]))
    with pytest.raises(ValueError):
        fit_truth_table(tern, 0, [0])
    with pytest.raises(ValueError):
        fit_truth_table(d, 0, [0, 0])


def test_noiseless_fit_reproduces_rows():
    net = random_network(8, 3, np.random.default_rng(4))
    d = pairs_from_timeseries(simulate(net, np.ones(8, np.uint8), 300, np.random.default_rng(0)))
    for i in range(8):
        res = infer_function(d, i, CFG)
        assert (res.predict(d.inputs) == d.outputs[:, i]).all()
        assert set(np.unique(res.table.fractions[~np.isnan(res.table.fractions)])) <= {0.0, 1.0}


def test_copy_of_x7():
    X = np.random.default_rng(6).integers(0, 2, size=(200, 10))
    d = Dataset(X, X[:, [6]])
    res = infer_function(d, 0, CFG)
    assert res.parents == (6,)
    assert res.table.to_string() == "01"
    assert res.residual_uncertainty == 0.0


def test_residual_and_forward_monotonicity():
    rng = np.random.default_rng(7)
    X = rng.integers(0, 2, size=(400, 6))
    y = (X[:, 0] & X[:, 1]) | X[:, 4]
    y = y ^ (rng.random(400) < 0.05)
    d = Dataset(X, y[:, None])
    res = infer_function(d, 0, CFG)
    hs = [conditional_entropy(d.outputs_of([0]), d.inputs_of(list(res.forward_order[:k])))
          for k in range(len(res.forward) + 1)]
    assert all(a >= b - 1e-12 for a, b in zip(hs, hs[1:]))
    assert set(res.parents) <= set(res.forward_order)
    assert res.table.arity == len(res.parents)


def test_shift_register_network_recovery():
    traj = simulate(shift_register(5), [1, 0, 1, 1, 0], 100, np.random.default_rng(0))
    res = infer_network(pairs_from_timeseries(traj), CFG)
    assert (res.adjacency() == np.roll(np.eye(5, dtype=np.uint8), -1, axis=1)).all()


def test_constant_network_has_no_edges():
    zero = BooleanTable.constant(0, 1)
    X = np.random.default_rng(1).integers(0, 2, size=(100, 4))
    d = Dataset(X, np.zeros((100, 4), int))
    assert infer_network(d, CFG).adjacency().sum() == 0


def test_network_inference_is_thread_count_invariant():
    net = random_network(10, 2, np.random.default_rng(3))
    d = pairs_from_timeseries(simulate(net, np.zeros(10, np.uint8), 300,
                                       np.random.default_rng(1)))
    a = infer_network(d, CFG, jobs=1)
    b = infer_network(d, CFG, jobs=4)
    assert a.to_json(d) == b.to_json(d)


def test_predict_na_policies_and_roundtrip(urinary):
    res = infer_function(urinary, 0, CFG)
    assert res.input_names == urinary.input_names
    unseen = np.zeros((1, 6), np.uint8)
    unseen[0, 5] = 1                               # X4=0, X6=1 never observed
    got = {}
    for policy in ("majority", "default0"):
        got[policy] = int(res.predict(unseen, policy)[0])
    assert got["default0"] == 0 and got["majority"] == res.majority
    with pytest.raises(ValueError):
        res.predict(unseen, "error")
    doc = json.loads(json.dumps(res.to_dict(urinary)))
    back = InferenceResult.from_dict(doc)
    assert back.parents == res.parents and back.table == res.table
    assert back.forward_order == res.forward_order
    assert "N/A" in res.report(urinary)


def test_invalid_target():
    with pytest.raises(IndexError):
        infer_function(and_data(), 3, CFG)
