import json
import warnings

import numpy as np
import pytest

from bocse.datasets import (DataFormatError, LabeledDataset, dataset_to_dict, load_acute_inflammations,
                            load_any, load_csv, load_dataset, load_lendingclub, load_spect,
                            load_tictactoe, save_dataset)

from conftest import DATA_DIR

ACUTE_ROWS = [
    "35,5\tno\tyes\tno\tno\tno\tno\tno",
    "37,9\tno\tno\tyes\tyes\tyes\tyes\tno",
    "38,0\tno\tyes\tyes\tno\tno\tno\tyes",
    "41,2\tyes\tyes\tno\tyes\tyes\tno\tyes",
]


def write_acute(path, rows, encoding="utf-16"):
    path.write_text("\r\n".join(rows) + "\r\n", encoding=encoding)
    return path


def test_acute_parsing_and_threshold(tmp_path):
    path = write_acute(tmp_path / "diagnosis.data", ACUTE_ROWS)
    with pytest.warns(UserWarning, match="120"):
        d = load_acute_inflammations(path)
    assert d.T == 4 and d.n_inputs == 6 and d.n_outputs == 2
    assert d.inputs[:, 0].tolist() == [0, 0, 1, 1]   # 37.9 -> 0, 38.0 -> 1
    assert d.inputs[1].tolist() == [0, 0, 0, 1, 1, 1]
    assert d.outputs.tolist() == [[0, 0], [1, 0], [0, 1], [0, 1]]
    assert d.input_names[3] == "urine pushing"
    assert "38.0" in d.provenance["fever"]


def test_acute_full_size_no_warning(tmp_path):
    path = write_acute(tmp_path / "d.data", ACUTE_ROWS * 30, encoding="utf-8")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert load_acute_inflammations(path).T == 120


def test_acute_malformed(tmp_path):
    path = write_acute(tmp_path / "d.data", ["38,1\tmaybe\tno\tno\tno\tno\tno\tno"])
    with pytest.raises(DataFormatError):
        load_acute_inflammations(path)


def test_spect_files():
    train, test = load_spect(DATA_DIR / "SPECT.train", DATA_DIR / "SPECT.test")
    assert (train.T, test.T) == (80, 187)
    assert train.n_inputs == test.n_inputs == 22
    assert set(np.unique(train.outputs)) == {0, 1}


def test_spect_empty_test_file(tmp_path):
    empty = tmp_path / "SPECT.test"
    empty.write_text("")
    with pytest.raises(DataFormatError):
        load_spect(DATA_DIR / "SPECT.train", empty)


def test_tictactoe_file():
    d = load_tictactoe(DATA_DIR / "tic-tac-toe.data")
    assert d.T == 958
    assert d.alphabet_sizes == (3,) * 9
    assert int(d.outputs.sum()) == 626
    assert d.input_names[0] == "upper-left" and d.input_names[4] == "center"


_LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6)]


def _endgames():
    """Every terminal board of a game x opens, labelled by whether x won."""
    seen = {}

    def play(board, mover):
        won = [p for p in "xo" if any(all(board[i] == p for i in ln) for ln in _LINES)]
        if won or "b" not in board:
            seen[tuple(board)] = won == ["x"]
            return
        for i, c in enumerate(board):
            if c == "b":
                board[i] = mover
                play(board, "o" if mover == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    return seen


def test_tictactoe_file_is_the_full_endgame_set():
    rows = [ln.split(",") for ln in (DATA_DIR / "tic-tac-toe.data").read_text().split()]
    from_file = {tuple(r[:9]): r[9] == "positive" for r in rows}
    assert len(from_file) == len(rows) == 958
    assert from_file == _endgames()


def test_tictactoe_row_and_errors(tmp_path):
    p = tmp_path / "t.data"
    p.write_text("x,x,x,o,o,b,b,b,b,positive\n")
    d = load_tictactoe(p)
    assert d.outputs.tolist() == [[1]]
    assert d.inputs.tolist() == [[2, 2, 2, 1, 1, 0, 0, 0, 0]]
    p.write_text("x,x,q,o,o,b,b,b,b,positive\n")
    with pytest.raises(DataFormatError, match="q"):
        load_tictactoe(p)


LC_HEADER = ("loan_amnt,term,annual_inc,home_ownership,verification_status,loan_status,"
             "delinq_2yrs,pub_rec,application_type,num_accts_ever_120_pd,num_tl_op_past_12m,"
             "pub_rec_bankruptcies")
LC_ROWS = [
    "10000, 36 months,50000,RENT,Not Verified,Fully Paid,0,0,Individual,0,1,0",
    "20000, 60 months,40000,OWN,Verified,Charged Off,1,1,Joint App,2,0,1",
    "5000, 36 months,100000,MORTGAGE,Source Verified,Current,0,0,Individual,0,0,0",
    "8000, 36 months,40000,RENT,Not Verified,Does not meet the credit policy. Status:Fully Paid,"
    "0,0,Individual,,0,",
    "3000, 60 months,0,RENT,Not Verified,Fully Paid,0,0,Individual,0,0,0",
]


def write_lc(tmp_path, rows=LC_ROWS):
    p = tmp_path / "loans.csv"
    p.write_text(LC_HEADER + "\n" + "\n".join(rows) + "\n")
    return p


def test_lendingclub_rules(tmp_path):
    with pytest.warns(UserWarning, match="dropped 1"):
        d = load_lendingclub(write_lc(tmp_path), threshold=0.2)
    assert d.T == 3                                   # Current and zero income removed
    assert d.outputs[:, 0].tolist() == [1, 0, 1]
    # ratios 0.2, 0.5, 0.2 -> X9 = 0, 1, 0 (r == mu maps to 0)
    assert d.inputs[:, 8].tolist() == [0, 1, 0]
    assert d.inputs[:, 9].tolist() == [0, 1, 0]
    assert d.inputs[1, :8].tolist() == [1, 1, 1, 1, 0, 1, 0, 1]
    assert d.inputs[0, :8].tolist() == [0, 0, 0, 0, 1, 0, 1, 0]
    assert d.provenance["rows excluded by status"] == "1"


def test_lendingclub_median_and_mapping(tmp_path):
    with pytest.warns(UserWarning):
        d = load_lendingclub(write_lc(tmp_path))
    assert "(median)" in d.provenance["X9 loan to income"]
    mapping = tmp_path / "map.json"
    mapping.write_text(json.dumps({"attributes": {"X1 home ownership": ["home_ownership", "in",
                                                                         ["RENT"]]}}))
    with pytest.warns(UserWarning):
        d = load_lendingclub(write_lc(tmp_path), 0.2, mapping)
    assert d.inputs[:, 0].tolist() == [1, 0, 1]


def test_lendingclub_missing_columns(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("loan_amnt,term\n1,2\n")
    with pytest.raises(DataFormatError, match="missing"):
        load_lendingclub(p)


def test_canonical_roundtrip_is_byte_identical(tmp_path):
    d = load_tictactoe(DATA_DIR / "tic-tac-toe.data")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_dataset(d, a)
    save_dataset(load_tictactoe(DATA_DIR / "tic-tac-toe.data"), b)
    assert a.read_bytes() == b.read_bytes()
    back = load_dataset(a)
    assert isinstance(back, LabeledDataset)
    assert (back.inputs == d.inputs).all() and (back.outputs == d.outputs).all()
    assert back.provenance == d.provenance
    save_dataset(back, b)
    assert a.read_bytes() == b.read_bytes()


def test_csv_loader(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("a,b,y\n0,1,1\n1,1,0\n")
    d = load_csv(p)
    assert d.input_names == ("a", "b") and d.output_names == ("y",)
    ts = load_any(p, "csv", timeseries=True)
    assert ts.T == 1 and ts.n_outputs == 3
    with pytest.raises(DataFormatError):
        load_csv(p, outputs=["zzz"])
    assert dataset_to_dict(d)["format"] == "bocse-dataset/1"
