"""Loaders for the case-study datasets and the canonical dataset file format.

Raw formats handled here:

* UCI Acute Inflammations (``diagnosis.data``): UTF-16 or UTF-8 text,
  tab/space separated, decimal comma in the temperature column, yes/no flags.
* UCI SPECT Heart (``SPECT.train`` / ``SPECT.test``): comma separated, class
  label first, 22 binary features.
* UCI Tic-Tac-Toe Endgame (``tic-tac-toe.data``): nine ``x``/``o``/``b``
  squares and a ``positive``/``negative`` label.
* A LendingClub loan export in CSV with a header row.

The canonical format is a single JSON document holding the header (names,
alphabets, provenance) and the sample matrices as base64 byte strings.
"""
from __future__ import annotations

import base64
import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .boolean import Dataset

FORMAT_TAG = "bocse-dataset/1"


@dataclass(frozen=True, eq=False)
class LabeledDataset(Dataset):
    """A :class:`Dataset` with a title and per-column provenance notes."""

    title: str = ""
    provenance: dict = field(default_factory=dict)

    def plain(self) -> Dataset:
        return Dataset(self.inputs, self.outputs, self.input_names, self.output_names,
                       self.alphabet_sizes)

    def subset(self, rows) -> "LabeledDataset":
        rows = np.asarray(rows)
        return LabeledDataset(self.inputs[rows], self.outputs[rows], self.input_names,
                              self.output_names, self.alphabet_sizes, self.title,
                              dict(self.provenance))


class DataFormatError(ValueError):
    """A raw data file does not match its expected layout."""


def _read_text(path) -> str:
    raw = Path(path).read_bytes()
    if raw[:2] in (b"\xff\xfe", b"\xfe\xff"):
        return raw.decode("utf-16")
    if len(raw) > 1 and raw[1:2] == b"\x00":
        return raw.decode("utf-16-le")
    try:
        return raw.decode("utf-8-sig")
    except UnicodeDecodeError:
        return raw.decode("latin-1")


# --------------------------------------------------------------------------
# Acute Inflammations
# --------------------------------------------------------------------------

ACUTE_INPUTS = ("fever", "nausea", "lumbar pain", "urine pushing", "micturition pains",
                "burning of urethra")
ACUTE_OUTPUTS = ("inflammation of urinary bladder", "nephritis of renal pelvis origin")
FEVER_THRESHOLD = 38.0
_YES_NO = {"yes": 1, "no": 0}


def load_acute_inflammations(path) -> LabeledDataset:
    """Six Boolean symptoms and two Boolean diagnoses per patient.

    Temperature becomes ``fever = 1`` when it is at least 38.0 degrees.
    A row count other than 120 only warns.
    """
    X, Y = [], []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) != 8:
            raise DataFormatError(f"{path}:{lineno}: expected 8 fields, got {len(fields)}")
        try:
            temp = float(fields[0].replace(",", "."))
            flags = [_YES_NO[f.lower()] for f in fields[1:]]
        except (ValueError, KeyError):
            raise DataFormatError(f"{path}:{lineno}: cannot parse {line.strip()!r}") from None
        X.append([int(temp >= FEVER_THRESHOLD)] + flags[:5])
        Y.append(flags[5:])
    if not X:
        raise DataFormatError(f"{path}: no data rows")
    if len(X) != 120:
        warnings.warn(f"{path}: expected 120 patients, read {len(X)}")
    prov = {"fever": f"temperature >= {FEVER_THRESHOLD} C -> 1"}
    prov.update({name: "yes -> 1, no -> 0" for name in ACUTE_INPUTS[1:] + ACUTE_OUTPUTS})
    return LabeledDataset(np.array(X), np.array(Y), ACUTE_INPUTS, ACUTE_OUTPUTS, (2,) * 6,
                          title="acute inflammations", provenance=prov)


# --------------------------------------------------------------------------
# SPECT Heart
# --------------------------------------------------------------------------

SPECT_INPUTS = tuple(f"F{j}" for j in range(1, 23))


def _read_spect(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 23 or any(f not in ("0", "1") for f in fields):
            raise DataFormatError(f"{path}:{lineno}: expected 23 comma-separated bits")
        rows.append([int(f) for f in fields])
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    return np.array(rows, dtype=np.uint8)


def load_spect(train_path, test_path) -> tuple[LabeledDataset, LabeledDataset]:
    """Training and validation splits: label column first, then F1..F22."""
    out = []
    for path, split in ((train_path, "train"), (test_path, "test")):
        M = _read_spect(path)
        prov = {"OVERALL_DIAGNOSIS": "class label as recorded in the first column"}
        out.append(LabeledDataset(M[:, 1:], M[:, :1], SPECT_INPUTS, ("OVERALL_DIAGNOSIS",),
                                  (2,) * 22, title=f"SPECT {split}", provenance=prov))
    return out[0], out[1]


# --------------------------------------------------------------------------
# Tic-Tac-Toe
# --------------------------------------------------------------------------

TICTACTOE_INPUTS = ("upper-left", "upper-middle", "upper-right", "middle-left", "center",
                    "middle-right", "lower-left", "lower-middle", "lower-right")
TICTACTOE_CODES = {"b": 0, "o": 1, "x": 2}


def load_tictactoe(path) -> LabeledDataset:
    """Nine ternary squares (row-major from upper-left); output 1 iff X wins."""
    X, Y = [], []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip():
            continue
        fields = [f.strip().lower() for f in line.split(",")]
        if len(fields) != 10:
            raise DataFormatError(f"{path}:{lineno}: expected 10 fields, got {len(fields)}")
        try:
            X.append([TICTACTOE_CODES[f] for f in fields[:9]])
        except KeyError as exc:
            raise DataFormatError(f"{path}:{lineno}: unknown square symbol {exc.args[0]!r}") \
                from None
        if fields[9] not in ("positive", "negative"):
            raise DataFormatError(f"{path}:{lineno}: unknown label {fields[9]!r}")
        Y.append(int(fields[9] == "positive"))
    if not X:
        raise DataFormatError(f"{path}: no data rows")
    mapping = "x -> 2 (board value +1), o -> 1 (board value -1), b -> 0 (empty)"
    prov = {name: mapping for name in TICTACTOE_INPUTS}
    prov["x wins"] = "positive -> 1, negative -> 0"
    return LabeledDataset(np.array(X), np.array(Y), TICTACTOE_INPUTS, ("x wins",), (3,) * 9,
                          title="tic-tac-toe endgame", provenance=prov)


# --------------------------------------------------------------------------
# LendingClub
# --------------------------------------------------------------------------

#: Default raw-column rules for the 2019 export. Each Boolean attribute is
#: ``(raw column, rule, argument)``; rules: ``in`` (value in list), ``gt0``
#: (numeric > 0, blank counts as 0), ``contains`` (substring).
LENDINGCLUB_DEFAULTS = {
    "attributes": {
        "X1 home ownership": ["home_ownership", "in", ["OWN", "MORTGAGE"]],
        "X2 delinquency 2y": ["delinq_2yrs", "gt0", None],
        "X3 income verified": ["verification_status", "in", ["Verified", "Source Verified"]],
        "X4 public record": ["pub_rec", "gt0", None],
        "X5 individual application": ["application_type", "in", ["Individual", "INDIVIDUAL"]],
        "X6 ever 120 days past due": ["num_accts_ever_120_pd", "gt0", None],
        "X7 new account 12m": ["num_tl_op_past_12m", "gt0", None],
        "X8 bankruptcies": ["pub_rec_bankruptcies", "gt0", None],
    },
    "loan_amount": "loan_amnt",
    "annual_income": "annual_inc",
    "term": "term",
    "status": "loan_status",
    "excluded_status": ["Current"],
    "paid_marker": "Fully Paid",
}
LTI_NAME = "X9 loan to income"
TERM_NAME = "X10 60-month term"


def _number(text):
    text = text.strip().replace(",", "")
    return float(text) if text else 0.0


def _apply_rule(value, rule, arg):
    if rule == "in":
        return int(value.strip() in arg)
    if rule == "gt0":
        return int(_number(value) > 0)
    if rule == "contains":
        return int(arg in value)
    raise ValueError(f"unknown rule {rule!r}")


def load_lendingclub(path, threshold: float | None = None,
                     mapping: dict | str | Path | None = None) -> LabeledDataset:
    """Boolean loan attributes X1..X10 and ``Y = 1`` iff fully paid.

    Loans with an excluded status (``Current``) are dropped, as are rows whose
    annual income is zero or blank. The loan-to-income ratio is thresholded
    at ``threshold`` or, when omitted, at the median over the kept rows:
    ``X9 = 1`` iff ratio > threshold.
    """
    cfg = json.loads(json.dumps(LENDINGCLUB_DEFAULTS))
    if mapping is not None:
        if not isinstance(mapping, dict):
            mapping = json.loads(Path(mapping).read_text())
        attrs = mapping.pop("attributes", {})
        cfg["attributes"].update(attrs)
        cfg.update(mapping)
    attrs = cfg["attributes"]
    required = {spec[0] for spec in attrs.values()}
    required |= {cfg["loan_amount"], cfg["annual_income"], cfg["term"], cfg["status"]}
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        missing = required - set(reader.fieldnames or ())
        if missing:
            raise DataFormatError(f"{path}: missing required columns {sorted(missing)}")
        X, Y, ratio = [], [], []
        dropped_income = excluded = 0
        for row in reader:
            status = row[cfg["status"]].strip()
            if status in cfg["excluded_status"]:
                excluded += 1
                continue
            try:
                income = _number(row[cfg["annual_income"]])
                amount = _number(row[cfg["loan_amount"]])
                bits = [_apply_rule(row[c], rule, arg) for c, rule, arg in attrs.values()]
            except ValueError as exc:
                raise DataFormatError(f"{path}:{reader.line_num}: {exc}") from None
            if income <= 0:
                dropped_income += 1
                continue
            bits.append(int("60" in row[cfg["term"]]))
            X.append(bits)
            ratio.append(amount / income)
            Y.append(int(cfg["paid_marker"] in status))
    if not X:
        raise DataFormatError(f"{path}: no usable loans")
    if dropped_income:
        warnings.warn(f"{path}: dropped {dropped_income} rows with zero or blank income")
    ratio = np.asarray(ratio)
    mu = float(np.median(ratio)) if threshold is None else float(threshold)
    X = np.asarray(X, dtype=np.uint8)
    lti = (ratio > mu).astype(np.uint8)
    # column order X1..X8, X9 = LTI, X10 = term
    X = np.concatenate([X[:, :-1], lti[:, None], X[:, -1:]], axis=1)
    names = tuple(attrs) + (LTI_NAME, TERM_NAME)
    prov = {name: f"{c} {rule} {arg}" if arg is not None else f"{c} {rule}"
            for name, (c, rule, arg) in attrs.items()}
    prov[LTI_NAME] = (f"{cfg['loan_amount']}/{cfg['annual_income']} > {mu!r}"
                      + (" (median)" if threshold is None else ""))
    prov[TERM_NAME] = f"'60' in {cfg['term']}"
    prov["fully paid"] = f"'{cfg['paid_marker']}' in {cfg['status']}"
    prov["rows excluded by status"] = str(excluded)
    prov["rows dropped for income"] = str(dropped_income)
    return LabeledDataset(X, np.asarray(Y), names, ("fully paid",), (2,) * 10,
                          title="lendingclub", provenance=prov)


# --------------------------------------------------------------------------
# generic CSV and the canonical JSON format
# --------------------------------------------------------------------------

def load_csv(path, outputs=None, timeseries: bool = False) -> Dataset:
    """Integer-symbol CSV with a header row.

    With ``timeseries=True`` every row is a network state and the dataset
    pairs consecutive rows. Otherwise ``outputs`` names the Boolean output
    columns (default: the last column) and the rest are inputs.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DataFormatError(f"{path}: need a header and at least one row")
    header = [h.strip() for h in rows[0]]
    try:
        M = np.array([[int(v) for v in r] for r in rows[1:] if r], dtype=np.int64)
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}") from None
    if M.ndim != 2 or M.shape[1] != len(header):
        raise DataFormatError(f"{path}: ragged rows")
    if timeseries:
        from .boolean import pairs_from_timeseries

        return pairs_from_timeseries(M, header)
    outputs = [header[-1]] if outputs is None else list(outputs)
    missing = [o for o in outputs if o not in header]
    if missing:
        raise DataFormatError(f"{path}: unknown output columns {missing}")
    oi = [header.index(o) for o in outputs]
    ii = [j for j in range(len(header)) if j not in oi]
    return Dataset(M[:, ii], M[:, oi], [header[j] for j in ii], outputs)


def dataset_to_dict(ds: Dataset) -> dict:
    doc = {
        "format": FORMAT_TAG,
        "T": ds.T,
        "input_names": list(ds.input_names),
        "output_names": list(ds.output_names),
        "alphabet_sizes": list(ds.alphabet_sizes),
        "inputs": base64.b64encode(ds.inputs.tobytes()).decode("ascii"),
        "outputs": base64.b64encode(np.packbits(ds.outputs, axis=None).tobytes()).decode("ascii"),
    }
    if isinstance(ds, LabeledDataset):
        doc["title"] = ds.title
        doc["provenance"] = dict(ds.provenance)
    return doc


def dataset_from_dict(doc: dict) -> Dataset:
    if doc.get("format") != FORMAT_TAG:
        raise DataFormatError(f"not a {FORMAT_TAG} document")
    T = int(doc["T"])
    n, l = len(doc["input_names"]), len(doc["output_names"])
    X = np.frombuffer(base64.b64decode(doc["inputs"]), dtype=np.uint8)
    bits = np.unpackbits(np.frombuffer(base64.b64decode(doc["outputs"]), dtype=np.uint8))
    if X.size != T * n or bits.size < T * l:
        raise DataFormatError("sample matrices do not match the header")
    X = X.reshape(T, n)
    Y = bits[: T * l].reshape(T, l)
    args = (X, Y, doc["input_names"], doc["output_names"], doc["alphabet_sizes"])
    if "provenance" in doc or "title" in doc:
        return LabeledDataset(*args, title=doc.get("title", ""),
                              provenance=dict(doc.get("provenance", {})))
    return Dataset(*args)


def save_dataset(ds: Dataset, path) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(ds), sort_keys=True) + "\n",
                          encoding="utf-8")


def load_dataset(path) -> Dataset:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: {exc}") from None
    return dataset_from_dict(doc)


LOADERS = {
    "acute": load_acute_inflammations,
    "tictactoe": load_tictactoe,
    "lendingclub": load_lendingclub,
}


def load_any(path, fmt: str = "auto", outputs=None, timeseries: bool = False) -> Dataset:
    """Dispatch on ``fmt``; ``auto`` reads ``.json`` as canonical, else CSV."""
    if fmt == "auto":
        fmt = "json" if str(path).endswith(".json") else "csv"
    if fmt == "json":
        return load_dataset(path)
    if fmt == "csv":
        return load_csv(path, outputs, timeseries)
    if fmt == "spect":
        M = _read_spect(path)
        return LabeledDataset(M[:, 1:], M[:, :1], SPECT_INPUTS, ("OVERALL_DIAGNOSIS",),
                              (2,) * 22, title="SPECT")
    if fmt in LOADERS:
        return LOADERS[fmt](path)
    raise ValueError(f"unknown data format {fmt!r}")
