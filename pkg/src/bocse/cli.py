"""``bocse`` command-line interface.

Exit status: 0 on success, 1 for usage errors, 2 when input data cannot be
read or does not fit the request.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .boolean import BooleanNetwork, random_network, simulate
from .datasets import DataFormatError, load_any, save_dataset
from .inference import InferenceResult, infer_function, infer_network
from .significance import NULL_METHODS, SignificanceConfig, derive_rng

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
FORMATS = ("auto", "json", "csv", "spect", "acute", "tictactoe", "lendingclub")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _grid(text: str) -> list[int]:
    """``a,b,c`` or ``geom:lo:hi[:factor]``."""
    if text.startswith("geom:"):
        parts = text.split(":")[1:]
        try:
            lo, hi = int(parts[0]), int(parts[1])
            factor = float(parts[2]) if len(parts) > 2 else 2.0
            return bench.geometric_grid(lo, hi, factor)
        except (IndexError, ValueError) as exc:
            raise argparse.ArgumentTypeError(f"bad geometric grid {text!r}: {exc}")
    return _int_list(text)


def _config(args) -> SignificanceConfig:
    try:
        return SignificanceConfig(args.alpha, args.permutations, args.seed,
                                  args.alpha_backward, args.null)
    except ValueError as exc:
        raise UsageError(str(exc))


def _add_test_flags(p, seed_default=0):
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--alpha-backward", type=float, default=None)
    p.add_argument("--permutations", type=int, default=1000)
    p.add_argument("--null", choices=NULL_METHODS, default="auto")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--max-parents", type=int, default=None)


def _add_data_flags(p, flag="--data"):
    p.add_argument(flag, required=True, help="dataset file")
    p.add_argument("--format", choices=FORMATS, default="auto",
                   help="input format (auto: .json canonical, otherwise CSV)")
    p.add_argument("--outputs", default=None,
                   help="comma-separated output column names for CSV input")
    p.add_argument("--timeseries", action="store_true",
                   help="CSV rows are consecutive network states")


def _load(path, fmt, outputs=None, timeseries=False):
    try:
        outs = outputs.split(",") if outputs else None
        return load_any(path, fmt, outs, timeseries)
    except (OSError, DataFormatError, ValueError, KeyError) as exc:
        raise DataError(f"cannot load {path}: {exc}")


def _column(key, names, kind):
    if key in names:
        return names.index(key)
    try:
        j = int(key)
    except ValueError:
        raise DataError(f"unknown {kind} column {key!r}")
    if not 0 <= j < len(names):
        raise DataError(f"{kind} column {j} out of range")
    return j


def _emit(text: str, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------

def cmd_infer(args):
    data = _load(args.data, args.format, args.outputs, args.timeseries)
    cfg = _config(args)
    fit = not args.no_fit
    if fit and any(a > 2 for a in data.alphabet_sizes):
        fit = False
    try:
        if args.target == "all":
            res = infer_network(data, cfg, args.max_parents, fit, args.jobs)
            if args.out == "json":
                return _dumps(res.to_dict(data))
            return "\n\n".join(r.report(data) for r in res.nodes) + "\n"
        t = _column(args.target, list(data.output_names), "output")
        res = infer_function(data, t, cfg, args.max_parents, fit)
    except ValueError as exc:
        raise DataError(str(exc))
    return _dumps(res.to_dict(data)) if args.out == "json" else res.report(data) + "\n"


def cmd_generate(args):
    if args.nodes < 2:
        raise UsageError("--nodes must be at least 2")
    try:
        net = random_network(args.nodes, args.degree, derive_rng(args.seed, 0),
                             include_self=args.allow_self_loops)
        if args.noise:
            net = net.with_noise(args.noise)
    except ValueError as exc:
        raise UsageError(str(exc))
    return net.to_json(indent=2, sort_keys=True) + "\n"


def cmd_simulate(args):
    try:
        net = BooleanNetwork.from_json(Path(args.net).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DataError(f"cannot load network {args.net}: {exc}")
    if args.steps < 1:
        raise UsageError("--steps must be at least 1")
    if args.noise is not None:
        net = net.with_noise(args.noise)
    rng = derive_rng(args.seed, 0)
    if args.init == "random":
        init = rng.integers(0, 2, size=net.n, dtype=np.uint8)
    else:
        if len(args.init) != net.n or set(args.init) - {"0", "1"}:
            raise UsageError(f"--init must be 'random' or {net.n} characters of 0/1")
        init = np.array([int(c) for c in args.init], dtype=np.uint8)
    try:
        states = simulate(net, init, args.steps, rng)
    except ValueError as exc:
        raise DataError(str(exc))
    names = net.names or tuple(f"x{j + 1}" for j in range(net.n))
    lines = [",".join(names)] + [",".join(map(str, row)) for row in states.tolist()]
    return "\n".join(lines) + "\n"


def _bench_out(res, fmt):
    return _dumps(res.to_dict()) if fmt == "json" else res.to_csv()


def cmd_bench(args):
    cfg = _config(args)
    seg = None if args.segment == 0 else args.segment
    try:
        if args.kind == "min-samples":
            res = bench.bench_min_samples(args.n_grid, args.degree, args.reps, args.t_grid, cfg,
                                          args.seed, seg, args.allow_self_loops, args.noise,
                                          args.max_parents, args.jobs)
        elif args.kind == "error-ratios":
            res = bench.bench_error_ratios(args.nodes, args.degree, args.t_grid, args.reps, cfg,
                                           args.seed, seg, args.allow_self_loops, args.noise,
                                           args.max_parents, args.jobs)
        else:
            raise AssertionError(args.kind)
    except ValueError as exc:
        raise UsageError(str(exc))
    return _bench_out(res, args.emit)


def cmd_downsample(args):
    data = _load(args.data, args.format, args.outputs, args.timeseries)
    cfg = _config(args)
    t = _column(args.target, list(data.output_names), "output")
    sizes = args.sizes or list(range(10, data.T + 1, 10))
    try:
        res = bench.downsample_stability(data, t, sizes, args.reps, cfg, args.seed,
                                         args.max_parents, args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc))
    return _bench_out(res, args.emit)


def cmd_eval(args):
    try:
        model = InferenceResult.from_dict(json.loads(Path(args.model).read_text("utf-8")))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DataError(f"cannot load model {args.model}: {exc}")
    test = _load(args.test, args.format, args.outputs, args.timeseries)
    try:
        acc, fpr, fnr = bench.eval_accuracy(model, test, args.na_policy)
    except (KeyError, ValueError) as exc:
        raise DataError(str(exc))
    doc = {"accuracy": acc, "fpr": fpr, "fnr": fnr, "T": test.T,
           "parents": [model.input_names[p] if model.input_names else p for p in model.parents],
           "na_policy": args.na_policy}
    return _dumps({k: (None if isinstance(v, float) and np.isnan(v) else v)
                   for k, v in doc.items()})


def cmd_curve(args):
    data = _load(args.data, args.format, args.outputs, args.timeseries)
    t = _column(args.target, list(data.output_names), "output")
    names = list(data.input_names)
    order = [_column(k.strip(), names, "input") for k in args.order.split(",") if k.strip()]
    try:
        curve = bench.uncertainty_curve(data, order, t)
    except ValueError as exc:
        raise DataError(str(exc))
    lines = ["k,column,conditional_entropy"]
    for k, h in enumerate(curve):
        col = names[order[k - 1]] if k else ""
        lines.append(f"{k},{col},{h!r}")
    return "\n".join(lines) + "\n"


def cmd_convert(args):
    data = _load(args.input, args.format, args.outputs, args.timeseries)
    if not args.output:
        raise UsageError("convert needs -o/--output")
    try:
        save_dataset(data, args.output)
    except OSError as exc:
        raise DataError(str(exc))
    return ""


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bocse", description="Learn Boolean functions and networks from data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("infer", help="infer parents and truth table of output columns")
    _add_data_flags(q)
    q.add_argument("--target", default="all", help="output column name, index, or 'all'")
    _add_test_flags(q)
    q.add_argument("--out", choices=("json", "report"), default="json", help="output format")
    q.add_argument("-o", "--output", default=None, help="write to this file instead of stdout")
    q.add_argument("--no-fit", action="store_true", help="skip truth-table fitting")
    q.add_argument("--jobs", type=int, default=1)
    q.set_defaults(func=cmd_infer)

    q = sub.add_parser("generate", help="random network with fixed in-degree (JSON)")
    q.add_argument("--nodes", type=int, required=True)
    q.add_argument("--degree", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--allow-self-loops", action="store_true")
    q.add_argument("--noise", type=float, default=0.0)
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_generate)

    q = sub.add_parser("simulate", help="simulate a network; CSV of states")
    q.add_argument("--net", required=True)
    q.add_argument("--init", default="random", help="bit string such as 0101, or 'random'")
    q.add_argument("--steps", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--noise", type=float, default=None, help="override every node's noise")
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_simulate)

    b = sub.add_parser("bench", help="benchmarks (CSV or JSON)")
    bsub = b.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("min-samples", "error-ratios"):
        q = bsub.add_parser(kind)
        if kind == "min-samples":
            q.add_argument("--n-grid", type=_int_list, default=[10, 20, 30, 40, 50])
            q.add_argument("--degree", type=int, default=2)
        else:
            q.add_argument("--nodes", type=int, default=50)
            q.add_argument("--degree", type=int, default=3)
        q.add_argument("--t-grid", type=_grid, default=bench.geometric_grid(),
                       help="comma list or geom:lo:hi[:factor]")
        q.add_argument("--reps", type=int, default=50)
        q.add_argument("--segment", type=int, default=20,
                       help="restart trajectories every this many steps (0: never)")
        q.add_argument("--allow-self-loops", action="store_true")
        q.add_argument("--noise", type=float, default=0.0)
        _add_test_flags(q)
        q.add_argument("--jobs", type=int, default=1)
        q.add_argument("--emit", choices=("csv", "json"), default="csv")
        q.add_argument("-o", "--output", default=None)
        q.set_defaults(func=cmd_bench)
    q = bsub.add_parser("downsample")
    _add_data_flags(q)
    q.add_argument("--target", required=True)
    q.add_argument("--sizes", type=_int_list, default=None)
    q.add_argument("--reps", type=int, default=50)
    _add_test_flags(q)
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--emit", choices=("csv", "json"), default="csv")
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_downsample)

    q = sub.add_parser("eval", help="score a saved model on held-out data")
    q.add_argument("--model", required=True, help="JSON written by 'infer --target NAME'")
    _add_data_flags(q, "--test")
    q.add_argument("--na-policy", choices=("majority", "default0", "error"),
                   default="majority")
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_eval)

    q = sub.add_parser("curve", help="conditional entropy along an input order (CSV)")
    _add_data_flags(q)
    q.add_argument("--order", required=True, help="comma-separated input names or indices")
    q.add_argument("--target", default="0")
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_curve)

    q = sub.add_parser("convert", help="write a dataset in the canonical JSON format")
    _add_data_flags(q, "--input")
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = args.func(args)
    except UsageError as exc:
        print(f"bocse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"bocse: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.func is not cmd_convert:
        _emit(text, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
