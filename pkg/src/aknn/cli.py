"""Command-line interface: ``aknn {fit,predict,split,generate-unknowns,experiment}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import knn
from .advanced import classify_many, fit_aknn
from .core import AknnError, Dataset, DistanceMetric, HyperParams, MinDistMode, ZeroAreaWarning
from .data import (
    EmptyFile,
    GenerationFailed,
    MinMaxScaler,
    SplitSpec,
    UnknownGenSpec,
    alpha_beta_standin,
    csv_header,
    csv_width,
    generate_unknowns,
    load_csv,
    load_iris,
    save_csv,
    split,
)
from .evaluation import GENERATION_GC, DEFAULT_GC_VALUES, DEFAULT_K_VALUES, RunConfig, run_experiment

BUILTIN_DATASETS = {"iris": load_iris, "alpha-beta": alpha_beta_standin}


class CliError(Exception):
    """Failure with a message meant for the user; ``stage`` names the failing step."""

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


def _fraction(text):
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"fraction must lie strictly between 0 and 1, got {text}")
    return value


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _list_of(kind):
    def parse(text):
        try:
            values = [kind(t) for t in text.split(",") if t.strip()]
        except argparse.ArgumentTypeError:
            raise
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        if not values:
            raise argparse.ArgumentTypeError("expected a comma-separated list")
        return values
    return parse


def _label_column(text):
    try:
        return int(text)
    except ValueError:
        return text


def _add_csv_flags(p):
    p.add_argument("--no-header", dest="header", action="store_false",
                   help="input CSV files have no header row")
    p.add_argument("--label-column", type=_label_column, default=-1,
                   help="label column index or header name (default: last)")


def _add_model_flags(p, grid=False):
    p.add_argument("--metric", choices=["euclidean", "manhattan", "minkowski"], default="euclidean")
    p.add_argument("--q", type=float, default=2.0, help="Minkowski order (>= 1)")
    if grid:
        p.add_argument("--k", type=_list_of(_positive_int), default=list(DEFAULT_K_VALUES),
                       help="comma-separated k values (default 1,7)")
        p.add_argument("--gc", type=_list_of(_positive_float), default=list(DEFAULT_GC_VALUES),
                       help="comma-separated gap constants (default 1,1.5,2,5,10,100,1000)")
    else:
        p.add_argument("--k", type=_positive_int, default=1)
        p.add_argument("--gc", type=_positive_float, default=1.5, help="gap constant")
    p.add_argument("--mode", choices=[m.value for m in MinDistMode], default=MinDistMode.GLOBAL_MIN.value,
                   help="which neighbor distance is compared with the class area")


def _metric(args) -> DistanceMetric:
    return DistanceMetric(args.metric, args.q)


def _load(path, args, stage="load"):
    try:
        return load_csv(path, has_header=args.header, label_column=args.label_column)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", stage) from None
    except (AknnError, OSError) as exc:
        raise CliError(str(exc), stage) from None


def _header(path, args):
    return csv_header(path, args.label_column) if args.header else None


def _write_text(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_fit(args) -> int:
    """Print the per-class training class areas and rejection radii."""
    train = _load(args.train, args)
    model = fit_aknn(train, HyperParams(args.k, _metric(args), args.gc), args.mode)
    regions = list(model.regions.values())
    if args.json:
        print(json.dumps([{"label": r.label, "tca": r.tca, "area": r.area, "support": r.support}
                          for r in regions], indent=2))
    else:
        print("label,support,tca,area")
        for r in regions:
            print(f"{r.label},{r.support},{r.tca!r},{r.area!r}")
    return 0


def _load_queries(path, args, dim) -> Dataset:
    """Queries may carry a label column; it is dropped if the width says so."""
    try:
        width = csv_width(path)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", "load") from None
    if width is None:
        return Dataset(np.empty((0, dim)), ())
    label_column = args.label_column if width == dim + 1 else None
    try:
        queries = load_csv(path, has_header=args.header, label_column=label_column)
    except EmptyFile:
        return Dataset(np.empty((0, dim)), ())
    except (AknnError, OSError) as exc:
        raise CliError(str(exc), "load") from None
    if len(queries) and queries.dim != dim:
        raise CliError(f"queries have {queries.dim} features but training data has {dim}", "predict")
    return queries


def cmd_predict(args) -> int:
    train = _load(args.train, args)
    queries = _load_queries(args.queries, args, train.dim)
    if args.normalize:
        scaler = MinMaxScaler.fit(train)
        train, queries = scaler.transform(train), scaler.transform(queries)
    params = HyperParams(args.k, _metric(args), args.gc)
    records = []
    if args.algorithm == "knn":
        model = knn.fit(train, params)
        if len(queries):
            idx, dist = knn.kneighbors(model, queries)
            for row_idx, row_dist in zip(idx, dist):
                label = knn.majority_vote([train.labels[i] for i in row_idx])
                records.append({"prediction": label, "expected_class": label,
                                "min_dist": float(row_dist[0]), "area": None})
    else:
        model = fit_aknn(train, params, args.mode)
        for p in classify_many(model, queries) if len(queries) else []:
            records.append({"prediction": p.outcome, "expected_class": p.expected_class,
                            "min_dist": p.min_dist, "area": p.area_of_expected})
    if args.json:
        text = json.dumps(records, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["prediction", "expected_class", "min_dist", "area"])
        for r in records:
            w.writerow([r["prediction"], r["expected_class"], repr(r["min_dist"]),
                        "" if r["area"] is None else repr(r["area"])])
        text = buf.getvalue()
    _write_text(text, args.output)
    return 0


def cmd_split(args) -> int:
    data = _load(args.input, args)
    try:
        train, test = split(data, SplitSpec(args.fraction, args.seed, args.stratified))
    except AknnError as exc:
        raise CliError(str(exc), "split") from None
    src = Path(args.input)
    out_dir = Path(args.out_dir) if args.out_dir else src.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    train_path = Path(args.train_out) if args.train_out else out_dir / f"{src.stem}_train.csv"
    test_path = Path(args.test_out) if args.test_out else out_dir / f"{src.stem}_test.csv"
    header = _header(args.input, args)
    save_csv(train, train_path, header)
    save_csv(test, test_path, header)
    print(f"{len(train)} / {len(test)}")
    print(f"train: {train_path}")
    print(f"test: {test_path}")
    return 0


def cmd_generate_unknowns(args) -> int:
    train = _load(args.train, args)
    model = fit_aknn(train, HyperParams(args.k, _metric(args), args.gc), args.mode)
    try:
        spec = UnknownGenSpec(args.count, args.seed, args.near_factor, args.far_factor)
        unknown = generate_unknowns(train, model, spec)
    except GenerationFailed as exc:
        raise CliError(f"{exc}. Try a larger --far-factor.", "generate") from None
    except AknnError as exc:
        raise CliError(str(exc), "generate") from None
    header = _header(args.train, args)
    if args.output:
        save_csv(unknown, args.output, header)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header or [f"x{j}" for j in range(train.dim)] + ["label"])
        for row, lab in zip(unknown.features.tolist(), unknown.labels):
            w.writerow([repr(v) for v in row] + [lab])
        sys.stdout.write(buf.getvalue())
    print(f"{len(unknown)} unknown instances", file=sys.stderr)
    return 0


def cmd_experiment(args) -> int:
    if args.builtin:
        data = BUILTIN_DATASETS[args.builtin]()
    elif args.input:
        data = _load(args.input, args)
    else:
        raise CliError("either --input or --builtin is required", "load")
    unknown_seed = args.unknown_seed if args.unknown_seed is not None else args.seed
    try:
        cfg = RunConfig(
            k_values=args.k,
            gc_values=args.gc,
            metric=_metric(args),
            split=SplitSpec(args.fraction, args.seed, args.stratified),
            unknowns=UnknownGenSpec(args.unknowns, unknown_seed, args.near_factor, args.far_factor),
            include_plain_knn=args.knn,
            mode=MinDistMode(args.mode),
        )
    except AknnError as exc:
        raise CliError(str(exc), "config") from None
    try:
        train, test = split(data, cfg.split)
    except AknnError as exc:
        raise CliError(str(exc), "split") from None
    if args.normalize:
        scaler = MinMaxScaler.fit(train)
        train, test = scaler.transform(train), scaler.transform(test)
    try:
        gen_model = fit_aknn(train, HyperParams(1, cfg.metric, GENERATION_GC), cfg.mode)
        unknown = generate_unknowns(train, gen_model, cfg.unknowns)
    except GenerationFailed as exc:
        raise CliError(f"{exc}. Try a larger --far-factor.", "generate") from None
    except AknnError as exc:
        raise CliError(str(exc), "generate") from None
    max_k = max(cfg.k_values)
    if max_k > len(train):
        raise CliError(f"k={max_k} exceeds the {len(train)} training instances", "run")
    try:
        report = run_experiment(train, test, unknown, cfg)
    except AknnError as exc:
        raise CliError(str(exc), "run") from None
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    if args.json:
        print(report.to_json())
    else:
        print(f"train {len(train)} / test {len(test)} / unknown {len(unknown)}")
        print(report.to_table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aknn", description="kNN with rejection of unknown instances")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="show per-class training areas")
    p.add_argument("--train", required=True)
    _add_csv_flags(p)
    _add_model_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="classify query rows")
    p.add_argument("--train", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--algorithm", choices=["aknn", "knn"], default="aknn")
    p.add_argument("--normalize", action="store_true", help="min-max scale using training ranges")
    p.add_argument("--output", help="write predictions here instead of stdout")
    p.add_argument("--json", action="store_true")
    _add_csv_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("split", help="seeded train/test split")
    p.add_argument("--input", required=True)
    p.add_argument("--fraction", type=_fraction, default=0.7)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--out-dir")
    p.add_argument("--train-out")
    p.add_argument("--test-out")
    _add_csv_flags(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("generate-unknowns", help="sample points far outside every class")
    p.add_argument("--train", "--input", dest="train", required=True)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--near-factor", type=float, default=2.0)
    p.add_argument("--far-factor", type=float, default=5.0)
    p.add_argument("--output")
    _add_csv_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=cmd_generate_unknowns)

    p = sub.add_parser("experiment", help="run the kNN vs A-kNN grid")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input")
    src.add_argument("--builtin", choices=sorted(BUILTIN_DATASETS))
    p.add_argument("--seed", type=_u64, default=0, help="split seed")
    p.add_argument("--unknown-seed", type=_u64, help="unknown generation seed (default: --seed)")
    p.add_argument("--fraction", type=_fraction, default=0.7)
    p.add_argument("--stratified", action="store_true")
    p.add_argument("--unknowns", type=int, default=20)
    p.add_argument("--near-factor", type=float, default=2.0)
    p.add_argument("--far-factor", type=float, default=5.0)
    p.add_argument("--no-knn", dest="knn", action="store_false", help="omit plain kNN rows")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv", help="also write the report as CSV for plotting")
    _add_csv_flags(p)
    _add_model_flags(p, grid=True)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings():
        warnings.simplefilter("always", ZeroAreaWarning)
        warnings.showwarning = lambda msg, *a, **kw: print(f"warning: {msg}", file=sys.stderr)
        try:
            return args.func(args)
        except CliError as exc:
            where = f" [{exc.stage}]" if exc.stage else ""
            print(f"error{where}: {exc}", file=sys.stderr)
            return 1
        except (AknnError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1


if __name__ == "__main__":
    sys.exit(main())
