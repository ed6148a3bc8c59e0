"""Command-line surface: fit, explain, select, compare, scatter.

Exit codes: 0 success, 1 usage, 2 data problem, 3 configuration problem,
4 runtime failure. Failures emit a one-line JSON record on stderr.
"""

import argparse
import csv
import json
import math
import os
import sys

from scipy import stats as scipy_stats

from . import select as sel
from .data import load_csv, train_test_split
from .ensemble import fit_model, load_model, save_model
from .errors import (
    ComputationError,
    ConfigError,
    DataError,
    MissingColumnError,
    TreexplainError,
)
from .explain import contributions, explain_cv_instance, feature_weights

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONFIG = 3
EXIT_RUNTIME = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(EXIT_USAGE, "UsageError", message)


def _fail(code, kind, message):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    raise SystemExit(code)


def _default_seed():
    return int(os.environ.get("TREEXPLAIN_SEED", "0"))


def _load_grid_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        grid = sel.HyperGrid(family=doc["family"], axes=doc["axes"])
        grid.validate()
        return grid
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, TreexplainError):
            raise
        raise ConfigError(f"bad grid file {path}: {exc}")


def _load_dataset(args):
    return load_csv(args.dataset, args.label)


# --- subcommands ---

def _cmd_fit(args):
    ds = _load_dataset(args)
    grid = _load_grid_file(args.grid)
    specs = sel.expand_grid(grid, args.seed)
    if len(specs) != 1:
        raise ConfigError(f"fit needs a grid expanding to exactly 1 spec, got {len(specs)}")
    split = train_test_split(ds, args.train_fraction, args.seed)
    model = fit_model(ds, split.train_indices, specs[0])
    save_model(model, args.dump_model)
    return 0


def _cmd_explain(args):
    ds = _load_dataset(args)
    model = load_model(args.model)
    used = model.used_feature_set()
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for i in range(ds.n):
            b = contributions(model, ds, i)
            record = {
                "instance": b.instance_id,
                "target_class": b.target_class,
                "c_full": b.c_full,
                "f_x": b.f_x,
                "contrib": {ds.feature_names[k]: v for k, v in sorted(b.contrib.items())},
            }
            try:
                w = feature_weights(b, used, args.mode)
                record["explain_cv"] = explain_cv_instance(w, len(used))
            except ComputationError:
                record["explain_cv"] = None
            out.write(json.dumps(record) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _cmd_select(args):
    ds = _load_dataset(args)
    grid = _load_grid_file(args.grid)
    split = train_test_split(ds, args.train_fraction, args.seed)
    if args.method == "fe":
        report = sel.select_by_fe(ds, split, grid, mode=args.mode,
                                  gate_delta=args.gate_delta, seed=args.seed,
                                  workers=args.workers)
    else:
        report = sel.select_by_cv(ds, split, grid, k=args.k, seed=args.seed,
                                  workers=args.workers)
    sel.save_json(sel.report_to_dict(report), args.out)
    if args.csv:
        sel.report_to_csv(report, args.csv)
    return 0


def _cmd_compare(args):
    ds = _load_dataset(args)
    grid = _load_grid_file(args.grid)
    record = sel.compare_methods(ds, grid, k=args.k, mode=args.mode,
                                 gate_delta=args.gate_delta, seed=args.seed,
                                 repetitions=args.repetitions, workers=args.workers)
    sel.save_json(sel.comparison_to_dict(record), args.out)
    csv_path = args.csv or (os.path.splitext(args.out)[0] + ".csv")
    sel.comparison_to_csv(record, csv_path)
    return 0


def spearman(xs, ys):
    """Spearman rank correlation, or None when undefined (< 2 points or
    a constant axis)."""
    if len(xs) < 2:
        return None
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # constant input is our None case
        rho = scipy_stats.spearmanr(xs, ys).statistic
    if rho is None or (isinstance(rho, float) and math.isnan(rho)):
        return None
    return float(rho)


def emit_scatter(report_csv, x_axis, y_axis, out, svg=None):
    """Write (x, y) pairs from a report CSV with a correlation footer."""
    with open(report_csv, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or x_axis not in reader.fieldnames:
            raise MissingColumnError(x_axis)
        if y_axis not in reader.fieldnames:
            raise MissingColumnError(y_axis)
        pairs = []
        for row in reader:
            xs, ys = row[x_axis], row[y_axis]
            if xs == "" or ys == "":
                continue
            pairs.append((float(xs), float(ys)))

    rho = spearman([p[0] for p in pairs], [p[1] for p in pairs])
    with open(out, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"{x_axis},{y_axis}\n")
        for x, y in pairs:
            fh.write(f"{x},{y}\n")
        fh.write(f"# spearman={'undefined' if rho is None else rho}\n")
    if svg:
        _render_svg(pairs, x_axis, y_axis, svg)
    return rho


def _render_svg(pairs, x_label, y_label, path, size=480, margin=50):
    xs = [p[0] for p in pairs]
    ys = [p[1] for p in pairs]
    xmin, xmax = (min(xs), max(xs)) if xs else (0.0, 1.0)
    ymin, ymax = (min(ys), max(ys)) if ys else (0.0, 1.0)
    xspan = (xmax - xmin) or 1.0
    yspan = (ymax - ymin) or 1.0
    inner = size - 2 * margin

    def sx(v):
        return margin + (v - xmin) / xspan * inner

    def sy(v):
        return size - margin - (v - ymin) / yspan * inner

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{margin}" y1="{size - margin}" x2="{size - margin}" '
        f'y2="{size - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{size - margin}" '
        f'stroke="black"/>',
        f'<text x="{size / 2}" y="{size - 10}" text-anchor="middle">{x_label}</text>',
        f'<text x="14" y="{size / 2}" text-anchor="middle" '
        f'transform="rotate(-90 14 {size / 2})">{y_label}</text>',
    ]
    for x, y in pairs:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def _cmd_scatter(args):
    emit_scatter(args.report, args.x, args.y, args.out, svg=args.svg)
    return 0


# --- argument wiring ---

def _add_data_flags(p):
    p.add_argument("--dataset", required=True, help="CSV file with a header row")
    p.add_argument("--label", required=True, help="name of the label column")
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--train-fraction", type=float, default=0.7)


def build_parser():
    parser = _Parser(prog="treexplain")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit one model and dump it as JSON")
    _add_data_flags(p)
    p.add_argument("--grid", required=True, help="grid JSON expanding to one spec")
    p.add_argument("--dump-model", required=True, help="output model JSON path")
    p.set_defaults(fn=_cmd_fit)

    p = sub.add_parser("explain", help="per-instance contribution breakdowns")
    _add_data_flags(p)
    p.add_argument("--model", required=True, help="model JSON from `fit`")
    p.add_argument("--mode", choices=["literal", "normalized"], default="literal")
    p.add_argument("--out", help="JSON-lines output path (default stdout)")
    p.set_defaults(fn=_cmd_explain)

    p = sub.add_parser("select", help="grid selection by one method")
    _add_data_flags(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--method", choices=["fe", "cv"], required=True)
    p.add_argument("--mode", choices=["literal", "normalized"], default="literal")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--gate-delta", type=float, default=0.02)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--csv", help="optional per-candidate CSV path")
    p.set_defaults(fn=_cmd_select)

    p = sub.add_parser("compare", help="run both methods on identical splits")
    _add_data_flags(p)
    p.add_argument("--grid", required=True)
    p.add_argument("--mode", choices=["literal", "normalized"], default="literal")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--gate-delta", type=float, default=0.02)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--repetitions", type=int, default=1)
    p.add_argument("--out", required=True, help="comparison JSON path")
    p.add_argument("--csv", help="CSV path (default: out with .csv suffix)")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("scatter", help="emit (x, y) pairs with rank correlation")
    p.add_argument("--report", required=True, help="per-candidate report CSV")
    p.add_argument("--x", choices=["cv_acc", "explain_cv", "train_acc"], required=True)
    p.add_argument("--y", choices=["test_acc"], default="test_acc")
    p.add_argument("--out", required=True)
    p.add_argument("--svg", help="optional SVG rendering path")
    p.set_defaults(fn=_cmd_scatter)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DataError as exc:
        _fail(EXIT_DATA, type(exc).__name__, str(exc))
    except ConfigError as exc:
        _fail(EXIT_CONFIG, type(exc).__name__, str(exc))
    except TreexplainError as exc:
        _fail(EXIT_RUNTIME, type(exc).__name__, str(exc))
    except OSError as exc:
        _fail(EXIT_DATA, type(exc).__name__, str(exc))


if __name__ == "__main__":
    raise SystemExit(main())
