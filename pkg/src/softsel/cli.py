"""Command line entry point: ``softsel <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys

from . import imaging
from .clustering import REPORT_FIELDS, evaluate_subsets, kmeans, silhouette, dunn_index, som, \
    standardize, UndefinedIndexError
from .pipeline import METHODS, ConfigError, PipelineConfig, PipelineError, run_pipeline
from .tabular import equal_width_discretize, load_categorical, read_table, write_categorical, \
    write_table
from .texture import extract_dataset
from .worked_example import run_worked_example


def _point(text: str):
    try:
        r, c = text.split(",")
        return int(r), int(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected row,col but got {text!r}") from None


def cmd_denoise(args) -> int:
    img = imaging.read_pgm(args.input)
    if args.filter == "gaussian":
        out = imaging.gaussian_filter(img, args.window, args.sigma)
    else:
        out = imaging.FILTERS[args.filter](img, args.window)
    imaging.write_pgm(out, args.output, binary=not args.ascii)
    return 0


def cmd_noise(args) -> int:
    img = imaging.read_pgm(args.input)
    out = imaging.add_noise(img, args.kind, args.level, args.seed)
    imaging.write_pgm(out, args.output, binary=not args.ascii)
    return 0


def cmd_snr(args) -> int:
    a = imaging.read_pgm(args.original)
    b = imaging.read_pgm(args.processed)
    try:
        print(f"{imaging.snr(a, b):.4f}")
    except imaging.InfiniteSNR:
        print("inf")
    return 0


def cmd_segment(args) -> int:
    img = imaging.read_pgm(args.input)
    mask = imaging.region_grow(img, args.seed, args.threshold, args.connectivity)
    imaging.write_pgm(imaging.apply_mask(img, mask), args.output)
    if args.mask_out:
        imaging.write_pgm(imaging.GrayImage(mask.bits.astype("uint8") * 255), args.mask_out)
    print(f"{mask.count()} pixels in region")
    return 0


def cmd_extract(args) -> int:
    names = sorted(f for f in os.listdir(args.in_dir) if f.lower().endswith(".pgm"))
    if not names:
        print(f"no .pgm files in {args.in_dir}", file=sys.stderr)
        return 2
    pairs, ids = [], []
    for name in names:
        stem = os.path.splitext(name)[0]
        if stem.endswith("_mask"):
            continue
        img = imaging.read_pgm(os.path.join(args.in_dir, name))
        mask = None
        if args.mask_dir:
            mp = os.path.join(args.mask_dir, f"{stem}_mask.pgm")
            if os.path.exists(mp):
                mask = imaging.BinaryMask(imaging.read_pgm(mp).pixels > 0)
        pairs.append((img, mask))
        ids.append(stem)
    tables = extract_dataset(pairs, args.levels, args.distance, ids)
    os.makedirs(args.out_dir, exist_ok=True)
    for name, table in tables.items():
        write_table(table, os.path.join(args.out_dir, f"{name}.csv"))
    print(f"wrote {len(tables)} tables of shape {len(ids)}x19 to {args.out_dir}")
    return 0


def cmd_discretize(args) -> int:
    write_categorical(equal_width_discretize(read_table(args.input), args.bins), args.output)
    return 0


def cmd_reduce(args) -> int:
    table = load_categorical(args.input)
    result = METHODS[args.method](table)
    payload = dict(result.to_dict(), dataset=os.path.splitext(os.path.basename(args.input))[0])
    text = json.dumps(payload, indent=2)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    print(f"{args.method}: {', '.join(result.reduct)}", file=sys.stderr)
    return 0


def cmd_cluster(args) -> int:
    table = read_table(args.input)
    if args.columns:
        table = table.select(args.columns.split(","))
    x = standardize(table.values)
    if args.algo == "kmeans":
        assignment = kmeans(x, args.k, args.seed)
    else:
        assignment = som(x, args.rows, args.cols, args.epochs, args.seed)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["object_id", "cluster"])
        for obj, lab in zip(table.ids, assignment.labels):
            w.writerow([obj, int(lab)])
    finally:
        if args.output:
            out.close()
    for name, index in (("dunn", dunn_index), ("silhouette", silhouette)):
        try:
            print(f"{name}: {index(x, assignment):.6f}", file=sys.stderr)
        except UndefinedIndexError as exc:
            print(f"{name}: undefined ({exc})", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    table = read_table(args.table)
    subsets = {"unreduced": table.columns}
    for path in args.subsets:
        with open(path) as fh:
            payload = json.load(fh)
        subsets[payload.get("method", os.path.basename(path))] = payload["reduct"]
    rows = evaluate_subsets(table, subsets, args.k, args.seed, args.dataset)
    with open(args.output, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for row in rows:
            w.writerow([f"{v:.6f}" if isinstance(v, float) else v for v in
                        (row[k] for k in REPORT_FIELDS)])
    return 0


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    if args.out_dir:
        cfg.output_dir = args.out_dir
    if args.input_dir:
        cfg.input_dir = args.input_dir
    try:
        report = run_pipeline(cfg)
    except (ConfigError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(report.summary(), end="")
    return 0


def cmd_worked_example(args) -> int:
    verdict = run_worked_example()
    print("\n".join(verdict.lines()))
    return 0 if verdict.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="softsel", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("denoise", help="apply a mean, gaussian or median filter")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--filter", choices=sorted(imaging.FILTERS), default="median")
    s.add_argument("--window", type=int, default=5)
    s.add_argument("--sigma", type=float, default=None)
    s.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    s.set_defaults(func=cmd_denoise)

    s = sub.add_parser("noise", help="add gaussian or salt-and-pepper noise")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--kind", choices=["gaussian", "sp"], required=True)
    s.add_argument("--level", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--ascii", action="store_true")
    s.set_defaults(func=cmd_noise)

    s = sub.add_parser("snr", help="SNR in dB of a processed image against the original")
    s.add_argument("--original", required=True)
    s.add_argument("--processed", required=True)
    s.set_defaults(func=cmd_snr)

    s = sub.add_parser("segment", help="region growing from seed points")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--mask-out")
    s.add_argument("--seed", type=_point, action="append", required=True, help="row,col")
    s.add_argument("--threshold", type=float, required=True)
    s.add_argument("--connectivity", type=int, choices=[4, 8], default=4)
    s.set_defaults(func=cmd_segment)

    s = sub.add_parser("extract", help="GLCM/GLDM texture features for a directory of images")
    s.add_argument("--in-dir", required=True)
    s.add_argument("--mask-dir")
    s.add_argument("--levels", type=int, default=32)
    s.add_argument("--distance", type=int, default=1)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("discretize", help="equal-width binning of a feature table")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--bins", type=int, default=4)
    s.set_defaults(func=cmd_discretize)

    s = sub.add_parser("reduce", help="compute a reduct of a categorical table")
    s.add_argument("--method", choices=sorted(METHODS), default="ssusqr")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("cluster", help="cluster a feature table")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", dest="output")
    s.add_argument("--algo", choices=["kmeans", "som"], default="kmeans")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--columns")
    s.add_argument("--rows", type=int, default=2)
    s.add_argument("--cols", type=int, default=2)
    s.add_argument("--epochs", type=int, default=200)
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("evaluate", help="cluster validity of unreduced vs reduced feature sets")
    s.add_argument("--table", required=True)
    s.add_argument("--subsets", nargs="+", required=True, help="reduct JSON files")
    s.add_argument("--out", dest="output", required=True)
    s.add_argument("--dataset", default="")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("pipeline", help="run every stage on a directory of images")
    s.add_argument("--config")
    s.add_argument("--input-dir")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("worked-example", help="verify the eight-object example step by step")
    s.set_defaults(func=cmd_worked_example)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
