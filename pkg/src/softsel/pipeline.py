"""End-to-end run: denoise, segment, extract, discretize, reduce, cluster/evaluate."""

from __future__ import annotations

import csv
import json
import logging
import os
import time
from dataclasses import dataclass, field, fields
from importlib import resources

from . import imaging
from .clustering import REPORT_FIELDS, evaluate_subsets
from .roughset import urr, usqr
from .softset import ssusqr
from .tabular import equal_width_discretize, write_categorical, write_table
from .texture import DATASETS, FEATURE_NAMES, extract_dataset

log = logging.getLogger(__name__)

METHODS = {"usqr": usqr, "urr": urr, "ssusqr": ssusqr}


class ConfigError(ValueError):
    pass


class PipelineError(RuntimeError):
    def __init__(self, stage: str, object_id: str | None, cause: Exception):
        where = f"stage {stage!r}" + (f", object {object_id!r}" if object_id else "")
        super().__init__(f"{where}: {cause}")
        self.stage = stage
        self.object_id = object_id


def _seeds(text: str):
    out = []
    for part in text.replace(" ", "").split(";"):
        if part:
            r, c = part.split(",")
            out.append((int(r), int(c)))
    return tuple(out)


def _methods(text: str):
    return tuple(m for m in text.replace(" ", "").split(",") if m)


@dataclass
class PipelineConfig:
    input_dir: str = ""
    output_dir: str = "out"
    filter: str = "median"
    window: int = 5
    sigma: float = 0.0  # 0 selects window / 6
    segment: bool = True
    seeds: tuple = ((32, 17), (32, 46))
    threshold: float = 40.0
    connectivity: int = 4
    levels: int = 32
    distance: int = 1
    bins: int = 4
    methods: tuple = ("usqr", "urr", "ssusqr")
    k: int = 2
    seed: int = 0
    som_rows: int = 2
    som_cols: int = 2
    som_epochs: int = 200

    _parsers = {"seeds": _seeds, "methods": _methods}

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        """Read a flat ``key = value`` file; ``#`` starts a comment."""
        values = {}
        with open(path) as fh:
            for n, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}, line {n}: expected key = value")
                key, val = (s.strip() for s in line.split("=", 1))
                values[key] = val
        cfg = cls.from_mapping(values)
        base = os.path.dirname(os.path.abspath(path))
        for key in ("input_dir", "output_dir"):
            p = getattr(cfg, key)
            if p and not os.path.isabs(p):
                setattr(cfg, key, os.path.join(base, p))
        return cfg

    @classmethod
    def from_mapping(cls, values: dict) -> "PipelineConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if not isinstance(raw, str):
                kwargs[key] = raw
                continue
            default = known[key].default
            if key in cls._parsers:
                kwargs[key] = cls._parsers[key](raw)
            elif isinstance(default, bool):
                kwargs[key] = raw.lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int):
                kwargs[key] = int(raw)
            elif isinstance(default, float):
                kwargs[key] = float(raw)
            else:
                kwargs[key] = raw
        return cls(**kwargs)

    def images(self) -> list[str]:
        return sorted(f for f in os.listdir(self.input_dir) if f.lower().endswith(".pgm"))

    def validate(self) -> None:
        if not self.input_dir:
            self.input_dir = bundled_fixture_dir()
        if not os.path.isdir(self.input_dir):
            raise ConfigError(f"input directory {self.input_dir!r} does not exist")
        if not self.images():
            raise ConfigError(f"no .pgm images in {self.input_dir!r}")
        if self.filter not in imaging.FILTERS and self.filter != "none":
            raise ConfigError(f"unknown filter {self.filter!r}")
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError("window must be odd and >= 3")
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")
        if self.segment and not self.seeds:
            raise ConfigError("segmentation needs at least one seed")
        if self.threshold < 0 or self.connectivity not in (4, 8):
            raise ConfigError("threshold must be >= 0 and connectivity 4 or 8")
        if not 2 <= self.levels <= 256 or self.distance < 1:
            raise ConfigError("levels must be in [2, 256] and distance >= 1")
        if self.bins < 2:
            raise ConfigError("bins must be >= 2")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown reduction method {m!r}")
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.som_rows * self.som_cols < 2 or self.som_epochs < 0:
            raise ConfigError("SOM grid needs >= 2 units and epochs >= 0")


def bundled_fixture_dir() -> str:
    return str(resources.files("softsel") / "data" / "fixtures")


@dataclass
class RunReport:
    feature_counts: list = field(default_factory=list)  # one dict per dataset
    validity: list = field(default_factory=list)  # REPORT_FIELDS rows
    reducts: dict = field(default_factory=dict)  # (dataset, method) -> tuple
    timing: dict = field(default_factory=dict)

    def write(self, out_dir) -> None:
        methods = [k for k in self.feature_counts[0] if k not in ("dataset", "extracted")] \
            if self.feature_counts else []
        with open(os.path.join(out_dir, "feature_counts.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dataset", "extracted"] + methods)
            for row in self.feature_counts:
                w.writerow([row["dataset"], row["extracted"]] + [row[m] for m in methods])
        with open(os.path.join(out_dir, "report.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_FIELDS)
            for row in self.validity:
                w.writerow([_fmt(row[k]) for k in REPORT_FIELDS])
        with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
            fh.write(self.summary())
        with open(os.path.join(out_dir, "timing.json"), "w") as fh:
            json.dump(self.timing, fh, indent=2)

    def summary(self) -> str:
        lines = ["Features selected per dataset", ""]
        for row in self.feature_counts:
            extra = "  ".join(f"{k}={v}" for k, v in row.items() if k not in ("dataset", "extracted"))
            lines.append(f"  {row['dataset']:<9} extracted={row['extracted']}  {extra}".rstrip())
        for (dataset, method), reduct in self.reducts.items():
            lines.append(f"  {dataset}/{method}: {', '.join(reduct)}")
        lines += ["", "Cluster validity (dunn / silhouette)", ""]
        for row in self.validity:
            lines.append(f"  {row['dataset']:<9} {row['method']:<10} {row['algorithm']:<7} "
                         f"d={row['n_features']:<3} dunn={_fmt(row['dunn'])} "
                         f"silhouette={_fmt(row['silhouette'])}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def run_pipeline(config: PipelineConfig) -> RunReport:
    config.validate()
    out = config.output_dir
    report = RunReport()
    names = config.images()
    ids = [os.path.splitext(n)[0] for n in names]

    def stage_dir(name):
        path = os.path.join(out, name)
        os.makedirs(path, exist_ok=True)
        return path

    def timed(stage):
        t0 = time.perf_counter()
        return lambda: report.timing.__setitem__(stage, time.perf_counter() - t0)

    done = timed("denoise")
    d = stage_dir("denoise")
    filtered = []
    for obj, name in zip(ids, names):
        try:
            img = imaging.read_pgm(os.path.join(config.input_dir, name))
            if config.filter == "gaussian":
                img = imaging.gaussian_filter(img, config.window, config.sigma or None)
            elif config.filter != "none":
                img = imaging.FILTERS[config.filter](img, config.window)
            imaging.write_pgm(img, os.path.join(d, f"{obj}.pgm"))
        except Exception as exc:
            raise PipelineError("denoise", obj, exc) from exc
        filtered.append(img)
    done()

    done = timed("segment")
    d = stage_dir("segment")
    pairs = []
    for obj, img in zip(ids, filtered):
        try:
            if config.segment:
                mask = imaging.region_grow(img, config.seeds, config.threshold, config.connectivity)
            else:
                mask = imaging.BinaryMask.full(img.shape)
            seg = imaging.apply_mask(img, mask)
            imaging.write_pgm(seg, os.path.join(d, f"{obj}.pgm"))
            imaging.write_pgm(imaging.GrayImage(mask.bits.astype("uint8") * 255),
                              os.path.join(d, f"{obj}_mask.pgm"))
        except Exception as exc:
            raise PipelineError("segment", obj, exc) from exc
        pairs.append((seg, mask))
    done()

    done = timed("extract")
    d = stage_dir("extract")
    try:
        tables = extract_dataset(pairs, config.levels, config.distance, ids)
    except Exception as exc:
        raise PipelineError("extract", getattr(exc, "object_id", None), exc) from exc
    for name, table in tables.items():
        write_table(table, os.path.join(d, f"{name}.csv"))
    done()

    done = timed("discretize")
    d = stage_dir("discretize")
    categorical = {}
    for name, table in tables.items():
        categorical[name] = equal_width_discretize(table, config.bins)
        write_categorical(categorical[name], os.path.join(d, f"{name}.csv"))
    done()

    done = timed("reduce")
    d = stage_dir("reduce")
    for name in DATASETS:
        counts = {"dataset": name, "extracted": len(FEATURE_NAMES)}
        for method in config.methods:
            try:
                result = METHODS[method](categorical[name])
            except Exception as exc:
                raise PipelineError("reduce", None, exc) from exc
            report.reducts[(name, method)] = result.reduct
            counts[method] = len(result.reduct)
            payload = dict(result.to_dict(), dataset=name)
            with open(os.path.join(d, f"{name}_{method}.json"), "w") as fh:
                json.dump(payload, fh, indent=2)
        report.feature_counts.append(counts)
    done()

    done = timed("evaluate")
    d = stage_dir("evaluate")
    for name in DATASETS:
        subsets = {"unreduced": FEATURE_NAMES}
        for method in config.methods:
            reduct = report.reducts[(name, method)]
            if reduct:
                subsets[method] = reduct
        try:
            rows = evaluate_subsets(tables[name], subsets, config.k, config.seed, name,
                                    (config.som_rows, config.som_cols), config.som_epochs)
        except Exception as exc:
            raise PipelineError("evaluate", None, exc) from exc
        report.validity.extend(rows)
        with open(os.path.join(d, f"{name}.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_FIELDS)
            for row in rows:
                w.writerow([_fmt(row[k]) for k in REPORT_FIELDS])
    done()

    report.write(out)
    log.info("pipeline finished: %d images, output in %s", len(ids), out)
    return report
