"""Feature tables, categorical information systems and equal-width binning."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FeatureTable:
    """Continuous-valued table: one row per object, one column per feature."""

    columns: tuple
    ids: tuple
    values: np.ndarray

    def __post_init__(self):
        cols = tuple(str(c) for c in self.columns)
        ids = tuple(str(i) for i in self.ids)
        vals = np.array(self.values, dtype=np.float64).reshape(len(ids), len(cols))
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature values must be finite")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate object ids")
        vals.setflags(write=False)
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def select(self, columns) -> "FeatureTable":
        idx = [self.columns.index(c) for c in columns]
        return FeatureTable(tuple(columns), self.ids, self.values[:, idx])

    def __eq__(self, other):
        if not isinstance(other, FeatureTable):
            return NotImplemented
        return (self.columns == other.columns and self.ids == other.ids
                and bool(np.array_equal(self.values, other.values)))


@dataclass(frozen=True, eq=False)
class CategoricalTable:
    """Multi-valued information system S = (U, A, V, f).

    ``codes[u, a]`` is the category code of object ``u`` on attribute ``a`` and
    ``labels[a][code]`` the original label, so ``|V_a| == len(labels[a])``.
    """

    objects: tuple
    attributes: tuple
    codes: np.ndarray
    labels: tuple

    def __post_init__(self):
        objs = tuple(str(o) for o in self.objects)
        attrs = tuple(str(a) for a in self.attributes)
        codes = np.array(self.codes, dtype=np.int64).reshape(len(objs), len(attrs))
        labels = tuple(tuple(str(v) for v in col) for col in self.labels)
        if len(labels) != len(attrs):
            raise ValueError("one label list per attribute is required")
        if len(set(attrs)) != len(attrs):
            raise ValueError("duplicate attribute names")
        for a, col in enumerate(labels):
            if codes.shape[0] and (codes[:, a].min() < 0 or codes[:, a].max() >= len(col)):
                raise ValueError(f"codes of attribute {attrs[a]} outside [0, {len(col)})")
        codes.setflags(write=False)
        object.__setattr__(self, "objects", objs)
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, objects, attributes, rows) -> "CategoricalTable":
        """Encode label rows with codes assigned in order of first appearance."""
        rows = [list(r) for r in rows]
        codes = np.zeros((len(rows), len(attributes)), dtype=np.int64)
        labels = []
        for a in range(len(attributes)):
            seen: dict = {}
            for u, row in enumerate(rows):
                codes[u, a] = seen.setdefault(row[a], len(seen))
            labels.append(tuple(seen))
        return cls(tuple(objects), tuple(attributes), codes, tuple(labels))

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    def index(self, attribute) -> int:
        try:
            return self.attributes.index(attribute)
        except ValueError:
            raise KeyError(f"unknown attribute {attribute!r}") from None

    def value_count(self, attribute) -> int:
        return len(self.labels[self.index(attribute)])

    def column(self, attribute) -> np.ndarray:
        return self.codes[:, self.index(attribute)]

    def label_rows(self) -> list[list[str]]:
        return [[self.labels[a][c] for a, c in enumerate(row)] for row in self.codes]

    def __eq__(self, other):
        if not isinstance(other, CategoricalTable):
            return NotImplemented
        return (self.objects == other.objects and self.attributes == other.attributes
                and self.labels == other.labels and bool(np.array_equal(self.codes, other.codes)))


def equal_width_discretize(table: FeatureTable, bins: int = 4) -> CategoricalTable:
    """Split every column's range into ``bins`` equal-width half-open intervals.

    ``code = min(floor((v - min) / width), bins - 1)``; a constant column maps
    to code 0. Labels are the bin numbers as strings.
    """
    if bins < 2:
        raise ValueError("bins must be >= 2")
    vals = table.values
    if vals.shape[0] == 0:
        raise ValueError("table has no rows")
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite values cannot be discretized")
    lo = vals.min(axis=0)
    width = (vals.max(axis=0) - lo) / bins
    codes = np.zeros(vals.shape, dtype=np.int64)
    for a in range(vals.shape[1]):
        if width[a] > 0:
            codes[:, a] = np.minimum(np.floor((vals[:, a] - lo[a]) / width[a]), bins - 1)
    labels = tuple(tuple(str(b) for b in range(bins)) for _ in table.columns)
    return CategoricalTable(table.ids, table.columns, codes, labels)


def _read_rows(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [(n, r) for n, r in enumerate(rows, start=1) if r]
    if not rows:
        raise TableFormatError(f"{path}: empty file")
    (_, header), body = rows[0], rows[1:]
    if not header or header[0] != "object_id":
        raise TableFormatError(f"{path}: first column must be 'object_id'")
    seen = set()
    for n, row in body:
        if len(row) != len(header):
            raise TableFormatError(
                f"{path}, line {n}: expected {len(header)} fields, got {len(row)}")
        if row[0] in seen:
            raise TableFormatError(f"{path}, line {n}: duplicate object id {row[0]!r}")
        seen.add(row[0])
    return header, body


def read_table(path) -> FeatureTable:
    header, body = _read_rows(path)
    values = []
    for n, row in body:
        try:
            values.append([float(v) for v in row[1:]])
        except ValueError as exc:
            raise TableFormatError(f"{path}, line {n}: {exc}") from exc
        if not all(math.isfinite(v) for v in values[-1]):
            raise TableFormatError(f"{path}, line {n}: non-finite value")
    ids = [row[0] for _, row in body]
    return FeatureTable(tuple(header[1:]), tuple(ids),
                        np.array(values, dtype=np.float64).reshape(len(ids), len(header) - 1))


def write_table(table: FeatureTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("object_id",) + table.columns)
        for obj, row in zip(table.ids, table.values):
            w.writerow([obj] + [format(float(v), ".17g") for v in row])


def load_categorical(path) -> CategoricalTable:
    header, body = _read_rows(path)
    if not body or len(header) < 2:
        raise TableFormatError(f"{path}: categorical table is empty")
    return CategoricalTable.from_labels([r[0] for _, r in body], header[1:],
                                        [r[1:] for _, r in body])


def write_categorical(table: CategoricalTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("object_id",) + table.attributes)
        for obj, row in zip(table.objects, table.label_rows()):
            w.writerow([obj] + row)
