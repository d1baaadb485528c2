"""GLCM / GLDM construction and the 19 Haralick-family texture features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import BinaryMask, GrayImage
from .tabular import FeatureTable

FEATURE_NAMES = tuple(f"f{i}" for i in range(1, 20))
FEATURE_LABELS = (
    "angular second moment",
    "contrast",
    "correlation",
    "sum of squares: variance",
    "inverse difference moment",
    "sum average",
    "sum variance",
    "sum entropy",
    "entropy",
    "difference variance",
    "difference entropy",
    "information measure of correlation I",
    "information measure of correlation II",
    "maximal correlation coefficient",
    "cluster shade",
    "cluster prominence",
    "product moment",
    "inertia",
    "mean",
)

# (row, col) steps; rows grow downward so "up" is -1
DIRECTIONS = {0: (0, 1), 45: (-1, 1), 90: (-1, 0), 135: (-1, -1)}
DATASETS = ("glcm_0", "glcm_45", "glcm_90", "glcm_135", "gldm")


class EmptyMatrixError(ValueError):
    """No valid pixel pairs were available to build a matrix."""

    object_id = None


@dataclass(frozen=True, eq=False)
class CooccurrenceMatrix:
    cells: np.ndarray
    direction: int
    distance: int
    symmetric: bool = True

    @property
    def levels(self) -> int:
        return self.cells.shape[0]


@dataclass(frozen=True, eq=False)
class DifferenceMatrix:
    """Joint distribution over (gray level of first pixel, |difference|)."""

    cells: np.ndarray
    displacement: object

    @property
    def levels(self) -> int:
        return self.cells.shape[0]


@dataclass(frozen=True)
class FeatureVector:
    values: tuple
    degenerate: bool = False

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.values[FEATURE_NAMES.index(key)]
        return self.values[key]

    def __len__(self):
        return len(self.values)

    def as_dict(self) -> dict:
        return dict(zip(FEATURE_NAMES, self.values))


def quantize(image: GrayImage, mask: BinaryMask | None = None, levels: int = 32) -> GrayImage:
    """Map 8-bit intensities onto ``levels`` equal bins: ``floor(v * G / 256)``.

    Pixels outside ``mask`` are set to 0; callers pass the same mask on to
    :func:`glcm` / :func:`gldm`, which ignore them when counting pairs.
    """
    if not 2 <= levels <= 256:
        raise ValueError(f"levels must be in [2, 256], got {levels}")
    q = (image.pixels.astype(np.int64) * levels) // 256
    if mask is not None:
        if mask.shape != image.shape:
            raise ValueError("mask shape does not match image")
        q = np.where(mask.bits, q, 0)
    return GrayImage(q.astype(np.uint8))


def _pairs(image: GrayImage, mask: BinaryMask | None, dr: int, dc: int):
    """Return (first, second) level arrays for every in-mask pair (p, p + (dr, dc))."""
    px = image.pixels.astype(np.int64)
    h, w = px.shape
    valid = np.ones((h, w), dtype=bool) if mask is None else mask.bits
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r0 >= r1 or c0 >= c1:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    a = px[r0:r1, c0:c1]
    b = px[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
    ok = valid[r0:r1, c0:c1] & valid[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
    return a[ok], b[ok]


def _check_levels(image: GrayImage, levels: int) -> None:
    if int(image.pixels.max()) >= levels:
        raise ValueError(f"image has values >= levels ({levels}); quantize first")


def glcm(image: GrayImage, mask: BinaryMask | None = None, direction: int = 0,
         distance: int = 1, symmetric: bool = True, levels: int = 32) -> CooccurrenceMatrix:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {sorted(DIRECTIONS)}")
    if distance < 1:
        raise ValueError("distance must be >= 1")
    _check_levels(image, levels)
    dr, dc = DIRECTIONS[direction]
    a, b = _pairs(image, mask, dr * distance, dc * distance)
    if a.size == 0:
        raise EmptyMatrixError(f"no pixel pairs for direction {direction}, distance {distance}")
    counts = np.zeros((levels, levels), dtype=np.float64)
    np.add.at(counts, (a, b), 1.0)
    if symmetric:
        counts = counts + counts.T
    return CooccurrenceMatrix(counts / counts.sum(), direction, distance, symmetric)


def gldm(image: GrayImage, mask: BinaryMask | None = None, displacement="all",
         distance: int = 1, levels: int = 32) -> DifferenceMatrix:
    """Gray level difference matrix.

    ``displacement`` is a ``(dr, dc)`` offset or ``"all"``, which pools the four
    GLCM direction offsets scaled by ``distance``.
    """
    _check_levels(image, levels)
    if displacement == "all":
        offsets = [(dr * distance, dc * distance) for dr, dc in DIRECTIONS.values()]
    else:
        dr, dc = displacement
        if dr == 0 and dc == 0:
            raise ValueError("displacement must be non-zero")
        offsets = [(int(dr), int(dc))]
    counts = np.zeros((levels, levels), dtype=np.float64)
    for dr, dc in offsets:
        a, b = _pairs(image, mask, dr, dc)
        np.add.at(counts, (a, np.abs(a - b)), 1.0)
    total = counts.sum()
    if total == 0:
        raise EmptyMatrixError(f"no pixel pairs for displacement {displacement!r}")
    return DifferenceMatrix(counts / total, displacement)


def _entropy(p: np.ndarray) -> float:
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def features(matrix) -> FeatureVector:
    """Compute f1..f19 from a normalized co-occurrence or difference matrix.

    Indices are 0-based, logs are base 2 and ``0 log 0 = 0``. Zero denominators
    (correlation, IMC-I) yield 0 and set ``degenerate``.
    """
    p = np.asarray(getattr(matrix, "cells", matrix), dtype=np.float64)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("matrix must be square")
    g = p.shape[0]
    i = np.arange(g, dtype=np.float64)[:, None]
    j = np.arange(g, dtype=np.float64)[None, :]
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    mu_x = float(np.sum(i[:, 0] * px))
    mu_y = float(np.sum(j[0] * py))
    var_x = float(np.sum((i[:, 0] - mu_x) ** 2 * px))
    var_y = float(np.sum((j[0] - mu_y) ** 2 * py))

    ii = np.broadcast_to(i, p.shape).astype(np.int64)
    jj = np.broadcast_to(j, p.shape).astype(np.int64)
    p_sum = np.bincount((ii + jj).ravel(), weights=p.ravel(), minlength=2 * g - 1)
    p_diff = np.bincount(np.abs(ii - jj).ravel(), weights=p.ravel(), minlength=g)
    k_sum = np.arange(2 * g - 1, dtype=np.float64)
    k_diff = np.arange(g, dtype=np.float64)

    degenerate = False
    f1 = float(np.sum(p * p))
    f2 = float(np.sum(k_diff ** 2 * p_diff))
    sd = np.sqrt(var_x * var_y)
    if sd > 0:
        f3 = (float(np.sum(i * j * p)) - mu_x * mu_y) / sd
    else:
        f3, degenerate = 0.0, True
    f4 = float(np.sum((i - mu_x) ** 2 * p))
    f5 = float(np.sum(p / (1.0 + (i - j) ** 2)))
    f6 = float(np.sum(k_sum * p_sum))
    f7 = float(np.sum((k_sum - f6) ** 2 * p_sum))
    f8 = _entropy(p_sum)
    f9 = _entropy(p)
    d_mean = float(np.sum(k_diff * p_diff))
    f10 = float(np.sum((k_diff - d_mean) ** 2 * p_diff))
    f11 = _entropy(p_diff)

    hx, hy = _entropy(px), _entropy(py)
    outer = px[:, None] * py[None, :]
    nz = p > 0
    hxy1 = float(-np.sum(p[nz] * np.log2(outer[nz])))
    onz = outer > 0
    hxy2 = float(-np.sum(outer[onz] * np.log2(outer[onz])))
    if max(hx, hy) > 0:
        f12 = (f9 - hxy1) / max(hx, hy)
    else:
        f12, degenerate = 0.0, True
    f13 = float(np.sqrt(1.0 - np.exp(-2.0 * max(hxy2 - f9, 0.0))))

    f14 = _max_correlation(p, px, py)
    if f14 is None:
        f14, degenerate = 0.0, True

    dx, dy = i - mu_x, j - mu_y
    f15 = float(np.sum((dx + dy) ** 3 * p))
    f16 = float(np.sum((dx + dy) ** 4 * p))
    f17 = float(np.sum(dx * dy * p))
    f18 = float(np.sum((i - j) ** 2 * p))
    f19 = mu_x

    vals = (f1, f2, f3, f4, f5, f6, f7, f8, f9, f10, f11, f12, f13, f14, f15, f16, f17, f18, f19)
    return FeatureVector(tuple(float(v) for v in vals), degenerate)


def _max_correlation(p, px, py):
    g = p.shape[0]
    if g < 2:
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(py[None, :] > 0, p / py[None, :], 0.0)
        q = scaled @ p.T
        q = np.where(px[:, None] > 0, q / px[:, None], 0.0)
    eig = np.sort(np.linalg.eigvals(q).real)[::-1]
    return float(np.sqrt(max(eig[1], 0.0)))


def extract_image(image: GrayImage, mask: BinaryMask | None = None, levels: int = 32,
                  distance: int = 1) -> dict[str, FeatureVector]:
    """Features for the four GLCM directions plus the pooled GLDM of one image."""
    q = quantize(image, mask, levels)
    out = {}
    for angle in DIRECTIONS:
        out[f"glcm_{angle}"] = features(glcm(q, mask, angle, distance, True, levels))
    out["gldm"] = features(gldm(q, mask, "all", distance, levels))
    return out


def extract_dataset(images, levels: int = 32, distance: int = 1,
                    ids=None) -> dict[str, FeatureTable]:
    """Build the five 19-feature tables (GLCM 0/45/90/135 and GLDM).

    ``images`` is a sequence of ``(GrayImage, BinaryMask or None)``; rows keep
    input order. ``ids`` defaults to ``img01``, ``img02``, ...
    """
    images = list(images)
    if not images:
        raise ValueError("no images given")
    if ids is None:
        width = max(2, len(str(len(images))))
        ids = [f"img{n:0{width}d}" for n in range(1, len(images) + 1)]
    ids = list(ids)
    if len(ids) != len(images):
        raise ValueError("ids and images differ in length")
    rows = {name: [] for name in DATASETS}
    for obj_id, (image, mask) in zip(ids, images):
        try:
            vecs = extract_image(image, mask, levels, distance)
        except EmptyMatrixError as exc:
            err = EmptyMatrixError(f"{obj_id}: {exc}")
            err.object_id = obj_id
            raise err from exc
        for name in DATASETS:
            rows[name].append(vecs[name].values)
    return {name: FeatureTable(FEATURE_NAMES, tuple(ids), np.array(rows[name], dtype=np.float64))
            for name in DATASETS}
