"""Grayscale image I/O, noise models, denoising filters, SNR and region growing."""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class PGMFormatError(ValueError):
    pass


class InfiniteSNR(ArithmeticError):
    """Raised by :func:`snr` when the processed image equals the original."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale image; ``pixels`` is a (height, width) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image must be a non-empty 2D grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = px.copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __hash__(self):
        return hash((self.shape, self.pixels.tobytes()))


@dataclass(frozen=True, eq=False)
class BinaryMask:
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=bool).copy()
        if b.ndim != 2:
            raise ValueError("mask must be 2D")
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape

    def count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.shape, self.bits.tobytes()))

    @classmethod
    def full(cls, shape, value=True):
        return cls(np.full(shape, value, dtype=bool))


# ---------------------------------------------------------------------------
# PGM

_TOKEN = re.compile(rb"\s*(#[^\n]*\n\s*)*([^\s#]+)")


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 0
    for _ in range(count):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PGMFormatError("truncated PGM header")
        tokens.append(m.group(2))
        pos = m.end()
    return tokens, pos


def read_pgm(path) -> GrayImage:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = _header_tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise PGMFormatError(f"unsupported magic number {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PGMFormatError(f"malformed PGM header in {path}") from exc
    if width <= 0 or height <= 0:
        raise PGMFormatError("PGM dimensions must be positive")
    if not 0 < maxval <= 255:
        raise PGMFormatError(f"maxval {maxval} not supported (must be 1..255)")
    n = width * height
    if magic == b"P5":
        # exactly one whitespace byte separates the header from the raster
        raster = data[pos + 1 : pos + 1 + n]
        if len(raster) != n:
            raise PGMFormatError("truncated P5 raster")
        values = np.frombuffer(raster, dtype=np.uint8)
    else:
        body = re.sub(rb"#[^\n]*", b"", data[pos:]).split()
        if len(body) < n:
            raise PGMFormatError("truncated P2 raster")
        try:
            values = np.array([int(t) for t in body[:n]], dtype=np.int64)
        except ValueError as exc:
            raise PGMFormatError("non-integer sample in P2 raster") from exc
    if values.max(initial=0) > maxval:
        raise PGMFormatError("sample exceeds maxval")
    return GrayImage(values.reshape(height, width).astype(np.uint8))


def write_pgm(image: GrayImage, path, binary: bool = True) -> None:
    if not isinstance(image, GrayImage):
        image = GrayImage(image)
    h, w = image.shape
    header = f"{'P5' if binary else 'P2'}\n{w} {h}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        if binary:
            fh.write(image.pixels.tobytes())
        else:
            for row in image.pixels:
                fh.write((" ".join(str(int(v)) for v in row) + "\n").encode("ascii"))


# ---------------------------------------------------------------------------
# noise

def _round_half_up(x):
    # inputs are non-negative, so half-up equals half-away-from-zero
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def _to_image(values) -> GrayImage:
    return GrayImage(np.clip(values, 0, 255).astype(np.uint8))


def add_noise(image: GrayImage, kind: str, level: float, seed: int) -> GrayImage:
    """Return a noisy copy of ``image``.

    ``kind`` is ``"gaussian"`` (``level`` = sigma in intensity units) or
    ``"salt_pepper"``/``"sp"`` (``level`` = fraction of pixels replaced). Salt and
    pepper noise changes exactly ``round(level * K)`` pixels, each to 0 or 255.
    """
    rng = np.random.default_rng(seed)
    px = image.pixels.astype(np.float64)
    if kind == "gaussian":
        if level < 0:
            raise ValueError("sigma must be >= 0")
        if level == 0:
            return image
        noisy = px + rng.normal(0.0, level, size=px.shape)
        return _to_image(_round_half_up(np.clip(noisy, 0, 255)))
    if kind in ("salt_pepper", "sp"):
        if not 0.0 <= level <= 1.0:
            raise ValueError("salt-and-pepper fraction must lie in [0, 1]")
        k = px.size
        n = int(math.floor(level * k + 0.5))
        flat = image.pixels.reshape(-1).copy()
        idx = rng.choice(k, size=n, replace=False)
        salt = rng.random(n) < 0.5
        target = np.where(salt, 255, 0).astype(np.uint8)
        # a pixel already at the drawn extreme goes to the other one so it really changes
        same = flat[idx] == target
        target[same] = 255 - target[same]
        flat[idx] = target
        return GrayImage(flat.reshape(image.shape))
    raise ValueError(f"unknown noise kind {kind!r}")


# ---------------------------------------------------------------------------
# filters

def _check_window(window: int) -> None:
    if window < 1 or window % 2 == 0:
        raise ValueError(f"window must be a positive odd size, got {window}")


def _windows(image: GrayImage, window: int) -> np.ndarray:
    r = window // 2
    padded = np.pad(image.pixels.astype(np.float64), r, mode="edge")
    return sliding_window_view(padded, (window, window))


def mean_filter(image: GrayImage, window: int = 3) -> GrayImage:
    _check_window(window)
    if window < 3:
        raise ValueError("mean filter window must be >= 3")
    win = _windows(image, window)
    return _to_image(_round_half_up(win.sum(axis=(-2, -1)) / (window * window)))


def gaussian_kernel(window: int, sigma: float | None = None) -> np.ndarray:
    """Sampled 2D Gaussian on a ``window`` x ``window`` grid, normalized to sum 1."""
    _check_window(window)
    if sigma is None:
        sigma = window / 6.0
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    r = window // 2
    ax = np.arange(-r, r + 1, dtype=np.float64)
    g = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2.0 * sigma * sigma))
    return g / g.sum()


def gaussian_filter(image: GrayImage, window: int = 3, sigma: float | None = None) -> GrayImage:
    kernel = gaussian_kernel(window, sigma)
    win = _windows(image, window)
    return _to_image(_round_half_up(np.tensordot(win, kernel, axes=([2, 3], [0, 1]))))


def median_filter(image: GrayImage, window: int = 5) -> GrayImage:
    _check_window(window)
    win = _windows(image, window)
    # odd window area, so the median is always an actual sample
    return _to_image(np.median(win, axis=(-2, -1)))


FILTERS = {
    "mean": mean_filter,
    "gaussian": gaussian_filter,
    "median": median_filter,
}


def snr(original: GrayImage, processed: GrayImage) -> float:
    """Signal-to-noise ratio in dB: 10*log10(sum S^2 / sum (S_hat - S)^2)."""
    if original.shape != processed.shape:
        raise ValueError(f"dimension mismatch: {original.shape} vs {processed.shape}")
    s = original.pixels.astype(np.float64)
    d = processed.pixels.astype(np.float64) - s
    noise = float(np.sum(d * d))
    if noise == 0.0:
        raise InfiniteSNR("images are identical")
    signal = float(np.sum(s * s))
    if signal == 0.0:
        return -math.inf
    return 10.0 * math.log10(signal / noise)


# ---------------------------------------------------------------------------
# segmentation

_NEIGHBORS_4 = ((-1, 0), (0, 1), (1, 0), (0, -1))
_NEIGHBORS_8 = _NEIGHBORS_4 + ((-1, 1), (1, 1), (1, -1), (-1, -1))


def region_grow(image: GrayImage, seeds, threshold: float, connectivity: int = 4) -> BinaryMask:
    """Grow a region from ``seeds`` using a running-mean similarity test.

    A neighbor joins when ``|value - region mean| <= threshold``. Growth is FIFO
    and neighbors are visited N, E, S, W (then NE, SE, SW, NW for 8-connectivity),
    so the result is deterministic. A rejected pixel may still join later, when
    reached again after the mean has moved.
    """
    seeds = [tuple(int(v) for v in s) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed is required")
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    if connectivity not in (4, 8):
        raise ValueError("connectivity must be 4 or 8")
    h, w = image.shape
    for r, c in seeds:
        if not (0 <= r < h and 0 <= c < w):
            raise ValueError(f"seed {(r, c)} outside image of shape {(h, w)}")
    px = image.pixels
    offsets = _NEIGHBORS_4 if connectivity == 4 else _NEIGHBORS_8
    region = np.zeros((h, w), dtype=bool)
    queue: deque = deque()
    total, count = 0, 0
    for r, c in seeds:
        if not region[r, c]:
            region[r, c] = True
            total += int(px[r, c])
            count += 1
            queue.append((r, c))
    while queue:
        r, c = queue.popleft()
        for dr, dc in offsets:
            rr, cc = r + dr, c + dc
            if 0 <= rr < h and 0 <= cc < w and not region[rr, cc]:
                v = int(px[rr, cc])
                if abs(v * count - total) <= threshold * count:
                    region[rr, cc] = True
                    total += v
                    count += 1
                    queue.append((rr, cc))
    return BinaryMask(region)


def apply_mask(image: GrayImage, mask: BinaryMask) -> GrayImage:
    if image.shape != mask.shape:
        raise ValueError(f"dimension mismatch: image {image.shape}, mask {mask.shape}")
    return GrayImage(np.where(mask.bits, image.pixels, 0).astype(np.uint8))
