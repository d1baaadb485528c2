"""Deterministic synthetic images standing in for CT lung slices."""

from __future__ import annotations

import os

import numpy as np

from .imaging import GrayImage, write_pgm

FIXTURE_COUNT = 10
FIXTURE_SIZE = 64
FIXTURE_SEED = 2013


def _ellipse(shape, center, axes):
    rr, cc = np.mgrid[: shape[0], : shape[1]]
    return ((rr - center[0]) / axes[0]) ** 2 + ((cc - center[1]) / axes[1]) ** 2 <= 1.0


def plateau_image(shape=(16, 16), split: int | None = None, low: int = 50, high: int = 200) -> GrayImage:
    """Left columns at ``low``, the rest at ``high``."""
    h, w = shape
    split = w // 2 if split is None else split
    px = np.full(shape, high, dtype=np.uint8)
    px[:, :split] = low
    return GrayImage(px)


def shaded_pattern(size: int = 64) -> GrayImage:
    """Smooth shaded disc on a gradient with a few edges; used for filter comparisons."""
    rr, cc = np.mgrid[:size, :size].astype(np.float64)
    px = 60 + 80 * cc / (size - 1)
    px[_ellipse((size, size), (size * 0.45, size * 0.5), (size * 0.3, size * 0.25))] += 70
    px[size // 8 : size // 4, size // 8 : size // 3] = 30
    px += 10 * np.sin(rr / 5.0)
    return GrayImage(np.clip(np.floor(px + 0.5), 0, 255).astype(np.uint8))


def lung_phantom(seed: int, size: int = FIXTURE_SIZE):
    """A body outline with two dark textured lung fields.

    Odd seeds get coarse striped lung texture with bright nodules, even seeds a
    fine speckle texture. Returns the image and one seed point per lung.
    """
    rng = np.random.default_rng(seed)
    shape = (size, size)
    rr, cc = np.mgrid[:size, :size].astype(np.float64)
    px = np.zeros(shape)
    body = _ellipse(shape, (size / 2, size / 2), (size * 0.46, size * 0.48))
    px[body] = 150 + rng.normal(0, 4, body.sum())
    coarse = seed % 2 == 1
    seeds = []
    for side in (-1, 1):
        center = (size * 0.5, size * (0.5 + side * 0.22))
        lung = _ellipse(shape, center, (size * 0.32, size * 0.15))
        angle = rng.uniform(0, np.pi)
        if coarse:
            freq, amp = rng.uniform(0.5, 0.9), rng.uniform(10, 14)
        else:
            freq, amp = rng.uniform(1.6, 2.4), rng.uniform(3, 6)
        wave = amp * np.sin(freq * (rr * np.cos(angle) + cc * np.sin(angle)))
        speck = rng.normal(0, 2.0 if coarse else 5.0, shape)
        px[lung] = 45 + wave[lung] + speck[lung]
        if coarse:
            for _ in range(3):
                nr = center[0] + rng.uniform(-0.2, 0.2) * size
                nc = center[1] + rng.uniform(-0.06, 0.06) * size
                nod = _ellipse(shape, (nr, nc), (2.5, 2.5)) & lung
                px[nod] = 70
        seeds.append((int(center[0]), int(center[1])))
    return GrayImage(np.clip(np.floor(px + 0.5), 0, 255).astype(np.uint8)), seeds


def fixture_images(count: int = FIXTURE_COUNT, size: int = FIXTURE_SIZE, seed: int = FIXTURE_SEED):
    return [lung_phantom(seed + n, size)[0] for n in range(count)]


def fixture_seeds(size: int = FIXTURE_SIZE):
    """Seed points shared by every fixture image (one per lung)."""
    return lung_phantom(0, size)[1]


def write_fixture_set(out_dir, count: int = FIXTURE_COUNT, size: int = FIXTURE_SIZE,
                      seed: int = FIXTURE_SEED) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for n, img in enumerate(fixture_images(count, size, seed), start=1):
        path = os.path.join(out_dir, f"phantom{n:02d}.pgm")
        write_pgm(img, path, binary=True)
        paths.append(path)
    return paths
