"""K-means and SOM clustering with Dunn and silhouette validity indices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tabular import FeatureTable


class UndefinedIndexError(ValueError):
    """A validity index is not defined for the given clustering."""


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    k: int
    centroids: np.ndarray
    objective: list = field(default_factory=list)  # k-means WCSS after every iteration
    units: np.ndarray | None = None  # SOM: grid unit index of each dense label

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)


def standardize(data) -> np.ndarray:
    """Column z-scores with population sd; zero-variance columns become 0."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2D matrix with at least two rows")
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    out = np.zeros_like(x)
    ok = sd > 0
    out[:, ok] = (x[:, ok] - mu[ok]) / sd[ok]
    return out


def pairwise_distances(x: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - x[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _sq_dist(x, c):
    diff = x[:, None, :] - c[None, :, :]
    return np.sum(diff * diff, axis=-1)


def _kmeanspp(x, k, rng):
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            # every point coincides with a centre; take the first unused index
            nxt = next(i for i in range(n) if i not in chosen)
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((x - x[nxt]) ** 2, axis=1))
    return x[chosen].copy()


def kmeans(data, k: int = 2, seed: int = 0, max_iter: int = 300) -> ClusterAssignment:
    """Lloyd's algorithm from a k-means++ start.

    Empty clusters are re-seeded at the point farthest from its centroid. The
    within-cluster sum of squares is recorded after each update and must never
    increase.
    """
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centroids = _kmeanspp(x, k, rng)
    labels = np.argmin(_sq_dist(x, centroids), axis=1)
    history = []
    for _ in range(max_iter):
        for c in range(k):
            members = labels == c
            if members.any():
                centroids[c] = x[members].mean(axis=0)
        d2 = _sq_dist(x, centroids)
        for c in range(k):
            if not np.any(labels == c):
                own = d2[np.arange(n), labels]
                far = int(np.argmax(own))
                centroids[c] = x[far]
                labels[far] = c
                d2 = _sq_dist(x, centroids)
        wcss = float(np.sum(d2[np.arange(n), labels]))
        if history and wcss > history[-1] * (1 + 1e-12) + 1e-12:
            raise RuntimeError(f"k-means objective increased: {history[-1]} -> {wcss}")
        history.append(wcss)
        new = np.argmin(d2, axis=1)
        if np.array_equal(new, labels):
            break
        labels = new
    return ClusterAssignment(labels.astype(np.int64), k, centroids, history)


def som(data, grid_rows: int = 2, grid_cols: int = 2, epochs: int = 200, seed: int = 0,
        learning_rate: float = 0.5, radius: float | None = None) -> ClusterAssignment:
    """Online self-organizing map on a rectangular grid.

    Weights start at randomly drawn data points. Learning rate and Gaussian
    neighbourhood radius both decay as ``exp(-epoch / epochs)``. Labels are
    best-matching units renumbered densely over the non-empty units.
    """
    x = np.asarray(data, dtype=np.float64)
    n = x.shape[0]
    units = grid_rows * grid_cols
    if grid_rows < 1 or grid_cols < 1 or units < 2:
        raise ValueError("SOM grid needs at least two units")
    if radius is None:
        radius = max(grid_rows, grid_cols) / 2.0
    rng = np.random.default_rng(seed)
    start = rng.choice(n, size=units, replace=n < units)
    weights = x[start].copy()
    coords = np.array([(r, c) for r in range(grid_rows) for c in range(grid_cols)], dtype=np.float64)
    grid_d2 = _sq_dist(coords, coords)
    for epoch in range(epochs):
        decay = math.exp(-epoch / epochs)
        lr, rad = learning_rate * decay, radius * decay
        for i in rng.permutation(n):
            bmu = int(np.argmin(np.sum((weights - x[i]) ** 2, axis=1)))
            h = np.exp(-grid_d2[bmu] / (2.0 * rad * rad))
            weights += lr * h[:, None] * (x[i] - weights)
    bmus = np.argmin(_sq_dist(x, weights), axis=1)
    used = np.unique(bmus)
    dense = np.searchsorted(used, bmus)
    return ClusterAssignment(dense.astype(np.int64), len(used), weights[used], units=used)


def _labels(assignment):
    return np.asarray(getattr(assignment, "labels", assignment), dtype=np.int64)


def dunn_index(data, assignment) -> float:
    """Smallest single-linkage distance between clusters over the largest diameter."""
    x = np.asarray(data, dtype=np.float64)
    labels = _labels(assignment)
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise UndefinedIndexError("Dunn index needs at least two clusters")
    d = pairwise_distances(x)
    same = labels[:, None] == labels[None, :]
    diameter = float(d[same].max())
    if diameter == 0.0:
        raise UndefinedIndexError("every cluster has zero diameter")
    separation = float(d[~same].min())
    return separation / diameter


def silhouette(data, assignment) -> float:
    """Mean silhouette width; points alone in their cluster contribute 0."""
    x = np.asarray(data, dtype=np.float64)
    labels = _labels(assignment)
    clusters = np.unique(labels)
    if len(clusters) < 2:
        raise UndefinedIndexError("silhouette needs at least two clusters")
    d = pairwise_distances(x)
    n = len(labels)
    s = np.zeros(n)
    for i in range(n):
        own = labels == labels[i]
        m = own.sum()
        if m == 1:
            continue
        a = d[i, own].sum() / (m - 1)
        b = min(d[i, labels == c].mean() for c in clusters if c != labels[i])
        top = max(a, b)
        s[i] = 0.0 if top == 0 else (b - a) / top
    return float(s.mean())


REPORT_FIELDS = ("dataset", "method", "algorithm", "n_features", "dunn", "silhouette")


def _safe(index, x, assignment) -> float:
    try:
        return index(x, assignment)
    except UndefinedIndexError:
        return float("nan")


def evaluate_subsets(table: FeatureTable, subsets: dict, k: int = 2, seed: int = 0,
                     dataset: str = "", som_grid=(2, 2), som_epochs: int = 200,
                     scale: bool = True) -> list[dict]:
    """Cluster each named column subset with k-means and SOM and score both.

    Columns are z-scored first unless ``scale`` is false. Returns one row per
    (subset, algorithm) with Dunn and silhouette; an index that is undefined
    for the clustering found is reported as NaN.
    """
    rows = []
    for method, columns in subsets.items():
        columns = list(columns)
        if not columns:
            raise ValueError(f"subset {method!r} is empty")
        x = table.select(columns).values
        if scale:
            x = standardize(x)
        for algo in ("kmeans", "som"):
            if algo == "kmeans":
                assignment = kmeans(x, k, seed)
            else:
                assignment = som(x, som_grid[0], som_grid[1], som_epochs, seed)
            rows.append({
                "dataset": dataset,
                "method": method,
                "algorithm": algo,
                "n_features": len(columns),
                "dunn": _safe(dunn_index, x, assignment),
                "silhouette": _safe(silhouette, x, assignment),
            })
    return rows
