"""Rough-set baselines: unsupervised quick reduct (USQR) and relative reduct (URR)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .softset import (MultiSoftSet, ReductResult, SoftPartition, _frac, decompose, partition,
                      partition_cardinality)
from .tabular import CategoricalTable


@dataclass(frozen=True)
class DependencyRecord:
    subset: tuple
    gamma: dict  # attribute -> Fraction
    mean: Fraction


def _pos_size(bp: SoftPartition, yp: SoftPartition) -> int:
    yb = yp.block_of()
    return sum(len(b) for b in bp.blocks if len({yb[u] for u in b}) == 1)


def positive_region(table: CategoricalTable, attrs, y, multisoft: MultiSoftSet | None = None) -> frozenset:
    """Objects whose IND(attrs)-block lies wholly inside one block of U/IND({y})."""
    ms = multisoft or decompose(table)
    bp = partition(table, attrs, ms)
    yb = partition(table, [y], ms).block_of()
    return frozenset(u for b in bp.blocks if len({yb[u] for u in b}) == 1 for u in b)


def dependency(table: CategoricalTable, attrs, multisoft: MultiSoftSet | None = None) -> DependencyRecord:
    ms = multisoft or decompose(table)
    bp = partition(table, attrs, ms)
    n = table.n_objects
    gamma = {y: Fraction(_pos_size(bp, ms[y]), n) for y in table.attributes}
    mean = sum(gamma.values(), Fraction(0)) / len(gamma)
    return DependencyRecord(tuple(attrs), gamma, mean)


def mean_dependency(table: CategoricalTable, attrs, multisoft: MultiSoftSet | None = None) -> Fraction:
    """Mean over every attribute y of |POS_attrs(y)| / |U| (exact)."""
    return dependency(table, attrs, multisoft).mean


def usqr(table: CategoricalTable) -> ReductResult:
    """Greedy forward selection on mean dependency.

    Each round adds the attribute giving the largest mean dependency (first in
    table order on ties) until it matches the dependency of the full set.
    """
    if table.n_objects == 0 or not table.attributes:
        raise ValueError("table is empty")
    ms = decompose(table)
    attrs = table.attributes
    goal = mean_dependency(table, attrs, ms)
    target = partition_cardinality(partition(table, attrs, ms))
    reduct: list = []
    current = mean_dependency(table, reduct, ms)
    trace = []
    while current != goal:
        scores = {a: mean_dependency(table, reduct + [a], ms) for a in attrs if a not in reduct}
        chosen = max(scores, key=lambda a: scores[a])  # max keeps the first of equals
        if scores[chosen] <= current:
            raise RuntimeError("mean dependency stalled below the full-set value")
        trace.append({
            "round": len(reduct) + 1,
            "mean_dependency": {a: _frac(s) for a, s in scores.items()},
            "chosen": chosen,
        })
        reduct.append(chosen)
        current = scores[chosen]
    return ReductResult("usqr", tuple(reduct), target, trace)


def relative_dependency(table: CategoricalTable, attrs, a, multisoft: MultiSoftSet | None = None) -> Fraction:
    """|U/IND(R - {a})| / |U/IND(R)|; equals 1 exactly when ``a`` is dispensable in R."""
    attrs = list(attrs)
    if a not in attrs:
        raise ValueError(f"{a!r} is not in the attribute set")
    if len(attrs) < 2:
        raise ValueError("relative dependency needs at least two attributes")
    ms = multisoft or decompose(table)
    rest = [b for b in attrs if b != a]
    return Fraction(partition_cardinality(partition(table, rest, ms)),
                    partition_cardinality(partition(table, attrs, ms)))


def urr(table: CategoricalTable) -> ReductResult:
    """Backward elimination: drop each attribute, in table order, whose removal
    keeps the partition unchanged. At least one attribute is always kept."""
    if table.n_objects == 0 or not table.attributes:
        raise ValueError("table is empty")
    ms = decompose(table)
    reduct = list(table.attributes)
    target = partition_cardinality(partition(table, reduct, ms))
    trace = []
    for a in table.attributes:
        if len(reduct) < 2:
            trace.append({"attribute": a, "relative_dependency": None, "removed": False})
            continue
        k = relative_dependency(table, reduct, a, ms)
        removed = k == 1
        trace.append({"attribute": a, "relative_dependency": _frac(k), "removed": removed})
        if removed:
            reduct.remove(a)
    return ReductResult("urr", tuple(reduct), target, trace)
