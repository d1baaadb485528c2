"""Multi-soft sets over a categorical information system and the SSUSQR reduct.

A soft set (F, a) over one attribute maps every value of ``a`` to the set of
objects taking it, i.e. it is a partition of U into value blocks. The AND of
two soft sets intersects their blocks pairwise, which is how the
indiscernibility partition U/IND(X) of an attribute set X is built.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .tabular import CategoricalTable


@dataclass(frozen=True)
class SoftPartition:
    """Partition of objects ``0..size-1`` into blocks.

    Blocks are tuples of object positions in canonical order (members sorted,
    blocks sorted by their smallest member). ``keys[n]`` is the value tuple that
    characterizes block ``n``, one label per attribute in ``attributes``.
    """

    attributes: tuple
    blocks: tuple
    size: int
    keys: tuple = field(default=(), compare=False)

    @classmethod
    def build(cls, attributes, groups: dict, size: int) -> "SoftPartition":
        items = sorted(((tuple(sorted(m)), k) for k, m in groups.items()), key=lambda t: t[0][0])
        return cls(tuple(attributes), tuple(b for b, _ in items), size, tuple(k for _, k in items))

    def __len__(self):
        return len(self.blocks)

    def block_of(self) -> list[int]:
        """Block index of every object."""
        out = [0] * self.size
        for n, block in enumerate(self.blocks):
            for u in block:
                out[u] = n
        return out

    def named(self, objects) -> list[set]:
        """Blocks with object positions replaced by ``objects`` ids."""
        return [{objects[u] for u in b} for b in self.blocks]


MultiSoftSet = dict  # attribute id -> SoftPartition


def decompose(table: CategoricalTable) -> MultiSoftSet:
    """Split the information system into one soft set per attribute."""
    if table.n_objects == 0:
        raise ValueError("table has no objects")
    out = {}
    for a, name in enumerate(table.attributes):
        groups: dict = {}
        for u, code in enumerate(table.codes[:, a]):
            groups.setdefault((table.labels[a][code],), []).append(u)
        out[name] = SoftPartition.build((name,), groups, table.n_objects)
    return out


def and_product(p: SoftPartition, q: SoftPartition) -> SoftPartition:
    """AND of two soft sets: every non-empty intersection of a p-block with a q-block."""
    if p.size != q.size:
        raise ValueError(f"universe mismatch: {p.size} vs {q.size} objects")
    qb = q.block_of()
    groups: dict = {}
    for n, block in enumerate(p.blocks):
        pk = p.keys[n] if p.keys else (n,)
        for u in block:
            m = qb[u]
            qk = q.keys[m] if q.keys else (m,)
            groups.setdefault((pk, qk), []).append(u)
    attrs = p.attributes + tuple(a for a in q.attributes if a not in p.attributes)
    groups = {pk + qk: members for (pk, qk), members in groups.items()}
    return SoftPartition.build(attrs, groups, p.size)


def universe(size: int) -> SoftPartition:
    """The trivial partition: IND of the empty attribute set."""
    return SoftPartition((), (tuple(range(size)),), size, ((),))


def partition(table: CategoricalTable, attrs, multisoft: MultiSoftSet | None = None) -> SoftPartition:
    """U/IND(attrs), folded from the per-attribute soft sets with AND."""
    attrs = list(attrs)
    for a in attrs:
        table.index(a)
    if multisoft is None:
        multisoft = decompose(table) if attrs else {}
    if not attrs:
        return universe(table.n_objects)
    return reduce(and_product, (multisoft[a] for a in attrs))


def partition_cardinality(p: SoftPartition) -> int:
    return len(p.blocks)


def ind_measure(p: SoftPartition) -> int:
    """|IND(X)| = sum of squared block sizes."""
    return sum(len(b) ** 2 for b in p.blocks)


def significance(table: CategoricalTable, x, multisoft: MultiSoftSet | None = None) -> Fraction:
    """Importance of ``x`` relative to the other attributes.

    ``Sig(x) = 1 - |IND(A)| / |IND(A - {x})|``, returned as an exact Fraction.
    """
    table.index(x)
    if len(table.attributes) < 2:
        raise ValueError("significance needs at least two attributes")
    ms = multisoft or decompose(table)
    rest = [a for a in table.attributes if a != x]
    full = ind_measure(partition(table, table.attributes, ms))
    without = ind_measure(partition(table, rest, ms))
    return 1 - Fraction(full, without)


@dataclass
class ReductResult:
    """Outcome of a reduct search.

    ``reduct`` lists attributes in the order they were selected (greedy methods)
    or in table order (URR). ``target`` is |U/IND(A)|. ``trace`` holds one
    JSON-ready record per round or scan step.
    """

    method: str
    reduct: tuple
    target: int
    trace: list = field(default_factory=list)

    @property
    def selected(self) -> frozenset:
        return frozenset(self.reduct)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "reduct": list(self.reduct),
            "size": len(self.reduct),
            "target_cardinality": self.target,
            "trace": self.trace,
        }


def _frac(f: Fraction) -> dict:
    return {"value": float(f), "exact": f"{f.numerator}/{f.denominator}"}


def ssusqr(table: CategoricalTable) -> ReductResult:
    """Soft-set unsupervised quick reduct.

    Starting from the empty set, each round adds the attribute whose AND with
    the current reduct gives the most blocks. Ties go to the larger
    significance, then to table order. Stops once the reduct's partition has
    as many blocks as U/IND(A).
    """
    if table.n_objects == 0 or not table.attributes:
        raise ValueError("table is empty")
    ms = decompose(table)
    attrs = table.attributes
    target = partition_cardinality(partition(table, attrs, ms))
    sig_cache: dict = {}

    def sig(a):
        if a not in sig_cache:
            sig_cache[a] = significance(table, a, ms)
        return sig_cache[a]

    reduct: list = []
    current = universe(table.n_objects)
    trace = []
    while partition_cardinality(current) != target:
        cands = {}
        for a in attrs:
            if a not in reduct:
                cands[a] = and_product(current, ms[a]) if reduct else ms[a]
        card = {a: partition_cardinality(p) for a, p in cands.items()}
        best = max(card.values())
        tied = [a for a in cands if card[a] == best]
        record = {"round": len(reduct) + 1, "cardinalities": card}
        if len(tied) > 1:
            sigs = {a: sig(a) for a in tied}
            record["significance"] = {a: _frac(s) for a, s in sigs.items()}
            top = max(sigs.values())
            chosen = next(a for a in tied if sigs[a] == top)
        else:
            chosen = tied[0]
        record["chosen"] = chosen
        record["cardinality"] = best
        trace.append(record)
        reduct.append(chosen)
        current = cands[chosen]
    return ReductResult("ssusqr", tuple(reduct), target, trace)


def enumerate_reducts(table: CategoricalTable, max_attributes: int = 20) -> list[frozenset]:
    """All inclusion-minimal attribute subsets B with |U/IND(B)| == |U/IND(A)|.

    Exhaustive; counts distinct value tuples directly instead of going through
    the soft-set machinery, so it can serve as an independent check.
    """
    attrs = table.attributes
    if len(attrs) > max_attributes:
        raise ValueError(f"{len(attrs)} attributes exceeds the enumeration guard of {max_attributes}")
    rows = [tuple(int(v) for v in r) for r in table.codes]

    def blocks(idx):
        return len({tuple(r[i] for i in idx) for r in rows})

    target = blocks(range(len(attrs)))
    found: list[frozenset] = []
    for size in range(0, len(attrs) + 1):
        for combo in itertools.combinations(range(len(attrs)), size):
            s = frozenset(combo)
            if any(f <= s for f in found):
                continue
            if blocks(combo) == target:
                found.append(s)
    return [frozenset(attrs[i] for i in f) for f in found]
