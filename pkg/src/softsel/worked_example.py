"""Replays the shapes/sizes/colours example table step by step and reports a ledger."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .softset import (decompose, ind_measure, partition, partition_cardinality, significance,
                      ssusqr)
from .tabular import CategoricalTable, load_categorical

PASS, FAIL, DOCUMENTED = "PASS", "FAIL", "DISCREPANCY-DOCUMENTED"

# values as printed in the published example
PUBLISHED_BLOCKS = {
    "a1": [{"1", "4", "5"}, {"2", "8"}, {"3", "6", "7"}],
    "a2": [{"1", "3", "5"}, {"2", "4", "7", "8"}, {"6"}],
    "a3": [{"1", "5"}, {"2", "7", "8"}, {"3", "4", "6"}],
    "a4": [{"1", "4"}, {"2", "3", "6", "7"}, {"5", "8"}],
}
PUBLISHED_CARDINALITY = {
    ("a1", "a4"): 5,
    ("a2", "a4"): 7,
    ("a3", "a4"): 6,
    ("a1", "a2", "a4"): 8,
    ("a2", "a3", "a4"): 7,
}
PUBLISHED_SIGNIFICANCE = {"a1": 0.2, "a2": 0.2, "a3": 0.2, "a4": 0.33}
EXPECTED_SIGNIFICANCE = {"a1": Fraction(1, 5), "a2": Fraction(1, 5), "a4": Fraction(1, 3)}
# a3 is dispensable (U/{a1,a2,a4} is all singletons), so its significance is 0
DOCUMENTED_SIGNIFICANCE = {"a3": Fraction(0)}
PUBLISHED_SIG_A1_DENOMINATOR = 11  # the printed eight-term expansion sums to 11
PUBLISHED_REDUCT_ORDER = ("a4", "a2", "a1")


@dataclass
class Verdict:
    entries: list = field(default_factory=list)

    def add(self, status: str, what: str, detail: str = "") -> None:
        self.entries.append((status, what, detail))

    def check(self, ok: bool, what: str, detail: str = "") -> None:
        self.add(PASS if ok else FAIL, what, detail)

    @property
    def passed(self) -> bool:
        return all(s != FAIL for s, _, _ in self.entries)

    def lines(self) -> list[str]:
        out = [f"[{s}] {w}" + (f" -- {d}" if d else "") for s, w, d in self.entries]
        out.append(f"verdict: {'PASS' if self.passed else 'FAIL'}")
        return out


def load_table2() -> CategoricalTable:
    with resources.as_file(resources.files("softsel") / "data" / "table2.csv") as path:
        return load_categorical(path)


def run_worked_example(table: CategoricalTable | None = None) -> Verdict:
    t = table or load_table2()
    v = Verdict()
    ms = decompose(t)
    for a, expected in PUBLISHED_BLOCKS.items():
        got = ms[a].named(t.objects)
        v.check(got == expected, f"(F,{a}) blocks", " ".join(
            f"{'='.join(k)}:{','.join(sorted(b, key=int))}" for k, b in zip(ms[a].keys, got)))

    full = partition(t, t.attributes, ms)
    st = partition_cardinality(full)
    v.check(st == 8, "S_T(U) = |U/IND(A)|", f"{st} (published 8)")
    for a in t.attributes:
        c = partition_cardinality(ms[a])
        v.check(c == 3, f"|(F,{a})|", f"{c} (published 3)")

    sigs = {a: significance(t, a, ms) for a in t.attributes}
    for a, want in EXPECTED_SIGNIFICANCE.items():
        v.check(sigs[a] == want, f"Sig({a})",
                f"{sigs[a]} = {float(sigs[a]):.4f} (published {PUBLISHED_SIGNIFICANCE[a]})")
    for a, want in DOCUMENTED_SIGNIFICANCE.items():
        if sigs[a] != want:
            v.add(FAIL, f"Sig({a})", f"computed {sigs[a]}, expected {want}")
        else:
            v.add(DOCUMENTED, f"Sig({a})",
                  f"computed {sigs[a]}, published {PUBLISHED_SIGNIFICANCE[a]}; "
                  f"U/IND(A-{{{a}}}) is already all singletons")
    denom = ind_measure(partition(t, ["a2", "a3", "a4"], ms))
    v.check(denom == 10, "|IND(A-{a1})|", f"{denom}")
    v.add(DOCUMENTED, "Sig(a1) printed denominator",
          f"printed terms sum to {PUBLISHED_SIG_A1_DENOMINATOR}, block sizes give {denom}; "
          f"1 - 8/{denom} = 0.2 as printed")
    core = max(t.attributes, key=lambda a: sigs[a])
    v.check(core == "a4", "CORE(A)", core)

    for attrs, want in PUBLISHED_CARDINALITY.items():
        got = partition_cardinality(partition(t, attrs, ms))
        name = "F(" + " x ".join(attrs) + ")"
        v.check(got == want, name, f"{got} (published {want})")

    result = ssusqr(t)
    v.check(result.selected == {"a1", "a2", "a4"}, "SSUSQR reduct",
            "{" + ", ".join(sorted(result.reduct)) + "}")
    v.check(result.reduct == PUBLISHED_REDUCT_ORDER, "selection order", " -> ".join(result.reduct))
    v.check(result.target == st, "stop condition |U/IND(R)| == S_T(U)", str(result.target))
    return v
