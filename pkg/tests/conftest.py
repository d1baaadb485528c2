import numpy as np
import pytest

from softsel.tabular import CategoricalTable
from softsel.worked_example import load_table2


@pytest.fixture
def table2():
    return load_table2()


def random_table(seed, max_objects=10, max_attrs=6, max_values=4):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, max_objects + 1))
    m = int(rng.integers(1, max_attrs + 1))
    sizes = rng.integers(1, max_values + 1, size=m)
    rows = [[f"v{int(rng.integers(s))}" for s in sizes] for _ in range(n)]
    return CategoricalTable.from_labels([str(i + 1) for i in range(n)],
                                        [f"a{j + 1}" for j in range(m)], rows)


def table_from_columns(columns: dict):
    names = list(columns)
    n = len(next(iter(columns.values())))
    rows = [[str(columns[c][i]) for c in names] for i in range(n)]
    return CategoricalTable.from_labels([str(i + 1) for i in range(n)], names, rows)


_ACCEPTANCE: list[str] = []


class _Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        line = f"criterion {self.number}: {status}  {self.title}"
        if exc is not None:
            line += f" ({exc_type.__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
        _ACCEPTANCE.append(line)
        print(line)
        return False


@pytest.fixture
def criterion():
    """Context manager factory that logs one PASS/FAIL line per acceptance criterion."""
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
