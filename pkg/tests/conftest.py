import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from maxsat_bandit.formula import FormulaBuilder  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@st.composite
def formulas(draw, max_vars=8, max_clauses=12, max_weight=20, allow_empty=False):
    n = draw(st.integers(1, max_vars))
    lits = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clause = st.lists(lits, min_size=1, max_size=min(4, 2 * n))
    entries = draw(
        st.lists(
            st.tuples(clause, st.one_of(st.none(), st.integers(1, max_weight))),
            min_size=0 if allow_empty else 1,
            max_size=max_clauses,
        )
    )
    b = FormulaBuilder(n)
    for ls, w in entries:
        b.add(ls, w)
    return b.build()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
