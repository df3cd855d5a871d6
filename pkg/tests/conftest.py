import numpy as np
import pytest

from metldpc.code import lift_protograph
from metldpc.protograph import Protograph, parse_protograph

SMALL_MET = """\
# small-met
3 5 5
1 1 1 0 0
1 1 0 1 0
2 0 1 0 1
(0,0)=1 (0,1)=2 (0,2)=3 (1,0)=1 (1,1)=2 (1,3)=4 (2,0)=1 (2,2)=3 (2,4)=5
0 0 0 0 0
"""


def regular_proto(rows=2, cols=4):
    base = np.ones((rows, cols), dtype=int)
    types = {(r, c, 0): c + 1 for r in range(rows) for c in range(cols)}
    return Protograph(base, types, [False] * cols, name="regular")


@pytest.fixture(scope="session")
def small_met_proto():
    return parse_protograph(SMALL_MET)


@pytest.fixture(scope="session")
def small_met_code(small_met_proto):
    return lift_protograph(small_met_proto, 40, seed=3)


@pytest.fixture(scope="session")
def tiny_code():
    """n = 12 code for exhaustive maximum-likelihood checks."""
    return lift_protograph(regular_proto(), 3, seed=1)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
