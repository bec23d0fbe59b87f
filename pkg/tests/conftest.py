import itertools
import warnings
from fractions import Fraction

import numpy as np
import pytest

from disclab import setsplit

warnings.filterwarnings("ignore", category=DeprecationWarning)

# Instances with a positive minimum unsplit fraction. The fractions were
# computed once by brute_min_unsplit below and frozen here.
UNSAT_T1 = [  # (n, m, seed, gamma0, N, d) for generate_random(..., b=3, cover=True)
    (6, 4, 1, Fraction(1, 4), 8, 8),
    (7, 5, 0, Fraction(1, 5), 10, 10),
    (9, 6, 1, Fraction(1, 6), 14, 15),
    (10, 7, 2, Fraction(1, 7), 12, 11),
    (12, 9, 1, Fraction(2, 9), 12, 9),
]
UNSAT_N6 = [[3, 4, 5, 6], [1, 2, 5, 6], [1, 2, 4, 6], [1, 2, 4, 5]]


def brute_min_unsplit(n, sets):
    """Independent reference: plain itertools loop, reversed sign order."""
    best = len(sets)
    for a in itertools.product((-1, 1), repeat=n):
        best = min(best, sum(1 for s in sets if sum(a[i] for i in s) != 0))
    return Fraction(best, len(sets)) if sets else Fraction(0)


@pytest.fixture
def single_set():
    return setsplit.instance_from_sets(4, [[1, 2, 3, 4]])


@pytest.fixture
def unsat6():
    return setsplit.instance_from_sets(6, UNSAT_N6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record(criterion, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} [{criterion}] {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
