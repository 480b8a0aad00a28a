"""One test per acceptance criterion; each wires the suite the CLI's
``verify`` verb runs.  A pass/fail line per criterion is printed in the
terminal summary (and by running this file directly)."""

import pytest

from kirchberg.reports import text
from kirchberg.suites import SUITES

from conftest import ACCEPTANCE

ORDER = sorted(SUITES, key=lambda s: SUITES[s][0])


@pytest.mark.parametrize("suite", ORDER)
def test_criterion(suite):
    n, fn = SUITES[suite]
    rep = fn()
    ACCEPTANCE[n] = (suite, rep.ok)
    print(f"criterion {n:2d} {suite:14s} {'PASS' if rep.ok else 'FAIL'}")
    assert rep.ok, text(rep)


def test_every_criterion_has_a_suite():
    assert sorted(n for n, _ in SUITES.values()) == list(range(1, 11))


if __name__ == "__main__":
    for s in ORDER:
        n, fn = SUITES[s]
        print(f"criterion {n:2d} {s:14s} {'PASS' if fn().ok else 'FAIL'}")
