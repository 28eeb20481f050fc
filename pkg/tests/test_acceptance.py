"""Exit criteria; one pass/fail line per criterion is printed (run with ``-s``)."""

import pytest

from vacuumless.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [num for num, _, _ in CRITERIA],
                         ids=[f"{num:02d}-{name.replace(' ', '-')}" for num, name, _ in CRITERIA])
def test_criterion(number):
    result = run_criterion(number)
    print(result.line())
    assert result.passed, result.detail
