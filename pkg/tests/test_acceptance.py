"""Acceptance gate: every verification check at its stated tolerance.

Each criterion prints one PASS/FAIL line with the measured values so a bare
``pytest tests/test_acceptance.py -s`` doubles as the verification report.
The expensive flow runs are cached inside the verify module, so the suite
pays for each of them once.
"""

import pytest

from annulusflow.verify import CHECKS


@pytest.mark.parametrize("name", sorted(CHECKS))
def test_criterion(name, capsys):
    result = CHECKS[name]()
    with capsys.disabled():
        print(result.line())
    assert result.passed, result.line()
