"""Acceptance gate: one test (one pass/fail line) per headline criterion.

Tolerances are pinned inside reluflow.acceptance; these tests only assert
the verdicts, so `pytest tests/test_acceptance.py -v` reads as the
acceptance report.  The same checks are runnable via `reluflow verify`.
"""

import pytest

from reluflow import acceptance


@pytest.mark.parametrize("name", list(acceptance.CRITERIA), ids=list(acceptance.CRITERIA))
def test_acceptance(name):
    result = acceptance.CRITERIA[name]()
    assert result["passed"], f"{name} failed: {result['details']}"
