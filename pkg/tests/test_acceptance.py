"""Acceptance gate: every built-in replication check must pass.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per check.
The same table is available from the command line as ``pflab replicate``.
"""

import pytest

from pflab.replicate import CHECKS


@pytest.mark.parametrize("slug,check", CHECKS, ids=[slug for slug, _ in CHECKS])
def test_replication_check(slug, check):
    result = check()
    tag = "PASS" if result.passed else "FAIL"
    print(f"[{tag}] {slug}: {result.detail}")
    assert result.passed, f"{slug}: {result.detail}"
