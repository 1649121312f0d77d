"""Acceptance criteria 1 to 10 at full size.

Each test runs one reproduction check and prints a single pass/fail line
(plus the per-item detail), so ``pytest -s`` or the captured log shows the
whole table.  Run just this module with ``pytest tests/test_acceptance.py``.
"""

import time

import pytest

from wiretap import reproduce

SEED = 0


@pytest.mark.parametrize("check", reproduce.CHECKS, ids=lambda c: c.__name__.removeprefix("check_"))
def test_criterion(check, capsys):
    start = time.perf_counter()
    res = check(seed=SEED, quick=False)
    elapsed = time.perf_counter() - start
    failed = [label for label, ok, _ in res.items if not ok]
    with capsys.disabled():
        status = "PASS" if res.passed else "FAIL"
        print(f"\ncriterion {res.number}: {status} {res.name} ({elapsed:.1f} s)")
        for label, ok, detail in res.items:
            print(f"    {'ok  ' if ok else 'FAIL'} {label}: {detail}")
    assert res.passed, f"criterion {res.number} failed: {', '.join(failed)}"
