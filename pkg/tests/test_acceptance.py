"""End-to-end verification gate.

Each test runs one named suite from the acceptance module and records
the verdict; conftest prints a one-line PASS/FAIL summary per suite at
the end of the session.
"""

import pytest

from dmfields.acceptance import SUITES

from conftest import RESULTS

NAMES = sorted(SUITES, key=lambda n: int(n.split("-")[1]))


@pytest.mark.parametrize("name", NAMES)
def test_acceptance(name):
    passed, detail = SUITES[name]()
    RESULTS[name] = (passed, detail)
    assert passed, f"{name} failed: {detail}"
