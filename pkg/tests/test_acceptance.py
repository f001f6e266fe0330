"""One test per acceptance criterion; each prints a PASS/FAIL line with measured vs expected.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline.
"""

import pytest

from ntype_eit.acceptance import CHECKS, format_result, run_checks


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name):
    (result,) = run_checks(name)
    print(format_result(result))
    assert result.passed, format_result(result)
