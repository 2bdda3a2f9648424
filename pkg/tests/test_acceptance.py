"""Acceptance gate: every criterion of the verification suite, one test each.

Run with -s to see the per-criterion lines; the full module mirrors what
`doiflow verify` executes.
"""

import pytest

from doiflow.verify import CRITERIA

SEED = 1


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda c: c.__name__)
def test_criterion(criterion):
    result = criterion(SEED)
    print(f"[{result.criterion_id:2d}] {result.name}: {result.status} "
          f"(measured {result.measured:.3e}, tolerance {result.tolerance:.1e}) "
          f"{result.detail}")
    assert result.passed, (
        f"criterion {result.criterion_id} ({result.name}) failed: "
        f"measured {result.measured:.3e} vs tolerance {result.tolerance:.1e}; "
        f"{result.detail}"
    )
