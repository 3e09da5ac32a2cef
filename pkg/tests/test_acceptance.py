"""The acceptance grid, one pass/fail line per criterion.

Runs the full verification suite once (which internally executes the
criteria grid twice to decide the byte-identity criterion), then asserts
each criterion individually so the report reads one line per criterion.
"""

import json

import pytest

from qfcodes import verify

N_CRITERIA = 12


@pytest.fixture(scope="module")
def results():
    res, payload = verify.run_all(workers=2, log=lambda line: None)
    report = json.loads(payload)
    assert report["criteria"][-1]["id"] == N_CRITERIA
    return res


@pytest.mark.parametrize("cid", range(1, N_CRITERIA + 1))
def test_criterion(results, cid, capsys):
    r = next(r for r in results if r.cid == cid)
    with capsys.disabled():
        print(f"\n{r.line()}", end="")
    assert r.passed, f"criterion {cid} failed: {r.name}: {r.details}"
    if r.time_limit is not None:
        assert r.elapsed <= r.time_limit, \
            f"criterion {cid} exceeded its {r.time_limit}s budget ({r.elapsed:.1f}s)"
