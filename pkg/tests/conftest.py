import json
from fractions import Fraction
from pathlib import Path

import pytest

ORACLE_PATH = Path(__file__).parent / "oracles" / "values.json"

# filled in by tests/test_acceptance.py, printed at the end of the run
ACCEPTANCE_RESULTS: dict = {}


def _decode(v):
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return v
    if isinstance(v, list):
        return [_decode(x) for x in v]
    if isinstance(v, dict):
        return {k: _decode(x) for k, x in v.items()}
    return v


@pytest.fixture(scope="session")
def oracle():
    return _decode(json.loads(ORACLE_PATH.read_text()))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
