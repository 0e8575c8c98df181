import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from localbp.counterexamples import build_section2_code, build_section3_code  # noqa: E402


@pytest.fixture(scope="session")
def sec2():
    return build_section2_code()


@pytest.fixture(scope="session")
def sec3():
    return build_section3_code()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 10):
        if n in results:
            ok, detail = results[n]
            terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n}: FAIL  (not run)")
