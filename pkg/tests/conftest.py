import pytest

# criterion number -> (PASS/FAIL, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def verdict():
    def record(number: int, ok: bool, detail: str = "") -> bool:
        line = ("PASS" if ok else "FAIL", detail)
        ACCEPTANCE[number] = line
        print(f"criterion {number}: {line[0]}  {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
