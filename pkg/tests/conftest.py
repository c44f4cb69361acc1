import pytest

# criterion number -> "PASS"/"FAIL" line, filled in by test_acceptance.py
CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    def record(number: int, checks: list[tuple[str, bool, str]], seconds: float, limit: float):
        failed = [f"{name} ({detail})" for name, ok, detail in checks if not ok]
        if seconds >= limit:
            failed.append(f"runtime {seconds:.2f}s >= {limit}s")
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number}: {status} [{seconds:.2f}s]"
        if failed:
            line += " -- " + "; ".join(failed)
        CRITERIA[number] = line
        print(line)
        return failed

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])
