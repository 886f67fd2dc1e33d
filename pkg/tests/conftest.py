"""Collects one summary line per acceptance criterion and prints them at the end of the run."""

ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, what: str, detail: str) -> bool:
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {what} | {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
