import pytest

CRITERIA: dict = {}


@pytest.fixture
def criterion():
    """Record the verdict of one numbered acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        line = f"{status} criterion {number:2d} {title}" + (f": {detail}" if detail else "")
        CRITERIA[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])
