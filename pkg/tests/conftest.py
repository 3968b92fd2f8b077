"""Shared fixtures plus a reporter that prints one line per acceptance
criterion at the end of the run."""

import pytest

_ACCEPTANCE_LINES = {}


def record_criterion(number, description, passed):
    _ACCEPTANCE_LINES[number] = (description, passed)


def _order_key(number):
    digits = "".join(ch for ch in str(number) if ch.isdigit())
    return (int(digits) if digits else 0, str(number))


@pytest.hookimpl(trylast=True)
def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_ACCEPTANCE_LINES, key=_order_key):
        description, passed = _ACCEPTANCE_LINES[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {str(number):>4}: {verdict}  {description}")
