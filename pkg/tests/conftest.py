"""Shared pytest hooks: acceptance results are echoed in the terminal summary."""
from __future__ import annotations

ACCEPTANCE: list[tuple[str, str, str]] = []


def record(criterion: str, ok: bool | None, detail: str) -> None:
    """ok=None marks a non-blocking stretch item that did not run or did not reach its target."""
    status = "PASS" if ok else "FAIL" if ok is False else "STRETCH-NOT-MET"
    ACCEPTANCE.append((criterion, status, detail))
    print(f"[{status}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in ACCEPTANCE:
        terminalreporter.write_line(f"[{status}] {criterion}: {detail}")
