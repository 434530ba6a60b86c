"""Echo acceptance-criterion verdicts into the terminal summary.

Each criterion test records one PASS/FAIL line; this hook reprints them
after the run so the verdicts stay visible even when pytest captures
stdout from passing tests.
"""

ACCEPTANCE_LINES: list[str] = []


def record_criterion(name: str, ok: bool) -> str:
    line = f"[acceptance] {name}: {'PASS' if ok else 'FAIL'}"
    ACCEPTANCE_LINES.append(line)
    return line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
