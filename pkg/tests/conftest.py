import sys


def pytest_terminal_summary(terminalreporter):
    # one verdict line per acceptance criterion, printed whether or not the
    # individual tests passed (the gate module records them as it runs)
    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance")
    results = getattr(mod, "ACCEPTANCE_RESULTS", None) if mod else None
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(results):
        terminalreporter.write_line(line)
