import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, list] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for key, value in report.user_properties:
        if key == "criterion":
            _criteria.setdefault(value, []).append((report.nodeid, report.passed))


def pytest_runtest_setup(item):
    for mark in item.iter_markers(name="criterion"):
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        results = _criteria[number]
        ok = all(passed for _, passed in results)
        failed = [nodeid.split("::")[-1] for nodeid, passed in results if not passed]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({len(results)} tests)"
        if failed:
            line += " failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
