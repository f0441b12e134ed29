import re

_results: dict = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    key = int(m.group(1))
    measured = dict(report.user_properties).get("measured", "")
    prev = _results.get(key)
    if prev is None or prev[0]:
        _results[key] = (report.passed, m.group(2).replace("_", " "), measured)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_results):
        ok, title, measured = _results[key]
        line = f"{'PASS' if ok else 'FAIL'} criterion {key:2d}: {title}"
        terminalreporter.write_line(line + (f" [{measured}]" if measured else ""))
