import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_results: dict[str, list[bool]] = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # setup, call and teardown all have to succeed
    if call.when == "call" or call.excinfo is not None:
        _results.setdefault(marker.args[0], []).append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcomes in _results.items():
        terminalreporter.write_line(f"{'PASS' if all(outcomes) else 'FAIL'}  {name}")
