import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_criteria: dict[int, dict] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            _criteria.setdefault(number, {"title": title, "outcomes": []})


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    # setup errors and call failures both count against the criterion
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        number = marker.args[0]
        _criteria[number]["outcomes"].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status:7} {entry['title']}")


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns ``(exit_code, stdout, stderr)``."""
    from sanov.cli import run

    def _run(*argv):
        try:
            code = run(list(argv))
        except SystemExit as exc:
            code = exc.code
        out, err = capsys.readouterr()
        return code, out, err

    return _run


@pytest.fixture
def examples_dir():
    return Path(__file__).resolve().parent.parent / "docs" / "examples"
