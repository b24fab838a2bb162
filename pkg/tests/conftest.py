"""Shared pytest plumbing: acceptance-criterion reporting.

Tests marked ``@pytest.mark.criterion(num=..., desc=...)`` get one
PASS/FAIL line each in the terminal summary, so the acceptance status is
readable at a glance at the end of a full run.
"""

_CRITERIA = {}  # nodeid -> (num, desc)


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "criterion(num, desc): an acceptance criterion with a summary line",
    )


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            _CRITERIA[item.nodeid] = (
                marker.kwargs["num"],
                marker.kwargs["desc"],
            )


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    outcomes = {}
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", None)
            if nodeid in _CRITERIA and getattr(rep, "when", "call") == "call":
                outcomes[nodeid] = status
            elif nodeid in _CRITERIA and status in ("error", "skipped"):
                outcomes.setdefault(nodeid, status)
    terminalreporter.write_sep("-", "acceptance criteria")
    for nodeid, (num, desc) in sorted(_CRITERIA.items(), key=lambda kv: kv[1][0]):
        status = outcomes.get(nodeid, "not run")
        word = "PASS" if status == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {word} - {desc}")
