"""Per-criterion pass/fail lines for the acceptance suite."""

import pytest

CRITERIA = {
    1: "oracle exactness on intersects-along-SP pairs",
    2: "distance bound d + W_max (unweighted: d + 1)",
    3: "fallback exactness and unreachable pairs",
    4: "prefix tie-break and thread-count determinism",
    5: "monotone fractions over alpha, full intersection at alpha 16",
    6: "line graph intersects rarely",
    7: "consistent ties beat arbitrary ties",
    8: "multi-path validity",
    9: "distributed batch equivalence and accounting",
    10: "latency against bidirectional search",
    11: "serialization round trip and flipped-byte detection",
}

_outcomes: dict[int, bool] = {}
_details: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes[n] = _outcomes.get(n, True) and report.passed
        _details.setdefault(n, []).extend(v for k, v in item.user_properties if k == "detail")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        if n not in _outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if _outcomes[n] else "FAIL"
        detail = "; ".join(_details.get(n, []))
        line = f"criterion {n:2d} {status:7s} {title}"
        terminalreporter.write_line(f"{line} | {detail}" if detail else line)
