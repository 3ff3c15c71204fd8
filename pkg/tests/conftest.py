from __future__ import annotations

import pytest

CRITERIA = {
    1: "p-range closed form via the CLI",
    2: "optimizer against the closed form, n = 2..10",
    3: "Vandermonde Jacobian against finite differences",
    4: "basis norms",
    5: "series against closed-form B_nu",
    6: "Friedrichs operator is rank one",
    7: "A_p^+ property suite",
    8: "transformation law on G",
    9: "membership counterexamples",
    10: "L^2 contraction sanity",
}

_outcomes: dict[int, list[tuple[str, float]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        ok = call.excinfo is None
        _outcomes.setdefault(marker.args[0], []).append(
            ("PASS" if ok else "FAIL", call.duration))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        runs = _outcomes.get(n)
        if not runs:
            tr.write_line(f"[ NOT RUN ] {n:2d}. {title}")
            continue
        status = "PASS" if all(s == "PASS" for s, _ in runs) else "FAIL"
        seconds = sum(d for _, d in runs)
        tr.write_line(f"[{status:^9}] {n:2d}. {title} ({seconds:.1f} s)")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240601)
