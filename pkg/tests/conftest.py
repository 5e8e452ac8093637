from pathlib import Path

import pytest

from fopkit.formal import parse_formal_text

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def reference():
    """Reference grids: an orthogonal pair over (Z/2)^4 and an amicable pair over D6."""
    return {
        name: parse_formal_text((DATA / f"{name}.txt").read_text())
        for name in ("z2_4_A", "z2_4_B", "dihedral6_A", "dihedral6_B")
    }


CRITERIA = {
    1: "reference orthogonal pair is formally orthogonal",
    2: "z2_4 pipeline reproduces a 4x8 orthogonal pair",
    3: "orientability: propagation = stabilizer test = rational oracle",
    4: "wreath family n=5..8 gives 4n x 8n partial weighing matrices",
    5: "dihedral amicable pairs (reference and n=6,8,10)",
    6: "End_M(V): structure constants, transpose, weight matrix",
    7: "cocycle checks and trivialization solver vs exhaustive search",
    8: "bundled scenarios build deterministically",
}

_outcomes: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config.addinivalue_line("markers", "acceptance: acceptance suite")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.failed:
        _outcomes[n] = "FAIL"
    elif rep.when == "call" and n not in _outcomes:
        _outcomes[n] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        terminalreporter.write_line(f"criterion {n}: {_outcomes[n]}  {CRITERIA[n]}")
