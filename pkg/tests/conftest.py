import numpy as np
import pytest

from afem2d.mesh import Mesh

ACCEPTANCE = {}


@pytest.fixture
def two_triangle_mesh():
    """Two triangles sharing the diagonal (1,4), the standard two-triangle example.

    Vertices (1-based): 1=(0,0), 2=(1,0), 3=(0,1), 4=(1,1);
    elem = [[2,4,1],[3,1,4]].
    """
    node = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    elem = np.array([[2, 4, 1], [3, 1, 4]]) - 1
    return Mesh(node, elem)


@pytest.fixture
def unit_triangle():
    return Mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0, 1, 2]]))


def pytest_runtest_logreport(report):
    marker = ACCEPTANCE_MARKERS.get(report.nodeid)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        details = [str(v) for k, v in report.user_properties if k == "measured"]
        ACCEPTANCE[report.nodeid] = (marker, report.outcome, report.duration, details)


ACCEPTANCE_MARKERS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            ACCEPTANCE_MARKERS[item.nodeid] = m.args


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion (all its cases must pass)."""
    if not ACCEPTANCE:
        return
    grouped = {}
    for nodeid, ((number, title), outcome, duration, details) in ACCEPTANCE.items():
        grouped.setdefault((number, title), []).append((nodeid, outcome, duration, details))
    terminalreporter.section("acceptance criteria")
    for (number, title), cases in sorted(grouped.items()):
        ok = all(outcome == "passed" for _, outcome, _, _ in cases)
        seconds = sum(d for _, _, d, _ in cases)
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.1f} s)"
        failed = [nodeid.split("[")[-1].rstrip("]") for nodeid, outcome, _, _ in cases if outcome != "passed"]
        if failed and len(cases) > 1:
            line += f"  failing cases: {', '.join(failed)}"
        terminalreporter.write_line(line)
        for nodeid, _, _, details in cases:
            for d in details:
                terminalreporter.write_line(f"    {d}")
