import itertools

import pytest

from pid_linker.geometry import Segment
from pid_linker.scene import DetectedSymbol, DiagramScene

_ids = itertools.count(1000)


def hseg(x1, y, x2, id=None):
    return Segment.horizontal(next(_ids) if id is None else id, x1, x2, y)


def vseg(x, y1, y2, id=None):
    return Segment.vertical(next(_ids) if id is None else id, x, y1, y2)


def make_scene(segments=(), symbols=(), width=1000, height=1000, dpi=200, sheet_id="t"):
    syms = [s if isinstance(s, DetectedSymbol) else DetectedSymbol(s[0], "valve", s[1])
            for s in symbols]
    return DiagramScene(sheet_id, dpi, width, height, syms, list(segments))


@pytest.fixture
def tee_scene():
    """Two symbols joined by a horizontal run, with a branch to a third symbol."""
    segments = [
        hseg(60, 100, 200, id=1),
        hseg(204, 100, 340, id=2),
        vseg(150, 104, 250, id=3),   # branch resting on segment 1
    ]
    symbols = [(1, (20, 80, 58, 120)), (2, (342, 80, 380, 120)), (3, (130, 252, 170, 290))]
    return make_scene(segments, symbols)


# acceptance verdicts, echoed in the terminal summary so they show without -s
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
