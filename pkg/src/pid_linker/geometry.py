"""Geometric primitives and the predicates every merge decision reduces to.

All functions here are pure. Segments handed to the predicates must be
axis-aligned (see :func:`snap_segment`); coordinates are pixels in the
200 dpi working frame.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, NamedTuple

from .errors import DegenerateSegment, NotAxisAligned, OrientationMismatch

#: absolute tolerance (px) for "lies on the segment"
ON_SEGMENT_TOL = 1e-9

DEFAULT_ANGLE_TOL_DEG = 2.0


class Point(NamedTuple):
    x: float
    y: float


class Orientation(enum.Enum):
    HORIZONTAL = "H"
    VERTICAL = "V"

    def perpendicular(self) -> "Orientation":
        return Orientation.VERTICAL if self is Orientation.HORIZONTAL else Orientation.HORIZONTAL


H = Orientation.HORIZONTAL
V = Orientation.VERTICAL


@dataclass(frozen=True)
class Segment:
    """One detected line primitive.

    ``orientation`` is derived from the endpoints: it is set only when the
    segment is exactly horizontal or vertical, otherwise ``None`` (a raw
    detection that still has to go through :func:`snap_segment`).
    """

    id: int
    p1: Point
    p2: Point
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)
    orientation: Orientation | None = field(init=False, compare=False)

    def __post_init__(self):
        p1, p2 = Point(*self.p1), Point(*self.p2)
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        orient = None
        if p1 != p2:
            if p1.y == p2.y:
                orient = H
            elif p1.x == p2.x:
                orient = V
        object.__setattr__(self, "orientation", orient)

    @classmethod
    def horizontal(cls, id: int, x1: float, x2: float, y: float) -> "Segment":
        return cls(id, Point(min(x1, x2), y), Point(max(x1, x2), y))

    @classmethod
    def vertical(cls, id: int, x: float, y1: float, y2: float) -> "Segment":
        return cls(id, Point(x, min(y1, y2)), Point(x, max(y1, y2)))

    @property
    def length(self) -> float:
        return math.hypot(self.p2.x - self.p1.x, self.p2.y - self.p1.y)

    @property
    def endpoints(self) -> tuple[Point, Point]:
        return self.p1, self.p2

    @property
    def axis_coord(self) -> float:
        """The constant off-axis coordinate (y for horizontal, x for vertical)."""
        return self.p1.y if _orient(self) is H else self.p1.x

    @property
    def extent(self) -> tuple[float, float]:
        """Axial extent ``(lo, hi)``."""
        if _orient(self) is H:
            return min(self.p1.x, self.p2.x), max(self.p1.x, self.p2.x)
        return min(self.p1.y, self.p2.y), max(self.p1.y, self.p2.y)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        return (min(self.p1.x, self.p2.x), min(self.p1.y, self.p2.y),
                max(self.p1.x, self.p2.x), max(self.p1.y, self.p2.y))

    def translated(self, dx: float, dy: float) -> "Segment":
        return Segment(self.id, Point(self.p1.x + dx, self.p1.y + dy),
                       Point(self.p2.x + dx, self.p2.y + dy), self.extra)

    def scaled(self, factor: float) -> "Segment":
        return Segment(self.id, Point(self.p1.x * factor, self.p1.y * factor),
                       Point(self.p2.x * factor, self.p2.y * factor), self.extra)


def _orient(s: Segment) -> Orientation:
    if s.orientation is None:
        if s.p1 == s.p2:
            raise DegenerateSegment(f"segment {s.id} has zero length")
        raise NotAxisAligned(f"segment {s.id} is not axis-aligned; snap it first")
    return s.orientation


def classify_orientation(p1: Point, p2: Point,
                         angle_tol_deg: float = DEFAULT_ANGLE_TOL_DEG) -> Orientation:
    """Classify the direction from ``p1`` to ``p2`` as horizontal or vertical.

    Raises :class:`NotAxisAligned` when the deviation from the dominant axis
    exceeds ``angle_tol_deg`` and :class:`DegenerateSegment` when the points
    coincide.
    """
    dx = abs(p2[0] - p1[0])
    dy = abs(p2[1] - p1[1])
    if dx == 0 and dy == 0:
        raise DegenerateSegment(f"zero-length segment at {tuple(p1)}")
    slope_tol = math.tan(math.radians(angle_tol_deg))
    if dx >= dy:
        if dy <= slope_tol * dx:
            return H
    elif dx <= slope_tol * dy:
        return V
    angle = math.degrees(math.atan2(min(dx, dy), max(dx, dy)))
    raise NotAxisAligned(f"deviation {angle:.2f} deg exceeds tolerance {angle_tol_deg} deg")


def dominant_axis(p1: Point, p2: Point) -> Orientation:
    dx = abs(p2[0] - p1[0])
    dy = abs(p2[1] - p1[1])
    if dx == 0 and dy == 0:
        raise DegenerateSegment(f"zero-length segment at {tuple(p1)}")
    return H if dx >= dy else V


def snap_segment(s: Segment, angle_tol_deg: float = DEFAULT_ANGLE_TOL_DEG,
                 strict: bool = False) -> Segment:
    """Return ``s`` snapped onto its dominant axis in canonical endpoint order.

    The off-axis coordinate becomes the mean of the two endpoints' values.
    In strict mode a deviation beyond ``angle_tol_deg`` raises
    :class:`NotAxisAligned`; otherwise any segment is snapped.
    """
    if strict:
        orient = classify_orientation(s.p1, s.p2, angle_tol_deg)
    else:
        orient = dominant_axis(s.p1, s.p2)
    if orient is H:
        y = (s.p1.y + s.p2.y) / 2.0
        lo, hi = sorted((s.p1.x, s.p2.x))
        p1, p2 = Point(lo, y), Point(hi, y)
    else:
        x = (s.p1.x + s.p2.x) / 2.0
        lo, hi = sorted((s.p1.y, s.p2.y))
        p1, p2 = Point(x, lo), Point(x, hi)
    if p1 == s.p1 and p2 == s.p2:
        return s
    return Segment(s.id, p1, p2, s.extra)


def endpoint_gap(a: Segment, b: Segment) -> float:
    """Smallest Euclidean distance over the four endpoint pairs."""
    return min(math.hypot(p.x - q.x, p.y - q.y)
               for p in (a.p1, a.p2) for q in (b.p1, b.p2))


def point_segment_distance(p: Point, s: Segment) -> tuple[float, float]:
    """Distance from ``p`` to ``s`` and the normalized projection parameter.

    ``t`` is 0 at ``s.p1`` and 1 at ``s.p2``.
    """
    ex, ey = s.p2.x - s.p1.x, s.p2.y - s.p1.y
    len2 = ex * ex + ey * ey
    if len2 == 0:
        return math.hypot(p[0] - s.p1.x, p[1] - s.p1.y), 0.0
    t = ((p[0] - s.p1.x) * ex + (p[1] - s.p1.y) * ey) / len2
    t = min(1.0, max(0.0, t))
    cx, cy = s.p1.x + t * ex, s.p1.y + t * ey
    d = math.hypot(p[0] - cx, p[1] - cy)
    if d <= ON_SEGMENT_TOL:
        d = 0.0
    return d, t


def proper_crossing(a: Segment, b: Segment, margin: float) -> bool:
    """True when ``a`` and ``b`` intersect away from all four endpoints.

    An intersection within ``margin`` of any endpoint is a junction, not a
    crossing. Parallel segments never cross.
    """
    oa, ob = _orient(a), _orient(b)
    if oa is ob:
        return False
    h, v = (a, b) if oa is H else (b, a)
    x, y = v.p1.x, h.p1.y
    hx0, hx1 = h.extent
    vy0, vy1 = v.extent
    if not (hx0 <= x <= hx1 and vy0 <= y <= vy1):
        return False
    return (x - hx0 > margin and hx1 - x > margin
            and y - vy0 > margin and vy1 - y > margin)


def axial_overlap(a: Segment, b: Segment) -> float:
    """Length of the intersection of the two axial extents (0 if disjoint)."""
    if _orient(a) is not _orient(b):
        raise OrientationMismatch(f"segments {a.id} and {b.id} differ in orientation")
    lo_a, hi_a = a.extent
    lo_b, hi_b = b.extent
    return max(0.0, min(hi_a, hi_b) - max(lo_a, lo_b))


def axis_offset(a: Segment, b: Segment) -> float:
    """Perpendicular distance between the axes of two parallel segments."""
    if _orient(a) is not _orient(b):
        raise OrientationMismatch(f"segments {a.id} and {b.id} differ in orientation")
    return abs(a.axis_coord - b.axis_coord)


def box_distance(a: tuple[float, float, float, float],
                 b: tuple[float, float, float, float]) -> float:
    """Euclidean distance between two closed axis-aligned boxes (0 if touching)."""
    dx = max(0.0, a[0] - b[2], b[0] - a[2])
    dy = max(0.0, a[1] - b[3], b[1] - a[3])
    return math.hypot(dx, dy)


def segment_distance(a: Segment, b: Segment) -> float:
    """Exact minimum distance between two axis-aligned segments."""
    return box_distance(a.bbox, b.bbox)


def point_box_distance(p: Point, box: tuple[float, float, float, float]) -> float:
    dx = max(0.0, box[0] - p[0], p[0] - box[2])
    dy = max(0.0, box[1] - p[1], p[1] - box[3])
    return math.hypot(dx, dy)
