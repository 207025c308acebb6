"""Seeded synthetic plant layouts with known merge partitions.

A generated sheet holds rectangular symbols joined by rectilinear pipes
(at most three bends each), some of which branch off other pipes as tees.
Every pipe leg is cut into fragments separated by small gaps, then
optionally corrupted: perpendicular endpoint jitter, parallel "ghost"
re-detections, and unattached clutter strokes.

Geometry from different pipes is kept at least ``clearance`` apart, so with
noise switched off the intended partition is the only correct answer.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; the same
spec and seed reproduce the same scene bit for bit.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .config import MergeConfig
from .errors import CanvasTooSmall, ConfigError, UnknownParameter
from .evaluation import GroundTruth, Metrics, batch_evaluate
from .geometry import Point, Segment
from .merge import MergedLineMap
from .scene import DetectedSymbol, DiagramScene

CLASS_LABELS = ("valve", "pump", "tank", "instrument", "vessel", "heat_exchanger", "compressor")

# unit exit directions of the four bbox sides: left, right, top, bottom
_SIDES = ((-1, 0), (1, 0), (0, -1), (0, 1))

_RANGE_FIELDS = ("split_count_range", "gap_range", "ghost_offset_range",
                 "symbol_size_range")


@dataclass(frozen=True)
class SynthSpec:
    n_symbols: int = 10
    n_lines: int = 8
    canvas: tuple[float, float] = (2400, 1800)
    split_count_range: tuple[int, int] = (1, 3)
    gap_range: tuple[float, float] = (1.0, 5.0)
    jitter_sigma: float = 0.0
    duplicate_prob: float = 0.0
    clutter_count: int = 0
    seed: int = 0
    tee_prob: float = 0.25
    ghost_offset_range: tuple[float, float] = (1.0, 4.0)
    clearance: float = 24.0
    symbol_size_range: tuple[int, int] = (40, 70)
    stub_max: int = 150
    min_fragment: float = 12.0

    def __post_init__(self):
        for name in _RANGE_FIELDS:
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                raise ConfigError(f"{name} must satisfy 0 <= min <= max, got {(lo, hi)}")
            object.__setattr__(self, name, (lo, hi))
        w, h = self.canvas
        if not (w > 0 and h > 0):
            raise ConfigError(f"canvas must be positive, got {(w, h)}")
        object.__setattr__(self, "canvas", (w, h))
        if self.split_count_range[0] < 1:
            raise ConfigError("split_count_range must start at >= 1")
        for name in ("duplicate_prob", "tee_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must be in [0, 1]")
        for name in ("n_symbols", "n_lines", "clutter_count"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.jitter_sigma < 0:
            raise ConfigError("jitter_sigma must be >= 0")
        if self.clearance <= 0 or self.min_fragment <= 0:
            raise ConfigError("clearance and min_fragment must be > 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def replace(self, **changes: Any) -> "SynthSpec":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v)
                for f in dataclasses.fields(self)}

    @classmethod
    def from_dict(cls, doc: dict) -> "SynthSpec":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise UnknownParameter(f"unknown SynthSpec field(s): {sorted(unknown)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()})


@dataclass
class _Route:
    group: int
    points: list[tuple[int, int]]
    symbols: tuple[int, ...]
    ends_on_tee: bool = False


@dataclass
class _Leg:
    group: int
    start: tuple[float, float]
    end: tuple[float, float]
    tees: list[float] = field(default_factory=list)   # axial offsets of tee contacts

    @property
    def direction(self) -> tuple[int, int]:
        dx, dy = self.end[0] - self.start[0], self.end[1] - self.start[1]
        return (int(np.sign(dx)), int(np.sign(dy)))

    @property
    def length(self) -> float:
        return abs(self.end[0] - self.start[0]) + abs(self.end[1] - self.start[1])

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (min(self.start[0], self.end[0]), min(self.start[1], self.end[1]),
                max(self.start[0], self.end[0]), max(self.start[1], self.end[1]))


class _Obstacles:
    """Growable array of boxes for vectorized clearance checks."""

    def __init__(self):
        self.boxes = np.empty((64, 4))
        self.n = 0

    def add(self, box) -> None:
        if self.n == len(self.boxes):
            self.boxes = np.concatenate([self.boxes, np.empty_like(self.boxes)])
        self.boxes[self.n] = box
        self.n += 1

    def clear_of(self, box, clearance: float, exempt: int = -1) -> bool:
        """True when no stored box except row ``exempt`` is within ``clearance``."""
        if not self.n:
            return True
        b = self.boxes[:self.n]
        dx = np.maximum(0.0, np.maximum(b[:, 0] - box[2], box[0] - b[:, 2]))
        dy = np.maximum(0.0, np.maximum(b[:, 1] - box[3], box[1] - b[:, 3]))
        close = np.hypot(dx, dy) < clearance
        if 0 <= exempt < self.n:
            close[exempt] = False
        return not np.any(close)


def _box_dist(a, b) -> float:
    dx = max(0.0, a[0] - b[2], b[0] - a[2])
    dy = max(0.0, a[1] - b[3], b[1] - a[3])
    return float(np.hypot(dx, dy))


def _leg_box(p, q):
    return (min(p[0], q[0]), min(p[1], q[1]), max(p[0], q[0]), max(p[1], q[1]))


def _simplify(points: list[tuple[int, int]]) -> list[tuple[int, int]] | None:
    """Drop repeated and collinear interior points; None on a U-turn."""
    pts = [points[0]]
    for p in points[1:]:
        if p != pts[-1]:
            pts.append(p)
    out = [pts[0]]
    for i in range(1, len(pts)):
        if len(out) >= 2:
            d0 = np.sign(np.subtract(out[-1], out[-2]))
            d1 = np.sign(np.subtract(pts[i], out[-1]))
            if (d0 == d1).all():
                out[-1] = pts[i]
                continue
            if (d0 == -d1).all():
                return None
        out.append(pts[i])
    return out if len(out) >= 2 else None


def _port(bbox, side: int) -> tuple[int, int]:
    x0, y0, x1, y1 = bbox
    mx, my = (x0 + x1) // 2, (y0 + y1) // 2
    return ((x0, my), (x1, my), (mx, y0), (mx, y1))[side]


def _facing_side(bbox, target, free: set[int], rng) -> int | None:
    if not free:
        return None
    cx, cy = (bbox[0] + bbox[2]) / 2, (bbox[1] + bbox[3]) / 2
    dx, dy = target[0] - cx, target[1] - cy
    ranked = sorted(sorted(free), key=lambda s: -(_SIDES[s][0] * dx + _SIDES[s][1] * dy))
    if rng.random() < 0.75:
        return ranked[0]
    return ranked[int(rng.integers(len(ranked)))]


class _Layout:
    """Symbol placement and pipe routing state for one sheet."""

    def __init__(self, spec: SynthSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        self.c = spec.clearance
        self.stub_min = int(np.ceil(spec.clearance)) + 6
        self.width, self.height = spec.canvas
        self.symbols: list[tuple[int, int, int, int]] = []
        self.free_ports: list[set[int]] = []
        self.obstacles = _Obstacles()
        self.routes: list[_Route] = []
        self.legs: list[_Leg] = []

    # -- symbols ---------------------------------------------------------

    def place_symbols(self, budget: int = 400) -> None:
        spec, rng = self.spec, self.rng
        margin = self.stub_min + self.c
        sep = 3 * self.c
        lo, hi = spec.symbol_size_range
        for _ in range(spec.n_symbols):
            for _ in range(budget):
                w, h = (int(v) for v in rng.integers(lo, hi + 1, size=2))
                if self.width - 2 * margin - w <= 0 or self.height - 2 * margin - h <= 0:
                    raise CanvasTooSmall("canvas cannot hold a single symbol")
                x0 = int(rng.integers(margin, self.width - margin - w))
                y0 = int(rng.integers(margin, self.height - margin - h))
                box = (x0, y0, x0 + w, y0 + h)
                if all(_box_dist(box, other) >= sep for other in self.symbols):
                    self.symbols.append(box)
                    self.free_ports.append({0, 1, 2, 3})
                    break
            else:
                raise CanvasTooSmall(
                    f"placed {len(self.symbols)} of {spec.n_symbols} symbols")

    # -- routing ---------------------------------------------------------

    def _path(self, pa, da, pb, db) -> list[tuple[int, int]] | None:
        rng = self.rng
        s1, s2 = (int(v) for v in rng.integers(self.stub_min, self.spec.stub_max + 1, size=2))
        qa = (pa[0] + da[0] * s1, pa[1] + da[1] * s1)
        qb = (pb[0] + db[0] * s2, pb[1] + db[1] * s2)
        corner = (qb[0], qa[1]) if rng.random() < 0.5 else (qa[0], qb[1])
        pts = _simplify([pa, qa, corner, qb, pb])
        if pts is None or len(pts) > 5:
            return None
        first = np.sign(np.subtract(pts[1], pts[0]))
        last = np.sign(np.subtract(pts[-1], pts[-2]))
        if tuple(first) != da or tuple(last) != (-db[0], -db[1]):
            return None
        m = self.c
        if any(not (m <= x <= self.width - m and m <= y <= self.height - m) for x, y in pts):
            return None
        if any(abs(pts[i + 1][0] - pts[i][0]) + abs(pts[i + 1][1] - pts[i][1]) < self.stub_min / 2
               for i in range(len(pts) - 1)):
            return None
        return pts

    def _clear(self, pts, start_sym: int, end_sym: int | None, host: int = -1) -> bool:
        # a tee route's final leg touches its host leg (obstacle row ``host``)
        boxes = [_leg_box(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
        for i, box in enumerate(boxes):
            exempt = host if i == len(boxes) - 1 else -1
            if not self.obstacles.clear_of(box, self.c, exempt):
                return False
            for k, sym in enumerate(self.symbols):
                if (k == start_sym and i == 0) or (k == end_sym and i == len(boxes) - 1):
                    continue
                if _box_dist(box, sym) < self.c:
                    return False
            for j in range(i + 2, len(boxes)):
                if _box_dist(box, boxes[j]) < self.c:
                    return False
        return True

    def _commit(self, route: _Route) -> None:
        self.routes.append(route)
        for i in range(len(route.points) - 1):
            leg = _Leg(route.group, route.points[i], route.points[i + 1])
            self.legs.append(leg)
            self.obstacles.add(leg.box)

    def _nearby_symbols(self, point, k: int = 4, exclude: int = -1) -> list[int]:
        cands = [i for i, ports in enumerate(self.free_ports) if ports and i != exclude]
        cx = lambda i: ((self.symbols[i][0] + self.symbols[i][2]) / 2 - point[0]) ** 2 + \
            ((self.symbols[i][1] + self.symbols[i][3]) / 2 - point[1]) ** 2
        return sorted(cands, key=lambda i: (cx(i), i))[:k]

    def _try_line(self) -> bool:
        rng = self.rng
        open_syms = [i for i, ports in enumerate(self.free_ports) if ports]
        if len(open_syms) < 2:
            return False
        a = open_syms[int(rng.integers(len(open_syms)))]
        box_a = self.symbols[a]
        centre_a = ((box_a[0] + box_a[2]) / 2, (box_a[1] + box_a[3]) / 2)
        near = self._nearby_symbols(centre_a, exclude=a)
        b = near[int(rng.integers(len(near)))]
        box_b = self.symbols[b]
        centre_b = ((box_b[0] + box_b[2]) / 2, (box_b[1] + box_b[3]) / 2)
        sa = _facing_side(box_a, centre_b, self.free_ports[a], rng)
        sb = _facing_side(box_b, centre_a, self.free_ports[b], rng)
        pts = self._path(_port(box_a, sa), _SIDES[sa], _port(box_b, sb), _SIDES[sb])
        group = len(self.routes)
        if pts is None or not self._clear(pts, a, b):
            return False
        self.free_ports[a].discard(sa)
        self.free_ports[b].discard(sb)
        self._commit(_Route(group, pts, (a, b)))
        return True

    def _try_tee(self) -> bool:
        rng, c = self.rng, self.c
        hosts = [k for k, leg in enumerate(self.legs) if leg.length >= 4 * c]
        if not hosts:
            return False
        row = hosts[int(rng.integers(len(hosts)))]
        host = self.legs[row]
        lo, hi = 1.5 * c, host.length - 1.5 * c
        offset = int(rng.integers(int(np.ceil(lo)), int(hi) + 1))
        if any(abs(offset - t) < 2 * c for t in host.tees):
            return False
        d = host.direction
        tee = (host.start[0] + d[0] * offset, host.start[1] + d[1] * offset)
        normal = (d[1], d[0]) if rng.random() < 0.5 else (-d[1], -d[0])
        near = self._nearby_symbols(tee)
        if not near:
            return False
        s = near[int(rng.integers(len(near)))]
        side = _facing_side(self.symbols[s], tee, self.free_ports[s], rng)
        pts = self._path(_port(self.symbols[s], side), _SIDES[side], tee, normal)
        if pts is None or not self._clear(pts, s, None, host=row):
            return False
        self.free_ports[s].discard(side)
        host.tees.append(offset)
        self._commit(_Route(host.group, pts, (s,), ends_on_tee=True))
        return True

    def route_lines(self, budget: int = 200) -> None:
        spec, rng = self.spec, self.rng
        for n in range(spec.n_lines):
            for _ in range(budget):
                want_tee = bool(self.routes) and rng.random() < spec.tee_prob
                if (self._try_tee() if want_tee else self._try_line()):
                    break
            else:
                raise CanvasTooSmall(f"routed {n} of {spec.n_lines} lines")


def _fragment(leg_len: float, k: int, spec: SynthSpec, forbidden: Sequence[float],
              rng: np.random.Generator) -> list[tuple[float, float]]:
    """Cut ``[0, leg_len]`` into at most ``k`` pieces, keeping gaps off tee points."""
    lo, hi = spec.gap_range
    c = spec.clearance
    while k > 1:
        for _ in range(20):
            gaps = np.round(rng.uniform(lo, hi, size=k - 1), 2)
            spare = leg_len - gaps.sum() - k * spec.min_fragment
            if spare < 0:
                break
            weights = rng.uniform(0.5, 1.5, size=k)
            lengths = spec.min_fragment + spare * weights / weights.sum()
            pieces, pos = [], 0.0
            for i in range(k):
                end = leg_len if i == k - 1 else round(pos + lengths[i], 2)
                pieces.append((pos, end))
                if i < k - 1:
                    pos = round(end + gaps[i], 2)
            cuts = [(pieces[i][1], pieces[i + 1][0]) for i in range(k - 1)]
            if all(not (g0 - c < f < g1 + c) for g0, g1 in cuts for f in forbidden) \
                    and all(e - s >= spec.min_fragment - 0.02 for s, e in pieces):
                return pieces
        k -= 1
    return [(0.0, leg_len)]


def generate(spec: SynthSpec) -> tuple[DiagramScene, GroundTruth]:
    """Build one sheet and its intended partition.

    Ghost strokes belong to the truth line of the fragment they shadow;
    clutter strokes are not part of the truth at all.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    layout = _Layout(spec, rng)
    layout.place_symbols()
    layout.route_lines()

    # fragments: (group, p1, p2, horizontal?)
    fragments: list[tuple[int, tuple, tuple, bool]] = []
    lo_gap, hi_gap = spec.gap_range
    leg_iter = iter(layout.legs)
    for route in layout.routes:
        n_legs = len(route.points) - 1
        for i in range(n_legs):
            leg = next(leg_iter)
            d = leg.direction
            start_trim = end_trim = 0.0
            if i == 0 or rng.random() < 0.5:
                start_trim = round(float(rng.uniform(lo_gap, hi_gap)), 2)
            if i == n_legs - 1 and not route.ends_on_tee:
                end_trim = round(float(rng.uniform(lo_gap, hi_gap)), 2)
            usable = leg.length - start_trim - end_trim
            if usable < spec.min_fragment:
                start_trim = end_trim = 0.0
                usable = leg.length
            k = int(rng.integers(spec.split_count_range[0], spec.split_count_range[1] + 1))
            forbidden = [t - start_trim for t in leg.tees]
            for s0, s1 in _fragment(usable, k, spec, forbidden, rng):
                a, b = start_trim + s0, start_trim + s1
                p = (round(leg.start[0] + d[0] * a, 2), round(leg.start[1] + d[1] * a, 2))
                q = (round(leg.start[0] + d[0] * b, 2), round(leg.start[1] + d[1] * b, 2))
                fragments.append((route.group, p, q, d[1] == 0))

    ghosts = []
    lo_off, hi_off = spec.ghost_offset_range
    for group, p, q, horiz in fragments:
        if spec.duplicate_prob and rng.random() < spec.duplicate_prob:
            off = round(float(rng.uniform(lo_off, hi_off)), 2) * (1 if rng.random() < 0.5 else -1)
            shift = (0.0, off) if horiz else (off, 0.0)
            ghosts.append((group, (round(p[0] + shift[0], 2), round(p[1] + shift[1], 2)),
                           (round(q[0] + shift[0], 2), round(q[1] + shift[1], 2)), horiz))

    clutter = []
    width, height = spec.canvas
    reach = spec.clearance + hi_off
    for _ in range(spec.clutter_count):
        for _ in range(400):
            length = int(rng.integers(20, 81))
            horiz = rng.random() < 0.5
            x = int(rng.integers(1, max(2, width - (length if horiz else 0) - 1)))
            y = int(rng.integers(1, max(2, height - (0 if horiz else length) - 1)))
            q = (x + length, y) if horiz else (x, y + length)
            box = _leg_box((x, y), q)
            if q[0] > width or q[1] > height:
                continue
            if layout.obstacles.clear_of(box, reach) and \
                    all(_box_dist(box, sym) >= reach for sym in layout.symbols):
                clutter.append((-1, (x, y), q, horiz))
                break
        else:
            raise CanvasTooSmall(f"placed {len(clutter)} of {spec.clutter_count} clutter strokes")

    strokes = fragments + ghosts + clutter
    ids = [int(i) + 1 for i in rng.permutation(len(strokes))]

    def jitter(p, q, horiz):
        if not spec.jitter_sigma:
            return p, q
        n1, n2 = np.round(rng.normal(0.0, spec.jitter_sigma, size=2), 2)
        if horiz:
            p = (p[0], float(np.clip(p[1] + n1, 0, height)))
            q = (q[0], float(np.clip(q[1] + n2, 0, height)))
        else:
            p = (float(np.clip(p[0] + n1, 0, width)), p[1])
            q = (float(np.clip(q[0] + n2, 0, width)), q[1])
        return p, q

    segments, groups = [], {}
    for sid, (group, p, q, horiz) in zip(ids, strokes):
        if group >= 0:
            p, q = jitter(p, q, horiz)
            groups.setdefault(group, []).append(sid)
        segments.append(Segment(sid, Point(float(p[0]), float(p[1])),
                                Point(float(q[0]), float(q[1]))))
    segments.sort(key=lambda s: s.id)

    symbols = [
        DetectedSymbol(k + 1, CLASS_LABELS[int(rng.integers(len(CLASS_LABELS)))], box,
                       f"T-{101 + k}")
        for k, box in enumerate(layout.symbols)
    ]
    scene = DiagramScene(f"synth-{spec.seed}", 200, width, height, symbols, segments)

    truth_lines = MergedLineMap.from_groups(groups.values())
    line_of_group = {g: truth_lines.line_of()[min(m)] for g, m in groups.items()}
    touched = {(sym + 1, line_of_group[r.group]) for r in layout.routes for sym in r.symbols}
    return scene, GroundTruth(truth_lines, tuple(sorted(touched)))


def difficulty_sweep(base: SynthSpec, axis: str, values: Sequence[Any],
                     cfg: MergeConfig | None = None,
                     batch_size: int = 10) -> list[tuple[Any, Metrics]]:
    """Pooled metrics of the full pipeline as one generator parameter varies.

    ``axis`` is a SynthSpec field name; range fields also accept
    ``"<field>.min"`` / ``"<field>.max"`` to vary one bound. Each value is
    scored on the same ``batch_size`` seeds (``base.seed`` onward).
    """
    from .pipeline import digitize

    name, _, bound = axis.partition(".")
    names = {f.name for f in dataclasses.fields(SynthSpec)}
    if name not in names or name == "seed" or (bound and (
            bound not in ("min", "max") or name not in _RANGE_FIELDS)):
        raise UnknownParameter(f"cannot sweep {axis!r}")
    curve = []
    for value in values:
        if bound:
            lo, hi = getattr(base, name)
            value_spec = (value, hi) if bound == "min" else (lo, value)
        else:
            value_spec = value
        cases = []
        for i in range(batch_size):
            scene, truth = generate(base.replace(**{name: value_spec}, seed=base.seed + i))
            cases.append((digitize(scene, cfg).scored_lines(), truth))
        curve.append((value, batch_evaluate(cases).pooled))
    return curve


def truth_document(truth: GroundTruth) -> str:
    return json.dumps(truth.to_dict(), indent=1) + "\n"
