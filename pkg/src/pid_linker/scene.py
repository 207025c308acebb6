"""Scene documents: the detections of one diagram sheet.

A scene file is UTF-8 JSON::

    {"sheet_id": str, "dpi": int, "width": num, "height": num,
     "symbols": [{"id": int, "class_label": str,
                  "bbox": [xmin, ymin, xmax, ymax], "tag_text": str | null}],
     "segments": [{"id": int, "p1": [x, y], "p2": [x, y]}]}

Unknown keys are kept in ``extra`` mappings and written back on dump.
"""

from __future__ import annotations

import dataclasses
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .config import MergeConfig
from .errors import (
    GeometryError,
    MalformedDocument,
    MissingField,
    NonPositiveDpi,
    SceneValidationError,
    TypeMismatch,
)
from .geometry import Point, Segment, classify_orientation, snap_segment

TARGET_DPI = 200


class UpscaleWarning(UserWarning):
    """Emitted when a sub-200 dpi scene is scaled up (noise is scaled too)."""


@dataclass(frozen=True)
class DetectedSymbol:
    id: int
    class_label: str
    bbox: tuple[float, float, float, float]
    tag_text: str | None = None
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def scaled(self, factor: float) -> "DetectedSymbol":
        return dataclasses.replace(self, bbox=tuple(c * factor for c in self.bbox))


@dataclass(frozen=True)
class DiagramScene:
    sheet_id: str
    dpi: int
    width: float
    height: float
    symbols: tuple[DetectedSymbol, ...] = ()
    segments: tuple[Segment, ...] = ()
    extra: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "segments", tuple(self.segments))

    def replace(self, **changes: Any) -> "DiagramScene":
        return dataclasses.replace(self, **changes)

    def segment_map(self) -> dict[int, Segment]:
        return {s.id: s for s in self.segments}

    def symbol_map(self) -> dict[int, DetectedSymbol]:
        return {s.id: s for s in self.symbols}


# -- parsing -----------------------------------------------------------------

_SCENE_KEYS = {"sheet_id", "dpi", "width", "height", "symbols", "segments"}
_SYMBOL_KEYS = {"id", "class_label", "bbox", "tag_text"}
_SEGMENT_KEYS = {"id", "p1", "p2"}


def _get(obj: Mapping, key: str, path: str) -> Any:
    if key not in obj:
        raise MissingField(f"{path}.{key}" if path else key)
    return obj[key]


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeMismatch(f"expected integer, got {type(value).__name__}", path)
    return value


def _as_num(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeMismatch(f"expected number, got {type(value).__name__}", path)
    if not math.isfinite(value):
        raise TypeMismatch("expected a finite number", path)
    return value


def _as_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise TypeMismatch(f"expected string, got {type(value).__name__}", path)
    return value


def _as_coords(value: Any, n: int, path: str) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != n:
        raise TypeMismatch(f"expected a list of {n} numbers", path)
    return tuple(_as_num(v, f"{path}[{i}]") for i, v in enumerate(value))


def _as_list(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise TypeMismatch(f"expected list, got {type(value).__name__}", path)
    return value


def _extras(obj: Mapping, known: set[str]) -> dict[str, Any]:
    return {k: v for k, v in obj.items() if k not in known}


def scene_from_dict(doc: Any) -> DiagramScene:
    if not isinstance(doc, dict):
        raise TypeMismatch("scene document must be a JSON object", "$")
    symbols = []
    for i, item in enumerate(_as_list(_get(doc, "symbols", ""), "symbols")):
        path = f"symbols[{i}]"
        if not isinstance(item, dict):
            raise TypeMismatch("expected object", path)
        tag = item.get("tag_text")
        if tag is not None:
            tag = _as_str(tag, f"{path}.tag_text")
        symbols.append(DetectedSymbol(
            id=_as_int(_get(item, "id", path), f"{path}.id"),
            class_label=_as_str(_get(item, "class_label", path), f"{path}.class_label"),
            bbox=_as_coords(_get(item, "bbox", path), 4, f"{path}.bbox"),
            tag_text=tag,
            extra=_extras(item, _SYMBOL_KEYS),
        ))
    segments = []
    for i, item in enumerate(_as_list(_get(doc, "segments", ""), "segments")):
        path = f"segments[{i}]"
        if not isinstance(item, dict):
            raise TypeMismatch("expected object", path)
        segments.append(Segment(
            _as_int(_get(item, "id", path), f"{path}.id"),
            Point(*_as_coords(_get(item, "p1", path), 2, f"{path}.p1")),
            Point(*_as_coords(_get(item, "p2", path), 2, f"{path}.p2")),
            _extras(item, _SEGMENT_KEYS),
        ))
    return DiagramScene(
        sheet_id=_as_str(_get(doc, "sheet_id", ""), "sheet_id"),
        dpi=_as_int(_get(doc, "dpi", ""), "dpi"),
        width=_as_num(_get(doc, "width", ""), "width"),
        height=_as_num(_get(doc, "height", ""), "height"),
        symbols=symbols,
        segments=segments,
        extra=_extras(doc, _SCENE_KEYS),
    )


def parse_scene(data: bytes | str) -> DiagramScene:
    """Parse a scene document. The result is not validated."""
    try:
        doc = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedDocument(str(exc), "$") from None
    return scene_from_dict(doc)


def _num(v: float) -> int | float:
    return int(v) if float(v).is_integer() else v


def scene_to_dict(scene: DiagramScene) -> dict[str, Any]:
    return {
        "sheet_id": scene.sheet_id,
        "dpi": scene.dpi,
        "width": _num(scene.width),
        "height": _num(scene.height),
        "symbols": [
            {"id": s.id, "class_label": s.class_label,
             "bbox": [_num(c) for c in s.bbox], "tag_text": s.tag_text, **s.extra}
            for s in scene.symbols
        ],
        "segments": [
            {"id": s.id, "p1": [_num(s.p1.x), _num(s.p1.y)],
             "p2": [_num(s.p2.x), _num(s.p2.y)], **s.extra}
            for s in scene.segments
        ],
        **scene.extra,
    }


def dump_scene(scene: DiagramScene) -> str:
    return json.dumps(scene_to_dict(scene), indent=1) + "\n"


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Issue:
    code: str
    kind: str          # "segment", "symbol" or "scene"
    item_id: int | None
    message: str
    fatal: bool = True

    def __str__(self):
        where = f"{self.kind} {self.item_id}" if self.item_id is not None else self.kind
        return f"{self.code}({where}): {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.fatal]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if not i.fatal]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def raise_for_errors(self) -> None:
        if self.errors:
            raise SceneValidationError(self.errors)


def _duplicates(ids: Iterable[int]) -> list[int]:
    seen, dup = set(), []
    for i in ids:
        if i in seen and i not in dup:
            dup.append(i)
        seen.add(i)
    return sorted(dup)


def validate_scene(scene: DiagramScene, angle_tol_deg: float = 2.0,
                   strict: bool = False) -> ValidationReport:
    """Check ids, canvas bounds and segment geometry.

    Off-axis segments are fatal in strict mode and warnings otherwise (they
    get snapped by :func:`prepare_scene`).
    """
    issues = []
    if scene.dpi <= 0:
        issues.append(Issue("NonPositiveDpi", "scene", None, f"dpi {scene.dpi}"))
    if not (scene.width > 0 and scene.height > 0):
        issues.append(Issue("InvalidCanvas", "scene", None,
                            f"canvas {scene.width}x{scene.height}"))
    for i in _duplicates(s.id for s in scene.segments):
        issues.append(Issue("DuplicateId", "segment", i, f"segment id {i} used more than once"))
    for i in _duplicates(s.id for s in scene.symbols):
        issues.append(Issue("DuplicateId", "symbol", i, f"symbol id {i} used more than once"))

    def inside(x, y):
        return 0 <= x <= scene.width and 0 <= y <= scene.height

    for sym in scene.symbols:
        x0, y0, x1, y1 = sym.bbox
        if not (x0 < x1 and y0 < y1):
            issues.append(Issue("InvalidBBox", "symbol", sym.id, f"bbox {sym.bbox}"))
        if not (inside(x0, y0) and inside(x1, y1)):
            issues.append(Issue("CoordinateOutOfBounds", "symbol", sym.id,
                                f"bbox {sym.bbox} outside canvas"))
    for seg in scene.segments:
        if not (inside(*seg.p1) and inside(*seg.p2)):
            issues.append(Issue("CoordinateOutOfBounds", "segment", seg.id,
                                f"{tuple(seg.p1)}-{tuple(seg.p2)} outside canvas"))
        if seg.p1 == seg.p2:
            issues.append(Issue("DegenerateSegment", "segment", seg.id, "zero length"))
            continue
        try:
            classify_orientation(seg.p1, seg.p2, angle_tol_deg)
        except GeometryError as exc:
            issues.append(Issue("NotAxisAligned", "segment", seg.id, str(exc), fatal=strict))
    return ValidationReport(issues)


def normalize_resolution(scene: DiagramScene, target_dpi: int = TARGET_DPI) -> DiagramScene:
    """Rescale every coordinate into the ``target_dpi`` frame."""
    if scene.dpi <= 0:
        raise NonPositiveDpi(f"dpi must be positive, got {scene.dpi}", "dpi")
    if scene.dpi == target_dpi:
        return scene
    factor = target_dpi / scene.dpi
    if scene.dpi < target_dpi:
        warnings.warn(
            f"sheet {scene.sheet_id!r}: upscaling {scene.dpi} dpi to {target_dpi} dpi; "
            "detection noise is scaled by the same factor", UpscaleWarning, stacklevel=2)
    return scene.replace(
        dpi=target_dpi,
        width=scene.width * factor,
        height=scene.height * factor,
        symbols=[s.scaled(factor) for s in scene.symbols],
        segments=[s.scaled(factor) for s in scene.segments],
    )


def prepare_scene(scene: DiagramScene, cfg: MergeConfig | None = None) -> DiagramScene:
    """Validate, snap segments to their axes, and normalize to 200 dpi.

    Raises :class:`SceneValidationError` on fatal issues.
    """
    cfg = cfg or MergeConfig()
    validate_scene(scene, cfg.angle_tol_deg, cfg.strict_axis).raise_for_errors()
    snapped = [snap_segment(s, cfg.angle_tol_deg, cfg.strict_axis) for s in scene.segments]
    return normalize_resolution(scene.replace(segments=snapped))
