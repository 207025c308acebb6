"""SVG overlays of merged lines over the detected primitives."""

from __future__ import annotations

from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .geometry import Segment
from .graph import Attachment
from .merge import MergedLineMap
from .scene import DiagramScene

# 16 hues, ordered by bit reversal so neighbouring ids get distant colours
_HUE_ORDER = (0, 8, 4, 12, 2, 10, 6, 14, 1, 9, 5, 13, 3, 11, 7, 15)
PALETTE = tuple(f"hsl({h * 360 // 16},85%,42%)" for h in _HUE_ORDER)


def colour(key: int) -> str:
    return PALETTE[(key - 1) % len(PALETTE)]


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _line(s: Segment, stroke: str, width: float = 3.0, extra: str = "") -> str:
    return (f'<line x1="{_fmt(s.p1.x)}" y1="{_fmt(s.p1.y)}" x2="{_fmt(s.p2.x)}" '
            f'y2="{_fmt(s.p2.y)}" stroke="{stroke}" stroke-width="{width}"{extra}/>')


def render_svg(scene: DiagramScene, lines: MergedLineMap | None = None,
               atts: Iterable[Attachment] = (), segments: Sequence[Segment] | None = None,
               raw: bool = False) -> str:
    """Draw symbols, line groups and attachment contacts.

    Members of one merged line share a stroke colour keyed by the line id.
    With ``raw=True`` (or no ``lines``) every segment gets its own colour,
    which is the view of the detections before merging. Segments not
    covered by ``lines`` are drawn thin and grey.
    """
    geom = {s.id: s for s in (segments if segments is not None else scene.segments)}
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(scene.width)}" '
        f'height="{_fmt(scene.height)}" viewBox="0 0 {_fmt(scene.width)} {_fmt(scene.height)}">',
        f'<title>{escape(scene.sheet_id)}</title>',
        '<rect width="100%" height="100%" fill="white"/>',
        '<g id="symbols" fill="none" stroke="black" stroke-width="1.5" font-size="11" '
        'font-family="monospace">',
    ]
    for sym in sorted(scene.symbols, key=lambda s: s.id):
        x0, y0, x1, y1 = sym.bbox
        out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
                   f'height="{_fmt(y1 - y0)}"/>')
        out.append(f'<text x="{_fmt(x0)}" y="{_fmt(y0 - 3)}" stroke="none" fill="black">'
                   f'S{sym.id} {escape(sym.class_label)}</text>')
    out.append("</g>")

    drawn = set()
    if raw or lines is None:
        out.append('<g id="segments">')
        for sid in sorted(geom):
            out.append(_line(geom[sid], colour(sid)))
        out.append("</g>")
        drawn = set(geom)
    else:
        for line_id, members in lines.items():
            out.append(f'<g class="line" id="L{line_id}" stroke-linecap="round">')
            for sid in members:
                out.append(_line(geom[sid], colour(line_id)))
            out.append("</g>")
            drawn.update(members)
    rest = sorted(set(geom) - drawn)
    if rest:
        out.append('<g id="unassigned">')
        for sid in rest:
            out.append(_line(geom[sid], "#bbbbbb", 1.0, ' stroke-dasharray="4 3"'))
        out.append("</g>")

    contacts = sorted((a for a in atts if a.contact is not None),
                      key=lambda a: (a.line_id, a.symbol_id))
    if contacts:
        out.append('<g id="contacts" fill="black">')
        for a in contacts:
            out.append(f'<circle cx="{_fmt(a.contact.x)}" cy="{_fmt(a.contact.y)}" r="3"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
