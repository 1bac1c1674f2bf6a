"""Session state machine, frame-to-screen mapping, stroke rendering, and export.

A session runs from the finger entering the camera view until it stays gone
for a configurable number of frames; its tracked tips form one stroke of
screen-space points, connected in order.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import OutOfFrameError, UnsupportedFormatError

IDLE = "idle"
ACTIVE = "active"

MARK_COLOR = (255, 0, 0)  # the red the tip band and strokes are drawn in
MARK_COLOR_HEX = "#FF0000"


@dataclass(frozen=True)
class ScreenMap:
    """Maps frame coordinates onto the monitor resolution, optionally mirrored."""

    frame_w: int
    frame_h: int
    screen_w: int
    screen_h: int
    mirror_x: bool = True

    def __post_init__(self) -> None:
        for name in ("frame_w", "frame_h", "screen_w", "screen_h"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2")


@dataclass(frozen=True)
class StrokePoint:
    sx: int
    sy: int
    fx: int
    fy: int
    t_ms: int


@dataclass
class Session:
    """One finger visit: Idle until the first detection, Active while tracked."""

    id: str
    screen: ScreenMap
    thickness: int
    state: str = IDLE
    points: list[StrokePoint] = field(default_factory=list)
    missing_count: int = 0
    started_at: int | None = None
    ended_at: int | None = None


@dataclass(frozen=True)
class SessionStarted:
    session_id: str
    t_ms: int


@dataclass(frozen=True)
class PointAdded:
    session_id: str
    point: StrokePoint


@dataclass(frozen=True)
class SessionEnded:
    session_id: str
    session: Session
    t_ms: int


SessionEvent = SessionStarted | PointAdded | SessionEnded


def _scale(v: int, src_last: int, dst_last: int) -> int:
    # round(v * dst_last / src_last) half away from zero, exact in integers
    return (2 * v * dst_last + src_last) // (2 * src_last)


def map_to_screen(p: tuple[int, int], m: ScreenMap) -> tuple[int, int]:
    """Map a frame point to screen pixels; corners map to corners exactly."""
    fx, fy = p
    if not (0 <= fx < m.frame_w and 0 <= fy < m.frame_h):
        raise OutOfFrameError(f"point {p} outside {m.frame_w}x{m.frame_h} frame")
    sx = _scale(fx, m.frame_w - 1, m.screen_w - 1)
    sy = _scale(fy, m.frame_h - 1, m.screen_h - 1)
    if m.mirror_x:
        sx = (m.screen_w - 1) - sx
    return sx, sy


def advance(
    sess: Session,
    tip: tuple[int, int] | None,
    m: ScreenMap,
    end_after_missing: int,
    t_ms: int,
) -> list[SessionEvent]:
    """Feed one frame's detection (tip point or None) into the session.

    First detection while Idle starts the session; every detection appends a
    mapped point; end_after_missing consecutive detection-less frames end it.
    Returns the events this frame produced, mutating sess in place.
    """
    events: list[SessionEvent] = []
    if tip is not None:
        sx, sy = map_to_screen(tip, m)
        point = StrokePoint(sx=sx, sy=sy, fx=tip[0], fy=tip[1], t_ms=t_ms)
        if sess.state == IDLE:
            sess.state = ACTIVE
            sess.started_at = t_ms
            events.append(SessionStarted(session_id=sess.id, t_ms=t_ms))
        sess.points.append(point)
        sess.missing_count = 0
        events.append(PointAdded(session_id=sess.id, point=point))
    elif sess.state == ACTIVE:
        sess.missing_count += 1
        if sess.missing_count >= end_after_missing:
            events.append(_finish(sess, t_ms))
    return events


def _finish(sess: Session, t_ms: int) -> SessionEnded:
    sess.state = IDLE
    sess.ended_at = t_ms
    return SessionEnded(session_id=sess.id, session=sess, t_ms=t_ms)


class SessionTracker:
    """Single-writer stream of consecutive sessions over one frame source.

    Completed sessions are collected; a fresh session (new id) replaces the
    current one whenever it ends.
    """

    def __init__(
        self,
        screen: ScreenMap,
        thickness: int,
        end_after_missing: int,
        id_prefix: str = "s",
    ) -> None:
        self.screen = screen
        self.thickness = thickness
        self.end_after_missing = end_after_missing
        self.id_prefix = id_prefix
        self.completed: list[Session] = []
        self._counter = 0
        self.current = self._new_session()

    def _new_session(self) -> Session:
        self._counter += 1
        return Session(
            id=f"{self.id_prefix}{self._counter}",
            screen=self.screen,
            thickness=self.thickness,
        )

    def advance(self, tip: tuple[int, int] | None, t_ms: int) -> list[SessionEvent]:
        events = advance(self.current, tip, self.screen, self.end_after_missing, t_ms)
        if any(isinstance(e, SessionEnded) for e in events):
            self.completed.append(self.current)
            self.current = self._new_session()
        return events

    def flush(self, t_ms: int) -> list[SessionEvent]:
        """End an Active session at end-of-input so its stroke is exportable."""
        if self.current.state != ACTIVE:
            return []
        event = _finish(self.current, t_ms)
        self.completed.append(self.current)
        self.current = self._new_session()
        return [event]


def _line_pixels(p0: tuple[int, int], p1: tuple[int, int]) -> list[tuple[int, int]]:
    """Integer line walk: one pixel per major-axis step, minor axis rounded."""
    x0, y0 = p0
    x1, y1 = p1
    dx, dy = x1 - x0, y1 - y0
    n = max(abs(dx), abs(dy))
    if n == 0:
        return [p0]
    pts = []
    for t in range(n + 1):
        # round(t * d / n) half away from zero, exact in integers
        ox = (2 * abs(t * dx) + n) // (2 * n) * (1 if dx >= 0 else -1)
        oy = (2 * abs(t * dy) + n) // (2 * n) * (1 if dy >= 0 else -1)
        pts.append((x0 + ox, y0 + oy))
    return pts


@dataclass
class StrokeRaster:
    """Painted screen pixels of one stroke."""

    width: int
    height: int
    bitmap: np.ndarray  # bool (height, width)
    color: tuple[int, int, int]
    thickness: int

    def painted(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.bitmap)
        return {(int(x), int(y)) for x, y in zip(xs, ys)}


def render_stroke(
    points: list[tuple[int, int]], thickness: int, canvas: tuple[int, int]
) -> StrokeRaster:
    """Rasterize the polyline through points, stamping a disk at every line pixel."""
    if thickness < 1 or thickness % 2 == 0:
        raise ValueError("thickness must be odd and >= 1")
    w, h = canvas
    bitmap = np.zeros((h, w), dtype=bool)
    radius = (thickness - 1) // 2
    disk = [
        (dx, dy)
        for dy in range(-radius, radius + 1)
        for dx in range(-radius, radius + 1)
        if dx * dx + dy * dy <= radius * radius
    ]
    line_pts: list[tuple[int, int]] = []
    if len(points) == 1:
        line_pts = [tuple(points[0])]
    else:
        for a, b in zip(points, points[1:]):
            line_pts.extend(_line_pixels(tuple(a), tuple(b)))
    for x, y in line_pts:
        for dx, dy in disk:
            px, py = x + dx, y + dy
            if 0 <= px < w and 0 <= py < h:
                bitmap[py, px] = True
    return StrokeRaster(width=w, height=h, bitmap=bitmap, color=MARK_COLOR, thickness=thickness)


def stroke_json_obj(sess: Session) -> dict:
    """Stroke export as a plain dict with the documented key order."""
    return {
        "session_id": sess.id,
        "frame_size": [sess.screen.frame_w, sess.screen.frame_h],
        "screen_size": [sess.screen.screen_w, sess.screen.screen_h],
        "thickness": sess.thickness,
        "points": [
            {"sx": p.sx, "sy": p.sy, "fx": p.fx, "fy": p.fy, "t_ms": p.t_ms}
            for p in sess.points
        ],
    }


def export_stroke(sess: Session, format: str) -> bytes:
    """Serialize a finished session as json, svg, or png; byte-deterministic."""
    if format == "json":
        return json.dumps(stroke_json_obj(sess), separators=(",", ":")).encode("utf-8")
    if format == "svg":
        pts = " ".join(f"{p.sx},{p.sy}" for p in sess.points)
        w, h = sess.screen.screen_w, sess.screen.screen_h
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{w}" height="{h}" viewBox="0 0 {w} {h}">'
            f'<polyline fill="none" stroke="{MARK_COLOR_HEX}" '
            f'stroke-width="{sess.thickness}" points="{pts}"/></svg>\n'
        ).encode("utf-8")
    if format == "png":
        raster = render_stroke(
            [(p.sx, p.sy) for p in sess.points],
            sess.thickness,
            (sess.screen.screen_w, sess.screen.screen_h),
        )
        rgb = np.full((raster.height, raster.width, 3), 255, dtype=np.uint8)
        rgb[raster.bitmap] = raster.color
        buf = io.BytesIO()
        Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()
    raise UnsupportedFormatError(f"unknown export format {format!r}")
