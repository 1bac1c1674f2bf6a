"""Live drawing service: frames in over a websocket, detections and stroke events out.

One pipeline and one session stream per connection; frames are processed
strictly in arrival order with a depth-1 buffer (a new frame replaces an
older unprocessed one, keeping the drawing live). Finished sessions are
retained in a bounded in-memory ring for export.
"""

from __future__ import annotations

import asyncio
import collections
import itertools
import json
import struct
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from . import frameio, pipeline, stroke
from .config import PipelineConfig, config_from_dict, config_to_dict, default_config
from .errors import ConfigError, InvalidFrameError, UnsupportedFormatError
from .imaging import MAX_DIM, FrameRgb

HEADER = struct.Struct(">BIIQ")  # msg_type, width, height, timestamp_ms
MSG_RAW = 1
MSG_ENCODED = 2

EXPORT_MEDIA_TYPES = {
    "json": "application/json",
    "svg": "image/svg+xml",
    "png": "image/png",
}


class ProtocolError(Exception):
    def __init__(self, message: str, fatal: bool) -> None:
        super().__init__(message)
        self.fatal = fatal


def parse_frame_message(data: bytes) -> FrameRgb:
    """Decode one binary client message into a frame.

    Fatal errors mean the byte stream cannot be trusted any further; non-fatal
    ones reject just this frame.
    """
    if len(data) < HEADER.size:
        raise ProtocolError(f"header too short: {len(data)} bytes", fatal=True)
    msg_type, width, height, timestamp_ms = HEADER.unpack_from(data)
    if msg_type not in (MSG_RAW, MSG_ENCODED):
        raise ProtocolError(f"unknown message type {msg_type}", fatal=True)
    if not (1 <= width <= MAX_DIM and 1 <= height <= MAX_DIM):
        raise ProtocolError(f"frame dimensions {width}x{height} out of range", fatal=False)
    payload = data[HEADER.size :]
    if msg_type == MSG_RAW:
        expected = width * height * 3
        if len(payload) != expected:
            raise ProtocolError(
                f"raw payload is {len(payload)} bytes, expected {expected}", fatal=True
            )
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3).copy()
    else:
        try:
            pixels = frameio.decode_image_bytes(payload)
        except InvalidFrameError as exc:
            raise ProtocolError(str(exc), fatal=False) from exc
        if pixels.shape[:2] != (height, width):
            raise ProtocolError(
                f"decoded image {pixels.shape[1]}x{pixels.shape[0]} does not match header",
                fatal=False,
            )
    return FrameRgb(pixels=pixels, timestamp_ms=int(timestamp_ms))


class FrameSlot:
    """Depth-1 frame buffer with ordered control messages.

    put_frame replaces any still-unprocessed frame (freshest wins) and counts
    the drop; control items are never dropped or reordered.
    """

    def __init__(self) -> None:
        self._items: collections.deque = collections.deque()
        self._wakeup = asyncio.Event()
        self.dropped = 0

    def put_frame(self, data: bytes) -> None:
        for i, (kind, _) in enumerate(self._items):
            if kind == "frame":
                del self._items[i]
                self.dropped += 1
                break
        self._items.append(("frame", data))
        self._wakeup.set()

    def put_control(self, kind: str) -> None:
        self._items.append((kind, None))
        self._wakeup.set()

    async def get(self) -> tuple[str, bytes | None]:
        while not self._items:
            self._wakeup.clear()
            await self._wakeup.wait()
        return self._items.popleft()


@dataclass
class ConnectionInfo:
    id: str
    lane: "Lane"
    slot: "FrameSlot"
    active: bool = True


class Lane:
    """Per-connection pipeline state: config snapshot, session stream, counters."""

    def __init__(self, conn_id: str, cfg: PipelineConfig) -> None:
        self.conn_id = conn_id
        self.cfg = cfg
        self.tracker: stroke.SessionTracker | None = None
        self.results: list[pipeline.FrameResult] = []
        self.frame_index = 0
        self._seq = itertools.count(1)

    def _adapt(self, frame: FrameRgb) -> None:
        """Fit the configured mapping to this connection's actual frame size."""
        s = self.cfg.screen
        if (s.frame_w, s.frame_h) != (frame.width, frame.height):
            self.cfg = PipelineConfig(
                thresholds=self.cfg.thresholds,
                min_area=int(frame.width * frame.height * 0.005),
                margin=self.cfg.margin,
                screen=stroke.ScreenMap(
                    frame_w=frame.width,
                    frame_h=frame.height,
                    screen_w=s.screen_w,
                    screen_h=s.screen_h,
                    mirror_x=s.mirror_x,
                ),
                tip_halfwidth=self.cfg.tip_halfwidth,
                template_check_enabled=self.cfg.template_check_enabled,
                end_after_missing=self.cfg.end_after_missing,
            )
        self.tracker = stroke.SessionTracker(
            screen=self.cfg.screen,
            thickness=self.cfg.thickness,
            end_after_missing=self.cfg.end_after_missing,
            id_prefix=f"{self.conn_id}-s",
        )

    def seq(self) -> int:
        return next(self._seq)

    def process(self, frame: FrameRgb) -> tuple[pipeline.FrameResult, list[stroke.Session]]:
        if self.tracker is None:
            self._adapt(frame)
        result = pipeline.process_frame(frame, self.tracker, self.cfg, self.frame_index)
        self.frame_index += 1
        self.results.append(result)
        ended = [e.session for e in result.session_events if isinstance(e, stroke.SessionEnded)]
        return result, ended

    def flush(self) -> tuple[list[stroke.SessionEvent], list[stroke.Session]]:
        if self.tracker is None:
            return [], []
        last_ts = self.results[-1].timestamp_ms if self.results else 0
        events = self.tracker.flush(last_ts)
        ended = [e.session for e in events if isinstance(e, stroke.SessionEnded)]
        return events, ended

    def metrics_dict(self, dropped: int, active: bool) -> dict:
        d = pipeline.compute_metrics(list(self.results)).to_dict()
        d["dropped_frames"] = dropped
        d["active"] = active
        return d


def _event_json(event: stroke.SessionEvent, seq: int) -> str:
    if isinstance(event, stroke.SessionStarted):
        obj = {"type": "session_start", "seq": seq, "session_id": event.session_id, "t_ms": event.t_ms}
    elif isinstance(event, stroke.PointAdded):
        p = event.point
        obj = {
            "type": "point",
            "seq": seq,
            "session_id": event.session_id,
            "point": {"sx": p.sx, "sy": p.sy, "fx": p.fx, "fy": p.fy, "t_ms": p.t_ms},
        }
    else:
        obj = {
            "type": "session_end",
            "seq": seq,
            "session_id": event.session_id,
            "stroke": stroke.stroke_json_obj(event.session),
        }
    return json.dumps(obj, separators=(",", ":"))


def _detection_json(result: pipeline.FrameResult, lane: Lane, seq: int, dropped: int) -> str:
    tip = None
    if result.detection is not None:
        fx, fy = result.detection.tip
        sx, sy = stroke.map_to_screen((fx, fy), lane.cfg.screen)
        tip = {"fx": fx, "fy": fy, "sx": sx, "sy": sy}
    return json.dumps(
        {
            "type": "detection",
            "seq": seq,
            "frame_index": result.frame_index,
            "tip": tip,
            "dropped_frames": dropped,
        },
        separators=(",", ":"),
    )


def create_app(cfg: PipelineConfig | None = None, retain: int = 64) -> FastAPI:
    app = FastAPI(title="fingerpaint service")
    app.state.cfg = cfg if cfg is not None else default_config(frame_w=320, frame_h=240)
    app.state.retain = retain
    app.state.sessions = collections.OrderedDict()  # session_id -> Session
    app.state.connections: dict[str, ConnectionInfo] = {}
    conn_ids = itertools.count(1)

    def retain_sessions(sessions: list[stroke.Session]) -> None:
        ring = app.state.sessions
        for sess in sessions:
            ring[sess.id] = sess
            while len(ring) > app.state.retain:
                ring.popitem(last=False)

    @app.get("/healthz")
    async def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/config")
    async def get_config() -> JSONResponse:
        return JSONResponse(config_to_dict(app.state.cfg))

    @app.put("/config")
    async def put_config(body: dict) -> JSONResponse:
        try:
            app.state.cfg = config_from_dict(body)
        except ConfigError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return JSONResponse(config_to_dict(app.state.cfg))

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str, format: str = "json") -> Response:
        sess = app.state.sessions.get(session_id)
        if sess is None:
            return JSONResponse({"error": f"unknown session {session_id}"}, status_code=404)
        try:
            payload = stroke.export_stroke(sess, format)
        except UnsupportedFormatError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return Response(content=payload, media_type=EXPORT_MEDIA_TYPES[format])

    @app.get("/metrics")
    async def metrics() -> JSONResponse:
        return JSONResponse(
            {
                "connections": {
                    cid: info.lane.metrics_dict(info.slot.dropped, info.active)
                    for cid, info in app.state.connections.items()
                }
            }
        )

    @app.websocket("/draw")
    async def draw(ws: WebSocket) -> None:
        await ws.accept()
        conn_id = f"c{next(conn_ids)}"
        lane = Lane(conn_id, app.state.cfg)
        slot = FrameSlot()
        info = ConnectionInfo(id=conn_id, lane=lane, slot=slot)
        app.state.connections[conn_id] = info

        async def receiver() -> None:
            try:
                while True:
                    message = await ws.receive()
                    if message["type"] == "websocket.disconnect":
                        break
                    text = message.get("text")
                    if text is not None:
                        if text.strip() == "flush":
                            slot.put_control("flush")
                        continue
                    slot.put_frame(message.get("bytes") or b"")
            except WebSocketDisconnect:
                pass
            finally:
                slot.put_control("close")

        recv_task = asyncio.create_task(receiver())
        loop = asyncio.get_running_loop()
        try:
            while True:
                kind, data = await slot.get()
                if kind == "close":
                    break
                if kind == "flush":
                    events, ended = lane.flush()
                    retain_sessions(ended)
                    for event in events:
                        await ws.send_text(_event_json(event, lane.seq()))
                    continue
                try:
                    frame = parse_frame_message(data)
                except ProtocolError as exc:
                    await ws.send_text(
                        json.dumps(
                            {"type": "error", "seq": lane.seq(), "message": str(exc)},
                            separators=(",", ":"),
                        )
                    )
                    if exc.fatal:
                        await ws.close(code=1002)
                        break
                    continue
                try:
                    result, ended = await loop.run_in_executor(None, lane.process, frame)
                except InvalidFrameError as exc:
                    await ws.send_text(
                        json.dumps(
                            {"type": "error", "seq": lane.seq(), "message": str(exc)},
                            separators=(",", ":"),
                        )
                    )
                    continue
                retain_sessions(ended)
                await ws.send_text(_detection_json(result, lane, lane.seq(), slot.dropped))
                for event in result.session_events:
                    await ws.send_text(_event_json(event, lane.seq()))
        except WebSocketDisconnect:
            pass
        finally:
            recv_task.cancel()
            try:
                await recv_task
            except asyncio.CancelledError:
                pass
            _, ended = lane.flush()
            retain_sessions(ended)
            info.active = False

    return app
