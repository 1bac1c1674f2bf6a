"""Per-frame orchestration of segmentation, fingertip detection, and session tracking.

Stages short-circuit: once a frame yields no usable skin blob, nothing after
that point runs (visible in the per-stage timings), and the session advances
with a missing detection.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from . import fingertip, imaging, stroke
from .config import PipelineConfig
from .errors import InvalidFrameError
from .imaging import FrameRgb

STAGES = ("convert", "mask", "clean", "blob", "crop", "ramp", "tips", "select", "advance")


@dataclass
class FrameResult:
    frame_index: int
    timestamp_ms: int
    detection: fingertip.TipDetection | None
    session_events: list[stroke.SessionEvent]
    timings_us: dict[str, int]  # only stages that actually ran
    crop_factor: float | None

    @property
    def total_ms(self) -> float:
        return sum(self.timings_us.values()) / 1000.0


@dataclass
class RunMetrics:
    frames_total: int = 0
    frames_with_detection: int = 0
    first_mark_latency_ms: float | None = None
    mean_frame_ms: float = 0.0
    p95_frame_ms: float = 0.0
    achieved_fps: float = 0.0

    def to_dict(self) -> dict:
        return {
            "frames_total": self.frames_total,
            "frames_with_detection": self.frames_with_detection,
            "first_mark_latency_ms": self.first_mark_latency_ms,
            "mean_frame_ms": self.mean_frame_ms,
            "p95_frame_ms": self.p95_frame_ms,
            "achieved_fps": self.achieved_fps,
        }


class _Timer:
    def __init__(self) -> None:
        self.timings: dict[str, int] = {}
        self._t0 = 0

    def start(self) -> None:
        self._t0 = time.perf_counter_ns()

    def stop(self, stage: str) -> None:
        self.timings[stage] = (time.perf_counter_ns() - self._t0) // 1000


def _translate_cluster(cluster: fingertip.Cluster, dx: int, dy: int) -> fingertip.Cluster:
    return tuple((x + dx, y + dy) for x, y in cluster)


def process_frame(
    frame: FrameRgb,
    tracker: stroke.SessionTracker,
    cfg: PipelineConfig,
    frame_index: int = 0,
) -> FrameResult:
    """Run the full detection chain on one frame and advance the session."""
    frame.validate()
    if frame.width != cfg.screen.frame_w or frame.height != cfg.screen.frame_h:
        raise InvalidFrameError(
            f"frame {frame.width}x{frame.height} does not match configured "
            f"{cfg.screen.frame_w}x{cfg.screen.frame_h}"
        )

    timer = _Timer()
    detection: fingertip.TipDetection | None = None
    crop_factor: float | None = None

    timer.start()
    y, cb, cr = imaging.ycbcr_planes(frame.pixels)
    timer.stop("convert")

    t = cfg.thresholds
    timer.start()
    mask = (
        (cb >= t.cb_min) & (cb <= t.cb_max)
        & (cr >= t.cr_min) & (cr <= t.cr_max)
        & (y >= t.y_min)
    )
    timer.stop("mask")

    timer.start()
    mask = imaging.clean_mask(mask)
    timer.stop("clean")

    timer.start()
    blob = imaging.largest_component(mask, cfg.min_area)
    timer.stop("blob")

    if blob is not None:
        timer.start()
        _, crop_mask, (dx, dy) = imaging.crop_to_blob(frame, mask, blob, cfg.margin)
        crop_factor = (frame.width * frame.height) / crop_mask.size
        timer.stop("crop")

        timer.start()
        entry = fingertip.entry_edge(crop_mask, blob.touches)
        ramp = fingertip.ramp_label(crop_mask, entry)
        timer.stop("ramp")

        timer.start()
        clusters = fingertip.detect_tips(ramp)
        timer.stop("tips")

        timer.start()
        chosen = fingertip.select_finger(clusters)
        accepted = True
        if cfg.template_check_enabled:
            accepted = fingertip.template_check(crop_mask, chosen, entry, cfg.tip_halfwidth)
        if accepted:
            cx, cy = fingertip.cluster_tip_point(chosen)
            tip = (cx + dx, cy + dy)
            detection = fingertip.TipDetection(
                tip=tip,
                cluster=_translate_cluster(chosen, dx, dy),
                entry=entry,
                band=fingertip.tip_band(tip, cfg.tip_halfwidth, (frame.width, frame.height)),
            )
        timer.stop("select")

    timer.start()
    events = tracker.advance(detection.tip if detection else None, frame.timestamp_ms)
    timer.stop("advance")

    return FrameResult(
        frame_index=frame_index,
        timestamp_ms=frame.timestamp_ms,
        detection=detection,
        session_events=events,
        timings_us=timer.timings,
        crop_factor=crop_factor,
    )


@dataclass
class RunOutcome:
    results: list[FrameResult]
    sessions: list[stroke.Session]
    metrics: RunMetrics
    flush_events: list[stroke.SessionEvent] = field(default_factory=list)

    def all_session_events(self) -> list[stroke.SessionEvent]:
        events = [e for r in self.results for e in r.session_events]
        events.extend(self.flush_events)
        return events


def run_sequence(frames: Iterable[FrameRgb], cfg: PipelineConfig) -> RunOutcome:
    """Process frames in order against one session stream, flushing at end of input."""
    tracker = stroke.SessionTracker(
        screen=cfg.screen,
        thickness=cfg.thickness,
        end_after_missing=cfg.end_after_missing,
    )
    results: list[FrameResult] = []
    last_ts = 0
    for i, frame in enumerate(frames):
        try:
            results.append(process_frame(frame, tracker, cfg, frame_index=i))
        except InvalidFrameError as exc:
            raise InvalidFrameError(f"frame {i}: {exc}") from exc
        last_ts = frame.timestamp_ms
    flush_events = tracker.flush(last_ts)
    return RunOutcome(
        results=results,
        sessions=tracker.completed,
        metrics=compute_metrics(results),
        flush_events=flush_events,
    )


def compute_metrics(results: list[FrameResult]) -> RunMetrics:
    """Derive run statistics from per-frame results alone (reproducible from logs).

    First-mark latency is the stream time of the frame carrying the first
    PointAdded event plus that frame's measured processing time: how long a
    viewer waited from stream start until the first visible mark.
    """
    metrics = RunMetrics(frames_total=len(results))
    if not results:
        return metrics
    metrics.frames_with_detection = sum(1 for r in results if r.detection is not None)
    stream_start = results[0].timestamp_ms
    for r in results:
        if any(isinstance(e, stroke.PointAdded) for e in r.session_events):
            metrics.first_mark_latency_ms = (r.timestamp_ms - stream_start) + r.total_ms
            break
    frame_ms = sorted(r.total_ms for r in results)
    metrics.mean_frame_ms = sum(frame_ms) / len(frame_ms)
    p95_index = max(0, -(-95 * len(frame_ms) // 100) - 1)  # ceil(0.95 n) - 1
    metrics.p95_frame_ms = frame_ms[p95_index]
    total_ms = sum(frame_ms)
    metrics.achieved_fps = 1000.0 * len(frame_ms) / total_ms if total_ms > 0 else 0.0
    return metrics
