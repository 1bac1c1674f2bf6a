"""Synthetic hand frames with exact tip ground truth.

Hands are axis-aligned palm+finger rectangles built in a canonical
bottom-entry orientation and rotated in exact 90-degree steps for the other
entry edges, so ground truths across edges are exact rotations of each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HandSpecError
from .imaging import BORDER_BOTTOM, BORDER_LEFT, BORDER_RIGHT, BORDER_TOP, FrameRgb
from .imaging import SkinThresholds, rgb_to_ycbcr

# CCW quarter turns that take a canonical bottom-entry scene to each edge
_ROTATIONS = {BORDER_BOTTOM: 0, BORDER_RIGHT: 1, BORDER_TOP: 2, BORDER_LEFT: 3}


@dataclass(frozen=True)
class HandSpec:
    entry: str
    palm: tuple[int, int]  # (width, height) px in entry-edge orientation
    finger: tuple[int, int, int]  # (width, length, lateral offset from palm's left edge)
    skin_color: tuple[int, int, int] = (224, 157, 122)
    chroma_jitter_sigma: float = 0.0
    brightness_scale: float = 1.0


@dataclass(frozen=True)
class PlainBackground:
    color: tuple[int, int, int] = (255, 255, 255)


@dataclass(frozen=True)
class ComplexBackground:
    seed: int
    n_distractors: int = 10
    distractor_size_range: tuple[int, int] = (12, 80)
    include_skin_colored: bool = True


@dataclass(frozen=True)
class SceneSpec:
    background: PlainBackground | ComplexBackground
    frame_w: int = 640
    frame_h: int = 480
    seed: int = 0


@dataclass(frozen=True)
class GroundTruth:
    tip: tuple[int, int]
    entry: str


def _ycbcr_float(rgb: tuple[int, int, int]) -> tuple[float, float, float]:
    r, g, b = rgb
    return (
        0.299 * r + 0.587 * g + 0.114 * b,
        128 - 0.168736 * r - 0.331264 * g + 0.5 * b,
        128 + 0.5 * r - 0.418688 * g - 0.081312 * b,
    )


def _rgb_from_ycbcr(y: np.ndarray, cb: np.ndarray, cr: np.ndarray) -> np.ndarray:
    """Inverse full-range BT.601; float planes -> float (n, 3) RGB."""
    r = y + 1.402 * (cr - 128.0)
    g = y - 0.344136 * (cb - 128.0) - 0.714136 * (cr - 128.0)
    b = y + 1.772 * (cb - 128.0)
    return np.stack([r, g, b], axis=-1)


def _quantize(rgb_float: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(rgb_float + 0.5), 0, 255).astype(np.uint8)


def in_skin_box(rgb: tuple[int, int, int], t: SkinThresholds | None = None) -> bool:
    t = t or SkinThresholds()
    p = rgb_to_ycbcr(rgb)
    return t.cb_min <= p.cb <= t.cb_max and t.cr_min <= p.cr <= t.cr_max and p.y >= t.y_min


def _hand_silhouette(h: HandSpec, cw: int, ch: int) -> tuple[np.ndarray, tuple[int, int]]:
    """Canonical bottom-entry silhouette mask plus the exact tip point."""
    palm_w, palm_h = h.palm
    finger_w, finger_len, offset = h.finger
    if finger_len < 2 * finger_w:
        raise HandSpecError(f"finger length {finger_len} < 2x width {finger_w}")
    if not (0 <= offset <= palm_w - finger_w):
        raise HandSpecError(f"finger offset {offset} outside palm width {palm_w}")
    if palm_w > cw - 2:
        raise HandSpecError(f"palm width {palm_w} does not fit frame width {cw}")
    if palm_h + finger_len > ch - 1:
        raise HandSpecError(f"hand extent {palm_h + finger_len} does not fit frame height {ch}")
    mask = np.zeros((ch, cw), dtype=bool)
    palm_x0 = (cw - palm_w) // 2
    mask[ch - palm_h :, palm_x0 : palm_x0 + palm_w] = True
    fx0 = palm_x0 + offset
    tip_y = ch - palm_h - finger_len
    mask[tip_y : ch - palm_h, fx0 : fx0 + finger_w] = True
    tip_x = fx0 + finger_w // 2  # midpoint of the far end, rounded half away
    return mask, (tip_x, tip_y)


def _paint_hand(frame: np.ndarray, mask: np.ndarray, h: HandSpec, rng: np.random.Generator) -> None:
    n = int(mask.sum())
    if h.chroma_jitter_sigma > 0:
        y0, cb0, cr0 = _ycbcr_float(h.skin_color)
        y = np.full(n, y0)
        cb = np.clip(cb0 + rng.normal(0.0, h.chroma_jitter_sigma, n), 0, 255)
        cr = np.clip(cr0 + rng.normal(0.0, h.chroma_jitter_sigma, n), 0, 255)
        rgb = _rgb_from_ycbcr(y, cb, cr)
    else:
        rgb = np.tile(np.asarray(h.skin_color, dtype=np.float64), (n, 1))
    frame[mask] = _quantize(rgb * h.brightness_scale)


def _sample_nonskin_color(rng: np.random.Generator, t: SkinThresholds) -> tuple[int, int, int]:
    # rejection-sample colors safely outside the chroma box (6 unit margin)
    for _ in range(100):
        rgb = tuple(int(v) for v in rng.integers(0, 256, 3))
        p = rgb_to_ycbcr(rgb)
        if not (
            t.cb_min - 6 <= p.cb <= t.cb_max + 6 and t.cr_min - 6 <= p.cr <= t.cr_max + 6
        ):
            return rgb
    return (255, 255, 255)


def sample_skin_color(rng: np.random.Generator, t: SkinThresholds | None = None) -> tuple[int, int, int]:
    """Skin tone that stays inside the chroma box for brightness scales 0.8..1.2."""
    t = t or SkinThresholds()
    for _ in range(100):
        y = float(rng.uniform(110, 200))
        cb = float(rng.uniform(95, 120))
        cr = float(rng.uniform(140, 162))
        rgb_arr = _quantize(_rgb_from_ycbcr(np.array([y]), np.array([cb]), np.array([cr])))[0]
        rgb = (int(rgb_arr[0]), int(rgb_arr[1]), int(rgb_arr[2]))
        ok = all(
            in_skin_box(tuple(int(np.clip(np.floor(s * c + 0.5), 0, 255)) for c in rgb), t)
            for s in (0.8, 1.0, 1.2)
        )
        if ok:
            return rgb
    return (224, 157, 122)


def _draw_shape(frame: np.ndarray, rng: np.random.Generator, color, x0, y0, w, h) -> None:
    fh, fw = frame.shape[:2]
    x1, y1 = min(fw, x0 + w), min(fh, y0 + h)
    if x1 <= x0 or y1 <= y0:
        return
    if rng.random() < 0.5:
        frame[y0:y1, x0:x1] = color
    else:
        yy, xx = np.mgrid[y0:y1, x0:x1]
        cx, cy = (x0 + x1 - 1) / 2.0, (y0 + y1 - 1) / 2.0
        a, b = max((x1 - x0) / 2.0, 1.0), max((y1 - y0) / 2.0, 1.0)
        inside = ((xx - cx) / a) ** 2 + ((yy - cy) / b) ** 2 <= 1.0
        frame[y0:y1, x0:x1][inside] = color


def _paint_complex_background(
    frame: np.ndarray,
    bg: ComplexBackground,
    hand_bbox: tuple[int, int, int, int],
    min_area: int,
    thresholds: SkinThresholds,
) -> None:
    rng = np.random.default_rng(bg.seed)
    fh, fw = frame.shape[:2]
    frame[:, :] = _sample_nonskin_color(rng, thresholds)
    lo, hi = bg.distractor_size_range
    for _ in range(bg.n_distractors):
        w = int(rng.integers(lo, hi + 1))
        h = int(rng.integers(lo, hi + 1))
        x0 = int(rng.integers(0, max(1, fw - w)))
        y0 = int(rng.integers(0, max(1, fh - h)))
        _draw_shape(frame, rng, _sample_nonskin_color(rng, thresholds), x0, y0, w, h)
    if bg.include_skin_colored:
        bx0, by0, bx1, by1 = hand_bbox
        pad = 12  # keep clear of the crop margin around the hand
        side_cap = max(4, int((min_area * 0.8) ** 0.5))
        for _ in range(3):
            side = int(rng.integers(4, side_cap + 1))
            for _try in range(40):
                x0 = int(rng.integers(0, max(1, fw - side)))
                y0 = int(rng.integers(0, max(1, fh - side)))
                if x0 + side < bx0 - pad or x0 > bx1 + pad or y0 + side < by0 - pad or y0 > by1 + pad:
                    _draw_shape(frame, rng, sample_skin_color(rng, thresholds), x0, y0, side, side)
                    break


def _rotate_point(p: tuple[int, int], w: int, h: int) -> tuple[int, int]:
    """One CCW quarter turn: (x, y) in a w x h frame -> point in the h x w frame."""
    x, y = p
    return y, w - 1 - x


def gen_frame(
    h: HandSpec,
    s: SceneSpec,
    min_area: int | None = None,
    thresholds: SkinThresholds | None = None,
    timestamp_ms: int = 0,
) -> tuple[FrameRgb, GroundTruth]:
    """Render one synthetic frame; deterministic for fixed specs and seeds."""
    if h.entry not in _ROTATIONS:
        raise HandSpecError(f"unknown entry edge {h.entry!r}")
    thresholds = thresholds or SkinThresholds()
    if min_area is None:
        min_area = int(s.frame_w * s.frame_h * 0.005)
    k = _ROTATIONS[h.entry]
    cw, ch = (s.frame_w, s.frame_h) if k % 2 == 0 else (s.frame_h, s.frame_w)

    mask, tip = _hand_silhouette(h, cw, ch)
    frame = np.zeros((ch, cw, 3), dtype=np.uint8)
    if isinstance(s.background, PlainBackground):
        frame[:, :] = s.background.color
    else:
        ys, xs = np.nonzero(mask)
        bbox = (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
        _paint_complex_background(frame, s.background, bbox, min_area, thresholds)
    rng = np.random.default_rng(s.seed)
    _paint_hand(frame, mask, h, rng)

    w, hh = cw, ch
    for _ in range(k):
        frame = np.rot90(frame)
        tip = _rotate_point(tip, w, hh)
        w, hh = hh, w
    return (
        FrameRgb(pixels=np.ascontiguousarray(frame), timestamp_ms=timestamp_ms),
        GroundTruth(tip=tip, entry=h.entry),
    )


def sweep_frames(
    base: HandSpec,
    scene: SceneSpec,
    n_frames: int,
    fps: float = 12.0,
) -> list[tuple[FrameRgb, GroundTruth]]:
    """Animate the finger across the palm over n_frames at the given rate."""
    palm_w = base.palm[0]
    fw = base.finger[0]
    out = []
    span = palm_w - fw
    for i in range(n_frames):
        offset = (i * span) // max(1, n_frames - 1) if n_frames > 1 else base.finger[2]
        spec = HandSpec(
            entry=base.entry,
            palm=base.palm,
            finger=(fw, base.finger[1], offset),
            skin_color=base.skin_color,
            chroma_jitter_sigma=base.chroma_jitter_sigma,
            brightness_scale=base.brightness_scale,
        )
        ts = round(i * 1000.0 / fps)
        out.append(gen_frame(spec, scene, timestamp_ms=ts))
    return out
