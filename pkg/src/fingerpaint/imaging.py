"""Pixel-level primitives: color conversion, skin filtering, mask cleanup, blobs, crop.

Rasters are numpy arrays throughout: RGB frames are uint8 of shape
(height, width, 3); skin masks are bool of shape (height, width).
Points are (x, y) with x = column, y = row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import ndimage

from .errors import EmptyMaskError, InvalidFrameError

MAX_DIM = 4096

# Borders a blob can touch. Tie-break order for entry-edge decisions is the
# order of this tuple: Bottom, Left, Right, Top.
BORDER_BOTTOM = "bottom"
BORDER_LEFT = "left"
BORDER_RIGHT = "right"
BORDER_TOP = "top"
BORDERS = (BORDER_BOTTOM, BORDER_LEFT, BORDER_RIGHT, BORDER_TOP)

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def round_half_away(x: float) -> int:
    """Round half away from zero; the one rounding rule used everywhere."""
    if x >= 0:
        return math.floor(x + 0.5)
    return -math.floor(-x + 0.5)


@dataclass
class FrameRgb:
    """One captured frame: uint8 RGB raster plus a stream-relative timestamp."""

    pixels: np.ndarray
    timestamp_ms: int = 0

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def validate(self) -> None:
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise InvalidFrameError(f"expected uint8 (h, w, 3) raster, got {p.dtype} {p.shape}")
        h, w = p.shape[:2]
        if w < 1 or h < 1:
            raise InvalidFrameError(f"degenerate frame {w}x{h}")
        if w > MAX_DIM or h > MAX_DIM:
            raise InvalidFrameError(f"frame {w}x{h} exceeds {MAX_DIM} pixel bound")


class YcbcrPixel(NamedTuple):
    y: int
    cb: int
    cr: int


@dataclass(frozen=True)
class SkinThresholds:
    """Chroma box plus minimum luma for skin classification.

    Defaults are the classical Cb/Cr skin box; y_min rejects frames too dark
    to segment reliably.
    """

    cb_min: int = 77
    cb_max: int = 127
    cr_min: int = 133
    cr_max: int = 173
    y_min: int = 40

    def __post_init__(self) -> None:
        if self.cb_min > self.cb_max or self.cr_min > self.cr_max:
            raise ValueError("chroma bounds inverted")


@dataclass(frozen=True)
class BlobInfo:
    """Connected component summary: inclusive bbox, pixel count, border contact."""

    bbox: tuple[int, int, int, int]  # (x0, y0, x1, y1) inclusive
    area: int
    touches: frozenset[str] = field(default_factory=frozenset)


def rgb_to_ycbcr(p: tuple[int, int, int]) -> YcbcrPixel:
    """Full-range BT.601 conversion of one 8-bit RGB triple."""
    r, g, b = p
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128 + 0.5 * r - 0.418688 * g - 0.081312 * b
    clamp = lambda v: min(255, max(0, round_half_away(v)))
    return YcbcrPixel(clamp(y), clamp(cb), clamp(cr))


def ycbcr_planes(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized full-range BT.601: uint8 (h, w, 3) RGB -> three uint8 planes.

    Per-pixel results agree exactly with rgb_to_ycbcr (same float64 expression
    order, same rounding).
    """
    r = pixels[:, :, 0].astype(np.float64)
    g = pixels[:, :, 1].astype(np.float64)
    b = pixels[:, :, 2].astype(np.float64)
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128 + 0.5 * r - 0.418688 * g - 0.081312 * b

    def q(plane: np.ndarray) -> np.ndarray:
        # all three planes are non-negative, so half-away == floor(x + 0.5)
        return np.clip(np.floor(plane + 0.5), 0, 255).astype(np.uint8)

    return q(y), q(cb), q(cr)


def skin_mask(frame: FrameRgb, t: SkinThresholds) -> np.ndarray:
    """Classify each pixel as skin iff its chroma lies in the box and luma >= y_min."""
    y, cb, cr = ycbcr_planes(frame.pixels)
    return (
        (cb >= t.cb_min)
        & (cb <= t.cb_max)
        & (cr >= t.cr_min)
        & (cr <= t.cr_max)
        & (y >= t.y_min)
    )


def clean_mask(m: np.ndarray) -> np.ndarray:
    """One pass of 3x3 majority smoothing.

    A pixel is set iff at least 5 of the 9 cells in its neighborhood
    (including itself) were set; outside the raster counts as unset.
    """
    h, w = m.shape
    padded = np.zeros((h + 2, w + 2), dtype=np.uint8)
    padded[1:-1, 1:-1] = m
    counts = np.zeros((h, w), dtype=np.uint8)
    for dy in range(3):
        for dx in range(3):
            counts += padded[dy : dy + h, dx : dx + w]
    return counts >= 5


def _border_touches(labels: np.ndarray, label: int) -> frozenset[str]:
    touches = set()
    if (labels[-1, :] == label).any():
        touches.add(BORDER_BOTTOM)
    if (labels[:, 0] == label).any():
        touches.add(BORDER_LEFT)
    if (labels[:, -1] == label).any():
        touches.add(BORDER_RIGHT)
    if (labels[0, :] == label).any():
        touches.add(BORDER_TOP)
    return frozenset(touches)


def largest_component(m: np.ndarray, min_area: int) -> BlobInfo | None:
    """Largest 8-connected component of the mask, or None if all are below min_area.

    Area ties go to the blob whose bbox has the smaller (y0, x0).
    Border contact is evaluated against the raster edges of m.
    """
    labels, n = ndimage.label(m, structure=EIGHT_CONNECTED)
    if n == 0:
        return None
    areas = np.bincount(labels.ravel())[1:]  # skip background
    best_area = int(areas.max())
    if best_area < min_area:
        return None
    candidates = [i + 1 for i, a in enumerate(areas) if a == best_area]
    slices = ndimage.find_objects(labels)
    best = None
    for label in candidates:
        sl = slices[label - 1]
        y0, y1 = sl[0].start, sl[0].stop - 1
        x0, x1 = sl[1].start, sl[1].stop - 1
        if best is None or (y0, x0) < best[0]:
            best = ((y0, x0), label, (x0, y0, x1, y1))
    _, label, bbox = best
    return BlobInfo(bbox=bbox, area=best_area, touches=_border_touches(labels, label))


def crop_to_blob(
    frame: FrameRgb, m: np.ndarray, b: BlobInfo, margin: int
) -> tuple[FrameRgb, np.ndarray, tuple[int, int]]:
    """Cut the blob bbox (expanded by margin, clamped to the frame) out of frame and mask.

    Returns (cropped frame, cropped mask, (dx, dy)) where
    frame_x = crop_x + dx and frame_y = crop_y + dy.
    """
    h, w = m.shape
    x0, y0, x1, y1 = b.bbox
    cx0 = max(0, x0 - margin)
    cy0 = max(0, y0 - margin)
    cx1 = min(w - 1, x1 + margin)
    cy1 = min(h - 1, y1 + margin)
    sub = frame.pixels[cy0 : cy1 + 1, cx0 : cx1 + 1]
    cropped = FrameRgb(pixels=sub, timestamp_ms=frame.timestamp_ms)
    return cropped, m[cy0 : cy1 + 1, cx0 : cx1 + 1], (cx0, cy0)


def require_nonempty(m: np.ndarray) -> None:
    if not m.any():
        raise EmptyMaskError("mask has no set pixels")
