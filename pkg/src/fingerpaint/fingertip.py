"""Direction-invariant fingertip detection on a skin mask.

The hand is assumed to reach into the raster through one border (the entry
edge, wrist side). Every skin pixel gets a value that ramps 0..255 with its
scanline distance from that edge; pixels that reach 255 are the fingertip
candidates. When several fingers tie, the leftmost one wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import ndimage

from .errors import EmptyMaskError
from .imaging import (
    BORDER_BOTTOM,
    BORDER_LEFT,
    BORDER_RIGHT,
    BORDER_TOP,
    BORDERS,
    EIGHT_CONNECTED,
)

Cluster = tuple[tuple[int, int], ...]  # (x, y) pixels in scan order


@dataclass(frozen=True)
class RampImage:
    """Mask relabeled 0..255 by scanline distance from the entry edge.

    values is uint8 (h, w); non-skin pixels are 0; if any skin pixel exists
    the maximum over skin pixels is exactly 255. extent is the largest
    scanline distance D found.
    """

    values: np.ndarray
    mask: np.ndarray
    entry: str
    extent: int


@dataclass(frozen=True)
class TipDetection:
    """Chosen fingertip: point, its 255-valued cluster, entry edge, marked band.

    All coordinates are full-frame. tip is the rounded centroid of cluster.
    """

    tip: tuple[int, int]
    cluster: Cluster
    entry: str
    band: Cluster


def entry_edge(m: np.ndarray, touches: frozenset[str] | set[str]) -> str:
    """Pick the border the hand entered through.

    Candidates are the touched borders (or all four if none recorded); the
    winner has the most set pixels on its border row/column of m. Ties break
    in the fixed order bottom, left, right, top.
    """
    if not m.any():
        raise EmptyMaskError("cannot determine entry edge of empty mask")
    candidates = [b for b in BORDERS if b in touches] or list(BORDERS)
    counts = {
        BORDER_BOTTOM: int(m[-1, :].sum()),
        BORDER_LEFT: int(m[:, 0].sum()),
        BORDER_RIGHT: int(m[:, -1].sum()),
        BORDER_TOP: int(m[0, :].sum()),
    }
    return max(candidates, key=lambda b: (counts[b], -BORDERS.index(b)))


def _distance_grid(shape: tuple[int, int], entry: str) -> np.ndarray:
    """Perpendicular scanline distance of every pixel from the entry edge."""
    h, w = shape
    rows = np.arange(h, dtype=np.int64)[:, None]
    cols = np.arange(w, dtype=np.int64)[None, :]
    if entry == BORDER_BOTTOM:
        return np.broadcast_to((h - 1) - rows, shape)
    if entry == BORDER_TOP:
        return np.broadcast_to(rows, shape)
    if entry == BORDER_LEFT:
        return np.broadcast_to(cols, shape)
    if entry == BORDER_RIGHT:
        return np.broadcast_to((w - 1) - cols, shape)
    raise ValueError(f"unknown entry edge {entry!r}")


def ramp_label(m: np.ndarray, entry: str) -> RampImage:
    """Assign round(255 * d / D) to each skin pixel, 0 elsewhere.

    d is the pixel's scanline distance from the entry edge and D the maximum
    d over skin pixels. D == 0 degenerates to every skin pixel valued 255.
    Rounding is half away from zero, computed in exact integer arithmetic.
    """
    if not m.any():
        raise EmptyMaskError("cannot ramp-label empty mask")
    d = _distance_grid(m.shape, entry)
    extent = int(d[m].max())
    values = np.zeros(m.shape, dtype=np.uint8)
    if extent == 0:
        values[m] = 255
    else:
        scaled = (2 * 255 * d + extent) // (2 * extent)
        values[m] = scaled[m].astype(np.uint8)
    return RampImage(values=values, mask=m, entry=entry, extent=extent)


def detect_tips(r: RampImage) -> list[Cluster]:
    """8-connected clusters of skin pixels whose ramp value is exactly 255."""
    tip_mask = (r.values == 255) & r.mask
    labels, n = ndimage.label(tip_mask, structure=EIGHT_CONNECTED)
    ys, xs = np.nonzero(tip_mask)
    grouped: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for x, y, lab in zip(xs.tolist(), ys.tolist(), labels[ys, xs].tolist()):
        grouped[lab - 1].append((x, y))
    return [tuple(c) for c in grouped]


def _centroid(cluster: Cluster) -> tuple[Fraction, Fraction]:
    n = len(cluster)
    return (
        Fraction(sum(p[0] for p in cluster), n),
        Fraction(sum(p[1] for p in cluster), n),
    )


def _round_fraction(q: Fraction) -> int:
    # half away from zero; q is never negative here
    return int((2 * q.numerator + q.denominator) // (2 * q.denominator))


def select_finger(clusters: list[Cluster]) -> Cluster:
    """Leftmost cluster by exact centroid x, then smallest centroid y."""
    if not clusters:
        raise ValueError("no tip clusters to select from")
    return min(clusters, key=_centroid)


def cluster_tip_point(cluster: Cluster) -> tuple[int, int]:
    """Rounded centroid of a tip cluster."""
    cx, cy = _centroid(cluster)
    return _round_fraction(cx), _round_fraction(cy)


def tip_band(
    tip: tuple[int, int], halfwidth: int, bounds: tuple[int, int]
) -> Cluster:
    """All pixels within Euclidean distance halfwidth of tip, clipped to bounds (w, h)."""
    w, h = bounds
    tx, ty = tip
    r2 = halfwidth * halfwidth
    pixels = []
    for dy in range(-halfwidth, halfwidth + 1):
        y = ty + dy
        if y < 0 or y >= h:
            continue
        for dx in range(-halfwidth, halfwidth + 1):
            x = tx + dx
            if x < 0 or x >= w:
                continue
            if dx * dx + dy * dy <= r2:
                pixels.append((x, y))
    pixels.sort(key=lambda p: (p[1], p[0]))
    return tuple(pixels)


def _run_width(m: np.ndarray, entry: str, lateral: int, depth_coord: int) -> int:
    """Length of the contiguous set-pixel run through (lateral, depth) on one scanline."""
    h, w = m.shape
    if entry in (BORDER_BOTTOM, BORDER_TOP):
        if not (0 <= depth_coord < h) or not (0 <= lateral < w):
            return 0
        line = m[depth_coord, :]
        pos = lateral
    else:
        if not (0 <= depth_coord < w) or not (0 <= lateral < h):
            return 0
        line = m[:, depth_coord]
        pos = lateral
    if not line[pos]:
        return 0
    lo = pos
    while lo > 0 and line[lo - 1]:
        lo -= 1
    hi = pos
    while hi < len(line) - 1 and line[hi + 1]:
        hi += 1
    return hi - lo + 1


# Believable finger run-widths in pixels; 60 and up reads as palm, fist or face.
_MIN_RUN = 3
_MAX_RUN = 60


def template_check(m: np.ndarray, cluster: Cluster, entry: str, halfwidth: int = 5) -> bool:
    """Geometric plausibility probe of the chosen finger.

    Measures the skin run-width perpendicular to the entry axis at depths
    2*halfwidth and 4*halfwidth below the tip (toward the wrist). Accepts iff
    both runs look finger-like (>= 3 px, < 60 px) and the deeper run is at
    most triple the shallower one. Probes falling outside the mask return
    True: too little evidence to reject.
    """
    h, w = m.shape
    tx, ty = cluster_tip_point(cluster)
    if entry == BORDER_BOTTOM:
        probe = lambda depth: (tx, ty + depth)
        limit = h
    elif entry == BORDER_TOP:
        probe = lambda depth: (tx, ty - depth)
        limit = h
    elif entry == BORDER_LEFT:
        probe = lambda depth: (ty, tx - depth)
        limit = w
    else:
        probe = lambda depth: (ty, tx + depth)
        limit = w

    widths = []
    for depth in (2 * halfwidth, 4 * halfwidth):
        lateral, coord = probe(depth)
        if coord < 0 or coord >= limit:
            return True  # cannot probe this deep
        widths.append(_run_width(m, entry, lateral, coord))
    w2, w4 = widths
    if not (_MIN_RUN <= w2 < _MAX_RUN and _MIN_RUN <= w4 < _MAX_RUN):
        return False
    return w4 <= 3 * w2
