"""Brute-force reference fingertip finder.

Written deliberately from scratch with plain Python loops. It must not
import from or share helpers with the fast detection path: agreement between
the two is the core correctness check of the benchmark suite.
"""

from __future__ import annotations

from .errors import EmptyMaskError


def oracle_tip(mask, entry: str) -> tuple[int, int]:
    """Leftmost farthest-from-entry skin pixel cluster centroid, the slow way.

    mask is any (h, w) boolean raster indexable as mask[y][x]; entry is one of
    "bottom", "left", "right", "top".
    """
    h = len(mask)
    w = len(mask[0])
    skin = [(x, y) for y in range(h) for x in range(w) if mask[y][x]]
    if not skin:
        raise EmptyMaskError("oracle requires a non-empty mask")

    if entry == "bottom":
        dist = lambda x, y: (h - 1) - y
    elif entry == "top":
        dist = lambda x, y: y
    elif entry == "left":
        dist = lambda x, y: x
    elif entry == "right":
        dist = lambda x, y: (w - 1) - x
    else:
        raise ValueError(f"unknown entry edge {entry!r}")

    dmax = max(dist(x, y) for x, y in skin)
    tips = {(x, y) for x, y in skin if dist(x, y) == dmax}

    # group tip pixels into 8-connected clusters by flood fill
    clusters = []
    remaining = set(tips)
    while remaining:
        seed = remaining.pop()
        stack = [seed]
        cluster = {seed}
        while stack:
            cx, cy = stack.pop()
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    q = (cx + dx, cy + dy)
                    if q in remaining:
                        remaining.remove(q)
                        cluster.add(q)
                        stack.append(q)
        clusters.append(sorted(cluster))

    # leftmost centroid wins; compare exact rationals by cross-multiplication
    def less(a, b) -> bool:
        ax = sum(p[0] for p in a) * len(b)
        bx = sum(p[0] for p in b) * len(a)
        if ax != bx:
            return ax < bx
        ay = sum(p[1] for p in a) * len(b)
        by = sum(p[1] for p in b) * len(a)
        return ay < by

    best = clusters[0]
    for c in clusters[1:]:
        if less(c, best):
            best = c

    n = len(best)
    sx = sum(p[0] for p in best)
    sy = sum(p[1] for p in best)
    # round half away from zero (coordinates are non-negative)
    return (2 * sx + n) // (2 * n), (2 * sy + n) // (2 * n)
