"""Frame file input/output: 8-bit PNG and binary PPM (P6) sequences."""

from __future__ import annotations

import io
import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import InvalidFrameError
from .imaging import FrameRgb

FRAME_EXTENSIONS = (".png", ".ppm")


def load_image(path: str) -> np.ndarray:
    """Read one image file as a uint8 (h, w, 3) RGB array."""
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise InvalidFrameError(f"cannot decode {path}: {exc}") from exc


def load_frame_dir(path: str, fps: float = 12.0) -> list[FrameRgb]:
    """Load every PNG/PPM in a directory, lexicographically ordered.

    Timestamps are synthesized at the given capture rate (frame i at
    round(i * 1000 / fps) ms).
    """
    if fps <= 0:
        raise ValueError("fps must be positive")
    names = sorted(
        n for n in os.listdir(path) if n.lower().endswith(FRAME_EXTENSIONS)
    )
    if not names:
        raise InvalidFrameError(f"no .png or .ppm frames in {path}")
    frames = []
    for i, name in enumerate(names):
        pixels = load_image(os.path.join(path, name))
        frames.append(FrameRgb(pixels=pixels, timestamp_ms=round(i * 1000.0 / fps)))
    return frames


def save_png(path: str, pixels: np.ndarray) -> None:
    Image.fromarray(pixels, mode="RGB").save(path, format="PNG")


def encode_png(pixels: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def decode_image_bytes(data: bytes) -> np.ndarray:
    """Decode an encoded (PNG/JPEG) image payload to uint8 RGB."""
    try:
        with Image.open(io.BytesIO(data)) as img:
            return np.asarray(img.convert("RGB"), dtype=np.uint8)
    except (UnidentifiedImageError, OSError) as exc:
        raise InvalidFrameError(f"cannot decode image payload: {exc}") from exc
