"""Camera-based finger drawing: segmentation, tip tracking, strokes, and serving."""

from .bench import BenchReport, run_benchmark
from .config import PipelineConfig, default_config, load_config
from .errors import (
    ConfigError,
    EmptyMaskError,
    FingerpaintError,
    HandSpecError,
    InvalidFrameError,
    OutOfFrameError,
    UnsupportedFormatError,
)
from .fingertip import RampImage, TipDetection, detect_tips, entry_edge, ramp_label
from .fingertip import select_finger, template_check, tip_band
from .imaging import BlobInfo, FrameRgb, SkinThresholds, YcbcrPixel
from .imaging import clean_mask, crop_to_blob, largest_component, rgb_to_ycbcr, skin_mask
from .oracle import oracle_tip
from .pipeline import FrameResult, RunMetrics, process_frame, run_sequence
from .stroke import ScreenMap, Session, SessionTracker, StrokePoint, StrokeRaster
from .stroke import advance, export_stroke, map_to_screen, render_stroke
from .synth import HandSpec, SceneSpec, gen_frame

__version__ = "0.1.0"
