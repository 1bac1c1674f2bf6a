"""Pipeline configuration: one versioned record for every threshold and knob.

The JSON file mirrors the dataclass field for field; unknown keys are
rejected so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .imaging import SkinThresholds
from .stroke import ScreenMap

CONFIG_VERSION = 1

# Fraction of frame pixels a blob must cover to count as the hand.
MIN_AREA_FRACTION = 0.005

DEFAULT_MARGIN = 4
DEFAULT_TIP_HALFWIDTH = 5
DEFAULT_END_AFTER_MISSING = 5


@dataclass(frozen=True)
class PipelineConfig:
    thresholds: SkinThresholds
    min_area: int
    margin: int
    screen: ScreenMap
    tip_halfwidth: int = DEFAULT_TIP_HALFWIDTH
    template_check_enabled: bool = False
    end_after_missing: int = DEFAULT_END_AFTER_MISSING
    version: int = CONFIG_VERSION

    def __post_init__(self) -> None:
        if self.version != CONFIG_VERSION:
            raise ConfigError(f"unrecognized config version {self.version}")
        if self.tip_halfwidth < 0:
            raise ConfigError("tip_halfwidth must be >= 0")
        if self.end_after_missing < 1:
            raise ConfigError("end_after_missing must be >= 1")
        if self.min_area < 0 or self.margin < 0:
            raise ConfigError("min_area and margin must be >= 0")

    @property
    def thickness(self) -> int:
        return 2 * self.tip_halfwidth + 1


def default_config(
    frame_w: int = 640,
    frame_h: int = 480,
    screen_w: int = 1920,
    screen_h: int = 1080,
    mirror_x: bool = True,
) -> PipelineConfig:
    """Defaults for a given frame size; min_area scales with the frame area."""
    return PipelineConfig(
        thresholds=SkinThresholds(),
        min_area=int(frame_w * frame_h * MIN_AREA_FRACTION),
        margin=DEFAULT_MARGIN,
        screen=ScreenMap(
            frame_w=frame_w,
            frame_h=frame_h,
            screen_w=screen_w,
            screen_h=screen_h,
            mirror_x=mirror_x,
        ),
    )


def config_to_dict(cfg: PipelineConfig) -> dict:
    t, s = cfg.thresholds, cfg.screen
    return {
        "version": cfg.version,
        "thresholds": {
            "cb_min": t.cb_min,
            "cb_max": t.cb_max,
            "cr_min": t.cr_min,
            "cr_max": t.cr_max,
            "y_min": t.y_min,
        },
        "min_area": cfg.min_area,
        "margin": cfg.margin,
        "tip_halfwidth": cfg.tip_halfwidth,
        "template_check_enabled": cfg.template_check_enabled,
        "end_after_missing": cfg.end_after_missing,
        "screen": {
            "frame_w": s.frame_w,
            "frame_h": s.frame_h,
            "screen_w": s.screen_w,
            "screen_h": s.screen_h,
            "mirror_x": s.mirror_x,
        },
    }


_TOP_KEYS = {
    "version",
    "thresholds",
    "min_area",
    "margin",
    "tip_halfwidth",
    "template_check_enabled",
    "end_after_missing",
    "screen",
}
_THRESHOLD_KEYS = {"cb_min", "cb_max", "cr_min", "cr_max", "y_min"}
_SCREEN_KEYS = {"frame_w", "frame_h", "screen_w", "screen_h", "mirror_x"}


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")
    missing = allowed - set(obj)
    if missing:
        raise ConfigError(f"missing {where} keys: {sorted(missing)}")


def config_from_dict(d: dict) -> PipelineConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(d, _TOP_KEYS, "config")
    _check_keys(d["thresholds"], _THRESHOLD_KEYS, "thresholds")
    _check_keys(d["screen"], _SCREEN_KEYS, "screen")
    try:
        thresholds = SkinThresholds(**{k: int(d["thresholds"][k]) for k in _THRESHOLD_KEYS})
        screen = ScreenMap(
            frame_w=int(d["screen"]["frame_w"]),
            frame_h=int(d["screen"]["frame_h"]),
            screen_w=int(d["screen"]["screen_w"]),
            screen_h=int(d["screen"]["screen_h"]),
            mirror_x=bool(d["screen"]["mirror_x"]),
        )
        return PipelineConfig(
            thresholds=thresholds,
            min_area=int(d["min_area"]),
            margin=int(d["margin"]),
            screen=screen,
            tip_halfwidth=int(d["tip_halfwidth"]),
            template_check_enabled=bool(d["template_check_enabled"]),
            end_after_missing=int(d["end_after_missing"]),
            version=int(d["version"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def apply_overrides(cfg: PipelineConfig, overrides: list[str]) -> PipelineConfig:
    """Apply CLI key=value overrides; nested fields use dotted paths.

    Example: --set thresholds.y_min=50 --set screen.mirror_x=false
    """
    d = config_to_dict(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, _, raw = item.partition("=")
        parts = key.strip().split(".")
        target = d
        for part in parts[:-1]:
            if part not in target or not isinstance(target[part], dict):
                raise ConfigError(f"unknown config key {key!r}")
            target = target[part]
        leaf = parts[-1]
        if leaf not in target:
            raise ConfigError(f"unknown config key {key!r}")
        target[leaf] = _parse_value(raw.strip())
    return config_from_dict(d)


def _parse_value(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"cannot parse override value {raw!r}") from exc
