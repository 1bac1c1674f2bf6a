import json

import pytest

from fingerpaint.config import (
    PipelineConfig,
    apply_overrides,
    config_from_dict,
    config_to_dict,
    default_config,
    load_config,
)
from fingerpaint.errors import ConfigError


def test_defaults():
    cfg = default_config()
    assert cfg.thresholds.cb_min == 77 and cfg.thresholds.cb_max == 127
    assert cfg.thresholds.cr_min == 133 and cfg.thresholds.cr_max == 173
    assert cfg.thresholds.y_min == 40
    assert cfg.min_area == int(640 * 480 * 0.005)
    assert cfg.margin == 4
    assert cfg.tip_halfwidth == 5
    assert cfg.thickness == 11
    assert cfg.end_after_missing == 5
    assert cfg.template_check_enabled is False
    assert cfg.screen.mirror_x is True


def test_min_area_scales_with_frame():
    cfg = default_config(320, 240)
    assert cfg.min_area == int(320 * 240 * 0.005)


def test_dict_round_trip():
    cfg = default_config(320, 240, mirror_x=False)
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_unknown_top_level_key_rejected():
    d = config_to_dict(default_config())
    d["bogus"] = 1
    with pytest.raises(ConfigError, match="bogus"):
        config_from_dict(d)


def test_unknown_nested_key_rejected():
    d = config_to_dict(default_config())
    d["thresholds"]["gamma"] = 2
    with pytest.raises(ConfigError, match="gamma"):
        config_from_dict(d)


def test_missing_key_rejected():
    d = config_to_dict(default_config())
    del d["margin"]
    with pytest.raises(ConfigError, match="margin"):
        config_from_dict(d)


def test_unrecognized_version_rejected():
    d = config_to_dict(default_config())
    d["version"] = 99
    with pytest.raises(ConfigError, match="version"):
        config_from_dict(d)


def test_validation_bounds():
    with pytest.raises(ConfigError):
        PipelineConfig(
            thresholds=default_config().thresholds,
            min_area=100,
            margin=4,
            screen=default_config().screen,
            end_after_missing=0,
        )
    with pytest.raises(ConfigError):
        PipelineConfig(
            thresholds=default_config().thresholds,
            min_area=100,
            margin=4,
            screen=default_config().screen,
            tip_halfwidth=-1,
        )


def test_load_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(default_config(320, 240))))
    assert load_config(str(path)) == default_config(320, 240)


def test_load_config_rejects_bad_json(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{nope")
    with pytest.raises(ConfigError):
        load_config(str(path))


def test_overrides():
    cfg = default_config()
    out = apply_overrides(
        cfg, ["thresholds.y_min=50", "screen.mirror_x=false", "tip_halfwidth=3"]
    )
    assert out.thresholds.y_min == 50
    assert out.screen.mirror_x is False
    assert out.tip_halfwidth == 3
    # untouched fields survive
    assert out.min_area == cfg.min_area


def test_override_unknown_key():
    with pytest.raises(ConfigError, match="unknown config key"):
        apply_overrides(default_config(), ["nope=1"])
    with pytest.raises(ConfigError, match="unknown config key"):
        apply_overrides(default_config(), ["thresholds.nope=1"])


def test_override_bad_syntax():
    with pytest.raises(ConfigError):
        apply_overrides(default_config(), ["margin"])
    with pytest.raises(ConfigError):
        apply_overrides(default_config(), ["margin=abc"])
