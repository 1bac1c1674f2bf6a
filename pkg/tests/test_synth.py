import numpy as np
import pytest
from scipy import ndimage

from fingerpaint import synth
from fingerpaint.bench import run_benchmark, sample_hand, score_hit
from fingerpaint.config import default_config
from fingerpaint.errors import HandSpecError
from fingerpaint.fingertip import cluster_tip_point, detect_tips, ramp_label, select_finger
from fingerpaint.imaging import SkinThresholds, skin_mask
from fingerpaint.oracle import oracle_tip
from fingerpaint.synth import (
    ComplexBackground,
    HandSpec,
    PlainBackground,
    SceneSpec,
    gen_frame,
)

PLAIN = SceneSpec(background=PlainBackground(), frame_w=320, frame_h=240, seed=5)


def bottom_hand(**kw):
    defaults = dict(entry="bottom", palm=(120, 90), finger=(11, 80, 40))
    defaults.update(kw)
    return HandSpec(**defaults)


class TestGenFrame:
    def test_deterministic(self):
        f1, t1 = gen_frame(bottom_hand(chroma_jitter_sigma=2.0), PLAIN)
        f2, t2 = gen_frame(bottom_hand(chroma_jitter_sigma=2.0), PLAIN)
        assert np.array_equal(f1.pixels, f2.pixels)
        assert t1 == t2

    def test_zero_jitter_mask_equals_silhouette(self):
        frame, truth = gen_frame(bottom_hand(), PLAIN)
        m = skin_mask(frame, SkinThresholds())
        silhouette = (frame.pixels != 255).any(axis=2)  # background is pure white
        assert np.array_equal(m, silhouette)
        # tip truth sits on the silhouette's farthest row
        ys = np.nonzero(silhouette)[0]
        assert truth.tip[1] == ys.min()

    def test_tip_truth_is_far_end_midpoint(self):
        frame, truth = gen_frame(bottom_hand(finger=(11, 80, 40)), PLAIN)
        # palm centered at (320-120)//2 = 100; finger x0 = 140; midpoint 140+5
        assert truth.tip == (145, 240 - 90 - 80)

    def test_rejects_short_finger(self):
        with pytest.raises(HandSpecError):
            gen_frame(bottom_hand(finger=(11, 20, 0)), PLAIN)

    def test_rejects_hand_too_tall(self):
        with pytest.raises(HandSpecError):
            gen_frame(bottom_hand(palm=(120, 200), finger=(11, 80, 40)), PLAIN)

    def test_rejects_offset_outside_palm(self):
        with pytest.raises(HandSpecError):
            gen_frame(bottom_hand(finger=(11, 80, 115)), PLAIN)

    def test_hand_touches_entry_border(self):
        for entry in ("bottom", "left", "right", "top"):
            frame, _ = gen_frame(bottom_hand(entry=entry), SceneSpec(
                background=PlainBackground(), frame_w=240, frame_h=240, seed=1
            ))
            m = skin_mask(frame, SkinThresholds())
            line = {
                "bottom": m[-1, :],
                "top": m[0, :],
                "left": m[:, 0],
                "right": m[:, -1],
            }[entry]
            assert line.any()

    def test_rotation_family_ground_truths(self):
        scene = SceneSpec(background=PlainBackground(), frame_w=240, frame_h=240, seed=9)
        truths = {}
        for entry in ("bottom", "right", "top", "left"):
            _, truth = gen_frame(bottom_hand(entry=entry), scene)
            truths[entry] = truth.tip

        def rot(p):  # one CCW quarter turn in a 240x240 frame
            x, y = p
            return y, 239 - x

        assert truths["right"] == rot(truths["bottom"])
        assert truths["top"] == rot(truths["right"])
        assert truths["left"] == rot(truths["top"])

    def test_brightness_09_keeps_mask_coverage(self):
        frame, _ = gen_frame(bottom_hand(brightness_scale=0.9), PLAIN)
        bright, _ = gen_frame(bottom_hand(), PLAIN)
        silhouette = (bright.pixels != 255).any(axis=2)
        m = skin_mask(frame, SkinThresholds())
        assert m[silhouette].mean() >= 0.99

    def test_complex_scene_distractors_stay_small(self):
        cfg = default_config(640, 480)
        scene = SceneSpec(
            background=ComplexBackground(seed=11, n_distractors=12),
            frame_w=640,
            frame_h=480,
            seed=11,
        )
        frame, truth = gen_frame(bottom_hand(palm=(140, 100), finger=(13, 90, 60)), scene,
                                 min_area=cfg.min_area)
        m = skin_mask(frame, SkinThresholds())
        labels, n = ndimage.label(m, structure=np.ones((3, 3), dtype=bool))
        areas = sorted(np.bincount(labels.ravel())[1:], reverse=True)
        assert areas[0] > cfg.min_area  # the hand
        for a in areas[1:]:
            assert a < cfg.min_area  # every skin-colored distractor


class TestSweepFrames:
    def test_timestamps_at_capture_rate(self):
        frames = synth.sweep_frames(bottom_hand(), PLAIN, 5, fps=12.0)
        assert [f.timestamp_ms for f, _ in frames] == [0, 83, 167, 250, 333]

    def test_tip_moves_laterally(self):
        frames = synth.sweep_frames(bottom_hand(), PLAIN, 10)
        xs = [t.tip[0] for _, t in frames]
        assert xs == sorted(xs)
        assert xs[0] != xs[-1]


class TestOracle:
    def test_vertical_bar(self):
        m = np.zeros((11, 1), dtype=bool)
        m[:, 0] = True
        assert oracle_tip(m, "bottom") == (0, 0)

    def test_leftmost_of_equal_fingers(self):
        m = np.zeros((50, 60), dtype=bool)
        m[46:, :] = True
        m[10:, 5:8] = True
        m[10:, 40:43] = True
        assert oracle_tip(m, "bottom") == (6, 10)

    def test_agrees_with_fast_path_on_random_masks(self):
        rng = np.random.default_rng(37)
        checked = 0
        for _ in range(300):
            h, w = int(rng.integers(4, 40)), int(rng.integers(4, 40))
            m = rng.random((h, w)) < float(rng.uniform(0.05, 0.6))
            if not m.any():
                continue
            entry = ("bottom", "left", "right", "top")[int(rng.integers(0, 4))]
            fast = cluster_tip_point(select_finger(detect_tips(ramp_label(m, entry))))
            assert fast == oracle_tip(m, entry)
            checked += 1
        assert checked >= 250


class TestBenchmark:
    def test_single_frame_report(self):
        rep = run_benchmark("plain", 1, seed=3)
        assert rep.n_frames == 1
        assert rep.hit_rate in (0.0, 1.0)

    def test_unknown_regime(self):
        with pytest.raises(ValueError):
            run_benchmark("martian", 5)

    def test_report_serialization_deterministic(self):
        a = run_benchmark("plain", 5, seed=2).to_canonical_json()
        b = run_benchmark("plain", 5, seed=2).to_canonical_json()
        assert a == b
        assert b"hit_rate" in a

    def test_canonical_bytes_format(self):
        rep = run_benchmark("plain", 4, seed=8)
        obj = __import__("json").loads(rep.to_canonical_json())
        assert list(obj.keys()) == [
            "regime", "n_frames", "tolerance_px", "seed", "hits", "hit_rate", "mean_crop_factor",
        ]
        assert isinstance(obj["hit_rate"], str) and len(obj["hit_rate"].split(".")[1]) == 4

    def test_score_hit_boundary(self):
        truth = synth.GroundTruth(tip=(10, 10), entry="bottom")
        assert score_hit((13, 14), truth, 5)  # distance 5 exactly
        assert not score_hit((13, 15), truth, 5)
        assert not score_hit(None, truth, 5)

    def test_sampled_hands_are_valid(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            hand = sample_hand(rng)
            fw, fl, off = hand.finger
            assert fw % 2 == 1
            assert fl >= 2 * fw
            assert 0 <= off <= hand.palm[0] - fw
            assert synth.in_skin_box(hand.skin_color)
