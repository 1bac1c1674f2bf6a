"""Command line front end: batch processing, benchmarking, and the live service.

Exit codes: 0 success, 2 invalid configuration, 3 invalid input frame.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import frameio, stroke
from .bench import run_benchmark
from .config import apply_overrides, default_config, load_config
from .errors import ConfigError, InvalidFrameError
from .pipeline import run_sequence

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FRAME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fingerpaint")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="run the pipeline over a directory of image frames")
    p.add_argument("--input", required=True, help="directory of PNG/PPM frames, lexicographic order")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--out", required=True, help="stroke JSON output path")
    p.add_argument("--svg", help="write the last stroke as SVG")
    p.add_argument("--png", help="write the last stroke as PNG")
    p.add_argument("--overlay-dir", help="write per-frame overlays with the red tip band")
    p.add_argument("--metrics", help="write run metrics JSON")
    p.add_argument("--fps", type=float, default=12.0, help="synthesized capture rate (default 12)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")

    b = sub.add_parser("bench", help="synthetic accuracy/latency benchmark")
    b.add_argument("--regime", choices=["plain", "complex"], required=True)
    b.add_argument("--frames", type=int, required=True)
    b.add_argument("--tolerance", type=int, default=5)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--report", help="write the canonical report JSON here")
    b.add_argument("--timings", help="write wall-clock latency stats here (not deterministic)")
    b.add_argument("--frame-size", default="640x480", help="generated frame size WxH")
    b.add_argument("--config", help="pipeline config JSON (default derived from frame size)")
    b.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")

    s = sub.add_parser("serve", help="run the live drawing service")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--config", help="pipeline config JSON")
    s.add_argument("--retain", type=int, default=64, help="finished sessions kept for export")
    s.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
    return parser


def _load_cfg(path: str | None, overrides: list[str], fallback=None):
    if path is not None:
        cfg = load_config(path)
    elif fallback is not None:
        cfg = fallback
    else:
        cfg = default_config()
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def _cmd_process(args: argparse.Namespace) -> int:
    cfg = _load_cfg(args.config, args.overrides)
    frames = frameio.load_frame_dir(args.input, fps=args.fps)
    outcome = run_sequence(frames, cfg)

    sessions = outcome.sessions
    if len(sessions) == 1:
        payload = stroke.export_stroke(sessions[0], "json")
    else:
        payload = b"[" + b",".join(stroke.export_stroke(s, "json") for s in sessions) + b"]"
    with open(args.out, "wb") as fh:
        fh.write(payload)

    if sessions:
        last = sessions[-1]
        if args.svg:
            with open(args.svg, "wb") as fh:
                fh.write(stroke.export_stroke(last, "svg"))
        if args.png:
            with open(args.png, "wb") as fh:
                fh.write(stroke.export_stroke(last, "png"))
    elif args.svg or args.png:
        print("no completed sessions; skipping svg/png export", file=sys.stderr)

    if args.overlay_dir:
        os.makedirs(args.overlay_dir, exist_ok=True)
        for frame, result in zip(frames, outcome.results):
            rgb = frame.pixels.copy()
            if result.detection is not None:
                for x, y in result.detection.band:
                    rgb[y, x] = stroke.MARK_COLOR
            frameio.save_png(os.path.join(args.overlay_dir, f"{result.frame_index:05d}.png"), rgb)

    if args.metrics:
        with open(args.metrics, "w", encoding="utf-8") as fh:
            json.dump(outcome.metrics.to_dict(), fh, indent=2)
            fh.write("\n")

    m = outcome.metrics
    print(
        f"frames={m.frames_total} detections={m.frames_with_detection} "
        f"sessions={len(sessions)} mean_ms={m.mean_frame_ms:.2f}"
    )
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    try:
        fw, fh = (int(v) for v in args.frame_size.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad --frame-size {args.frame_size!r}, expected WxH")
    cfg = _load_cfg(args.config, args.overrides, fallback=default_config(fw, fh, mirror_x=False))
    report = run_benchmark(
        args.regime,
        args.frames,
        tolerance_px=args.tolerance,
        seed=args.seed,
        cfg=cfg,
    )
    if args.report:
        with open(args.report, "wb") as fh:
            fh.write(report.to_canonical_json())
    if args.timings:
        with open(args.timings, "w", encoding="utf-8") as fh:
            json.dump(report.latency, fh, indent=2)
            fh.write("\n")
    print(
        f"regime={report.regime} frames={report.n_frames} hit_rate={report.hit_rate:.4f} "
        f"mean_crop_factor={report.mean_crop_factor:.2f}"
    )
    print(
        f"latency: mean={report.latency['mean_frame_ms']:.2f}ms "
        f"p95={report.latency['p95_frame_ms']:.2f}ms",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_cfg(args.config, args.overrides, fallback=default_config(frame_w=320, frame_h=240))
    app = create_app(cfg, retain=args.retain)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "process":
            return _cmd_process(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_serve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvalidFrameError as exc:
        print(f"frame error: {exc}", file=sys.stderr)
        return EXIT_FRAME


if __name__ == "__main__":
    sys.exit(main())
