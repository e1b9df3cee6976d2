"""Batch command-line entry point.

Subcommands: render, label, metrics, export-camera, validate, synth, serve.
Exit codes: 0 success, 1 validation failure, 2 usage error. Diagnostics go
to stderr; machine output goes to files, or stdout with `--output -`.
Log level comes from the CINEFORGE_LOG environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

logger = logging.getLogger("cineforge")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


def _setup_logging():
    level = os.environ.get("CINEFORGE_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(
        level=levels.get(level, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _write_output(text: str, output: str):
    if output == "-":
        sys.stdout.write(text)
    else:
        from .formats.scene_json import atomic_write_text

        atomic_write_text(output, text)


def _render_settings(args):
    from .render import RenderSettings

    return RenderSettings(width=args.width, height=args.height,
                          near=args.near, far=args.far)


def _add_render_flags(p):
    p.add_argument("--width", type=int, default=None)
    p.add_argument("--height", type=int, default=None)
    p.add_argument("--near", type=float, default=0.05)
    p.add_argument("--far", type=float, default=1000.0)


def cmd_render(args) -> int:
    from .formats.bundle import export_condition_bundle
    from .formats.scene_json import load_scene
    from .scene import validate

    doc = load_scene(args.scene)
    errors = [v for v in validate(doc.scene) if v.severity == "error"]
    if errors:
        for v in errors:
            print(f"{args.scene}: {v.code}: {v.message}", file=sys.stderr)
        return EXIT_VALIDATION
    meta = export_condition_bundle(
        doc.scene, args.out, _render_settings(args),
        depth_scale=args.depth_scale, depth_encoding=args.depth_encoding,
    )
    logger.info("wrote bundle with %d frames to %s", meta["frame_count"], args.out)
    return EXIT_OK


def cmd_label(args) -> int:
    from .autolabel import label_clip
    from .formats.ingest import ingest_label_inputs
    from .formats.scene_json import save_scene

    obs, tracks, poses, intrinsics, labels = ingest_label_inputs(args.input)
    result = label_clip(obs, tracks, poses, intrinsics, labels, fps=args.fps,
                        mad_threshold=None if args.no_outlier_filter else 3.0)
    save_scene(args.out, result.scene)
    report = {
        "entities": [
            {
                "entity_id": r.entity_id,
                "anchor_frame": r.anchor_frame,
                "fit_method": r.fit.method,
                "fit_volume_m3": r.fit.volume,
                "point_count": r.point_count,
                "missing_frames": r.missing_frames,
            }
            for r in result.entity_reports
        ],
        "dropped": {str(k): v for k, v in result.dropped.items()},
    }
    _write_output(json.dumps(report, indent=2) + "\n", args.report)
    return EXIT_OK


def cmd_metrics(args) -> int:
    from .metrics import evaluate, load_track_eval_jsonl

    ev = load_track_eval_jsonl(args.pairs)
    report = evaluate(ev)
    _write_output(json.dumps(report, indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_export_camera(args) -> int:
    from .formats.camera_txt import format_camera_txt
    from .formats.scene_json import load_scene
    from .scene import export_camera_rt

    doc = load_scene(args.scene)
    _write_output(format_camera_txt(export_camera_rt(doc.scene)), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .formats.bundle import validate_bundle
    from .formats.scene_json import load_scene
    from .scene import validate

    if os.path.isdir(args.target):
        problems = validate_bundle(args.target)
        for p in problems:
            print(f"{args.target}: {p}", file=sys.stderr)
        return EXIT_VALIDATION if problems else EXIT_OK
    doc = load_scene(args.target)
    violations = validate(doc.scene)
    for v in violations:
        print(f"{args.target}: [{v.severity}] {v.code}: {v.message}", file=sys.stderr)
    return EXIT_VALIDATION if any(v.severity == "error" for v in violations) else EXIT_OK


def cmd_synth(args) -> int:
    from .synth import generate_clip, write_clip

    clip = generate_clip(args.seed, frame_count=args.frames,
                         max_entities=args.max_entities)
    write_clip(clip, args.out, depth_encoding=args.depth_encoding)
    logger.info("wrote synthetic clip (%d entities, %d frames) to %s",
                len(clip.labels), clip.scene.frame_count, args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    host, _, port = args.listen.rpartition(":")
    app = create_app(args.data_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cineforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="scene.json -> condition bundle")
    p.add_argument("--scene", required=True)
    p.add_argument("--out", required=True)
    _add_render_flags(p)
    p.add_argument("--depth-scale", type=float, default=0.001)
    p.add_argument("--depth-encoding", choices=["png16", "pfm"], default="png16")
    p.add_argument("--jobs", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("label", help="ingest dir -> scene.json + report")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default="-")
    p.add_argument("--fps", type=float, default=15.0)
    p.add_argument("--no-outlier-filter", action="store_true")
    p.add_argument("--jobs", type=int, default=os.cpu_count())
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("metrics", help="eval JSONL -> report JSON")
    p.add_argument("--pairs", required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-camera", help="scene.json -> camera.txt")
    p.add_argument("--scene", required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_export_camera)

    p = sub.add_parser("validate", help="scene.json or bundle dir -> violations")
    p.add_argument("target")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="seed -> synthetic scene + ingest dir")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--max-entities", type=int, default=3)
    p.add_argument("--depth-encoding", choices=["png16", "pfm"], default="pfm")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.add_argument("--data-dir", default="./scenes")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
