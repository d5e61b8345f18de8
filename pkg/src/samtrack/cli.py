"""Command line interface: headless tracking runs, evaluation, scenarios, serving.

Failures exit non-zero with one machine-readable JSON error line on stderr;
an unreachable backend maps to exit code 3 and partial results stay on disk.
"""
import json
import os
import sys
from pathlib import Path

import click

from . import harness as harness_mod
from . import manifest, metrics, wire
from .cmr import CmrConfig
from .errors import BackendUnavailable, SamTrackError, StepFailed
from .factory import resolve_backends
from .pipeline import AUTOMATIC, KEYFRAME_SOURCES, MODES, Session, SessionConfig
from .service import _load_frames_dir, build_app

EXIT_FAILURE = 1
EXIT_BACKEND = 3


def _fail(exc, frame=None):
    code = getattr(exc, "code", "error")
    line = {"code": code, "message": str(exc)}
    if frame is not None:
        line["frame"] = frame
    click.echo("error " + json.dumps(line, sort_keys=True), err=True)
    cause = getattr(exc, "cause", None)
    if isinstance(exc, BackendUnavailable) or isinstance(cause, BackendUnavailable):
        sys.exit(EXIT_BACKEND)
    sys.exit(EXIT_FAILURE)


def _load_prompts(path):
    doc = json.loads(Path(path).read_text())
    items = doc["prompts"] if isinstance(doc, dict) else doc
    return [wire.wire_to_prompt(d) for d in items]


@click.group()
def main():
    """Multi-object video segmentation and tracking."""


@main.command()
@click.option("--video", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of ordered PNG/JPEG frames (optional with an oracle backend).")
@click.option("--prompts", "prompts_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Prompt script (JSON) applied to frame 0.")
@click.option("--mode", type=click.Choice(MODES), default="interactive", show_default=True)
@click.option("--n", "interval", type=int, default=8, show_default=True,
              help="Key-frame interval for automatic/fusion modes.")
@click.option("--t", "threshold", type=float, default=0.8, show_default=True,
              help="New-object admission ratio threshold.")
@click.option("--min-area", type=int, default=None,
              help="Admission area floor in pixels (default: 64 scaled from 480p).")
@click.option("--keyframe-source", type=click.Choice(KEYFRAME_SOURCES),
              default="segment-everything", show_default=True)
@click.option("--text-prompt", "text_prompts", multiple=True,
              help="Phrase for the object-of-interest key-frame path (repeatable).")
@click.option("--backend", required=True,
              help="oracle:SCENARIO | classical | remote:URL (suffix +classical to swap the propagator).")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def track(video, prompts_file, mode, interval, threshold, min_area,
          keyframe_source, text_prompts, backend, out_dir):
    """Run a tracking session headlessly and write the result manifest."""
    from .backends.base import TextPrompt

    try:
        resolved = resolve_backends(backend)
    except (ValueError, FileNotFoundError, SamTrackError) as exc:
        _fail(exc)
    if video is not None:
        frames = _load_frames_dir(video)
    elif resolved.frames is not None:
        frames = resolved.frames
    else:
        _fail(SamTrackError("need --video unless the backend is an oracle scenario"))
    if not frames:
        _fail(SamTrackError(f"no frames found under {video}"))

    h, w = frames[0].pixels.shape[:2]
    cmr_cfg = CmrConfig.for_frame(h, w, t=threshold)
    if min_area is not None:
        cmr_cfg = CmrConfig(t=threshold, min_area=min_area)
    config = SessionConfig(
        mode=mode,
        keyframe_interval=interval,
        keyframe_source=keyframe_source,
        text_prompts=tuple(TextPrompt(phrase=p) for p in text_prompts),
        cmr=cmr_cfg,
        backend=backend,
    )
    session = Session(config, resolved.bundle)
    try:
        if mode != AUTOMATIC:
            if prompts_file is None:
                _fail(SamTrackError(f"{mode} mode needs --prompts"))
            session.set_reference_frame(frames[0])
            for prompt in _load_prompts(prompts_file):
                session.add_prompt(prompt)
            session.commit_reference()
        result = session.run(frames)
    except StepFailed as exc:
        # partial results stay resumable on disk
        for i, lm in enumerate(session.results):
            manifest.write_frame(out_dir, i, lm)
        manifest.write_manifest(
            out_dir, config, session.registry, session.cmr_log, len(session.results),
            status=manifest.STATUS_FAILED,
            error={"code": getattr(exc.cause, "code", "error"),
                   "message": str(exc.cause), "frame": exc.frame_index},
        )
        _fail(exc, frame=exc.frame_index)
    except SamTrackError as exc:
        _fail(exc)
    manifest.write_run(out_dir, config, result)
    click.echo(f"tracked {len(result.results)} frames -> {out_dir}")


@main.command("eval")
@click.option("--pred", "pred_dir", type=click.Path(exists=True, file_okay=False), required=True,
              help="Run directory of PNG label maps (or a parent of per-sequence run dirs).")
@click.option("--gt", "gt_root", type=click.Path(exists=True, file_okay=False), required=True,
              help="Dataset root with parallel image/annotation folders.")
@click.option("--sequence", "sequences", multiple=True, help="Sequence name (repeatable).")
@click.option("--tol", default="auto", show_default=True,
              help="Boundary tolerance in pixels, or 'auto' for 0.8% of the diagonal.")
@click.option("--exclude-first/--include-first", default=True, show_default=True,
              help="Whether frame 0 (the given reference) is excluded from scoring.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Write report.json and report.txt here.")
def eval_cmd(pred_dir, gt_root, sequences, tol, exclude_first, out_dir):
    """Score predictions against ground truth (per-sequence J, F, Avg)."""
    pred_dir = Path(pred_dir)
    tolerance = None if tol == "auto" else int(tol)
    if not sequences:
        sequences = sorted(p.name for p in pred_dir.iterdir() if p.is_dir())
        if not sequences:
            sequences = (pred_dir.name,)
    reports = []
    try:
        for seq in sequences:
            run_dir = pred_dir / seq if (pred_dir / seq).is_dir() else pred_dir
            preds = manifest.read_run_frames(run_dir)
            _frames, gt = metrics.read_davis(gt_root, seq)
            reports.append(metrics.evaluate(preds, gt, tol=tolerance, exclude_first=exclude_first))
    except SamTrackError as exc:
        _fail(exc)
    summary = metrics.aggregate_reports(reports)
    table = metrics.format_table(reports, summary)
    click.echo(table, nl=False)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        doc = {"summary": summary, "sequences": [r.to_dict() for r in reports]}
        (out / "report.json").write_text(wire.canonical_dumps(doc))
        (out / "report.txt").write_text(table)


@main.group()
def harness():
    """Synthetic scenario tools."""


@harness.command("run")
@click.option("--scenario", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mode", type=click.Choice(MODES), default="interactive", show_default=True)
@click.option("--n", "interval", type=int, default=8, show_default=True)
@click.option("--t", "threshold", type=float, default=0.8, show_default=True)
@click.option("--min-area", type=int, default=0, show_default=True)
@click.option("--keyframe-source", type=click.Choice(KEYFRAME_SOURCES),
              default="segment-everything", show_default=True)
@click.option("--text-prompt", "text_prompts", multiple=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the full report as JSON.")
def harness_run(scenario, mode, interval, threshold, min_area, keyframe_source,
                text_prompts, as_json):
    """Verify a pipeline run against a scenario's ground truth."""
    from .backends.base import TextPrompt

    sc = harness_mod.load_scenario(scenario)
    config = SessionConfig(
        mode=mode,
        keyframe_interval=interval,
        keyframe_source=keyframe_source,
        text_prompts=tuple(TextPrompt(phrase=p) for p in text_prompts),
        cmr=CmrConfig(t=threshold, min_area=min_area),
        backend=f"oracle:{scenario}",
    )
    try:
        report = harness_mod.verify_run(sc, config)
    except SamTrackError as exc:
        _fail(exc)
    if as_json:
        click.echo(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    else:
        verdict = "PASS" if report.passed else "FAIL"
        click.echo(f"{verdict} {sc.name}: J={report.mean_j:.4f} F={report.mean_f:.4f}")
        if report.first_divergence:
            click.echo(f"first divergence at frame {report.first_divergence[0]}: "
                       f"{report.first_divergence[1]}")
    sys.exit(0 if report.passed else EXIT_FAILURE)


@main.command()
@click.option("--addr", default=None, help="HOST:PORT (default $SAMTRACK_ADDR or 127.0.0.1:8077).")
@click.option("--data-dir", type=click.Path(file_okay=False), default=None,
              help="Where per-session result directories are written.")
def serve(addr, data_dir):
    """Run the interactive session service."""
    import uvicorn

    addr = addr or os.environ.get("SAMTRACK_ADDR", "127.0.0.1:8077")
    host, _, port = addr.rpartition(":")
    app = build_app(data_dir=data_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")


if __name__ == "__main__":
    main()
