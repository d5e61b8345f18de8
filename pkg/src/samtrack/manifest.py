"""Result manifest: the on-disk layout shared by the CLI and the service.

A run directory holds one indexed PNG label map per frame, named by
zero-padded index, plus manifest.json carrying the config echo, the object
registry dump, and the key-frame admission log. Content is deterministic so
identical runs produce byte-identical directories.
"""
import json
from pathlib import Path

from . import pngio
from .wire import canonical_dumps

MANIFEST_NAME = "manifest.json"
FRAME_NAME = "{:05d}.png"

STATUS_DONE = "done"
STATUS_FAILED = "failed"


def frame_path(out_dir, index):
    return Path(out_dir) / FRAME_NAME.format(index)


def write_frame(out_dir, index, labelmap):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pngio.save_labelmap(frame_path(out_dir, index), labelmap)


def write_manifest(out_dir, config, registry, cmr_log, frame_count,
                   status=STATUS_DONE, error=None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    doc = {
        "config": config.to_dict(),
        "frames": frame_count,
        "status": status,
        "error": error,
        "registry": registry.dump(),
        "cmr_log": cmr_log,
        "palette": "voc",
    }
    (out_dir / MANIFEST_NAME).write_text(canonical_dumps(doc))
    return doc


def write_run(out_dir, config, run_result, status=STATUS_DONE, error=None):
    """Persist a full run: frames then manifest."""
    for i, lm in enumerate(run_result.results):
        write_frame(out_dir, i, lm)
    return write_manifest(
        out_dir,
        config,
        run_result.registry,
        run_result.cmr_log,
        len(run_result.results),
        status=status,
        error=error,
    )


def read_manifest(out_dir):
    return json.loads((Path(out_dir) / MANIFEST_NAME).read_text())


def read_run_frames(out_dir):
    out_dir = Path(out_dir)
    frames = sorted(out_dir.glob("[0-9]" * 5 + ".png"))
    return [pngio.load_labelmap(p) for p in frames]
