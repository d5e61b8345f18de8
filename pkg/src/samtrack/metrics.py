"""DAVIS-style evaluation: region similarity J, boundary measure F, reader.

A set pixel is a boundary pixel iff any 4-neighbor is unset or out of frame.
Boundary precision/recall use a Euclidean pixel tolerance realized by disc
dilation; the default tolerance is ceil(0.8% of the image diagonal). Frame 0
is excluded from scoring by default (it is the supplied annotation).
"""
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels, pngio
from .errors import (
    DimensionMismatch,
    EmptySequence,
    LengthMismatch,
    MissingFrame,
)


def default_tolerance(height, width):
    return math.ceil(0.008 * math.sqrt(height * height + width * width))


def jaccard(pred, gt):
    """Intersection over union; two empty masks count as a perfect 1.0."""
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"shape {pred.shape} vs {gt.shape}")
    union = np.count_nonzero(pred | gt)
    if union == 0:
        return 1.0
    return np.count_nonzero(pred & gt) / union


def boundary_pixels(mask):
    """Set pixels with any 4-neighbor unset or outside the frame."""
    m = np.asarray(mask, dtype=bool)
    inner = np.zeros_like(m)
    inner[1:-1, 1:-1] = (
        m[1:-1, 1:-1]
        & m[:-2, 1:-1]
        & m[2:, 1:-1]
        & m[1:-1, :-2]
        & m[1:-1, 2:]
    )
    return m & ~inner


def boundary_f(pred, gt, tol):
    """Boundary F-measure with Euclidean pixel tolerance `tol`."""
    pred = np.asarray(pred, dtype=bool)
    gt = np.asarray(gt, dtype=bool)
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"shape {pred.shape} vs {gt.shape}")
    if tol < 0:
        raise ValueError(f"negative tolerance {tol}")
    p_any, g_any = pred.any(), gt.any()
    if not p_any and not g_any:
        return 1.0
    if p_any != g_any:
        return 0.0
    pb = boundary_pixels(pred)
    gb = boundary_pixels(gt)
    gb_zone = kernels.dilate_disc(np.ascontiguousarray(gb).astype(np.uint8), int(tol)).astype(bool)
    pb_zone = kernels.dilate_disc(np.ascontiguousarray(pb).astype(np.uint8), int(tol)).astype(bool)
    precision = np.count_nonzero(pb & gb_zone) / np.count_nonzero(pb)
    recall = np.count_nonzero(gb & pb_zone) / np.count_nonzero(gb)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


@dataclass
class GroundTruthSequence:
    name: str
    labelmaps: list
    object_ids: list = field(default_factory=list)

    def __post_init__(self):
        if not self.labelmaps:
            raise EmptySequence(f"sequence {self.name} has no frames")
        shape = self.labelmaps[0].shape
        for i, lm in enumerate(self.labelmaps):
            if lm.shape != shape:
                raise DimensionMismatch(f"frame {i} has shape {lm.shape}, expected {shape}")
        if not self.object_ids:
            ids = set()
            for lm in self.labelmaps:
                ids.update(int(v) for v in np.unique(lm) if v != 0)
            self.object_ids = sorted(ids)

    def __len__(self):
        return len(self.labelmaps)


@dataclass
class EvalReport:
    sequence: str
    tolerance: int
    frames_scored: list
    per_object: dict  # id -> {"j": [...], "f": [...], "j_mean": .., "f_mean": ..}
    mean_j: float
    mean_f: float
    avg: float

    def to_dict(self):
        return {
            "sequence": self.sequence,
            "tolerance": self.tolerance,
            "frames_scored": self.frames_scored,
            "per_object": self.per_object,
            "mean_j": self.mean_j,
            "mean_f": self.mean_f,
            "avg": self.avg,
        }


def evaluate(preds, gt, tol=None, exclude_first=True):
    """Score predicted label maps against a ground-truth sequence.

    Means are unweighted: per object over scored frames, then over objects.
    A gt object missing from a prediction scores against an empty mask.
    """
    if len(preds) != len(gt):
        raise LengthMismatch(f"{len(preds)} predictions vs {len(gt)} gt frames")
    shape = gt.labelmaps[0].shape
    for i, p in enumerate(preds):
        if np.asarray(p).shape != shape:
            raise DimensionMismatch(f"prediction {i} has shape {np.asarray(p).shape}")
    if tol is None:
        tol = default_tolerance(*shape)
    start = 1 if exclude_first else 0
    frames = list(range(start, len(gt)))
    per_object = {}
    j_means, f_means = [], []
    for oid in gt.object_ids:
        js, fs = [], []
        for t in frames:
            gm = gt.labelmaps[t] == oid
            pm = np.asarray(preds[t]) == oid
            js.append(jaccard(pm, gm))
            fs.append(boundary_f(pm, gm, tol))
        j_mean = sum(js) / len(js) if js else 0.0
        f_mean = sum(fs) / len(fs) if fs else 0.0
        per_object[oid] = {"j": js, "f": fs, "j_mean": j_mean, "f_mean": f_mean}
        j_means.append(j_mean)
        f_means.append(f_mean)
    mean_j = sum(j_means) / len(j_means) if j_means else 0.0
    mean_f = sum(f_means) / len(f_means) if f_means else 0.0
    return EvalReport(
        sequence=gt.name,
        tolerance=int(tol),
        frames_scored=frames,
        per_object=per_object,
        mean_j=mean_j,
        mean_f=mean_f,
        avg=(mean_j + mean_f) / 2.0,
    )


def aggregate_reports(reports):
    """Unweighted mean over sequences: Avg / J / F summary rows."""
    if not reports:
        return {"sequences": 0, "mean_j": 0.0, "mean_f": 0.0, "avg": 0.0}
    mean_j = sum(r.mean_j for r in reports) / len(reports)
    mean_f = sum(r.mean_f for r in reports) / len(reports)
    return {
        "sequences": len(reports),
        "mean_j": mean_j,
        "mean_f": mean_f,
        "avg": (mean_j + mean_f) / 2.0,
    }


def format_table(reports, summary):
    """Aligned plain-text table: one row per sequence plus a global row."""
    rows = [("Sequence", "Avg", "J", "F")]
    for r in reports:
        rows.append((r.sequence, f"{r.avg * 100:.1f}", f"{r.mean_j * 100:.1f}", f"{r.mean_f * 100:.1f}"))
    rows.append(
        (
            "Global",
            f"{summary['avg'] * 100:.1f}",
            f"{summary['mean_j'] * 100:.1f}",
            f"{summary['mean_f'] * 100:.1f}",
        )
    )
    widths = [max(len(row[c]) for row in rows) for c in range(4)]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


_IMAGE_DIRS = (("JPEGImages", "480p"), ("images",), ("frames",))
_ANNOT_DIRS = (("Annotations", "480p"), ("annotations",), ("labels",))
_IMAGE_EXTS = (".jpg", ".jpeg", ".png")


def read_davis(root, sequence):
    """Load a DAVIS-layout sequence: parallel image and annotation folders
    with matching zero-padded names. Returns (frame paths, gt sequence)."""
    root = Path(root)
    img_dir = ann_dir = None
    for parts in _IMAGE_DIRS:
        cand = root.joinpath(*parts, sequence)
        if cand.is_dir():
            img_dir = cand
            break
    for parts in _ANNOT_DIRS:
        cand = root.joinpath(*parts, sequence)
        if cand.is_dir():
            ann_dir = cand
            break
    if img_dir is None or ann_dir is None:
        raise EmptySequence(f"sequence {sequence!r} not found under {root}")
    frames = sorted(p for p in img_dir.iterdir() if p.suffix.lower() in _IMAGE_EXTS)
    annots = sorted(ann_dir.glob("*.png"))
    if not frames or not annots:
        raise EmptySequence(f"sequence {sequence!r} has no frames")
    if len(frames) != len(annots):
        raise MissingFrame(f"{len(frames)} images vs {len(annots)} annotations")
    for f, a in zip(frames, annots):
        if f.stem != a.stem:
            raise MissingFrame(f"image {f.name} has no matching annotation ({a.name})")
    labelmaps = [pngio.load_labelmap(a) for a in annots]
    return frames, GroundTruthSequence(name=sequence, labelmaps=labelmaps)
