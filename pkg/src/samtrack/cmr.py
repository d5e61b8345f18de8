"""New-object admission gate.

At a key frame the tracker output T and a fresh segmentation S are compared:
candidates are S's labels, a candidate's support inside T's background is its
"new" area, and it is admitted only when new_area / seg_area is strictly
greater than the threshold t (and clears a minimum-area floor). Admitted
candidates get fresh IDs and are merged under tracked-pixel precedence, so an
admission can never relabel a pixel the tracker already claims.
"""
from dataclasses import dataclass, field

import numpy as np

from . import maskops
from .errors import LabelSpaceMismatch

DEFAULT_T = 0.8
REF_MIN_AREA = 64
REF_FRAME_AREA = 854 * 480  # 480p reference for min-area scaling


@dataclass(frozen=True)
class CmrConfig:
    t: float = DEFAULT_T
    min_area: int = 0

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"threshold t={self.t} outside [0, 1]")
        if self.min_area < 0:
            raise ValueError(f"min_area={self.min_area} negative")

    @classmethod
    def for_frame(cls, height, width, t=DEFAULT_T, min_area_480p=REF_MIN_AREA):
        """Default config for a frame size: the area floor scales with frame area."""
        scaled = int(round(min_area_480p * (height * width) / REF_FRAME_AREA))
        return cls(t=t, min_area=scaled)


@dataclass
class CmrOutcome:
    new_objects: np.ndarray
    refined_track: np.ndarray
    admitted: list = field(default_factory=list)  # (source label in S, fresh ID)
    rejected: list = field(default_factory=list)  # (source label in S, ratio)

    def to_record(self, frame_index):
        return {
            "frame": frame_index,
            "admitted": [[int(s), int(f)] for s, f in self.admitted],
            "rejected": [[int(s), float(r)] for s, r in self.rejected],
        }


def new_object_mask(track, seg):
    """Fresh-segmentation labels surviving on the tracker's background."""
    return maskops.restrict(seg, maskops.background_of(track))


def candidate_ratios(n_mask, seg):
    """Per-label (new_area, seg_area, ratio) for every label present in seg."""
    n = np.asarray(n_mask)
    s = np.asarray(seg)
    if n.shape != s.shape:
        raise LabelSpaceMismatch(f"shape {n.shape} vs {s.shape}")
    s_counts = np.bincount(s.ravel())
    n_counts = np.bincount(n.ravel(), minlength=s_counts.shape[0])
    if n_counts.shape[0] > s_counts.shape[0]:
        extra = [int(l) for l in range(s_counts.shape[0], n_counts.shape[0]) if n_counts[l]]
        if extra:
            raise LabelSpaceMismatch(f"labels {extra} present in N but absent from S")
        n_counts = n_counts[:s_counts.shape[0]]
    out = {}
    for label in range(1, s_counts.shape[0]):
        xs = int(s_counts[label])
        if xs == 0:
            if int(n_counts[label]) > 0:
                raise LabelSpaceMismatch(f"label {label} present in N but absent from S")
            continue
        xn = int(n_counts[label])
        out[label] = (xn, xs, xn / xs)
    return out


def cmr_gate(n_mask, seg, cfg):
    """Source labels passing the admission test, ascending.

    Strict inequality on the ratio: a candidate exactly at the threshold is
    rejected. Labels absent from S never appear (no zero division).
    """
    ratios = candidate_ratios(n_mask, seg)
    return [
        label
        for label, (xn, _xs, ratio) in sorted(ratios.items())
        if ratio > cfg.t and xn >= cfg.min_area
    ]


def admit(track, seg, cfg, registry, frame_index):
    """Run the full key-frame admission and produce the refined maps."""
    track = np.asarray(track)
    n = new_object_mask(track, seg)
    ratios = candidate_ratios(n, seg)
    accepted = cmr_gate(n, seg, cfg)
    new_objects = np.zeros_like(track)
    admitted = []
    for label in accepted:
        fresh = registry.issue(birth_frame=frame_index, provenance="keyframe")
        new_objects[n == label] = fresh
        admitted.append((label, fresh))
    refined = maskops.compose(track, new_objects, maskops.BASE_WINS)
    rejected = [(label, ratios[label][2]) for label in sorted(ratios) if label not in accepted]
    return CmrOutcome(
        new_objects=new_objects,
        refined_track=refined,
        admitted=admitted,
        rejected=rejected,
    )
