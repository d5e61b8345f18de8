"""Session engine: reference annotation, frame loop, key-frame admissions.

A session runs in three modes. Interactive: the user prompts objects on
frame 0 and they are tracked to the end. Automatic: frame 0 is annotated by
the configured key-frame source and every nth frame is searched for new
objects. Fusion: interactive reference plus the automatic key-frame routine.
Key frames are the indices divisible by n, excluding the reference frame, so
an interval larger than the video disables the automatic routine entirely.
"""
import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cmr as cmr_mod
from . import maskops
from .backends.base import (
    MEMORY_CAPACITY,
    BoxPrompt,
    Frame,
    PointPrompt,
    PropagationMemory,
    TextPrompt,
    rasterize_masks,
    update_memory,
)
from .errors import (
    AlreadyCommitted,
    EmptyReference,
    NotCommitted,
    SamTrackError,
    StepFailed,
)

INTERACTIVE = "interactive"
AUTOMATIC = "automatic"
FUSION = "fusion"
MODES = (INTERACTIVE, AUTOMATIC, FUSION)

SEGMENT_EVERYTHING = "segment-everything"
OBJECT_OF_INTEREST = "object-of-interest"
KEYFRAME_SOURCES = (SEGMENT_EVERYTHING, OBJECT_OF_INTEREST)


@dataclass(frozen=True)
class SessionConfig:
    mode: str = INTERACTIVE
    keyframe_interval: int = 8
    keyframe_source: str = SEGMENT_EVERYTHING
    text_prompts: tuple = ()
    cmr: cmr_mod.CmrConfig = field(default_factory=cmr_mod.CmrConfig)
    backend: str = ""  # selection echo for manifests; the bundle is passed separately

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.keyframe_interval < 1:
            raise ValueError("keyframe_interval must be >= 1")
        if self.keyframe_source not in KEYFRAME_SOURCES:
            raise ValueError(f"unknown keyframe source {self.keyframe_source!r}")
        if self.keyframe_source == OBJECT_OF_INTEREST and not self.text_prompts:
            raise ValueError("object-of-interest requires text prompts")

    def to_dict(self):
        return {
            "mode": self.mode,
            "keyframe_interval": self.keyframe_interval,
            "keyframe_source": self.keyframe_source,
            "text_prompts": [
                {"phrase": p.phrase, "score_threshold": p.score_threshold}
                for p in self.text_prompts
            ],
            "cmr": {"t": self.cmr.t, "min_area": self.cmr.min_area},
            "backend": self.backend,
        }


@dataclass
class StagedMask:
    mask: np.ndarray
    provenance: str  # click | box | text


@dataclass
class FrameResult:
    index: int
    labels: np.ndarray
    outcome: Optional[cmr_mod.CmrOutcome] = None


@dataclass
class RunResult:
    results: list
    cmr_log: list
    registry: object


class Session:
    """Single-writer session: prompt, commit, then step frames in order."""

    def __init__(self, config, backends, registry=None):
        from .registry import ObjectRegistry

        self.config = config
        self.backends = backends
        self.registry = registry or ObjectRegistry()
        self.reference_frame = None
        self.staged = []
        self.committed = False
        self.memory = None
        self.frame_cursor = 0
        self.results = []
        self.cmr_log = []
        self._lock = threading.RLock()

    # --- reference annotation ---

    def set_reference_frame(self, frame):
        with self._lock:
            if self.committed:
                raise AlreadyCommitted("reference already committed")
            if frame.index != 0:
                raise ValueError(f"reference frame must have index 0, got {frame.index}")
            self.reference_frame = frame

    def add_prompt(self, prompt):
        """Stage preview masks for one prompt; returns the newly staged masks."""
        with self._lock:
            if self.committed:
                raise AlreadyCommitted("cannot prompt after commit")
            if self.reference_frame is None:
                raise NotCommitted("no reference frame loaded")
            fresh = []
            if isinstance(prompt, PointPrompt):
                m = self.backends.segmenter.segment(self.reference_frame, [prompt])
                fresh.append(StagedMask(mask=m, provenance="click"))
            elif isinstance(prompt, BoxPrompt):
                m = self.backends.segmenter.segment(self.reference_frame, [prompt])
                fresh.append(StagedMask(mask=m, provenance="box"))
            elif isinstance(prompt, TextPrompt):
                for det in self.backends.detector.detect(self.reference_frame, prompt):
                    m = self.backends.segmenter.segment(
                        self.reference_frame, [BoxPrompt(box=det.box)]
                    )
                    fresh.append(StagedMask(mask=m, provenance="text"))
            else:
                raise ValueError(f"unknown prompt {prompt!r}")
            self.staged.extend(fresh)
            return fresh

    def revoke_stage(self, k):
        with self._lock:
            if self.committed:
                raise AlreadyCommitted("cannot revoke after commit")
            if not 0 <= k < len(self.staged):
                raise IndexError(f"no staged mask {k}")
            del self.staged[k]

    def commit_reference(self):
        """Rasterize staged masks (staging order, later wins) and start tracking."""
        with self._lock:
            if self.committed:
                raise AlreadyCommitted("reference already committed")
            if not self.staged:
                raise EmptyReference("no staged masks to commit")
            reference = np.zeros(self.reference_frame.shape[:2], dtype=np.uint16)
            for stage in self.staged:
                oid = self.registry.issue(birth_frame=0, provenance=stage.provenance)
                reference[np.asarray(stage.mask, dtype=bool)] = oid
            self._start_tracking(reference)
            return reference

    def bootstrap_automatic(self, frame0):
        """Automatic-mode reference: annotate frame 0 via the key-frame source
        and admit every segment clearing the area floor as an initial object."""
        with self._lock:
            if self.committed:
                raise AlreadyCommitted("reference already committed")
            self.reference_frame = frame0
            seg = self._keyframe_annotation(frame0)
            reference = np.zeros(seg.shape, dtype=np.uint16)
            for label in maskops.labels_of(seg):
                support = maskops.extract(seg, label)
                if maskops.area(support) < self.config.cmr.min_area:
                    continue
                oid = self.registry.issue(birth_frame=0, provenance="keyframe")
                reference[support] = oid
            self._start_tracking(reference)
            return reference

    def _start_tracking(self, reference):
        self.committed = True
        self.memory = PropagationMemory(
            entries=((self.reference_frame, reference),), capacity=MEMORY_CAPACITY
        )
        self.backends.propagator.reinitialize(self.reference_frame, reference)
        self.results = [reference]
        self.cmr_log = []
        self.frame_cursor = 1

    # --- frame loop ---

    def is_keyframe(self, index):
        if self.config.mode == INTERACTIVE:
            return False
        n = self.config.keyframe_interval
        return index > 0 and index % n == 0

    def step(self, frame):
        """Track one frame; on backend failure nothing advances."""
        with self._lock:
            if not self.committed:
                raise NotCommitted("commit a reference before stepping")
            if frame.index != self.frame_cursor:
                raise ValueError(
                    f"expected frame {self.frame_cursor}, got {frame.index}"
                )
            track = self.backends.propagator.propagate(self.memory, frame)
            outcome = None
            if self.is_keyframe(frame.index):
                seg = self._keyframe_annotation(frame)
                outcome = cmr_mod.admit(
                    track, seg, self.config.cmr, self.registry, frame.index
                )
                result = outcome.refined_track
            else:
                result = track
            self.memory = update_memory(self.memory, frame, result)
            if outcome is not None and outcome.admitted:
                self.backends.propagator.reinitialize(frame, result)
            self.results.append(result)
            if outcome is not None:
                self.cmr_log.append(outcome.to_record(frame.index))
            self.frame_cursor += 1
            return FrameResult(index=frame.index, labels=result, outcome=outcome)

    def _keyframe_annotation(self, frame):
        if self.config.keyframe_source == SEGMENT_EVERYTHING:
            return self.backends.segmenter.segment_everything(frame)
        masks = []
        for tp in self.config.text_prompts:
            for det in self.backends.detector.detect(frame, tp):
                masks.append(
                    self.backends.segmenter.segment(frame, [BoxPrompt(box=det.box)])
                )
        return rasterize_masks(masks, frame.pixels.shape[:2])

    def run(self, frames):
        """Track a full video (frame 0 included); dense results out."""
        with self._lock:
            if not frames:
                raise EmptyReference("empty video")
            if not self.committed:
                if self.config.mode == AUTOMATIC:
                    self.bootstrap_automatic(frames[0])
                else:
                    raise NotCommitted(f"{self.config.mode} mode requires a committed reference")
            for frame in frames[self.frame_cursor:]:
                try:
                    self.step(frame)
                except SamTrackError as exc:
                    raise StepFailed(frame.index, exc) from exc
            return RunResult(
                results=list(self.results),
                cmr_log=list(self.cmr_log),
                registry=self.registry,
            )
