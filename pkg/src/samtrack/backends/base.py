"""Backend contracts: prompt types, frames, propagation memory, interfaces.

Three pluggable roles feed the pipeline: a segmenter (prompt -> mask,
plus whole-frame segmentation), a detector (text -> boxes), and a
propagator (carry a label map from past frames to the current one).
"""
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from ..errors import DimensionMismatch, OutOfBounds
from ..maskops import BoundingBox

POSITIVE = "positive"
NEGATIVE = "negative"

MEMORY_CAPACITY = 8


@dataclass(frozen=True)
class PointPrompt:
    x: int
    y: int
    polarity: str = POSITIVE

    def __post_init__(self):
        if self.polarity not in (POSITIVE, NEGATIVE):
            raise ValueError(f"bad polarity {self.polarity!r}")


@dataclass(frozen=True)
class BoxPrompt:
    box: BoundingBox


@dataclass(frozen=True)
class TextPrompt:
    phrase: str
    score_threshold: float = 0.5

    def __post_init__(self):
        if not self.phrase:
            raise ValueError("empty phrase")
        if not 0.0 <= self.score_threshold <= 1.0:
            raise ValueError(f"score_threshold {self.score_threshold} outside [0, 1]")


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    score: float
    phrase: str


@dataclass(frozen=True)
class Frame:
    """A video frame handle: dense index plus 8-bit grayscale pixels (H, W)."""

    index: int
    pixels: np.ndarray

    @property
    def shape(self):
        return self.pixels.shape


@dataclass(frozen=True)
class PropagationMemory:
    """Reference frames available to the propagator, oldest first.

    Entry 0 is the committed reference and is never evicted; beyond capacity
    the oldest non-reference entry is dropped.
    """

    entries: tuple  # of (Frame, LabelMap)
    capacity: int = MEMORY_CAPACITY

    def __len__(self):
        return len(self.entries)

    @property
    def latest(self):
        return self.entries[-1]


def update_memory(memory, frame, labelmap):
    """Append an entry, evicting the oldest non-reference entry if over capacity."""
    if memory.entries:
        ref_lm = memory.entries[0][1]
        if ref_lm.shape != labelmap.shape or memory.entries[0][0].shape != frame.shape:
            raise DimensionMismatch(
                f"memory holds {ref_lm.shape}, appending {labelmap.shape}"
            )
    entries = memory.entries + ((frame, labelmap),)
    if len(entries) > memory.capacity:
        entries = entries[:1] + entries[2:]
    return PropagationMemory(entries=entries, capacity=memory.capacity)


def check_prompt_bounds(prompt, shape):
    h, w = shape[:2]
    if isinstance(prompt, PointPrompt):
        if not (0 <= prompt.x < w and 0 <= prompt.y < h):
            raise OutOfBounds(f"point ({prompt.x}, {prompt.y}) outside {w}x{h}")
    elif isinstance(prompt, BoxPrompt):
        b = prompt.box
        if not (0 <= b.x_min <= b.x_max < w and 0 <= b.y_min <= b.y_max < h):
            raise OutOfBounds(f"box {b} outside {w}x{h}")


def rasterize_masks(masks, shape):
    """Paint binary masks into a label map, label = list position + 1.

    Overlaps resolve by descending area: larger masks are painted first so
    smaller objects survive on top.
    """
    out = np.zeros(shape, dtype=np.uint16)
    order = sorted(range(len(masks)), key=lambda i: (-int(np.count_nonzero(masks[i])), i))
    for i in order:
        out[np.asarray(masks[i], dtype=bool)] = i + 1
    return out


@runtime_checkable
class Segmenter(Protocol):
    def segment(self, frame: Frame, prompts: Sequence) -> np.ndarray: ...

    def segment_everything(self, frame: Frame) -> np.ndarray: ...


@runtime_checkable
class Detector(Protocol):
    def detect(self, frame: Frame, prompt: TextPrompt) -> list: ...


@runtime_checkable
class Propagator(Protocol):
    def propagate(self, memory: PropagationMemory, frame: Frame) -> np.ndarray: ...

    def reinitialize(self, frame: Frame, labelmap: np.ndarray) -> None: ...


@dataclass
class BackendBundle:
    segmenter: Segmenter
    detector: Detector
    propagator: Propagator
