"""Pixel-level primitives: binary masks, multi-object label maps, RLE codec.

Conventions used across the package:
  * Mask      -> 2D numpy bool array, shape (H, W)
  * LabelMap  -> 2D numpy uint16 array, shape (H, W); 0 is background
Object IDs are positive integers; the 16-bit bound is a hard limit (no
wraparound) so ID uniqueness can never silently break within a session.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionMismatch, EmptyMask, MalformedRuns

MAX_LABEL = 65535  # uint16 label space; IDs beyond this are a hard error

BASE_WINS = "base-wins"
OVERLAY_WINS = "overlay-wins"


@dataclass(frozen=True)
class BoundingBox:
    """Inclusive pixel-coordinate box: x_min <= x_max, y_min <= y_max."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self):
        return self.x_max - self.x_min + 1

    @property
    def height(self):
        return self.y_max - self.y_min + 1


@dataclass(frozen=True)
class RleMask:
    """Run-length encoded binary mask.

    Runs alternate background-then-foreground in row-major scan order and
    always start with a background run (possibly 0, so an all-foreground
    mask stays representable). Only the first run may be zero-length.
    """

    width: int
    height: int
    runs: tuple

    def __post_init__(self):
        validate_runs(self.width, self.height, self.runs)


def validate_runs(width, height, runs):
    if width < 1 or height < 1:
        raise MalformedRuns(f"bad dimensions {width}x{height}")
    total = 0
    for i, r in enumerate(runs):
        if r < 0:
            raise MalformedRuns(f"negative run at index {i}")
        if r == 0 and i != 0:
            raise MalformedRuns(f"zero-length run at index {i}")
        total += r
    if total != width * height:
        raise MalformedRuns(f"runs sum to {total}, expected {width * height}")


def as_mask(a):
    """Coerce to a 2D bool mask."""
    m = np.asarray(a)
    if m.ndim != 2:
        raise DimensionMismatch(f"mask must be 2D, got shape {m.shape}")
    return m.astype(bool)


def as_labelmap(a):
    """Coerce to a 2D uint16 label map; labels above MAX_LABEL are an error."""
    lm = np.asarray(a)
    if lm.ndim != 2:
        raise DimensionMismatch(f"label map must be 2D, got shape {lm.shape}")
    if lm.size and (lm.min() < 0 or lm.max() > MAX_LABEL):
        raise ValueError(f"labels outside [0, {MAX_LABEL}]")
    return lm.astype(np.uint16)


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape {a.shape} vs {b.shape}")


def background_of(lm):
    """Binary mask of the background (label 0) pixels."""
    return np.asarray(lm) == 0


def restrict(lm, m):
    """Keep lm's labels where the mask is set, background elsewhere."""
    lm = np.asarray(lm)
    m = np.asarray(m)
    _check_same_shape(lm, m)
    return np.where(m.astype(bool), lm, 0).astype(lm.dtype)


def compose(base, overlay, precedence=BASE_WINS):
    """Merge two label maps; `precedence` decides pixels nonzero in both."""
    base = np.asarray(base)
    overlay = np.asarray(overlay)
    _check_same_shape(base, overlay)
    if precedence == BASE_WINS:
        return np.where(base != 0, base, overlay).astype(base.dtype)
    if precedence == OVERLAY_WINS:
        return np.where(overlay != 0, overlay, base).astype(base.dtype)
    raise ValueError(f"unknown precedence {precedence!r}")


def extract(lm, object_id):
    """Binary mask of the pixels carrying the given object ID."""
    return np.asarray(lm) == object_id


def area(m):
    """Number of set pixels."""
    return int(np.count_nonzero(m))


def labels_of(lm):
    """Sorted nonzero labels present in a label map."""
    vals = np.unique(np.asarray(lm))
    return [int(v) for v in vals if v != 0]


def bounding_box_of(m):
    """Tightest inclusive box around the set pixels; EmptyMask if none."""
    m = np.asarray(m)
    ys, xs = np.nonzero(m)
    if ys.size == 0:
        raise EmptyMask("bounding box of an empty mask")
    return BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def rle_encode(m):
    m = as_mask(m)
    h, w = m.shape
    runs = kernels.rle_encode_bits(np.ascontiguousarray(m.ravel()).astype(np.uint8))
    return RleMask(width=w, height=h, runs=tuple(int(r) for r in runs))


def rle_decode(r):
    validate_runs(r.width, r.height, r.runs)
    flat = np.zeros(r.width * r.height, dtype=bool)
    pos = 0
    fg = False
    for run in r.runs:
        if fg:
            flat[pos:pos + run] = True
        pos += run
        fg = not fg
    return flat.reshape(r.height, r.width)


def connected_components(m):
    """Split a mask into 4-connected components.

    Returns one mask per component, ordered by the raster position of each
    component's first pixel. 4-connectivity is fixed: diagonal contact does
    not merge regions.
    """
    m = as_mask(m)
    if not m.any():
        return []
    labels = kernels.label_components_4(np.ascontiguousarray(m).astype(np.uint8))
    flat = labels.ravel()
    order = {}
    for idx in np.flatnonzero(flat):
        lab = int(flat[idx])
        if lab not in order:
            order[lab] = idx
    ordered = sorted(order, key=order.get)
    return [labels == lab for lab in ordered]
