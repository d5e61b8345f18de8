"""Model-free baseline propagator: per-object integer-shift template match.

For each tracked ID the mask from the latest memory entry is matched against
the current frame over all displacements within a square search radius; the
displacement with the most intensity-matching pixels wins (ties: smaller
displacement, then scan order). Shifted masks are painted smallest
displacement first, so contested pixels go to the steadier object. Chosen for
determinism, not accuracy.
"""
import numpy as np

from .. import kernels, maskops
from ..errors import BackendUnavailable, EmptyMemory, NoPrompt
from .base import BoxPrompt, PointPrompt

SEARCH_RADIUS = 16
MATCH_TOLERANCE = 2


def _intensity(pixels):
    if pixels.ndim == 3:
        return pixels.mean(axis=2).astype(np.uint8)
    return pixels


def shift_mask(mask, dy, dx):
    h, w = mask.shape
    out = np.zeros_like(mask)
    ys0, ys1 = max(0, dy), min(h, h + dy)
    xs0, xs1 = max(0, dx), min(w, w + dx)
    if ys0 < ys1 and xs0 < xs1:
        out[ys0:ys1, xs0:xs1] = mask[ys0 - dy:ys1 - dy, xs0 - dx:xs1 - dx]
    return out


class ClassicalPropagator:
    def __init__(self, radius=SEARCH_RADIUS, tol=MATCH_TOLERANCE):
        self.radius = radius
        self.tol = tol

    def propagate(self, memory, frame):
        if len(memory) == 0:
            raise EmptyMemory("propagate with empty memory")
        prev_frame, prev_lm = memory.latest
        prev = _intensity(prev_frame.pixels)
        cur = _intensity(frame.pixels)
        moves = []
        for oid in maskops.labels_of(prev_lm):
            mask = maskops.extract(prev_lm, oid)
            if not mask.any():
                continue
            dy, dx, score = kernels.best_shift(
                prev, cur, np.ascontiguousarray(mask).astype(np.uint8),
                self.radius, self.tol,
            )
            moves.append((dy * dy + dx * dx, oid, dy, dx))
        out = np.zeros(prev_lm.shape, dtype=np.uint16)
        for _d2, oid, dy, dx in sorted(moves):
            shifted = shift_mask(maskops.extract(prev_lm, oid), dy, dx)
            out[shifted & (out == 0)] = oid
        return out

    def reinitialize(self, frame, labelmap):
        pass


class BoxFillSegmenter:
    """Prompt adapter for model-free runs: a box prompt becomes its filled
    rectangle. Point and text prompts need a real model and are refused."""

    def segment(self, frame, prompts):
        if not prompts:
            raise NoPrompt("segment requires at least one prompt")
        h, w = frame.pixels.shape[:2]
        out = np.zeros((h, w), dtype=bool)
        for p in prompts:
            if isinstance(p, BoxPrompt):
                b = p.box
                out[b.y_min:b.y_max + 1, b.x_min:b.x_max + 1] = True
            elif isinstance(p, PointPrompt):
                raise BackendUnavailable("classical backend cannot segment from points")
        return out

    def segment_everything(self, frame):
        raise BackendUnavailable("classical backend has no segment-everything model")


class UnavailableDetector:
    def detect(self, frame, prompt):
        raise BackendUnavailable("classical backend has no detector model")
