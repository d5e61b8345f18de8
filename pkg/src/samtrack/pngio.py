"""Label-map persistence: 8-bit indexed palette PNG, 16-bit grayscale fallback.

Label maps are stored the DAVIS way: palette index == object ID, index 0 is
background. Sessions that exceed 255 concurrent labels fall back to 16-bit
grayscale PNG with a sidecar documenting the encoding.
"""
import io
import json
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import PaletteMismatch

SIDECAR_SUFFIX = ".meta.json"


def color_palette(n=256):
    """Deterministic palette: the standard bit-interleaved VOC/DAVIS colormap."""
    pal = np.zeros((n, 3), dtype=np.uint8)
    for i in range(n):
        c, r, g, b = i, 0, 0, 0
        for shift in range(8):
            r |= ((c >> 0) & 1) << (7 - shift)
            g |= ((c >> 1) & 1) << (7 - shift)
            b |= ((c >> 2) & 1) << (7 - shift)
            c >>= 3
        pal[i] = (r, g, b)
    return pal


_PALETTE_BYTES = color_palette().tobytes()


def labelmap_to_png_bytes(lm):
    lm = np.asarray(lm)
    if lm.max(initial=0) <= 255:
        img = Image.fromarray(lm.astype(np.uint8), mode="P")
        img.putpalette(_PALETTE_BYTES)
    else:
        img = Image.fromarray(lm.astype(np.uint16))  # Pillow picks I;16
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


def save_labelmap(path, lm):
    path = Path(path)
    lm = np.asarray(lm)
    path.write_bytes(labelmap_to_png_bytes(lm))
    if lm.max(initial=0) > 255:
        sidecar = {"encoding": "gray16", "reason": "more than 255 concurrent labels"}
        Path(str(path) + SIDECAR_SUFFIX).write_text(json.dumps(sidecar, sort_keys=True))


def load_labelmap(path):
    img = Image.open(path)
    if img.mode == "P":
        return np.asarray(img).astype(np.uint16)
    if img.mode in ("I", "I;16"):
        return np.asarray(img).astype(np.uint16)
    if img.mode == "L":
        return np.asarray(img).astype(np.uint16)
    raise PaletteMismatch(f"{path}: expected indexed PNG, got mode {img.mode}")


def load_frame(path):
    """Load a video frame as 8-bit grayscale."""
    return np.asarray(Image.open(path).convert("L"))
