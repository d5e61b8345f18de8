"""Wire-format codecs shared by the remote backend client and the servers.

Masks always travel as a flat array of unsigned decimal integers:
[width, height, run_count, run_0, ..., run_{k-1}], runs alternating
background-then-foreground starting with a (possibly zero) background run.
Frames travel as base64 PNG. Message bodies are JSON.
"""
import base64
import io
import json

import numpy as np
from PIL import Image

from .backends.base import BoxPrompt, Detection, PointPrompt, TextPrompt
from .errors import MalformedRuns
from .maskops import BoundingBox, RleMask, rle_decode, rle_encode


def canonical_dumps(obj):
    """Deterministic JSON used for golden files and manifests."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def rle_to_wire(r):
    return [r.width, r.height, len(r.runs), *r.runs]


def wire_to_rle(arr):
    if len(arr) < 3:
        raise MalformedRuns(f"wire mask too short ({len(arr)} fields)")
    if any((not isinstance(v, int)) or isinstance(v, bool) or v < 0 for v in arr):
        raise MalformedRuns("wire mask fields must be unsigned integers")
    w, h, k = arr[0], arr[1], arr[2]
    runs = arr[3:]
    if len(runs) != k:
        raise MalformedRuns(f"declared {k} runs, got {len(runs)}")
    return RleMask(width=w, height=h, runs=tuple(runs))


def mask_to_wire(mask):
    return rle_to_wire(rle_encode(mask))


def wire_to_mask(arr):
    return rle_decode(wire_to_rle(arr))


def pixels_to_png_bytes(pixels):
    a = np.asarray(pixels, dtype=np.uint8)
    mode = "L" if a.ndim == 2 else "RGB"
    buf = io.BytesIO()
    Image.fromarray(a, mode=mode).save(buf, format="PNG")
    return buf.getvalue()


def pixels_to_b64(pixels):
    return base64.b64encode(pixels_to_png_bytes(pixels)).decode("ascii")


def b64_to_pixels(s):
    img = Image.open(io.BytesIO(base64.b64decode(s)))
    if img.mode not in ("L", "RGB"):
        img = img.convert("L")
    return np.asarray(img)


def labelmap_to_b64(lm):
    from . import pngio

    return base64.b64encode(pngio.labelmap_to_png_bytes(lm)).decode("ascii")


def box_to_wire(b):
    return {"x_min": b.x_min, "y_min": b.y_min, "x_max": b.x_max, "y_max": b.y_max}


def wire_to_box(d):
    return BoundingBox(int(d["x_min"]), int(d["y_min"]), int(d["x_max"]), int(d["y_max"]))


def prompt_to_wire(p):
    if isinstance(p, PointPrompt):
        return {"type": "point", "x": p.x, "y": p.y, "polarity": p.polarity}
    if isinstance(p, BoxPrompt):
        return {"type": "box", "box": box_to_wire(p.box)}
    if isinstance(p, TextPrompt):
        return {"type": "text", "phrase": p.phrase, "score_threshold": p.score_threshold}
    raise ValueError(f"cannot serialize prompt {p!r}")


def wire_to_prompt(d):
    kind = d.get("type")
    if kind in ("point", "click"):
        return PointPrompt(x=int(d["x"]), y=int(d["y"]), polarity=d.get("polarity", "positive"))
    if kind == "box":
        box = d["box"] if "box" in d else d
        return BoxPrompt(box=wire_to_box(box))
    if kind == "text":
        return TextPrompt(
            phrase=d["phrase"], score_threshold=float(d.get("score_threshold", 0.5))
        )
    raise ValueError(f"unknown prompt type {kind!r}")


def detection_to_wire(det):
    return {"box": box_to_wire(det.box), "score": det.score, "phrase": det.phrase}


def wire_to_detection(d):
    return Detection(box=wire_to_box(d["box"]), score=float(d["score"]), phrase=d["phrase"])
