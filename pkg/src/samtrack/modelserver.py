"""Reference model server: exposes any backend bundle over the /v1 protocol.

This is what a real segmenter/detector/tracker deployment would speak; here
it wraps the oracle or classical backends so the remote client path can be
exercised end to end. Propagation state lives server-side behind opaque
tokens; masks cross the wire as flat RLE integer arrays.
"""
import threading

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import maskops, wire
from .backends.base import Frame, PropagationMemory, TextPrompt, update_memory
from .errors import SamTrackError


def _error(status, code, message):
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def labelmap_from_objects(objects, shape):
    lm = np.zeros(shape, dtype=np.uint16)
    for obj in objects:
        mask = wire.wire_to_mask(obj["mask"])
        lm[mask & (lm == 0)] = int(obj["object_id"])
    return lm


def labelmap_to_objects(lm):
    return [
        {"object_id": oid, "mask": wire.mask_to_wire(maskops.extract(lm, oid))}
        for oid in maskops.labels_of(lm)
    ]


def build_model_server(bundle):
    app = FastAPI(title="samtrack model server")
    state = {"memories": {}, "next_token": 1, "lock": threading.Lock()}

    async def parse(request):
        try:
            return await request.json()
        except Exception:
            return None

    @app.post("/v1/segment")
    async def segment(request: Request):
        body = await parse(request)
        if body is None or "frame" not in body or "prompts" not in body:
            return _error(422, "malformed", "need frame and prompts")
        try:
            pixels = wire.b64_to_pixels(body["frame"])
            prompts = [wire.wire_to_prompt(p) for p in body["prompts"]]
            mask = bundle.segmenter.segment(Frame(index=-1, pixels=pixels), prompts)
        except (SamTrackError, ValueError, KeyError) as exc:
            return _error(422, getattr(exc, "code", "malformed"), str(exc))
        return {"mask": wire.mask_to_wire(mask)}

    @app.post("/v1/segment_everything")
    async def segment_everything(request: Request):
        body = await parse(request)
        if body is None or "frame" not in body:
            return _error(422, "malformed", "need frame")
        try:
            pixels = wire.b64_to_pixels(body["frame"])
            lm = bundle.segmenter.segment_everything(Frame(index=-1, pixels=pixels))
        except SamTrackError as exc:
            return _error(502, exc.code, str(exc))
        return {"masks": [wire.mask_to_wire(maskops.extract(lm, l)) for l in maskops.labels_of(lm)]}

    @app.post("/v1/detect")
    async def detect(request: Request):
        body = await parse(request)
        if body is None or "frame" not in body or "phrase" not in body:
            return _error(422, "malformed", "need frame and phrase")
        try:
            pixels = wire.b64_to_pixels(body["frame"])
            prompt = TextPrompt(
                phrase=body["phrase"], score_threshold=float(body.get("threshold", 0.5))
            )
            hits = bundle.detector.detect(Frame(index=-1, pixels=pixels), prompt)
        except (SamTrackError, ValueError) as exc:
            return _error(422, getattr(exc, "code", "malformed"), str(exc))
        return {"detections": [wire.detection_to_wire(d) for d in hits]}

    @app.post("/v1/propagate/init")
    async def propagate_init(request: Request):
        body = await parse(request)
        if body is None or "frame" not in body or "objects" not in body:
            return _error(422, "malformed", "need frame and objects")
        try:
            pixels = wire.b64_to_pixels(body["frame"])
            lm = labelmap_from_objects(body["objects"], pixels.shape[:2])
        except (SamTrackError, ValueError, KeyError) as exc:
            return _error(422, getattr(exc, "code", "malformed"), str(exc))
        with state["lock"]:
            token = f"ptok-{state['next_token']}"
            state["next_token"] += 1
            state["memories"][token] = PropagationMemory(
                entries=((Frame(index=-1, pixels=pixels), lm),)
            )
        return {"token": token}

    @app.post("/v1/propagate")
    async def propagate(request: Request):
        body = await parse(request)
        if body is None or "token" not in body or "frame" not in body:
            return _error(422, "malformed", "need token and frame")
        with state["lock"]:
            memory = state["memories"].get(body["token"])
        if memory is None:
            return _error(404, "unknown_token", f"no propagation session {body['token']!r}")
        try:
            pixels = wire.b64_to_pixels(body["frame"])
            frame = Frame(index=-1, pixels=pixels)
            lm = bundle.propagator.propagate(memory, frame)
        except SamTrackError as exc:
            return _error(502, exc.code, str(exc))
        with state["lock"]:
            state["memories"][body["token"]] = update_memory(memory, frame, lm)
        return {"objects": labelmap_to_objects(lm)}

    return app
