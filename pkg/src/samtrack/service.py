"""HTTP session service: annotate, track, and fetch results over REST + SSE.

State machine per session: annotating -> tracking -> done | failed. Tracking
runs on a background thread per session with cooperative cancellation;
results land on disk in the same per-run layout the CLI writes, so UI and
CLI outputs are interchangeable.
"""
import json
import tempfile
import threading
import time
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import manifest, maskops, pngio, wire
from .backends.base import Frame, TextPrompt
from .cmr import CmrConfig
from .errors import BackendUnavailable, SamTrackError, StepFailed
from .factory import resolve_backends
from .pipeline import AUTOMATIC, MODES, KEYFRAME_SOURCES, Session, SessionConfig

ANNOTATING = "annotating"
TRACKING = "tracking"
DONE = "done"
FAILED = "failed"

_IMAGE_EXTS = (".png", ".jpg", ".jpeg")


def _error(status, code, message, frame=None):
    body = {"code": code, "message": message}
    if frame is not None:
        body["frame"] = frame
    return JSONResponse(status_code=status, content=body)


class ServiceSession:
    def __init__(self, sid, raw_config, out_dir):
        self.id = sid
        self.raw_config = raw_config
        self.out_dir = out_dir
        self.state = ANNOTATING
        self.session = None  # pipeline Session, created when video attaches
        self.config = None
        self.backends = None
        self.frames = None
        self.error = None
        self.events = []  # append-only event log for SSE
        self.thread = None
        self.cancel = False
        self.lock = threading.Lock()

    @property
    def progress(self):
        done = len(self.session.results) if self.session and self.session.committed else 0
        total = len(self.frames) if self.frames is not None else 0
        return {"done": done, "total": total}

    def handle(self):
        return {
            "id": self.id,
            "state": self.state,
            "progress": self.progress,
            "error": self.error,
        }


def _load_frames_dir(path):
    files = sorted(p for p in Path(path).iterdir() if p.suffix.lower() in _IMAGE_EXTS)
    return [Frame(index=i, pixels=pngio.load_frame(p)) for i, p in enumerate(files)]


def _parse_config(raw):
    mode = raw.get("mode", "interactive")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    source = raw.get("keyframe_source", "segment-everything")
    if source not in KEYFRAME_SOURCES:
        raise ValueError(f"unknown keyframe_source {source!r}")
    prompts = tuple(
        TextPrompt(phrase=p["phrase"], score_threshold=float(p.get("score_threshold", 0.5)))
        for p in raw.get("text_prompts", [])
    )
    if "backend" not in raw:
        raise ValueError("config needs a backend spec")
    return mode, source, prompts


def build_app(data_dir=None):
    app = FastAPI(title="samtrack session service")
    base_dir = Path(data_dir) if data_dir else Path(tempfile.mkdtemp(prefix="samtrack-"))
    base_dir.mkdir(parents=True, exist_ok=True)
    sessions = {}
    app.state.sessions = sessions
    app.state.data_dir = base_dir

    def get_session(sid):
        return sessions.get(sid)

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        try:
            raw = await request.json()
            _parse_config(raw)
        except (ValueError, KeyError, TypeError) as exc:
            return _error(422, "malformed", f"bad config: {exc}")
        sid = uuid.uuid4().hex[:12]
        ss = ServiceSession(sid, raw, base_dir / sid)
        sessions[sid] = ss
        return ss.handle()

    @app.post("/sessions/{sid}/video")
    async def attach_video(sid: str, request: Request):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.state != ANNOTATING or ss.session is not None:
            return _error(409, "invalid_state", f"cannot attach video while {ss.state}")
        try:
            body = await request.json()
        except Exception:
            body = {}
        try:
            resolved = resolve_backends(ss.raw_config["backend"])
        except (ValueError, FileNotFoundError, SamTrackError) as exc:
            return _error(422, "malformed", f"backend: {exc}")
        try:
            if "frames_dir" in body:
                frames = _load_frames_dir(body["frames_dir"])
            elif "frames_b64" in body:
                frames = [
                    Frame(index=i, pixels=wire.b64_to_pixels(s))
                    for i, s in enumerate(body["frames_b64"])
                ]
            elif resolved.frames is not None:
                frames = resolved.frames
            else:
                return _error(422, "malformed", "need frames_dir, frames_b64, or an oracle backend")
        except (OSError, ValueError) as exc:
            return _error(422, "malformed", f"bad video source: {exc}")
        if not frames:
            return _error(422, "malformed", "video has no frames")
        mode, source, prompts = _parse_config(ss.raw_config)
        h, w = frames[0].pixels.shape[:2]
        cmr_cfg = CmrConfig.for_frame(h, w, t=float(ss.raw_config.get("t", 0.8)))
        if "min_area" in ss.raw_config:
            cmr_cfg = CmrConfig(t=cmr_cfg.t, min_area=int(ss.raw_config["min_area"]))
        config = SessionConfig(
            mode=mode,
            keyframe_interval=int(ss.raw_config.get("n", 8)),
            keyframe_source=source,
            text_prompts=prompts,
            cmr=cmr_cfg,
            backend=ss.raw_config["backend"],
        )
        ss.config = config
        ss.frames = frames
        ss.session = Session(config, resolved.bundle)
        if mode != AUTOMATIC:
            ss.session.set_reference_frame(frames[0])
        return {"frames": len(frames), "preview": wire.pixels_to_b64(frames[0].pixels)}

    @app.post("/sessions/{sid}/prompts")
    async def add_prompt(sid: str, request: Request):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.state != ANNOTATING or ss.session is None:
            return _error(409, "invalid_state", "prompting requires an annotating session with video")
        if ss.session.committed:
            return _error(409, "invalid_state", "reference already committed")
        try:
            body = await request.json()
            prompt = wire.wire_to_prompt(body)
        except (ValueError, KeyError, TypeError) as exc:
            return _error(422, "malformed", f"bad prompt: {exc}")
        try:
            with ss.lock:
                before = len(ss.session.staged)
                fresh = ss.session.add_prompt(prompt)
        except BackendUnavailable as exc:
            return _error(502, exc.code, str(exc))
        except SamTrackError as exc:
            return _error(422, exc.code, str(exc))
        staged = [
            {"index": before + i, "mask": wire.mask_to_wire(s.mask), "provenance": s.provenance}
            for i, s in enumerate(fresh)
        ]
        return {"staged": staged, "staged_count": len(ss.session.staged)}

    @app.delete("/sessions/{sid}/prompts/{k}")
    async def revoke_prompt(sid: str, k: int):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.state != ANNOTATING or ss.session is None or ss.session.committed:
            return _error(409, "invalid_state", "cannot revoke now")
        try:
            with ss.lock:
                ss.session.revoke_stage(k)
        except IndexError as exc:
            return _error(404, "unknown_stage", str(exc))
        return {"staged_count": len(ss.session.staged)}

    @app.post("/sessions/{sid}/commit")
    async def commit(sid: str):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.state != ANNOTATING or ss.session is None:
            return _error(409, "invalid_state", f"cannot commit while {ss.state}")
        if ss.session.committed:
            return _error(409, "invalid_state", "reference already committed")
        try:
            with ss.lock:
                reference = ss.session.commit_reference()
        except BackendUnavailable as exc:
            return _error(502, exc.code, str(exc))
        except SamTrackError as exc:
            return _error(409, exc.code, str(exc))
        objects = []
        for oid in maskops.labels_of(reference):
            m = maskops.extract(reference, oid)
            b = maskops.bounding_box_of(m)
            objects.append(
                {
                    "id": oid,
                    "area": maskops.area(m),
                    "box": wire.box_to_wire(b),
                }
            )
        return {"frame": 0, "objects": objects}

    def _track_loop(ss):
        session = ss.session
        try:
            if not session.committed:
                session.bootstrap_automatic(ss.frames[0])
            manifest.write_frame(ss.out_dir, 0, session.results[0])
            ss.events.append({"event": "frame", "frame": 0, "admitted": []})
            for frame in ss.frames[session.frame_cursor:]:
                if ss.cancel:
                    raise SamTrackError("cancelled")
                result = session.step(frame)
                manifest.write_frame(ss.out_dir, frame.index, result.labels)
                admitted = (
                    [fresh for _src, fresh in result.outcome.admitted]
                    if result.outcome
                    else []
                )
                ss.events.append({"event": "frame", "frame": frame.index, "admitted": admitted})
            manifest.write_manifest(
                ss.out_dir, ss.config, session.registry, session.cmr_log,
                len(session.results),
            )
            ss.state = DONE
            ss.events.append({"event": "done", "frames": len(session.results)})
        except Exception as exc:  # failure -> report, keep partial results
            frame_idx = getattr(exc, "frame_index", session.frame_cursor)
            code = getattr(exc, "code", "internal")
            ss.error = {"code": code, "message": str(exc), "frame": frame_idx}
            manifest.write_manifest(
                ss.out_dir, ss.config, session.registry, session.cmr_log,
                len(session.results), status=manifest.STATUS_FAILED, error=ss.error,
            )
            ss.state = FAILED
            ss.events.append({"event": "failed", **ss.error})

    @app.post("/sessions/{sid}/track", status_code=202)
    async def track(sid: str):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.state != ANNOTATING or ss.session is None:
            return _error(409, "invalid_state", f"cannot track while {ss.state}")
        if ss.config.mode != AUTOMATIC and not ss.session.committed:
            return _error(409, "invalid_state", "commit a reference before tracking")
        ss.state = TRACKING
        ss.thread = threading.Thread(target=_track_loop, args=(ss,), daemon=True)
        ss.thread.start()
        return {"id": ss.id, "state": ss.state}

    @app.get("/sessions/{sid}")
    async def get_handle(sid: str):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        return ss.handle()

    @app.get("/sessions/{sid}/events")
    async def events(sid: str):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)

        def stream():
            sent = 0
            while True:
                while sent < len(ss.events):
                    ev = ss.events[sent]
                    sent += 1
                    name = ev["event"]
                    data = {k: v for k, v in ev.items() if k != "event"}
                    yield f"event: {name}\ndata: {json.dumps(data, sort_keys=True)}\n\n"
                if ss.state in (DONE, FAILED) and sent >= len(ss.events):
                    return
                time.sleep(0.02)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/sessions/{sid}/results/{frame}")
    async def result_frame(sid: str, frame: int):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.session is None or not ss.session.committed or frame >= len(ss.session.results):
            return _error(404, "missing_frame", f"frame {frame} not available yet")
        lm = ss.session.results[frame]
        objects = [
            {"id": oid, "mask": wire.mask_to_wire(maskops.extract(lm, oid))}
            for oid in maskops.labels_of(lm)
        ]
        return {
            "frame": frame,
            "png": wire.labelmap_to_b64(lm),
            "objects": objects,
        }

    @app.get("/sessions/{sid}/manifest")
    async def get_manifest(sid: str):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        if ss.session is None:
            return _error(409, "invalid_state", "no video attached")
        return {
            "config": ss.config.to_dict(),
            "frames": len(ss.session.results),
            "status": ss.state,
            "error": ss.error,
            "registry": ss.session.registry.dump(),
            "cmr_log": ss.session.cmr_log,
            "palette": "voc",
        }

    @app.delete("/sessions/{sid}")
    async def cancel_session(sid: str):
        ss = get_session(sid)
        if ss is None:
            return _error(404, "unknown_session", sid)
        ss.cancel = True
        if ss.thread is not None:
            ss.thread.join(timeout=30)
        elif ss.state == ANNOTATING:
            ss.state = FAILED
            ss.error = {"code": "cancelled", "message": "session cancelled", "frame": None}
        return ss.handle()

    return app
