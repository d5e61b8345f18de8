"""HTTP client for a remote model server speaking the /v1 wire protocol.

segment/segment_everything/detect are stateless per call; propagation state
lives server-side behind an opaque session token obtained from
/v1/propagate/init. One request is in flight per client at a time.
"""
import threading

import requests

from .. import wire
from ..errors import BackendUnavailable, EmptyMemory


class RemoteModelClient:
    def __init__(self, base_url, timeout=30.0, session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._http = session or requests.Session()
        self._lock = threading.Lock()

    def post(self, path, body):
        url = f"{self.base_url}{path}"
        with self._lock:
            try:
                resp = self._http.post(url, json=body, timeout=self.timeout)
            except requests.RequestException as exc:
                raise BackendUnavailable(f"POST {url}: {exc}") from exc
        if resp.status_code >= 400:
            try:
                err = resp.json()
                detail = f"{err.get('code')}: {err.get('message')}"
            except ValueError:
                detail = resp.text[:200]
            raise BackendUnavailable(f"POST {url} -> {resp.status_code} ({detail})")
        try:
            return resp.json()
        except ValueError as exc:
            raise BackendUnavailable(f"POST {url}: invalid JSON body") from exc


class RemoteSegmenter:
    def __init__(self, client):
        self.client = client

    def segment(self, frame, prompts):
        body = {
            "frame": wire.pixels_to_b64(frame.pixels),
            "prompts": [wire.prompt_to_wire(p) for p in prompts],
        }
        resp = self.client.post("/v1/segment", body)
        return wire.wire_to_mask(resp["mask"])

    def segment_everything(self, frame):
        from .base import rasterize_masks

        body = {"frame": wire.pixels_to_b64(frame.pixels)}
        resp = self.client.post("/v1/segment_everything", body)
        masks = [wire.wire_to_mask(m) for m in resp["masks"]]
        h, w = frame.pixels.shape[:2]
        return rasterize_masks(masks, (h, w))


class RemoteDetector:
    def __init__(self, client):
        self.client = client

    def detect(self, frame, prompt):
        body = {
            "frame": wire.pixels_to_b64(frame.pixels),
            "phrase": prompt.phrase,
            "threshold": prompt.score_threshold,
        }
        resp = self.client.post("/v1/detect", body)
        return [wire.wire_to_detection(d) for d in resp["detections"]]


class RemotePropagator:
    def __init__(self, client):
        self.client = client
        self.token = None

    def reinitialize(self, frame, labelmap):
        from .. import maskops

        objects = [
            {"object_id": oid, "mask": wire.mask_to_wire(maskops.extract(labelmap, oid))}
            for oid in maskops.labels_of(labelmap)
        ]
        body = {"frame": wire.pixels_to_b64(frame.pixels), "objects": objects}
        resp = self.client.post("/v1/propagate/init", body)
        self.token = resp["token"]

    def propagate(self, memory, frame):
        import numpy as np

        if len(memory) == 0:
            raise EmptyMemory("propagate with empty memory")
        if self.token is None:
            raise BackendUnavailable("remote propagator not initialized")
        body = {"token": self.token, "frame": wire.pixels_to_b64(frame.pixels)}
        resp = self.client.post("/v1/propagate", body)
        h, w = frame.pixels.shape[:2]
        out = np.zeros((h, w), dtype=np.uint16)
        for obj in resp["objects"]:
            mask = wire.wire_to_mask(obj["mask"])
            out[mask & (out == 0)] = int(obj["object_id"])
        return out


def remote_bundle(base_url, timeout=30.0):
    from .base import BackendBundle

    client = RemoteModelClient(base_url, timeout=timeout)
    return BackendBundle(
        segmenter=RemoteSegmenter(client),
        detector=RemoteDetector(client),
        propagator=RemotePropagator(client),
    )
