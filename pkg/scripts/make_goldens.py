#!/usr/bin/env python3
"""Regenerate golden wire-protocol files and the golden CLI run directory.

Run from the repo root after fixtures exist: python3 scripts/make_goldens.py
"""
import json
import shutil
import subprocess
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from samtrack import wire
from samtrack.harness import load_scenario, oracle_bundle, render
from samtrack.modelserver import build_model_server

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "fixtures" / "golden"
WIRE_DIR = GOLDEN / "wire"
RUN_DIR = GOLDEN / "track_static_two_discs"
SCENARIO = ROOT / "fixtures" / "scenarios" / "static_two_discs.json"
PROMPTS = ROOT / "fixtures" / "prompts" / "static_two_discs.json"


def write(name, obj):
    (WIRE_DIR / name).write_text(wire.canonical_dumps(obj))


def make_wire_goldens():
    WIRE_DIR.mkdir(parents=True, exist_ok=True)
    sc = load_scenario(SCENARIO)
    frames, gts = render(sc)
    client = TestClient(build_model_server(oracle_bundle(sc, (frames, gts))))
    frame_b64 = wire.pixels_to_b64(frames[0].pixels)

    seg_req = {
        "frame": frame_b64,
        "prompts": [{"type": "point", "x": 18, "y": 22, "polarity": "positive"}],
    }
    write("segment_request.json", seg_req)
    write("segment_response.json", client.post("/v1/segment", json=seg_req).json())

    se_req = {"frame": frame_b64}
    write("segment_everything_request.json", se_req)
    write("segment_everything_response.json",
          client.post("/v1/segment_everything", json=se_req).json())

    det_req = {"frame": frame_b64, "phrase": "disc", "threshold": 0.5}
    write("detect_request.json", det_req)
    write("detect_response.json", client.post("/v1/detect", json=det_req).json())

    init_req = {
        "frame": frame_b64,
        "objects": [
            {"object_id": 1, "mask": wire.mask_to_wire(gts[0] == 1)},
            {"object_id": 2, "mask": wire.mask_to_wire(gts[0] == 2)},
        ],
    }
    write("propagate_init_request.json", init_req)
    init_resp = client.post("/v1/propagate/init", json=init_req).json()
    write("propagate_init_response.json", init_resp)

    prop_req = {"token": init_resp["token"], "frame": wire.pixels_to_b64(frames[1].pixels)}
    write("propagate_request.json", prop_req)
    write("propagate_response.json", client.post("/v1/propagate", json=prop_req).json())

    err_resp = client.post("/v1/propagate", json={"token": "nope", "frame": frame_b64})
    assert err_resp.status_code == 404
    write("error_response.json", err_resp.json())
    print(f"wrote wire goldens to {WIRE_DIR}")


def make_cli_golden():
    if RUN_DIR.exists():
        shutil.rmtree(RUN_DIR)
    cmd = [
        sys.executable, "-m", "samtrack.cli", "track",
        "--backend", f"oracle:{SCENARIO}",
        "--prompts", str(PROMPTS),
        "--mode", "interactive",
        "--out", str(RUN_DIR),
    ]
    subprocess.run(cmd, check=True, cwd=ROOT)
    print(f"wrote golden run to {RUN_DIR}")


if __name__ == "__main__":
    make_wire_goldens()
    make_cli_golden()
