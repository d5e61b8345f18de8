"""Synthetic ground-truth videos and end-to-end verification.

Scenarios describe rectangles and discs moving on a black background;
rasterization is analytic (no anti-aliasing) so tests can assert exact mask
equality. verify_run replays a scenario through the pipeline with oracle
backends and checks the output against an independent simulation of the
tracking schedule computed directly from the ground truth.
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import maskops, metrics
from .backends.base import Frame, PointPrompt
from .backends.oracle import oracle_backend_bundle
from .errors import InvalidScenario
from .pipeline import (
    AUTOMATIC,
    FUSION,
    OBJECT_OF_INTEREST,
    Session,
)


@dataclass(frozen=True)
class Actor:
    shape: str  # rectangle | disc
    size: tuple  # rectangle: (w, h); disc: (radius,)
    start: Optional[tuple] = None
    velocity: tuple = (0, 0)
    positions: Optional[tuple] = None  # explicit per-frame centers, entry..exit
    entry_frame: int = 0
    exit_frame: Optional[int] = None
    phrase: str = ""

    def position_at(self, t):
        if self.positions is not None:
            return self.positions[t - self.entry_frame]
        dx, dy = self.velocity
        steps = t - self.entry_frame
        return (self.start[0] + dx * steps, self.start[1] + dy * steps)


@dataclass(frozen=True)
class Scenario:
    name: str
    frame_count: int
    width: int
    height: int
    actors: tuple
    seed: int = 0

    def actor_exit(self, actor):
        return self.frame_count - 1 if actor.exit_frame is None else actor.exit_frame

    def validate(self):
        if self.frame_count < 1 or self.width < 1 or self.height < 1:
            raise InvalidScenario(f"{self.name}: bad dimensions")
        for i, a in enumerate(self.actors):
            exit_frame = self.actor_exit(a)
            if not 0 <= a.entry_frame <= exit_frame < self.frame_count:
                raise InvalidScenario(f"{self.name}: actor {i} lifespan out of range")
            if a.shape == "rectangle":
                if len(a.size) != 2 or a.size[0] < 1 or a.size[1] < 1:
                    raise InvalidScenario(f"{self.name}: actor {i} bad rectangle size")
            elif a.shape == "disc":
                if len(a.size) != 1 or a.size[0] < 1:
                    raise InvalidScenario(f"{self.name}: actor {i} bad disc radius")
            else:
                raise InvalidScenario(f"{self.name}: actor {i} unknown shape {a.shape!r}")
            if a.positions is not None:
                if len(a.positions) != exit_frame - a.entry_frame + 1:
                    raise InvalidScenario(f"{self.name}: actor {i} positions length mismatch")
            elif a.start is None:
                raise InvalidScenario(f"{self.name}: actor {i} needs start or positions")

    def to_dict(self):
        actors = []
        for a in self.actors:
            d = {
                "shape": a.shape,
                "size": list(a.size),
                "entry_frame": a.entry_frame,
                "phrase": a.phrase,
            }
            if a.exit_frame is not None:
                d["exit_frame"] = a.exit_frame
            if a.positions is not None:
                d["positions"] = [list(p) for p in a.positions]
            else:
                d["start"] = list(a.start)
                d["velocity"] = list(a.velocity)
            actors.append(d)
        return {
            "name": self.name,
            "frames": self.frame_count,
            "width": self.width,
            "height": self.height,
            "seed": self.seed,
            "actors": actors,
        }

    @classmethod
    def from_dict(cls, d):
        actors = []
        for ad in d.get("actors", []):
            actors.append(
                Actor(
                    shape=ad["shape"],
                    size=tuple(ad["size"]),
                    start=tuple(ad["start"]) if "start" in ad else None,
                    velocity=tuple(ad.get("velocity", (0, 0))),
                    positions=tuple(tuple(p) for p in ad["positions"]) if "positions" in ad else None,
                    entry_frame=int(ad.get("entry_frame", 0)),
                    exit_frame=int(ad["exit_frame"]) if "exit_frame" in ad else None,
                    phrase=ad.get("phrase", ""),
                )
            )
        sc = cls(
            name=d["name"],
            frame_count=int(d["frames"]),
            width=int(d["width"]),
            height=int(d["height"]),
            actors=tuple(actors),
            seed=int(d.get("seed", 0)),
        )
        sc.validate()
        return sc


def load_scenario(path):
    return Scenario.from_dict(json.loads(Path(path).read_text()))


def save_scenario(path, scenario):
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2, sort_keys=True) + "\n")


def actor_intensity(index):
    return 60 + (37 * index) % 180


def _support(actor, pos, width, height):
    cx, cy = pos
    mask = np.zeros((height, width), dtype=bool)
    if actor.shape == "rectangle":
        w, h = actor.size
        x0, y0 = cx - w // 2, cy - h // 2
        xs0, xs1 = max(0, x0), min(width, x0 + w)
        ys0, ys1 = max(0, y0), min(height, y0 + h)
        if xs0 < xs1 and ys0 < ys1:
            mask[ys0:ys1, xs0:xs1] = True
    else:
        r = actor.size[0]
        yy, xx = np.ogrid[:height, :width]
        mask = (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
    return mask


def render(scenario):
    """Rasterize a scenario into frames and ground-truth label maps.

    Actor z-order follows list order (later occludes earlier); gt label of
    actor i is i+1; actors off-frame are clipped.
    """
    scenario.validate()
    palette = np.zeros(len(scenario.actors) + 1, dtype=np.uint8)
    for i in range(len(scenario.actors)):
        palette[i + 1] = actor_intensity(i)
    frames, gts = [], []
    for t in range(scenario.frame_count):
        lm = np.zeros((scenario.height, scenario.width), dtype=np.uint16)
        for i, actor in enumerate(scenario.actors):
            if not actor.entry_frame <= t <= scenario.actor_exit(actor):
                continue
            lm[_support(actor, actor.position_at(t), scenario.width, scenario.height)] = i + 1
        frames.append(Frame(index=t, pixels=palette[lm]))
        gts.append(lm)
    return frames, gts


def oracle_bundle(scenario, rendered=None):
    """Perfect-model backends answering from the scenario's ground truth."""
    frames, gts = rendered if rendered is not None else render(scenario)
    phrases = {i + 1: a.phrase for i, a in enumerate(scenario.actors)}
    return oracle_backend_bundle(frames, gts, phrases)


def reference_clicks(gts):
    """One positive click per actor visible at frame 0 (its first raster pixel),
    in ascending label order."""
    clicks = []
    for label in maskops.labels_of(gts[0]):
        flat = int(np.flatnonzero((gts[0] == label).ravel())[0])
        w = gts[0].shape[1]
        clicks.append(PointPrompt(x=flat % w, y=flat // w, polarity="positive"))
    return clicks


@dataclass
class TrackEvent:
    """One expected tracked lifetime of an actor: admission to drop."""

    actor: int  # gt label
    start: int  # frame where the pipeline must first emit it
    masks: dict = field(default_factory=dict)  # frame -> expected exact mask
    matched_id: Optional[int] = None


def _eligible(scenario, config, label):
    if config.mode in (AUTOMATIC, FUSION) and config.keyframe_source == OBJECT_OF_INTEREST:
        phrases = {tp.phrase for tp in config.text_prompts}
        return scenario.actors[label - 1].phrase in phrases
    return True


def expected_events(scenario, gts, config, initial_actors):
    """Independent simulation of the tracking schedule, straight from gt.

    initial_actors are the labels seeded at frame 0 (clicked, or admitted by
    the automatic bootstrap). Returns the list of expected track events.
    """
    n = config.keyframe_interval
    events, active = [], {}

    def begin(label, t, mask):
        ev = TrackEvent(actor=label, start=t, masks={t: mask})
        active[label] = ev
        events.append(ev)

    for label in initial_actors:
        begin(label, 0, gts[0] == label)
    for t in range(1, scenario.frame_count):
        for label in list(active):
            vis = gts[t] == label
            if not vis.any():
                del active[label]
            else:
                active[label].masks[t] = vis
        is_key = config.mode in (AUTOMATIC, FUSION) and t % n == 0
        if not is_key:
            continue
        support = np.zeros_like(gts[t], dtype=bool)
        for ev in active.values():
            support |= ev.masks[t]
        for label in maskops.labels_of(gts[t]):
            if label in active or not _eligible(scenario, config, label):
                continue
            vis = gts[t] == label
            new = vis & ~support
            xs = int(np.count_nonzero(vis))
            xn = int(np.count_nonzero(new))
            if xn / xs > config.cmr.t and xn >= config.cmr.min_area:
                begin(label, t, new)
    return events


def bootstrap_actors(scenario, gts, config):
    """Labels the automatic bootstrap admits on frame 0."""
    out = []
    for label in maskops.labels_of(gts[0]):
        if not _eligible(scenario, config, label):
            continue
        if int(np.count_nonzero(gts[0] == label)) >= config.cmr.min_area:
            out.append(label)
    return out


@dataclass
class VerifyReport:
    scenario: str
    mode: str
    passed: bool
    frame_count: int
    first_divergence: Optional[tuple]  # (frame, message)
    id_to_actor: dict  # emitted ObjectID -> gt actor label
    admissions: list  # (frame, actor label, object id) for key-frame admissions
    expected_admissions: list  # (frame, actor label)
    unmatched_actors: list  # visible actors never tracked (flag, not failure)
    mean_j: float
    mean_f: float

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "mode": self.mode,
            "passed": self.passed,
            "frame_count": self.frame_count,
            "first_divergence": list(self.first_divergence) if self.first_divergence else None,
            "id_to_actor": {str(k): v for k, v in sorted(self.id_to_actor.items())},
            "admissions": [list(a) for a in self.admissions],
            "expected_admissions": [list(a) for a in self.expected_admissions],
            "unmatched_actors": self.unmatched_actors,
            "mean_j": self.mean_j,
            "mean_f": self.mean_f,
        }


def run_session(scenario, config, rendered=None):
    """Drive a full pipeline run with oracle backends; returns (session result,
    rendered pair)."""
    frames, gts = rendered if rendered is not None else render(scenario)
    bundle = oracle_bundle(scenario, (frames, gts))
    session = Session(config, bundle)
    if config.mode != AUTOMATIC:
        session.set_reference_frame(frames[0])
        for click in reference_clicks(gts):
            session.add_prompt(click)
        session.commit_reference()
    result = session.run(frames)
    return result, (frames, gts)


def verify_run(scenario, config):
    """Run the pipeline on a scenario and check it against the gt simulation.

    Emitted IDs are matched to expected track events by first-appearance
    overlap (IoU > 0.5); every frame of every event must match exactly, and
    the ID-to-actor correspondence must stay constant. Failures land in the
    report, never as exceptions.
    """
    result, (frames, gts) = run_session(scenario, config)
    if config.mode == AUTOMATIC:
        initial = bootstrap_actors(scenario, gts, config)
    else:
        initial = maskops.labels_of(gts[0])
    events = expected_events(scenario, gts, config, initial)

    emitted_ids = sorted({l for r in result.results for l in maskops.labels_of(r)})
    divergence = None
    id_to_actor = {}
    for oid in emitted_ids:
        first = next(t for t, r in enumerate(result.results) if maskops.area(r == oid))
        mask0 = result.results[first] == oid
        match = None
        for ev in events:
            if ev.matched_id is not None or ev.start != first:
                continue
            if metrics.jaccard(mask0, ev.masks[first]) > 0.5:
                match = ev
                break
        if match is None:
            divergence = divergence or (first, f"ID {oid} has no expected track starting at frame {first}")
            continue
        match.matched_id = oid
        id_to_actor[oid] = match.actor
    for ev in events:
        if ev.matched_id is None:
            divergence = divergence or (ev.start, f"expected admission of actor {ev.actor} at frame {ev.start} missing")

    j_vals, f_vals = [], []
    for ev in events:
        if ev.matched_id is None:
            continue
        for t in range(scenario.frame_count):
            got = result.results[t] == ev.matched_id
            want = ev.masks.get(t)
            want = want if want is not None else np.zeros_like(got)
            if not np.array_equal(got, want):
                divergence = divergence or (
                    t,
                    f"ID {ev.matched_id} (actor {ev.actor}) mask mismatch at frame {t}",
                )
            if t >= 1 and t in ev.masks:
                j_vals.append(metrics.jaccard(got, want))
                f_vals.append(metrics.boundary_f(got, want, metrics.default_tolerance(*got.shape)))

    ever_visible = sorted({l for g in gts for l in maskops.labels_of(g)})
    covered = {ev.actor for ev in events if ev.matched_id is not None}
    return VerifyReport(
        scenario=scenario.name,
        mode=config.mode,
        passed=divergence is None,
        frame_count=scenario.frame_count,
        first_divergence=divergence,
        id_to_actor=id_to_actor,
        admissions=[
            (ev.start, ev.actor, ev.matched_id)
            for ev in events
            if ev.start > 0 and ev.matched_id is not None
        ],
        expected_admissions=[(ev.start, ev.actor) for ev in events if ev.start > 0],
        unmatched_actors=[a for a in ever_visible if a not in covered],
        mean_j=sum(j_vals) / len(j_vals) if j_vals else 1.0,
        mean_f=sum(f_vals) / len(f_vals) if f_vals else 1.0,
    )
