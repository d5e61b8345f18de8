#!/usr/bin/env python3
"""Regenerate the checked-in scenario fixtures and prompt scripts.

Run from the repo root: python3 scripts/make_fixtures.py
"""
import json
from pathlib import Path

from samtrack.harness import Actor, Scenario, render, reference_clicks, save_scenario

ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = ROOT / "fixtures" / "scenarios"
PROMPT_DIR = ROOT / "fixtures" / "prompts"


def scenarios():
    yield Scenario(
        name="static_single_disc", frame_count=6, width=64, height=48,
        actors=(Actor(shape="disc", size=(7,), start=(30, 24), phrase="disc"),),
    )
    yield Scenario(
        name="static_two_discs", frame_count=6, width=64, height=48,
        actors=(
            Actor(shape="disc", size=(6,), start=(18, 22), phrase="disc"),
            Actor(shape="disc", size=(5,), start=(46, 28), phrase="disc"),
        ),
    )
    yield Scenario(
        name="static_rect_pair", frame_count=5, width=64, height=48,
        actors=(
            Actor(shape="rectangle", size=(14, 10), start=(16, 14), phrase="box"),
            Actor(shape="disc", size=(6,), start=(44, 32), phrase="disc"),
        ),
    )
    yield Scenario(
        name="translate_disc", frame_count=6, width=80, height=60,
        actors=(Actor(shape="disc", size=(6,), start=(16, 20), velocity=(6, 4), phrase="disc"),),
    )
    yield Scenario(
        name="translate_two_rects", frame_count=6, width=80, height=60,
        actors=(
            Actor(shape="rectangle", size=(10, 8), start=(16, 14), velocity=(5, 0), phrase="box"),
            Actor(shape="rectangle", size=(8, 12), start=(60, 44), velocity=(-4, 0), phrase="box"),
        ),
    )
    yield Scenario(
        name="translate_mixed", frame_count=8, width=96, height=64,
        actors=(
            Actor(shape="disc", size=(7,), start=(20, 16), velocity=(4, 3), phrase="disc"),
            Actor(shape="rectangle", size=(12, 10), start=(70, 46), velocity=(-3, -2), phrase="box"),
        ),
    )
    yield Scenario(
        name="enter_disc_n2", frame_count=8, width=64, height=48,
        actors=(
            Actor(shape="rectangle", size=(12, 10), start=(18, 16), phrase="box"),
            Actor(shape="disc", size=(5,), start=(48, 34), entry_frame=3, phrase="disc"),
        ),
    )
    yield Scenario(
        name="enter_rect_late", frame_count=9, width=64, height=48,
        actors=(
            Actor(shape="disc", size=(6,), start=(20, 24), phrase="disc"),
            Actor(shape="rectangle", size=(10, 8), start=(46, 14), velocity=(0, 2),
                  entry_frame=5, phrase="box"),
        ),
    )
    yield Scenario(
        name="enter_two_staggered", frame_count=10, width=80, height=60,
        actors=(
            Actor(shape="disc", size=(6,), start=(16, 16), phrase="disc"),
            Actor(shape="rectangle", size=(10, 8), start=(60, 16), entry_frame=2, phrase="box"),
            Actor(shape="disc", size=(5,), start=(40, 46), entry_frame=5, phrase="disc"),
        ),
    )
    yield Scenario(
        name="exit_disc", frame_count=7, width=64, height=48,
        actors=(
            Actor(shape="rectangle", size=(12, 10), start=(18, 30), phrase="box"),
            Actor(shape="disc", size=(5,), start=(44, 14), exit_frame=3, phrase="disc"),
        ),
    )
    yield Scenario(
        name="exit_rect_early", frame_count=6, width=64, height=48,
        actors=(
            Actor(shape="rectangle", size=(10, 8), start=(46, 36), exit_frame=1, phrase="box"),
            Actor(shape="disc", size=(7,), start=(20, 18), phrase="disc"),
        ),
    )
    yield Scenario(
        name="occlude_crossing", frame_count=8, width=96, height=64,
        actors=(
            Actor(shape="rectangle", size=(12, 10), start=(22, 32), velocity=(4, 0), phrase="box"),
            Actor(shape="disc", size=(6,), start=(66, 32), velocity=(-4, 0), phrase="disc"),
        ),
    )
    yield Scenario(
        name="occlude_partial_static", frame_count=5, width=64, height=48,
        actors=(
            Actor(shape="rectangle", size=(16, 12), start=(26, 24), phrase="box"),
            Actor(shape="disc", size=(6,), start=(36, 24), phrase="disc"),
        ),
    )
    # entering actor half-covered by the tracked rectangle (which sits above
    # it in z-order); its visible area is half its footprint at admission time
    yield Scenario(
        name="enter_occluded", frame_count=10, width=64, height=48,
        actors=(
            Actor(shape="rectangle", size=(8, 8), start=(32, 24), entry_frame=3, phrase="late"),
            Actor(shape="rectangle", size=(16, 12), start=(24, 24), phrase="box"),
        ),
    )
    yield Scenario(
        name="reenter_disc", frame_count=6, width=64, height=48,
        actors=(
            Actor(shape="disc", size=(5,),
                  positions=((14, 12), (-20, 12), (-20, 12), (14, 12), (14, 12), (14, 12)),
                  phrase="disc"),
            Actor(shape="rectangle", size=(12, 8), start=(44, 34), phrase="box"),
        ),
    )


def main():
    SCENARIO_DIR.mkdir(parents=True, exist_ok=True)
    PROMPT_DIR.mkdir(parents=True, exist_ok=True)
    names = []
    for sc in scenarios():
        sc.validate()
        save_scenario(SCENARIO_DIR / f"{sc.name}.json", sc)
        names.append(sc.name)
    # click scripts for the golden CLI run and the service differential test
    for name in names:
        sc_doc = json.loads((SCENARIO_DIR / f"{name}.json").read_text())
        sc = Scenario.from_dict(sc_doc)
        _, gts = render(sc)
        clicks = [
            {"type": "point", "x": c.x, "y": c.y, "polarity": "positive"}
            for c in reference_clicks(gts)
        ]
        (PROMPT_DIR / f"{name}.json").write_text(
            json.dumps({"prompts": clicks}, indent=2, sort_keys=True) + "\n"
        )
    print(f"wrote {len(names)} scenarios + prompt scripts")


if __name__ == "__main__":
    main()
