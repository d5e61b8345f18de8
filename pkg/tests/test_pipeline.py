import numpy as np
import pytest

from samtrack import maskops
from samtrack.backends.base import BackendBundle, PointPrompt, TextPrompt
from samtrack.cmr import CmrConfig
from samtrack.errors import (
    AlreadyCommitted,
    BackendUnavailable,
    EmptyReference,
    NotCommitted,
    StepFailed,
)
from samtrack.harness import Actor, Scenario, oracle_bundle, reference_clicks, render
from samtrack.pipeline import Session, SessionConfig

from conftest import SCENARIOS


def entering_scenario():
    """Object A from frame 0; object B enters at frame 3."""
    return Scenario(
        name="enter", frame_count=6, width=64, height=48,
        actors=(
            Actor(shape="disc", size=(6,), start=(20, 24), velocity=(2, 0), phrase="disc"),
            Actor(shape="rectangle", size=(10, 8), start=(48, 12), entry_frame=3, phrase="box"),
        ),
    )


def make_session(scenario, **cfg_kwargs):
    frames, gts = render(scenario)
    bundle = oracle_bundle(scenario, (frames, gts))
    cfg_kwargs.setdefault("cmr", CmrConfig(t=0.8, min_area=0))
    config = SessionConfig(**cfg_kwargs)
    return Session(config, bundle), frames, gts


def commit_all(session, frames, gts):
    session.set_reference_frame(frames[0])
    for c in reference_clicks(gts):
        session.add_prompt(c)
    return session.commit_reference()


class TestConfig:
    def test_bad_mode(self):
        with pytest.raises(ValueError):
            SessionConfig(mode="psychic")

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            SessionConfig(keyframe_interval=0)

    def test_ooi_needs_text_prompts(self):
        with pytest.raises(ValueError):
            SessionConfig(keyframe_source="object-of-interest")


class TestPrompting:
    def test_click_stages_one_mask(self):
        session, frames, gts = make_session(entering_scenario())
        session.set_reference_frame(frames[0])
        fresh = session.add_prompt(PointPrompt(x=20, y=24))
        assert len(fresh) == 1
        assert np.array_equal(fresh[0].mask, gts[0] == 1)

    def test_text_prompt_stages_per_detection(self):
        sc = Scenario(
            name="two_discs", frame_count=3, width=48, height=36,
            actors=(
                Actor(shape="disc", size=(5,), start=(14, 18), phrase="disc"),
                Actor(shape="disc", size=(4,), start=(34, 12), phrase="disc"),
            ),
        )
        session, frames, _ = make_session(sc)
        session.set_reference_frame(frames[0])
        fresh = session.add_prompt(TextPrompt(phrase="disc"))
        assert len(fresh) == 2
        assert all(s.provenance == "text" for s in fresh)

    def test_prompt_after_commit_rejected(self):
        session, frames, gts = make_session(entering_scenario())
        commit_all(session, frames, gts)
        with pytest.raises(AlreadyCommitted):
            session.add_prompt(PointPrompt(x=20, y=24))

    def test_prompt_without_reference_frame(self):
        session, _, _ = make_session(entering_scenario())
        with pytest.raises(NotCommitted):
            session.add_prompt(PointPrompt(x=1, y=1))

    def test_revoke_stage(self):
        session, frames, gts = make_session(entering_scenario())
        session.set_reference_frame(frames[0])
        session.add_prompt(PointPrompt(x=20, y=24))
        session.revoke_stage(0)
        assert session.staged == []
        with pytest.raises(IndexError):
            session.revoke_stage(0)


class TestCommit:
    def test_single_stage_gets_id_one(self):
        session, frames, gts = make_session(entering_scenario())
        session.set_reference_frame(frames[0])
        session.add_prompt(PointPrompt(x=20, y=24))
        ref = session.commit_reference()
        assert maskops.labels_of(ref) == [1]
        assert np.array_equal(ref == 1, gts[0] == 1)

    def test_ids_follow_staging_order(self):
        sc = Scenario(
            name="two", frame_count=2, width=48, height=36,
            actors=(
                Actor(shape="disc", size=(5,), start=(14, 18), phrase="a"),
                Actor(shape="disc", size=(4,), start=(34, 12), phrase="b"),
            ),
        )
        session, frames, gts = make_session(sc)
        session.set_reference_frame(frames[0])
        session.add_prompt(PointPrompt(x=34, y=12))  # actor 2 staged first
        session.add_prompt(PointPrompt(x=14, y=18))
        ref = session.commit_reference()
        assert np.array_equal(ref == 1, gts[0] == 2)
        assert np.array_equal(ref == 2, gts[0] == 1)

    def test_later_stage_overwrites_overlap(self):
        sc = Scenario(
            name="stack", frame_count=2, width=48, height=36,
            actors=(
                Actor(shape="rectangle", size=(16, 12), start=(24, 18), phrase="big"),
                Actor(shape="disc", size=(4,), start=(28, 18), phrase="small"),
            ),
        )
        session, frames, gts = make_session(sc)
        session.set_reference_frame(frames[0])
        session.add_prompt(PointPrompt(x=16, y=18))  # big rectangle (visible part)
        session.add_prompt(PointPrompt(x=28, y=18))  # disc on top
        ref = session.commit_reference()
        assert np.array_equal(ref == 2, gts[0] == 2)

    def test_empty_reference(self):
        session, frames, _ = make_session(entering_scenario())
        session.set_reference_frame(frames[0])
        with pytest.raises(EmptyReference):
            session.commit_reference()

    def test_double_commit(self):
        session, frames, gts = make_session(entering_scenario())
        commit_all(session, frames, gts)
        with pytest.raises(AlreadyCommitted):
            session.commit_reference()


class TestStepSchedule:
    def test_step_before_commit(self):
        session, frames, _ = make_session(entering_scenario())
        with pytest.raises(NotCommitted):
            session.step(frames[1])

    def test_keyframes_are_multiples_of_n_excluding_zero(self):
        session, frames, gts = make_session(
            entering_scenario(), mode="fusion", keyframe_interval=2
        )
        commit_all(session, frames, gts)
        session.run(frames)
        assert [rec["frame"] for rec in session.cmr_log] == [2, 4]

    def test_out_of_order_step_rejected(self):
        session, frames, gts = make_session(entering_scenario())
        commit_all(session, frames, gts)
        with pytest.raises(ValueError):
            session.step(frames[3])

    def test_entering_object_admitted_at_first_keyframe(self):
        session, frames, gts = make_session(
            entering_scenario(), mode="fusion", keyframe_interval=2
        )
        commit_all(session, frames, gts)
        result = session.run(frames)
        # absent at frame 3, admitted at 4, persists through 5
        assert maskops.labels_of(result.results[3]) == [1]
        assert maskops.labels_of(result.results[4]) == [1, 2]
        assert np.array_equal(result.results[4] == 2, gts[4] == 2)
        assert np.array_equal(result.results[5] == 2, gts[5] == 2)
        assert result.registry.entries[2].birth_frame == 4
        assert result.registry.entries[2].provenance == "keyframe"

    def test_n_beyond_length_equals_interactive(self):
        sc = entering_scenario()
        out = {}
        for mode, n in (("interactive", 8), ("fusion", 99)):
            session, frames, gts = make_session(sc, mode=mode, keyframe_interval=n)
            commit_all(session, frames, gts)
            out[mode] = session.run(frames)
        for a, b in zip(out["interactive"].results, out["fusion"].results):
            assert np.array_equal(a, b)
        assert out["fusion"].cmr_log == []

    def test_determinism(self):
        sc = entering_scenario()
        runs = []
        for _ in range(2):
            session, frames, gts = make_session(sc, mode="fusion", keyframe_interval=2)
            commit_all(session, frames, gts)
            runs.append(session.run(frames))
        for a, b in zip(runs[0].results, runs[1].results):
            assert np.array_equal(a, b)
        assert runs[0].cmr_log == runs[1].cmr_log


class TestAutomaticMode:
    def test_bootstrap_on_empty_first_frame(self):
        sc = Scenario(
            name="late_start", frame_count=6, width=48, height=36,
            actors=(Actor(shape="disc", size=(5,), start=(24, 18), entry_frame=2, phrase="disc"),),
        )
        session, frames, gts = make_session(sc, mode="automatic", keyframe_interval=2)
        result = session.run(frames)
        assert not result.results[0].any()
        assert not result.results[1].any()
        assert maskops.labels_of(result.results[2]) == [1]
        assert np.array_equal(result.results[2] == 1, gts[2] == 1)

    def test_bootstrap_admits_initial_objects(self):
        session, frames, gts = make_session(entering_scenario(), mode="automatic",
                                            keyframe_interval=2)
        result = session.run(frames)
        assert maskops.labels_of(result.results[0]) == [1]
        assert result.registry.entries[1].provenance == "keyframe"
        assert maskops.labels_of(result.results[4]) == [1, 2]

    def test_bootstrap_respects_min_area(self):
        session, frames, _ = make_session(
            entering_scenario(), mode="automatic", keyframe_interval=2,
            cmr=CmrConfig(t=0.8, min_area=10_000),
        )
        result = session.run(frames)
        assert all(not r.any() for r in result.results)

    def test_object_of_interest_path(self):
        session, frames, gts = make_session(
            entering_scenario(), mode="automatic", keyframe_interval=2,
            keyframe_source="object-of-interest",
            text_prompts=(TextPrompt(phrase="disc"),),
        )
        result = session.run(frames)
        # only the disc matches the configured phrase; the box never enters
        for t in range(6):
            assert maskops.labels_of(result.results[t]) == [1]
            assert np.array_equal(result.results[t] == 1, gts[t] == 1)


class FailingPropagator:
    def __init__(self, fail_at):
        self.fail_at = fail_at

    def propagate(self, memory, frame):
        if frame.index >= self.fail_at:
            raise BackendUnavailable("model server went away")
        return memory.latest[1]

    def reinitialize(self, frame, labelmap):
        pass


class TestFailurePolicy:
    def test_backend_failure_aborts_without_advancing(self):
        sc = Scenario(
            name="static", frame_count=5, width=32, height=24,
            actors=(Actor(shape="disc", size=(4,), start=(16, 12), phrase="disc"),),
        )
        frames, gts = render(sc)
        good = oracle_bundle(sc, (frames, gts))
        bundle = BackendBundle(
            segmenter=good.segmenter, detector=good.detector,
            propagator=FailingPropagator(fail_at=3),
        )
        session = Session(SessionConfig(cmr=CmrConfig()), bundle)
        session.set_reference_frame(frames[0])
        session.add_prompt(PointPrompt(x=16, y=12))
        session.commit_reference()
        with pytest.raises(StepFailed) as exc_info:
            session.run(frames)
        assert exc_info.value.frame_index == 3
        assert len(session.results) == 3  # frames 0..2 preserved
        assert session.frame_cursor == 3  # cursor did not advance past the failure

    def test_results_are_append_only_snapshots(self):
        session, frames, gts = make_session(
            entering_scenario(), mode="fusion", keyframe_interval=2
        )
        commit_all(session, frames, gts)
        session.step(frames[1])
        snapshot = [r.copy() for r in session.results]
        session.run(frames)
        for a, b in zip(snapshot, session.results):
            assert np.array_equal(a, b)


class TestIdProperties:
    def test_id_never_appears_before_birth(self, all_scenarios):
        for sc in all_scenarios:
            session, frames, gts = make_session(sc, mode="fusion", keyframe_interval=2)
            commit_all(session, frames, gts)
            result = session.run(frames)
            for oid, entry in result.registry.entries.items():
                for t in range(entry.birth_frame):
                    assert not (result.results[t] == oid).any()

    def test_no_swap_on_fixture_suite(self, all_scenarios):
        from samtrack.harness import verify_run

        for sc in all_scenarios:
            cfg = SessionConfig(mode="fusion", keyframe_interval=2,
                                cmr=CmrConfig(t=0.8, min_area=0))
            report = verify_run(sc, cfg)
            assert report.passed, (sc.name, report.first_divergence)
