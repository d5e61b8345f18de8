import math

import numpy as np
import pytest
from PIL import Image

from samtrack import metrics, pngio
from samtrack.errors import (
    DimensionMismatch,
    EmptySequence,
    LengthMismatch,
    MissingFrame,
    PaletteMismatch,
)
from samtrack.metrics import GroundTruthSequence

from conftest import random_labelmap, random_mask
from oracles import boundary_f_oracle, evaluate_oracle


class TestJaccard:
    def test_identical(self, rng):
        m = random_mask(rng)
        assert metrics.jaccard(m, m) == 1.0

    def test_disjoint(self):
        a = np.zeros((4, 4), dtype=bool)
        b = np.zeros((4, 4), dtype=bool)
        a[0, 0] = True
        b[3, 3] = True
        assert metrics.jaccard(a, b) == 0.0

    def test_offset_blocks(self):
        a = np.zeros((4, 4), dtype=bool)
        b = np.zeros((4, 4), dtype=bool)
        a[0:2, 0:2] = True
        b[0:2, 1:3] = True
        assert metrics.jaccard(a, b) == pytest.approx(1 / 3)

    def test_both_empty(self):
        z = np.zeros((4, 4), dtype=bool)
        assert metrics.jaccard(z, z) == 1.0

    def test_symmetry(self, rng):
        for _ in range(100):
            a, b = random_mask(rng), random_mask(rng)
            assert metrics.jaccard(a, b) == metrics.jaccard(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            metrics.jaccard(np.zeros((2, 2), dtype=bool), np.zeros((3, 3), dtype=bool))


class TestBoundaryF:
    def test_identical(self, rng):
        m = random_mask(rng, p=0.3)
        if m.any():
            assert metrics.boundary_f(m, m, 1) == 1.0

    def test_one_empty(self):
        gt = np.zeros((4, 4), dtype=bool)
        gt[1:3, 1:3] = True
        assert metrics.boundary_f(np.zeros((4, 4), dtype=bool), gt, 2) == 0.0

    def test_both_empty(self):
        z = np.zeros((4, 4), dtype=bool)
        assert metrics.boundary_f(z, z, 2) == 1.0

    def test_single_pixels_beyond_tolerance(self):
        a = np.zeros((5, 5), dtype=bool)
        b = np.zeros((5, 5), dtype=bool)
        a[2, 0] = True
        b[2, 2] = True  # distance 2
        assert metrics.boundary_f(a, b, 1) == 0.0
        assert metrics.boundary_f(a, b, 2) == 1.0

    def test_symmetry(self, rng):
        for _ in range(50):
            a, b = random_mask(rng), random_mask(rng)
            assert metrics.boundary_f(a, b, 1) == metrics.boundary_f(b, a, 1)

    def test_tolerance_monotone(self, rng):
        for _ in range(50):
            a, b = random_mask(rng), random_mask(rng)
            vals = [metrics.boundary_f(a, b, tol) for tol in range(0, 5)]
            assert all(x <= y + 1e-12 for x, y in zip(vals, vals[1:]))

    def test_matches_oracle(self, rng):
        for _ in range(50):
            a, b = random_mask(rng, 10, 10, p=0.3), random_mask(rng, 10, 10, p=0.3)
            for tol in (0, 1, 2):
                got = metrics.boundary_f(a, b, tol)
                want = boundary_f_oracle(a.tolist(), b.tolist(), tol)
                assert got == pytest.approx(want, abs=1e-12)


class TestDefaultTolerance:
    def test_davis_480p(self):
        assert metrics.default_tolerance(480, 854) == 8

    def test_small_frame(self):
        assert metrics.default_tolerance(16, 16) == math.ceil(0.008 * math.sqrt(512))


class TestEvaluate:
    def test_perfect_prediction(self, rng):
        maps = [random_labelmap(rng) for _ in range(4)]
        gt = GroundTruthSequence(name="toy", labelmaps=maps)
        rep = metrics.evaluate(maps, gt, tol=2)
        assert rep.mean_j == 1.0 and rep.mean_f == 1.0 and rep.avg == 1.0

    def test_all_background_prediction(self):
        gt_map = np.zeros((8, 8), dtype=np.uint16)
        gt_map[2:5, 2:5] = 1
        gt = GroundTruthSequence(name="toy", labelmaps=[gt_map] * 3)
        preds = [np.zeros((8, 8), dtype=np.uint16)] * 3
        rep = metrics.evaluate(preds, gt, tol=2)
        assert rep.per_object[1]["j_mean"] == 0.0

    def test_avg_identity(self, rng):
        maps = [random_labelmap(rng) for _ in range(3)]
        preds = [random_labelmap(rng) for _ in range(3)]
        gt = GroundTruthSequence(name="toy", labelmaps=maps)
        rep = metrics.evaluate(preds, gt, tol=1)
        assert rep.avg == (rep.mean_j + rep.mean_f) / 2

    def test_matches_oracle(self, rng):
        for _ in range(10):
            gts = [random_labelmap(rng, max_label=3) for _ in range(4)]
            preds = [random_labelmap(rng, max_label=3) for _ in range(4)]
            gt = GroundTruthSequence(name="toy", labelmaps=gts)
            rep = metrics.evaluate(preds, gt, tol=2)
            mj, mf, avg = evaluate_oracle(preds, gts, gt.object_ids, 2)
            assert rep.mean_j == pytest.approx(mj, abs=1e-9)
            assert rep.mean_f == pytest.approx(mf, abs=1e-9)
            assert rep.avg == pytest.approx(avg, abs=1e-9)

    def test_length_mismatch(self, rng):
        maps = [random_labelmap(rng) for _ in range(3)]
        gt = GroundTruthSequence(name="toy", labelmaps=maps)
        with pytest.raises(LengthMismatch):
            metrics.evaluate(maps[:2], gt)

    def test_exclude_first_skips_reference(self):
        a = np.zeros((6, 6), dtype=np.uint16)
        a[1:3, 1:3] = 1
        b = np.zeros((6, 6), dtype=np.uint16)
        gt = GroundTruthSequence(name="toy", labelmaps=[a, a])
        # prediction wrong only at frame 0
        rep = metrics.evaluate([b, a], gt, tol=1, exclude_first=True)
        assert rep.mean_j == 1.0
        rep_all = metrics.evaluate([b, a], gt, tol=1, exclude_first=False)
        assert rep_all.mean_j == 0.5


def write_toy_davis(root, n_frames=3, rgb_annotation=False, drop_one=False):
    img_dir = root / "images" / "toy"
    ann_dir = root / "annotations" / "toy"
    img_dir.mkdir(parents=True)
    ann_dir.mkdir(parents=True)
    lm = np.zeros((8, 8), dtype=np.uint16)
    lm[2:5, 2:5] = 1
    for i in range(n_frames):
        Image.fromarray(np.full((8, 8), 90, dtype=np.uint8), mode="L").save(
            img_dir / f"{i:05d}.jpg"
        )
        if drop_one and i == n_frames - 1:
            continue
        if rgb_annotation:
            Image.fromarray(np.zeros((8, 8, 3), dtype=np.uint8), mode="RGB").save(
                ann_dir / f"{i:05d}.png"
            )
        else:
            pngio.save_labelmap(ann_dir / f"{i:05d}.png", lm)
    return lm


class TestReadDavis:
    def test_well_formed(self, tmp_path):
        lm = write_toy_davis(tmp_path)
        frames, gt = metrics.read_davis(tmp_path, "toy")
        assert len(frames) == 3
        assert len(gt) == 3
        assert gt.object_ids == [1]
        assert np.array_equal(gt.labelmaps[0], lm)

    def test_count_mismatch(self, tmp_path):
        write_toy_davis(tmp_path, drop_one=True)
        with pytest.raises(MissingFrame):
            metrics.read_davis(tmp_path, "toy")

    def test_rgb_annotation_rejected(self, tmp_path):
        write_toy_davis(tmp_path, rgb_annotation=True)
        with pytest.raises(PaletteMismatch):
            metrics.read_davis(tmp_path, "toy")

    def test_unknown_sequence(self, tmp_path):
        write_toy_davis(tmp_path)
        with pytest.raises(EmptySequence):
            metrics.read_davis(tmp_path, "nope")


class TestPngIo:
    def test_labelmap_roundtrip_palette(self, tmp_path, rng):
        lm = random_labelmap(rng, max_label=7)
        p = tmp_path / "x.png"
        pngio.save_labelmap(p, lm)
        assert np.array_equal(pngio.load_labelmap(p), lm)
        assert Image.open(p).mode == "P"

    def test_labelmap_roundtrip_gray16(self, tmp_path):
        lm = np.zeros((6, 6), dtype=np.uint16)
        lm[0, 0] = 300  # beyond 255 concurrent labels -> gray16 + sidecar
        p = tmp_path / "big.png"
        pngio.save_labelmap(p, lm)
        assert np.array_equal(pngio.load_labelmap(p), lm)
        assert (tmp_path / ("big.png" + pngio.SIDECAR_SUFFIX)).exists()

    def test_palette_is_voc_colormap(self):
        pal = pngio.color_palette()
        assert tuple(pal[0]) == (0, 0, 0)
        assert tuple(pal[1]) == (128, 0, 0)
        assert tuple(pal[2]) == (0, 128, 0)
        assert tuple(pal[15]) == (192, 128, 128)
