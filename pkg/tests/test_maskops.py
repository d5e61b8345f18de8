import numpy as np
import pytest

from samtrack import maskops
from samtrack.errors import DimensionMismatch, EmptyMask, MalformedRuns
from samtrack.maskops import BoundingBox, RleMask

from conftest import random_labelmap, random_mask


def lm(rows):
    return np.array(rows, dtype=np.uint16)


def bm(rows):
    return np.array(rows, dtype=bool)


class TestBackgroundOf:
    def test_all_zero_map_is_all_background(self):
        assert maskops.background_of(np.zeros((4, 4), dtype=np.uint16)).all()

    def test_fully_covered_map_has_no_background(self):
        assert not maskops.background_of(np.full((4, 4), 3, dtype=np.uint16)).any()

    def test_columns(self):
        m = np.zeros((4, 4), dtype=np.uint16)
        m[:, 0:2] = 1
        expected = np.zeros((4, 4), dtype=bool)
        expected[:, 2:4] = True
        assert np.array_equal(maskops.background_of(m), expected)


class TestRestrict:
    def test_all_one_mask_is_identity(self, rng):
        s = random_labelmap(rng)
        assert np.array_equal(maskops.restrict(s, np.ones_like(s, dtype=bool)), s)

    def test_all_zero_mask_clears(self, rng):
        s = random_labelmap(rng)
        assert not maskops.restrict(s, np.zeros_like(s, dtype=bool)).any()

    def test_column_overlap(self):
        s = np.zeros((4, 4), dtype=np.uint16)
        s[:, 1:3] = 7
        m = np.zeros((4, 4), dtype=bool)
        m[:, 2:4] = True
        out = maskops.restrict(s, m)
        expected = np.zeros((4, 4), dtype=np.uint16)
        expected[:, 2] = 7
        assert np.array_equal(out, expected)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            maskops.restrict(np.zeros((4, 4), dtype=np.uint16), np.zeros((4, 5), dtype=bool))

    def test_restrict_by_own_background_empties(self, rng):
        for _ in range(50):
            s = random_labelmap(rng)
            assert not maskops.restrict(s, maskops.background_of(s)).any()

    def test_labels_preserved(self, rng):
        for _ in range(50):
            s = random_labelmap(rng)
            m = random_mask(rng)
            out = maskops.restrict(s, m)
            nz = out != 0
            assert np.array_equal(out[nz], s[nz])


class TestCompose:
    def test_overlay_all_background_is_identity(self, rng):
        t = random_labelmap(rng)
        zero = np.zeros_like(t)
        assert np.array_equal(maskops.compose(t, zero, maskops.BASE_WINS), t)
        assert np.array_equal(maskops.compose(t, zero, maskops.OVERLAY_WINS), t)

    def test_base_wins_on_contested_pixel(self):
        base = lm([[1]])
        overlay = lm([[9]])
        assert maskops.compose(base, overlay, maskops.BASE_WINS)[0, 0] == 1

    def test_two_by_two(self):
        base = lm([[1, 0], [0, 0]])
        overlay = lm([[9, 9], [0, 0]])
        out = maskops.compose(base, overlay, maskops.BASE_WINS)
        assert np.array_equal(out, lm([[1, 9], [0, 0]]))

    def test_base_pixels_never_altered(self, rng):
        for _ in range(50):
            base = random_labelmap(rng)
            overlay = random_labelmap(rng)
            out = maskops.compose(base, overlay, maskops.BASE_WINS)
            nz = base != 0
            assert np.array_equal(out[nz], base[nz])

    def test_unknown_precedence(self):
        with pytest.raises(ValueError):
            maskops.compose(lm([[0]]), lm([[0]]), "coin-flip")


class TestExtractAndArea:
    def test_extract_from_background_map(self):
        assert not maskops.extract(np.zeros((3, 3), dtype=np.uint16), 1).any()

    def test_extract_sole_object(self):
        m = lm([[0, 2], [2, 0]])
        assert np.array_equal(maskops.extract(m, 2), bm([[0, 1], [1, 0]]))

    def test_extract_area_matches_count(self, rng):
        m = random_labelmap(rng)
        assert maskops.area(maskops.extract(m, 2)) == int((m == 2).sum())

    def test_area_empty(self):
        assert maskops.area(np.zeros((4, 4), dtype=bool)) == 0

    def test_area_full(self):
        assert maskops.area(np.ones((4, 4), dtype=bool)) == 16

    def test_area_checkerboard(self):
        yy, xx = np.mgrid[:4, :4]
        assert maskops.area((yy + xx) % 2 == 0) == 8

    def test_partition_totals(self, rng):
        for _ in range(20):
            m = random_labelmap(rng)
            total = sum(maskops.area(maskops.extract(m, i)) for i in maskops.labels_of(m))
            total += maskops.area(maskops.background_of(m))
            assert total == m.size


class TestBoundingBox:
    def test_single_pixel(self):
        m = np.zeros((6, 6), dtype=bool)
        m[3, 2] = True
        assert maskops.bounding_box_of(m) == BoundingBox(2, 3, 2, 3)

    def test_full_frame(self):
        assert maskops.bounding_box_of(np.ones((5, 7), dtype=bool)) == BoundingBox(0, 0, 6, 4)

    def test_two_pixels(self):
        m = np.zeros((4, 4), dtype=bool)
        m[0, 0] = True
        m[1, 3] = True
        assert maskops.bounding_box_of(m) == BoundingBox(0, 0, 3, 1)

    def test_empty_mask_raises(self):
        with pytest.raises(EmptyMask):
            maskops.bounding_box_of(np.zeros((4, 4), dtype=bool))

    def test_degenerate_box_rejected(self):
        with pytest.raises(ValueError):
            BoundingBox(3, 0, 1, 0)


class TestRleCodec:
    def test_all_zero(self):
        r = maskops.rle_encode(np.zeros((2, 2), dtype=bool))
        assert r.runs == (4,)

    def test_all_one(self):
        r = maskops.rle_encode(np.ones((2, 2), dtype=bool))
        assert r.runs == (0, 4)

    def test_alternating(self):
        r = maskops.rle_encode(bm([[1, 0], [0, 1]]))
        assert r.runs == (0, 1, 2, 1)

    def test_roundtrip_random(self, rng):
        for _ in range(1000):
            m = random_mask(rng, p=rng.random_sample())
            assert np.array_equal(maskops.rle_decode(maskops.rle_encode(m)), m)

    def test_decode_rejects_bad_sum(self):
        with pytest.raises(MalformedRuns):
            RleMask(width=2, height=2, runs=(3,))

    def test_decode_rejects_inner_zero_run(self):
        with pytest.raises(MalformedRuns):
            RleMask(width=2, height=2, runs=(1, 0, 3))

    def test_decode_rejects_negative_run(self):
        with pytest.raises(MalformedRuns):
            RleMask(width=2, height=2, runs=(-1, 5))

    def test_leading_zero_allowed_only_first(self):
        r = RleMask(width=2, height=2, runs=(0, 4))
        assert maskops.rle_decode(r).all()


def flood_fill_components(mask):
    """Independent oracle: BFS flood fill, 4-connectivity, raster seed order."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    seen = np.zeros((h, w), dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or seen[y, x]:
                continue
            comp = np.zeros((h, w), dtype=bool)
            stack = [(y, x)]
            seen[y, x] = True
            while stack:
                cy, cx = stack.pop()
                comp[cy, cx] = True
                for ny, nx in ((cy - 1, cx), (cy + 1, cx), (cy, cx - 1), (cy, cx + 1)):
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            comps.append(comp)
    return comps


class TestConnectedComponents:
    def test_empty_mask(self):
        assert maskops.connected_components(np.zeros((4, 4), dtype=bool)) == []

    def test_solid_block(self):
        m = np.zeros((5, 5), dtype=bool)
        m[1:4, 1:3] = True
        comps = maskops.connected_components(m)
        assert len(comps) == 1
        assert np.array_equal(comps[0], m)

    def test_diagonal_pixels_stay_separate(self):
        m = bm([[1, 0], [0, 1]])
        comps = maskops.connected_components(m)
        assert len(comps) == 2

    def test_matches_flood_fill_oracle(self, rng):
        for _ in range(100):
            m = random_mask(rng, p=rng.random_sample())
            got = maskops.connected_components(m)
            want = flood_fill_components(m)
            assert len(got) == len(want)
            for g, w_ in zip(got, want):
                assert np.array_equal(g, w_)

    def test_disjoint_and_cover(self, rng):
        for _ in range(50):
            m = random_mask(rng)
            comps = maskops.connected_components(m)
            union = np.zeros_like(m)
            for c in comps:
                assert not (union & c).any()
                union |= c
            assert np.array_equal(union, m)
