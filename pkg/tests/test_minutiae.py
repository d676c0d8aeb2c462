import numpy as np
import pytest

from minutia import minutiae
from minutia.corepoint import CorePoint
from minutia.minutiae import BIFURCATION, TERMINATION, Minutia


class TestBinarize:
    def test_half_dark_half_bright(self):
        img = np.zeros((32, 32), dtype=np.uint8)
        img[:, :16] = 20
        img[:, 16:] = 200
        out = minutiae.binarize_adaptive(img)
        assert (out[:, :16] == 1).all()
        assert (out[:, 16:] == 0).all()

    def test_constant_block_all_zero(self):
        img = np.full((32, 32), 77, dtype=np.uint8)
        assert minutiae.binarize_adaptive(img).sum() == 0

    def test_grating_matches_per_pixel_oracle(self):
        r = np.arange(64)[:, None]
        img = (127.5 + 100 * np.sin(2 * np.pi * r / 12.0) * np.ones((1, 64))).astype(np.uint8)
        out = minutiae.binarize_adaptive(img)
        # oracle: same thresholds computed independently per block
        expected = np.zeros_like(out)
        for br in range(0, 64, 32):
            for bc in range(0, 64, 32):
                tile = img[br : br + 32, bc : bc + 32].astype(float)
                expected[br : br + 32, bc : bc + 32] = tile < tile.mean()
        assert np.array_equal(out, expected)
        assert abs(int(out[:, 0].sum()) - 32) <= 8  # roughly half the rows are ridge


class TestCrossingNumber:
    def test_isolated_pixel(self):
        s = np.zeros((5, 5), dtype=np.uint8)
        s[2, 2] = 1
        assert minutiae.crossing_number(s, 2, 2) == 0

    def test_line_interior(self):
        s = np.zeros((5, 7), dtype=np.uint8)
        s[2, 1:6] = 1
        assert minutiae.crossing_number(s, 3, 2) == 2

    def test_line_end(self):
        s = np.zeros((5, 7), dtype=np.uint8)
        s[2, 1:6] = 1
        assert minutiae.crossing_number(s, 1, 2) == 1

    def test_y_junction(self):
        s = np.zeros((7, 7), dtype=np.uint8)
        s[3, 3] = 1
        s[2, 3] = 1       # up
        s[4, 2] = 1       # down-left
        s[4, 4] = 1       # down-right
        assert minutiae.crossing_number(s, 3, 3) == 3

    def test_cross(self):
        s = np.zeros((7, 7), dtype=np.uint8)
        s[3, 3] = 1
        s[2, 2] = s[2, 4] = s[4, 2] = s[4, 4] = 1
        assert minutiae.crossing_number(s, 3, 3) == 4

    def test_border_neighbors_read_zero(self):
        s = np.ones((3, 3), dtype=np.uint8)
        assert minutiae.crossing_number(s, 0, 0) in range(5)

    @pytest.mark.parametrize("seed", range(5))
    def test_range_on_thin_skeletons(self, seed):
        from minutia import thinning
        from tests.conftest import grating

        rng = np.random.default_rng(seed)
        img = grating(64, 64, rng.uniform(0, np.pi), period=10)
        skel = thinning.thin_binary_baseline((img < 128).astype(np.uint8))
        cn_map = np.vectorize(lambda y, x: minutiae.crossing_number(skel, x, y))
        ys, xs = np.nonzero(skel)
        for y, x in zip(ys[:50], xs[:50]):
            assert 0 <= minutiae.crossing_number(skel, x, y) <= 4


class TestExtract:
    def test_full_span_line_filtered_by_border_rule(self):
        s = np.zeros((40, 60), dtype=np.uint8)
        s[20, :] = 1
        assert minutiae.extract_minutiae(s) == []

    def test_t_junction_keeps_single_bifurcation(self):
        s = np.zeros((80, 80), dtype=np.uint8)
        s[40, 10:71] = 1    # horizontal bar
        s[41:71, 40] = 1    # stem down
        found = minutiae.extract_minutiae(s)
        assert [m.kind for m in found] == [BIFURCATION]
        assert (found[0].x, found[0].y) == (40, 40)

    @staticmethod
    def _frame(s):
        # surrounding ridges so interior endpoints pass the border rule
        s[5, 2:78] = 1
        s[75, 2:78] = 1
        s[5:76, 2] = 1
        s[5:76, 77] = 1

    def test_short_spur_erased(self):
        s = np.zeros((80, 80), dtype=np.uint8)
        self._frame(s)
        s[40, 5:76] = 1
        s[41:49, 20] = 1    # 8-px spur: below the length threshold
        found = minutiae.extract_minutiae(s)
        # the spur is traced and erased, so no bifurcation survives at its root
        assert not any(m.kind == BIFURCATION for m in found)

    def test_clustered_bifurcations_removed(self):
        s = np.zeros((90, 90), dtype=np.uint8)
        s[45, 5:86] = 1
        s[46:86, 30] = 1    # two long stems 8 px apart: windows overlap
        s[46:86, 38] = 1
        found = minutiae.extract_minutiae(s)
        assert not any(m.kind == BIFURCATION for m in found)

    def test_separated_bifurcations_survive(self):
        s = np.zeros((100, 120), dtype=np.uint8)
        s[50, 5:116] = 1
        s[51:91, 30] = 1    # stems 60 px apart: windows disjoint
        s[51:91, 90] = 1
        found = minutiae.extract_minutiae(s)
        bifs = [m for m in found if m.kind == BIFURCATION]
        assert len(bifs) == 2

    def test_no_cn2_pixels_returned(self):
        from minutia import thinning
        from tests.conftest import grating

        img = grating(96, 96, 0.6, period=11)
        skel = thinning.thin_binary_baseline((img < 128).astype(np.uint8))
        for m in minutiae.extract_minutiae(skel):
            y, x = m.y, m.x
            assert minutiae.crossing_number(skel, x, y) != 2


class TestBuildTable:
    def test_single_close_termination(self):
        table = minutiae.build_table(
            [Minutia(x=105, y=100, kind=TERMINATION)], CorePoint(100, 100)
        )
        assert table.tolist() == [[1, 0]]

    def test_track_interval_rule(self):
        core = CorePoint(0, 0)
        # distance 10.5 falls in track 0 ([1, 11)); 11 in track 1
        t1 = minutiae.build_table([Minutia(x=0, y=10, kind=TERMINATION)], core)
        assert t1[0, 0] == 1
        m2 = Minutia(x=0, y=11, kind=BIFURCATION)
        t2 = minutiae.build_table([m2], core)
        assert t2.shape[0] == 2
        assert t2[1, 1] == 1

    def test_minutia_at_core_goes_to_track_zero(self):
        table = minutiae.build_table(
            [Minutia(x=100, y=100, kind=BIFURCATION)], CorePoint(100, 100)
        )
        assert table[0, 1] == 1

    def test_counts_total_equals_minutiae(self):
        rng = np.random.default_rng(3)
        ms = [
            Minutia(int(rng.integers(0, 200)), int(rng.integers(0, 200)),
                    TERMINATION if rng.random() < 0.5 else BIFURCATION)
            for _ in range(87)
        ]
        table = minutiae.build_table(ms, CorePoint(100, 100))
        assert table.sum() == 87

    def test_empty_list(self):
        assert minutiae.build_table([], CorePoint(0, 0)).shape == (0, 2)

    def test_rotation_invariance_exact(self):
        rng = np.random.default_rng(11)
        core = CorePoint(128.0, 131.0)
        pts = []
        while len(pts) < 40:
            x, y = rng.uniform(0, 256), rng.uniform(0, 256)
            d = np.hypot(x - core.x, y - core.y)
            if d >= 1 and abs((d - 1) % 10) > 1e-6 and abs((d - 1) % 10 - 10) > 1e-6:
                pts.append((x, y))
        ms = [
            Minutia(x, y, TERMINATION if i % 3 else BIFURCATION)
            for i, (x, y) in enumerate(pts)
        ]
        base = minutiae.build_table(ms, core)
        for trial in range(100):
            ang = rng.uniform(0, 2 * np.pi)
            ca, sa = np.cos(ang), np.sin(ang)
            rotated = [
                Minutia(
                    core.x + (m.x - core.x) * ca - (m.y - core.y) * sa,
                    core.y + (m.x - core.x) * sa + (m.y - core.y) * ca,
                    m.kind,
                )
                for m in ms
            ]
            assert np.array_equal(minutiae.build_table(rotated, core), base)

    def test_translation_invariance_exact(self):
        rng = np.random.default_rng(12)
        core = CorePoint(50.0, 60.0)
        ms = [
            Minutia(rng.uniform(0, 100), rng.uniform(0, 100),
                    TERMINATION if i % 2 else BIFURCATION)
            for i in range(25)
        ]
        base = minutiae.build_table(ms, core)
        for _ in range(20):
            dx, dy = rng.uniform(-40, 40), rng.uniform(-40, 40)
            moved = [Minutia(m.x + dx, m.y + dy, m.kind) for m in ms]
            shifted_core = CorePoint(core.x + dx, core.y + dy)
            assert np.array_equal(minutiae.build_table(moved, shifted_core), base)


class TestMtabFormat:
    def test_round_trip(self, tmp_path):
        table = np.array([[0, 0], [1, 2], [12, 3]])
        path = tmp_path / "x_1.mtab"
        minutiae.save_mtab(path, table)
        assert np.array_equal(minutiae.load_mtab(path), table)

    def test_exact_bytes(self, tmp_path):
        path = tmp_path / "y_2.mtab"
        minutiae.save_mtab(path, np.array([[1, 2], [0, 5]]))
        assert path.read_bytes() == b"1\t2\n0\t5\n"

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            minutiae.read_mtab("1,2\n")
        with pytest.raises(ValueError):
            minutiae.read_mtab("1\t-2\n")
