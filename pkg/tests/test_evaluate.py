import numpy as np
import pytest

from minutia.evaluate import ErrorSurfaces, NoiseModel, eer_report, emit_roc, perturb_table, run_protocol
from minutia.matching import Template
from minutia.rng import SplitMix64
from tests import fixture_tables as ft


def synthetic_store(n_fingers=8, n_prints=3, rows=14, seed=7, spread=6):
    """Templates with controlled separation: finger centers differ by a
    few counts per cell, prints jitter by at most 1."""
    rng = SplitMix64(seed)
    templates = []
    for f in range(n_fingers):
        base = np.array(
            [[rng.randint(spread) * 2, rng.randint(spread) * 2] for _ in range(rows)],
            dtype=np.int64,
        )
        for p in range(n_prints):
            jitter = np.array(
                [[rng.randint(2), rng.randint(2)] for _ in range(rows)], dtype=np.int64
            )
            table = np.clip(base + jitter - 0, 0, None)
            templates.append(Template(f"f{f:03d}", p + 1, table))
    return templates


class TestPerturb:
    def test_zero_ratio_is_identity(self):
        model = NoiseModel(track_ratio=0.0)
        out = perturb_table(ft.MTAB_101_1, model, SplitMix64(0))
        assert np.array_equal(out, ft.MTAB_101_1)

    def test_clamped_at_zero(self):
        table = np.zeros((10, 2), dtype=np.int64)
        model = NoiseModel(track_ratio=1.0, max_salt=1)
        out = perturb_table(table, model, SplitMix64(5))
        assert (out >= 0).all()

    def test_noise_pattern(self):
        # 13 rows at 30% ratio -> 4 draws; each touched row swaps at most
        # one count between its columns (unless clamped at zero)
        model = NoiseModel(track_ratio=0.30, max_salt=1)
        table = ft.MTAB_101_1
        out = perturb_table(table, model, SplitMix64(123))
        delta = out - table
        changed = np.nonzero((delta != 0).any(axis=1))[0]
        assert len(changed) <= 4
        for r in changed:
            d1, d2 = int(delta[r, 0]), int(delta[r, 1])
            assert abs(d1) <= 1 and abs(d2) <= 1
            if table[r, 0] >= 1 and table[r, 1] >= 1:
                assert d1 == -d2

    def test_row_sums_preserved_unless_clamped(self):
        model = NoiseModel(track_ratio=1.0, max_salt=1)
        rng = SplitMix64(9)
        table = np.full((20, 2), 5, dtype=np.int64)  # no clamping possible
        out = perturb_table(table, model, rng)
        assert np.array_equal(out.sum(axis=1), table.sum(axis=1))

    def test_deterministic_per_seed(self):
        model = NoiseModel(track_ratio=0.5)
        a = perturb_table(ft.MTAB_101_1, model, SplitMix64(77))
        b = perturb_table(ft.MTAB_101_1, model, SplitMix64(77))
        assert np.array_equal(a, b)


class TestRunProtocol:
    def test_counts(self):
        templates = synthetic_store(n_fingers=5, n_prints=3)
        surfaces = run_protocol(templates, NoiseModel(seed=1), t1_max=40, t2_max=40)
        assert surfaces.ngra == 15
        assert surfaces.nira == 15 * 4
        # rates times denominators are integer counts
        assert np.allclose(np.round(surfaces.frr * surfaces.ngra), surfaces.frr * surfaces.ngra)
        assert np.allclose(np.round(surfaces.far * surfaces.nira), surfaces.far * surfaces.nira)

    def test_monotonicity(self):
        templates = synthetic_store(n_fingers=6, n_prints=3)
        s = run_protocol(templates, NoiseModel(seed=2), t1_max=30, t2_max=30)
        assert (np.diff(s.frr, axis=0) <= 0).all()
        assert (np.diff(s.frr, axis=1) <= 0).all()
        assert (np.diff(s.far, axis=0) >= 0).all()
        assert (np.diff(s.far, axis=1) >= 0).all()

    def test_identical_fingers_degenerate(self):
        # two fingers with the same tables: genuine and impostor attempts
        # coincide, so FAR + FRR == 1 exactly everywhere
        table = ft.MTAB_101_1
        templates = [
            Template("a", 1, table), Template("a", 2, table),
            Template("b", 1, table), Template("b", 2, table),
        ]
        s = run_protocol(templates, NoiseModel(seed=3), t1_max=25, t2_max=25)
        assert np.allclose(s.far + s.frr, 1.0)

    def test_separated_fingers(self):
        templates = synthetic_store(n_fingers=4, n_prints=3, spread=8)
        s = run_protocol(templates, NoiseModel(track_ratio=0.0, seed=4), t1_max=60, t2_max=60)
        assert s.frr[-1, -1] == 0.0   # large thresholds accept all genuine
        assert s.far[0, 0] == 0.0     # small thresholds reject all impostors

    def test_jobs_do_not_change_results(self):
        templates = synthetic_store(n_fingers=5, n_prints=2)
        a = run_protocol(templates, NoiseModel(seed=5), t1_max=20, t2_max=20, jobs=1)
        b = run_protocol(templates, NoiseModel(seed=5), t1_max=20, t2_max=20, jobs=4)
        assert np.array_equal(a.frr, b.frr)
        assert np.array_equal(a.far, b.far)

    def test_single_finger_errors(self):
        templates = [Template("a", 1, ft.MTAB_101_1)]
        with pytest.raises(ValueError):
            run_protocol(templates, NoiseModel())


def linear_surfaces(t=40):
    ramp = (np.arange(1, t + 1, dtype=np.float64) / t)[:, None] * np.ones((1, t))
    return ErrorSurfaces(frr=1.0 - ramp, far=ramp.copy(), ngra=t, nira=t)


class TestEerReport:
    def test_chi_square_identity(self):
        report = eer_report(linear_surfaces())
        assert report.chi_square == 2.0 * report.eer**2

    def test_linear_crossing(self):
        t = 40
        report = eer_report(linear_surfaces(t))
        assert report.eer == pytest.approx(0.5, abs=1.0 / t)
        assert report.t1_real == pytest.approx(t / 2, abs=1.0)

    def test_constant_half_surfaces(self):
        t = 10
        s = ErrorSurfaces(
            frr=np.full((t, t), 0.5), far=np.full((t, t), 0.5), ngra=2, nira=2
        )
        report = eer_report(s)
        assert report.eer == 0.5
        assert report.contour_found

    def test_no_crossing_flagged(self):
        t = 10
        s = ErrorSurfaces(
            frr=np.full((t, t), 0.8), far=np.full((t, t), 0.1), ngra=10, nira=10
        )
        report = eer_report(s)
        assert not report.contour_found
        assert report.eer == pytest.approx(0.45)

    def test_integer_thresholds_minimize_difference(self):
        report = eer_report(linear_surfaces(40))
        far, frr = linear_surfaces(40).far, linear_surfaces(40).frr
        chosen = abs(far[report.t1_int - 1, report.t2_int - 1]
                     - frr[report.t1_int - 1, report.t2_int - 1])
        f1, f2 = int(np.floor(report.t1_real)), int(np.floor(report.t2_real))
        for c1, c2 in ((f1, f2), (f1, f2 + 1), (f1 + 1, f2), (f1 + 1, f2 + 1)):
            c1 = min(max(c1, 1), 40)
            c2 = min(max(c2, 1), 40)
            assert chosen <= abs(far[c1 - 1, c2 - 1] - frr[c1 - 1, c2 - 1]) + 1e-12

    def test_zero_rates(self):
        templates = synthetic_store(n_fingers=6, n_prints=3, spread=8)
        s = run_protocol(templates, NoiseModel(seed=8), t1_max=60, t2_max=60)
        report = eer_report(s)
        if report.zero_fmr is not None:
            val, t1, t2 = report.zero_fmr
            assert s.far[t1 - 1, t2 - 1] == 0.0
            assert s.frr[t1 - 1, t2 - 1] == val
        if report.zero_fnmr is not None:
            val, t1, t2 = report.zero_fnmr
            assert s.frr[t1 - 1, t2 - 1] == 0.0
            assert s.far[t1 - 1, t2 - 1] == val


class TestRoc:
    def test_log_scaling(self):
        t = 10
        s = ErrorSurfaces(
            frr=np.full((t, t), 0.01), far=np.full((t, t), 0.01), ngra=100, nira=100
        )
        log_rows, raw_rows = emit_roc(s, 3)
        assert len(raw_rows) == t
        assert all(lf == pytest.approx(0.0) and lr == pytest.approx(0.0)
                   for _, _, lf, lr in log_rows)

    def test_far_one_maps_to_two(self):
        t = 5
        s = ErrorSurfaces(
            frr=np.full((t, t), 0.5), far=np.ones((t, t)), ngra=2, nira=2
        )
        log_rows, _ = emit_roc(s, 1)
        assert log_rows[0][2] == pytest.approx(2.0)

    def test_zero_cells_skipped(self):
        t = 4
        far = np.zeros((t, t))
        far[2:, :] = 0.5
        s = ErrorSurfaces(frr=np.full((t, t), 0.5), far=far, ngra=2, nira=2)
        log_rows, raw_rows = emit_roc(s, 2)
        assert len(log_rows) == 2
        assert len(raw_rows) == 4

    def test_monotone_column(self):
        templates = synthetic_store(n_fingers=5, n_prints=3)
        s = run_protocol(templates, NoiseModel(seed=11), t1_max=30, t2_max=30)
        _, raw = emit_roc(s, 15)
        fars = [row[2] for row in raw]
        assert all(a <= b + 1e-12 for a, b in zip(fars, fars[1:]))

    def test_column_out_of_range(self):
        with pytest.raises(ValueError):
            emit_roc(linear_surfaces(10), 11)
