"""Verification error-rate evaluation.

Every stored print is perturbed by the track-noise model and matched
genuinely (against its own finger's full gallery) and as an impostor
(against every other finger's gallery), producing FRR and FAR surfaces
over a 2-D integer threshold grid, from which the equal error rate,
integer operating thresholds, ZeroFMR/ZeroFNMR, and a ROC column are
derived.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from minutia.matching import Template, score
from minutia.rng import SplitMix64


@dataclass(frozen=True)
class NoiseModel:
    track_ratio: float = 0.30
    max_salt: int = 1
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.track_ratio <= 1.0:
            raise ValueError("track_ratio must lie in [0, 1]")
        if self.max_salt < 0:
            raise ValueError("max_salt must be non-negative")


@dataclass
class ErrorSurfaces:
    frr: np.ndarray   # frr[i, j] = FNMR at thresholds (i+1, j+1)
    far: np.ndarray
    ngra: int
    nira: int


@dataclass
class EerReport:
    eer: float
    t1_real: float
    t2_real: float
    t1_int: int
    t2_int: int
    far_at_int: float
    frr_at_int: float
    zero_fmr: tuple[float, int, int] | None    # (FNMR, t1, t2) where FMR == 0
    zero_fnmr: tuple[float, int, int] | None   # (FMR, t1, t2) where FNMR == 0
    chi_square: float
    contour_found: bool


def perturb_table(table: np.ndarray, model: NoiseModel, rng: SplitMix64) -> np.ndarray:
    """Track-noise perturbation of a minutiae table.

    round(track_ratio * rows) times: a uniform row, a uniform column, and
    a salt in [0, max_salt] are drawn; the salt is added to the chosen
    cell and subtracted from the row's other cell, clamping both at zero.
    Rows may repeat across draws.
    """
    t = np.asarray(table, dtype=np.int64).copy()
    rows = t.shape[0]
    if rows == 0:
        raise ValueError("cannot perturb an empty table")
    n_draws = int(math.floor(model.track_ratio * rows + 0.5))
    for _ in range(n_draws):
        row = rng.randint(rows)
        col = rng.randint(2)
        salt = rng.randint(model.max_salt + 1)
        t[row, col] = max(t[row, col] + salt, 0)
        t[row, 1 - col] = max(t[row, 1 - col] - salt, 0)
    return t


def _grouped(templates: list[Template]) -> dict[str, list[np.ndarray]]:
    by_finger: dict[str, list[Template]] = {}
    for t in templates:
        by_finger.setdefault(t.finger_id, []).append(t)
    return {
        fid: [t.table for t in sorted(ts, key=lambda t: t.print_no)]
        for fid, ts in sorted(by_finger.items())
    }


def run_protocol(
    templates: list[Template],
    model: NoiseModel,
    t1_max: int = 70,
    t2_max: int = 70,
    jobs: int = 1,
) -> ErrorSurfaces:
    """Collect genuine and impostor scores and build the error surfaces.

    All tables are truncated to the store-global minimum row count.  Each
    probe owns a PRNG stream seeded with (model.seed XOR probe index), so
    results do not depend on ``jobs``.
    """
    gallery = _grouped(templates)
    fingers = list(gallery)
    if len(fingers) < 2:
        raise ValueError("protocol needs at least 2 fingers")
    m = min(tab.shape[0] for tabs in gallery.values() for tab in tabs)
    if m == 0:
        raise ValueError("a stored table is empty")
    gallery = {fid: [tab[:m] for tab in tabs] for fid, tabs in gallery.items()}

    probes = [
        (fid, pidx, tab)
        for fid in fingers
        for pidx, tab in enumerate(gallery[fid])
    ]

    def attempt(probe_index: int):
        fid, _, tab = probes[probe_index]
        rng = SplitMix64(model.seed ^ probe_index)
        noisy = perturb_table(tab, model, rng)
        genuine = score(noisy, gallery[fid])
        impostors = [score(noisy, gallery[other]) for other in fingers if other != fid]
        return genuine, impostors

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(attempt, range(len(probes))))
    else:
        results = [attempt(i) for i in range(len(probes))]

    genuine_scores = [g for g, _ in results]
    impostor_scores = [s for _, imps in results for s in imps]
    ngra = len(genuine_scores)
    nira = len(impostor_scores)

    far = _cumulative_surface(impostor_scores, t1_max, t2_max) / nira
    both_ok = _cumulative_surface(genuine_scores, t1_max, t2_max)
    frr = (ngra - both_ok) / ngra
    return ErrorSurfaces(frr=frr, far=far, ngra=ngra, nira=nira)


def _cumulative_surface(scores, t1_max: int, t2_max: int) -> np.ndarray:
    """count[i, j] = number of scores with gm1 <= i+1 and gm2 <= j+1."""
    counts = np.zeros((t1_max + 1, t2_max + 1), dtype=np.int64)
    for s in scores:
        b1 = int(math.ceil(s.gm1))
        b2 = int(math.ceil(s.gm2))
        if b1 <= t1_max and b2 <= t2_max:
            counts[max(b1, 1) - 1, max(b2, 1) - 1] += 1
    return counts.cumsum(axis=0).cumsum(axis=1)[:t1_max, :t2_max].astype(np.float64)


def _zero_contour_points(diff: np.ndarray, far: np.ndarray):
    """Zero crossings of ``diff`` with linearly interpolated FAR values.

    Yields (t1, t2, far) triples: grid nodes where diff is exactly zero,
    then sign-change crossings on horizontal and vertical cell edges, in
    deterministic scan order.  Thresholds are 1-based.
    """
    n1, n2 = diff.shape
    for i in range(n1):
        for j in range(n2):
            if diff[i, j] == 0.0:
                yield (i + 1.0, j + 1.0, float(far[i, j]))
    for i in range(n1):
        for j in range(n2 - 1):
            d0, d1 = diff[i, j], diff[i, j + 1]
            if d0 * d1 < 0.0:
                a = d0 / (d0 - d1)
                yield (i + 1.0, j + 1.0 + a, float(far[i, j] + a * (far[i, j + 1] - far[i, j])))
    for i in range(n1 - 1):
        for j in range(n2):
            d0, d1 = diff[i, j], diff[i + 1, j]
            if d0 * d1 < 0.0:
                a = d0 / (d0 - d1)
                yield (i + 1.0 + a, j + 1.0, float(far[i, j] + a * (far[i + 1, j] - far[i, j])))


def eer_report(surfaces: ErrorSurfaces) -> EerReport:
    """Equal error rate and operating thresholds from the surfaces.

    The EER is the minimum interpolated FAR along the FAR = FRR contour;
    the integer operating point is the floor/ceil combination around the
    contour argmin that minimizes |FAR - FRR|.  When the surfaces never
    cross, the report falls back to the cell minimizing |FAR - FRR| and
    flags it.
    """
    far, frr = surfaces.far, surfaces.frr
    if far.size == 0:
        raise ValueError("empty surfaces")
    diff = far - frr

    best = None
    for t1, t2, f in _zero_contour_points(diff, far):
        if best is None or f < best[2]:
            best = (t1, t2, f)

    contour_found = best is not None
    if contour_found:
        t1_real, t2_real, eer = best
    else:
        flat = int(np.argmin(np.abs(diff)))
        i, j = divmod(flat, diff.shape[1])
        t1_real, t2_real = float(i + 1), float(j + 1)
        eer = float((far[i, j] + frr[i, j]) / 2.0)

    n1, n2 = far.shape
    combos = []
    f1, f2 = int(math.floor(t1_real)), int(math.floor(t2_real))
    for c1, c2 in ((f1, f2), (f1, f2 + 1), (f1 + 1, f2), (f1 + 1, f2 + 1)):
        c1 = min(max(c1, 1), n1)
        c2 = min(max(c2, 1), n2)
        combos.append((abs(far[c1 - 1, c2 - 1] - frr[c1 - 1, c2 - 1]), c1, c2))
    _, t1_int, t2_int = min(combos, key=lambda c: c[0])
    far_at_int = float(far[t1_int - 1, t2_int - 1])
    frr_at_int = float(frr[t1_int - 1, t2_int - 1])

    def lowest_where(rates: np.ndarray, zero_of: np.ndarray):
        cells = np.argwhere(zero_of == 0.0)
        if cells.size == 0:
            return None
        vals = rates[cells[:, 0], cells[:, 1]]
        k = int(np.argmin(vals))
        return (float(vals[k]), int(cells[k, 0]) + 1, int(cells[k, 1]) + 1)

    return EerReport(
        eer=float(eer),
        t1_real=float(t1_real),
        t2_real=float(t2_real),
        t1_int=int(t1_int),
        t2_int=int(t2_int),
        far_at_int=far_at_int,
        frr_at_int=frr_at_int,
        zero_fmr=lowest_where(frr, far),
        zero_fnmr=lowest_where(far, frr),
        chi_square=float(2.0 * eer * eer),
        contour_found=contour_found,
    )


def emit_roc(surfaces: ErrorSurfaces, column: int):
    """ROC data for one t2 column (1-based).

    Returns (log_rows, raw_rows): log rows are
    (t1, t2, log10(100*FAR), log10(100*FNMR)) skipping cells where either
    rate is zero; raw rows carry the unscaled rates for every t1.
    """
    far, frr = surfaces.far, surfaces.frr
    if not 1 <= column <= far.shape[1]:
        raise ValueError(f"column {column} outside 1..{far.shape[1]}")
    j = column - 1
    log_rows, raw_rows = [], []
    for i in range(far.shape[0]):
        fa, fr = float(far[i, j]), float(frr[i, j])
        raw_rows.append((i + 1, column, fa, fr))
        if fa > 0.0 and fr > 0.0:
            log_rows.append((i + 1, column, math.log10(100.0 * fa), math.log10(100.0 * fr)))
    return log_rows, raw_rows
