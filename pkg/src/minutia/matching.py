"""Enrollment and verification over minutiae-table templates.

A probe table is compared against every enrolled print of the claimed
finger: per print, the absolute cell differences are summed per column
(over the common leading rows), each per-print sum is floored at 2, and
the two geometric means (terminations, bifurcations) form the match
score.  A claim is accepted when both means fall at or below their
thresholds.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from minutia import corepoint, enhance, minutiae, thinning

SUM_FLOOR = 2


class MatchScore(NamedTuple):
    gm1: float   # termination-column geometric mean
    gm2: float   # bifurcation-column geometric mean


class Thresholds(NamedTuple):
    t1: float
    t2: float


@dataclass(frozen=True)
class Template:
    finger_id: str
    print_no: int
    table: np.ndarray

    def __post_init__(self):
        if self.table.shape[0] == 0:
            raise ValueError("template table is empty")


class EnrollmentError(RuntimeError):
    """Failure to enroll: no usable foreground, core, or minutiae."""


class UnknownClaim(KeyError):
    """No templates stored under the claimed finger id."""


def score(probe: np.ndarray, gallery: list[np.ndarray], min_rows: int | None = None) -> MatchScore:
    """Geometric-mean match score of a probe table against a gallery.

    Tables are truncated to the smallest row count among probe and gallery
    (or to ``min_rows`` when given, e.g. a store-global constant).  Any
    per-print column sum below 2 is floored at 2 before the product, which
    keeps a perfect self-match from zeroing the geometric mean.
    """
    if not gallery:
        raise ValueError("gallery is empty")
    probe = np.asarray(probe)
    tables = [np.asarray(g) for g in gallery]
    m = min([probe.shape[0]] + [t.shape[0] for t in tables])
    if min_rows is not None:
        if min_rows > m:
            raise ValueError(f"min_rows={min_rows} exceeds shortest table ({m} rows)")
        m = min_rows
    if m == 0:
        raise ValueError("no common rows to compare")

    p = probe[:m]
    prod1, prod2 = 1, 1
    for t in tables:
        diff = np.abs(p - t[:m])
        s1 = max(int(diff[:, 0].sum()), SUM_FLOOR)
        s2 = max(int(diff[:, 1].sum()), SUM_FLOOR)
        prod1 *= s1
        prod2 *= s2
    n = len(tables)
    return MatchScore(gm1=prod1 ** (1.0 / n), gm2=prod2 ** (1.0 / n))


def verify(match: MatchScore, thr: Thresholds) -> bool:
    """Accept iff both geometric means are at or below their thresholds."""
    return match.gm1 <= thr.t1 and match.gm2 <= thr.t2


_MTAB_RE = re.compile(r"^(?P<finger>.+)_(?P<print>\d+)\.mtab$")


class TemplateStore:
    """Directory of one-table-per-file templates.

    File name ``<finger_id>_<print_no>.mtab``; contents are tab-separated
    ``term<TAB>bif`` lines, newest write wins.
    """

    def __init__(self, root):
        self.root = Path(root)

    def save(self, template: Template) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        path = self.root / f"{template.finger_id}_{template.print_no}.mtab"
        minutiae.save_mtab(path, template.table)
        return path

    def _entries(self):
        if not self.root.is_dir():
            return
        for name in sorted(os.listdir(self.root)):
            m = _MTAB_RE.match(name)
            if m:
                yield m.group("finger"), int(m.group("print")), self.root / name

    def fingers(self) -> list[str]:
        return sorted({finger for finger, _, _ in self._entries()})

    def load_finger(self, finger_id: str) -> list[Template]:
        found = [
            Template(finger, pno, minutiae.load_mtab(path))
            for finger, pno, path in self._entries()
            if finger == finger_id
        ]
        if not found:
            raise UnknownClaim(f"no templates enrolled for {finger_id!r}")
        return sorted(found, key=lambda t: t.print_no)

    def all_templates(self) -> list[Template]:
        return [
            Template(finger, pno, minutiae.load_mtab(path))
            for finger, pno, path in self._entries()
        ]


def enroll_table(
    img: np.ndarray,
    algo: str = "gray",
    track_width: int = minutiae.TRACK_WIDTH,
    enhance_params: enhance.EnhanceParams | None = None,
    core_params: corepoint.CoreParams | None = None,
):
    """Image -> (minutiae table, core, minutiae list, skeleton, enhanced).

    Runs enhancement, core detection, the selected thinner ('gray' or
    'baseline'), minutiae extraction, and track binning.  Raises
    EnrollmentError on any failure-to-enroll condition.
    """
    if algo not in ("gray", "baseline"):
        raise ValueError(f"unknown thinning algorithm {algo!r}")
    try:
        enhanced, mask, _ = enhance.stft_enhance(img, enhance_params or enhance.EnhanceParams())
    except ValueError as exc:
        raise EnrollmentError(f"enhancement failed: {exc}") from exc
    if not mask.any():
        raise EnrollmentError("enhancement produced an empty region mask")
    try:
        core = corepoint.complex_core(enhanced, core_params or corepoint.CoreParams())
    except corepoint.NoForeground as exc:
        raise EnrollmentError(str(exc)) from exc
    try:
        if algo == "gray":
            skel = thinning.thin_gray_pipeline(enhanced)
        else:
            skel = thinning.thin_binary_baseline(minutiae.binarize_adaptive(enhanced))
    except thinning.EmptyForeground as exc:
        raise EnrollmentError(str(exc)) from exc
    found = minutiae.extract_minutiae(skel)
    if not found:
        raise EnrollmentError("no minutiae survived filtering")
    table = minutiae.build_table(found, core, track_width)
    return table, core, found, skel, enhanced


def enroll(img: np.ndarray, finger_id: str, print_no: int, **kwargs) -> Template:
    table, _, _, _, _ = enroll_table(img, **kwargs)
    return Template(finger_id=finger_id, print_no=print_no, table=table)
