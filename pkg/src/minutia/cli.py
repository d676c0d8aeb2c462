"""Command-line entry point.

Subcommands wire the pipeline end to end: enhance, core, thin, minutiae,
enroll, verify, evaluate, embed, extract, attack.  All randomness flows
from explicit --seed/--key flags, so identical invocations produce
byte-identical outputs; wall-clock timings go to stderr only.

Exit codes: 0 success, 1 domain error (failure to enroll, no foreground,
unknown claim, ...), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from minutia import corepoint, enhance, evaluate, matching, minutiae, thinning, watermark
from minutia.imagio import load_pgm, save_pgm


class DomainError(RuntimeError):
    pass


def _parse_key(text: str) -> int:
    value = int(text, 16) if text.lower().startswith("0x") else int(text, 10)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("keys must be unsigned 64-bit")
    return value


def _store(args) -> matching.TemplateStore:
    root = args.store or os.environ.get("MINUTIA_STORE")
    if not root:
        raise DomainError("no template store: pass --store or set MINUTIA_STORE")
    return matching.TemplateStore(root)


def _skeleton_to_pgm(skel: np.ndarray) -> np.ndarray:
    return (skel.astype(np.uint16) * 255).astype(np.uint8)


def cmd_enhance(args) -> int:
    img = load_pgm(args.input)
    enhanced, mask, _ = enhance.stft_enhance(img)
    save_pgm(args.output, enhanced)
    if args.mask_out:
        save_pgm(args.mask_out, _skeleton_to_pgm(mask))
    return 0


def cmd_core(args) -> int:
    img = load_pgm(args.input)
    try:
        core = corepoint.complex_core(img)
    except corepoint.NoForeground as exc:
        raise DomainError(str(exc)) from exc
    print(f"{core.x} {core.y}")
    return 0


def _thin(img: np.ndarray, algo: str) -> np.ndarray:
    if algo == "gray":
        return thinning.thin_gray_pipeline(img)
    return thinning.thin_binary_baseline(minutiae.binarize_adaptive(img))


def cmd_thin(args) -> int:
    img = load_pgm(args.input)
    try:
        skel = _thin(img, args.algo)
    except thinning.EmptyForeground as exc:
        raise DomainError(str(exc)) from exc
    save_pgm(args.output, _skeleton_to_pgm(skel))
    return 0


def cmd_minutiae(args) -> int:
    img = load_pgm(args.input)
    try:
        skel = _thin(img, args.algo)
    except thinning.EmptyForeground as exc:
        raise DomainError(str(exc)) from exc
    found = minutiae.extract_minutiae(skel)
    lines = [f"{m.x},{m.y},{m.kind}" for m in found]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.output:
        Path(args.output).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return 0


def cmd_enroll(args) -> int:
    store = _store(args)
    img = load_pgm(args.input)
    t0 = time.perf_counter()
    try:
        template = matching.enroll(
            img, args.finger, args.print_no, algo=args.algo, track_width=args.track_width
        )
    except matching.EnrollmentError as exc:
        raise DomainError(f"enrollment failed: {exc}") from exc
    path = store.save(template)
    print(f"enrolled {args.finger}_{args.print_no}: {template.table.shape[0]} tracks -> {path}")
    print(f"enroll time: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    store = _store(args)
    probe_path = Path(args.input)
    t0 = time.perf_counter()
    if probe_path.suffix == ".mtab":
        probe = minutiae.load_mtab(probe_path)
    else:
        img = load_pgm(probe_path)
        try:
            probe, _, _, _, _ = matching.enroll_table(
                img, algo=args.algo, track_width=args.track_width
            )
        except matching.EnrollmentError as exc:
            raise DomainError(f"probe processing failed: {exc}") from exc
    try:
        gallery = store.load_finger(args.claim)
    except matching.UnknownClaim as exc:
        raise DomainError(str(exc)) from exc
    try:
        match = matching.score(
            probe, [t.table for t in gallery], min_rows=args.global_min_rows
        )
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    accepted = matching.verify(match, matching.Thresholds(args.t1, args.t2))
    print("ACCEPT" if accepted else "REJECT")
    print(f"gm1={match.gm1:.2f} gm2={match.gm2:.2f}")
    print(f"match time: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return 0


def cmd_evaluate(args) -> int:
    store = _store(args)
    templates = store.all_templates()
    model = evaluate.NoiseModel(track_ratio=args.track_ratio, max_salt=args.max_salt, seed=args.seed)
    t0 = time.perf_counter()
    try:
        surfaces = evaluate.run_protocol(
            templates, model, t1_max=args.t1_max, t2_max=args.t2_max, jobs=args.jobs
        )
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    report = evaluate.eer_report(surfaces)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def write_surface(path, surf):
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write("t1,t2,rate\n")
            for i in range(surf.shape[0]):
                for j in range(surf.shape[1]):
                    fh.write(f"{i + 1},{j + 1},{float(surf[i, j])!r}\n")

    write_surface(out / "far_surface.csv", surfaces.far)
    write_surface(out / "frr_surface.csv", surfaces.frr)

    column = min(args.roc_column, args.t2_max)
    log_rows, raw_rows = evaluate.emit_roc(surfaces, column)
    with open(out / "roc.csv", "w", encoding="ascii", newline="") as fh:
        fh.write("t1,t2,log10_far,log10_fnmr\n")
        for t1, t2, lf, lr in log_rows:
            fh.write(f"{t1},{t2},{lf!r},{lr!r}\n")
    with open(out / "roc_raw.csv", "w", encoding="ascii", newline="") as fh:
        fh.write("t1,t2,far,frr\n")
        for t1, t2, fa, fr in raw_rows:
            fh.write(f"{t1},{t2},{fa!r},{fr!r}\n")

    payload = {
        "eer": report.eer,
        "t1_real": report.t1_real,
        "t2_real": report.t2_real,
        "t1_int": report.t1_int,
        "t2_int": report.t2_int,
        "far_at_int": report.far_at_int,
        "frr_at_int": report.frr_at_int,
        "zero_fmr": report.zero_fmr,
        "zero_fnmr": report.zero_fnmr,
        "chi_square": report.chi_square,
        "contour_found": report.contour_found,
        "ngra": surfaces.ngra,
        "nira": surfaces.nira,
    }
    with open(out / "report.json", "w", encoding="ascii", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"EER={report.eer:.4f} at (t1,t2)=({report.t1_real:.2f},{report.t2_real:.2f}); "
          f"integer thresholds ({report.t1_int},{report.t2_int})")
    print(f"evaluate time: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return 0


def cmd_embed(args) -> int:
    img = load_pgm(args.input)
    table = minutiae.load_mtab(args.table)
    params = watermark.EmbedParams(
        q=args.q, A=args.A, B=args.B, rho=args.rho, key1=args.key1, key2=args.key2
    )
    try:
        bits = watermark.encode_table(table)
        marked = watermark.embed(img, bits, params)
    except watermark.WatermarkError as exc:
        raise DomainError(str(exc)) from exc
    save_pgm(args.output, marked)
    print(f"embedded {len(bits)} bits ({table.shape[0]} tracks)")
    return 0


def cmd_extract(args) -> int:
    img = load_pgm(args.input)
    params = watermark.EmbedParams(
        q=args.q, A=args.A, B=args.B, rho=args.rho, key1=args.key1, key2=args.key2
    )
    wm_len = watermark.watermark_length(args.rows)
    try:
        bits, threshold = watermark.extract(img, params, wm_len)
    except watermark.WatermarkError as exc:
        raise DomainError(str(exc)) from exc
    table = watermark.decode_table(bits)
    text = minutiae.write_mtab(table)
    if args.output:
        Path(args.output).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    print(f"threshold={threshold!r}", file=sys.stderr)
    if args.reconstruct:
        save_pgm(args.reconstruct, watermark.reconstruct_host(img))
    return 0


def cmd_attack(args) -> int:
    img = load_pgm(args.input)
    kwargs = {}
    if args.kind == "gaussian":
        kwargs = {"sigma": args.sigma, "seed": args.seed}
    elif args.kind in ("median", "wiener"):
        kwargs = {"ksize": args.ksize}
    elif args.kind == "trimmed_mean":
        kwargs = {"ksize": args.ksize, "trim": args.trim}
    save_pgm(args.output, watermark.attack(img, args.kind, **kwargs))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minutia", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p):
        p.add_argument("--store", help="template store directory (or env MINUTIA_STORE)")

    p = sub.add_parser("enhance", help="contextually enhance a fingerprint image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mask-out", help="also write the region mask")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("core", help="print the core point as 'x y'")
    p.add_argument("input")
    p.set_defaults(func=cmd_core)

    p = sub.add_parser("thin", help="thin a fingerprint image to a skeleton")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--algo", choices=("gray", "baseline"), default="gray")
    p.set_defaults(func=cmd_thin)

    p = sub.add_parser("minutiae", help="list minutiae as x,y,kind")
    p.add_argument("input")
    p.add_argument("--output")
    p.add_argument("--algo", choices=("gray", "baseline"), default="gray")
    p.set_defaults(func=cmd_minutiae)

    p = sub.add_parser("enroll", help="enroll a print into the template store")
    p.add_argument("finger")
    p.add_argument("print_no", type=int)
    p.add_argument("input")
    add_store(p)
    p.add_argument("--algo", choices=("gray", "baseline"), default="gray")
    p.add_argument("--track-width", type=int, default=minutiae.TRACK_WIDTH)
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("verify", help="verify a probe against a claimed finger")
    p.add_argument("input", help="probe image (.pgm) or table (.mtab)")
    p.add_argument("--claim", required=True)
    add_store(p)
    p.add_argument("--t1", type=float, default=17.0)
    p.add_argument("--t2", type=float, default=8.0)
    p.add_argument("--algo", choices=("gray", "baseline"), default="gray")
    p.add_argument("--track-width", type=int, default=minutiae.TRACK_WIDTH)
    p.add_argument("--global-min-rows", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evaluate", help="run the FRR/FAR/EER protocol over the store")
    add_store(p)
    p.add_argument("--out", required=True, help="output directory for CSV/JSON artifacts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--track-ratio", type=float, default=0.30)
    p.add_argument("--max-salt", type=int, default=1)
    p.add_argument("--t1-max", type=int, default=70)
    p.add_argument("--t2-max", type=int, default=70)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--roc-column", type=int, default=35)
    p.set_defaults(func=cmd_evaluate)

    def add_wm_params(p):
        p.add_argument("--key1", type=_parse_key, required=True, help="bit-permutation key")
        p.add_argument("--key2", type=_parse_key, required=True, help="pixel-location key")
        p.add_argument("--rho", type=float, default=0.18)
        p.add_argument("--q", type=float, default=0.1)
        p.add_argument("--A", type=float, default=100.0)
        p.add_argument("--B", type=float, default=1000.0)

    p = sub.add_parser("embed", help="hide a minutiae table in an image")
    p.add_argument("--table", required=True, help=".mtab file to hide")
    add_wm_params(p)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover a hidden minutiae table")
    p.add_argument("--rows", type=int, required=True, help="number of tracks to recover")
    add_wm_params(p)
    p.add_argument("input")
    p.add_argument("--output", help="write the table here instead of stdout")
    p.add_argument("--reconstruct", help="also write the reconstructed host image")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("attack", help="degrade a watermarked image")
    p.add_argument("--kind", choices=("gaussian", "median", "trimmed_mean", "wiener"), required=True)
    p.add_argument("--sigma", type=float, default=3.0)
    p.add_argument("--ksize", type=int, default=3)
    p.add_argument("--trim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_attack)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
