"""Command-line entry point: ``wavestego {embed,extract,evaluate,attack,compare,samples}``.

Exit codes: 0 success, 1 runtime/data error, 2 usage error,
3 capacity shortfall, 4 file I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .attacks import apply_attack, parse_attack
from .compare import comparison_csv, load_config, run_comparison
from .imagecore import (
    RgbImage,
    gray_to_rgb,
    load_gray,
    load_rgb,
    load_wav,
    save_gray,
    save_rgb,
    save_wav,
)
from .payload import PayloadKind, derive_slot_keys, parse_master_key
from .report import quality_report
from .samples import SAMPLE_TEXT, synthetic_audio, synthetic_cover, synthetic_logo
from .stego import SPREADING, CapacityError, StegoSidecar, embed, extract, make_payloads

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_IO = 4


def _read_text(path) -> str:
    with open(path, "rb") as fh:
        return fh.read().decode("latin-1")


def _master(value: str) -> int:
    try:
        return parse_master_key(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_embed(args) -> int:
    cover = load_gray(args.cover)
    payloads = make_payloads(
        _read_text(args.text), load_gray(args.logo), load_wav(args.audio), min(cover.width, cover.height)
    )
    keys = derive_slot_keys(args.master_key)
    result = embed(cover, payloads, keys, args.alpha, args.mode, args.gain, transform=args.transform)
    save_rgb(result.stego, args.out_stego)
    result.sidecar.save(args.out_sidecar)
    print(quality_report(gray_to_rgb(cover), result.stego).summary())
    return EXIT_OK


def cmd_extract(args) -> int:
    stego = load_rgb(args.stego)
    cover = load_gray(args.cover)
    sidecar = StegoSidecar.load(args.sidecar)
    keys = derive_slot_keys(args.master_key)
    ex = extract(stego, cover, sidecar, keys)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "text.txt", "wb") as fh:
        fh.write(ex.text.encode("latin-1"))
    save_gray(ex.image, out / "image.pgm")
    save_wav(ex.audio, out / "audio.wav")
    for layer, band, kind in SPREADING:
        save_gray(ex.copies[(layer, band)], out / f"{kind.value}_{layer}_{band}.pgm")
    for kind in PayloadKind:
        save_gray(ex.fused[kind], out / f"{kind.value}_fused.pgm")
    payloads = None
    if args.text and args.logo and args.audio:
        payloads = make_payloads(
            _read_text(args.text), load_gray(args.logo), load_wav(args.audio), min(cover.width, cover.height)
        )
    report = quality_report(gray_to_rgb(cover), stego, payloads, ex)
    _write(report.to_csv(), out / "report.csv")
    print(report.summary())
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cover = load_gray(args.cover)
    stego = load_rgb(args.stego)
    report = quality_report(gray_to_rgb(cover), stego)
    _write(report.to_csv(), args.out)
    return EXIT_OK


def cmd_attack(args) -> int:
    spec = parse_attack(args.spec, args.seed)
    save_rgb(apply_attack(load_rgb(args.stego), spec), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    rows = run_comparison(load_config(args.config))
    _write(comparison_csv(rows), args.out)
    return EXIT_OK


def cmd_samples(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_gray(synthetic_cover(), out / "cover.pgm")
    save_gray(synthetic_logo(), out / "logo.pgm")
    save_wav(synthetic_audio(), out / "audio.wav")
    with open(out / "message.txt", "wb") as fh:
        fh.write(SAMPLE_TEXT.encode("latin-1"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavestego", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide text, logo and audio in a grayscale cover")
    p.add_argument("--cover", required=True, help="cover PGM (P5)")
    p.add_argument("--text", required=True, help="text file, at most 256 Latin-1 characters")
    p.add_argument("--logo", required=True, help="logo PGM, each side <= cover/4")
    p.add_argument("--audio", required=True, help="mono 8-bit PCM WAV")
    p.add_argument("--master-key", required=True, type=_master, help="up to 16 hex digits")
    p.add_argument("--alpha", type=float, default=0.1, help="modulation index (default 0.1)")
    p.add_argument("--mode", choices=["nonadaptive", "adaptive"], default="nonadaptive")
    p.add_argument("--gain", type=float, default=1.2, help="residual block enhancement gain")
    p.add_argument("--transform", choices=["dwt", "dct", "wht", "dft"], default="dwt")
    p.add_argument("--out-stego", required=True, help="output PPM (P6)")
    p.add_argument("--out-sidecar", required=True, help="output sidecar file")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover the payloads (needs the original cover)")
    p.add_argument("--stego", required=True)
    p.add_argument("--cover", required=True)
    p.add_argument("--sidecar", required=True)
    p.add_argument("--master-key", required=True, type=_master)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--text", help="original text, for the recovery report")
    p.add_argument("--logo", help="original logo, for the recovery report")
    p.add_argument("--audio", help="original audio, for the recovery report")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="PSNR / SSIM / epsilon of a stego image, as CSV")
    p.add_argument("--cover", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("attack", help="apply a channel impairment to a stego PPM")
    p.add_argument("--stego", required=True)
    p.add_argument("--spec", required=True, help="e.g. gaussian:4, median:3, jpeg:75, histeq")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("compare", help="transform-domain comparison sweep, as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("samples", help="write synthetic cover, logo, audio and text")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_samples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"wavestego: capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"wavestego: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"wavestego: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
