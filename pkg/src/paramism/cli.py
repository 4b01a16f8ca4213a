"""``pism`` command line: encode, decode, reference, eval and a preset batch."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .bitstream import side_info_bitrate
from .codec import decode_file, decode_frames, encode_signals, encode_to_file
from .evaluate import evaluate, realtime_factor
from .filterbank import DECODER_LATENCY
from .kernels import BACKEND
from .layouts import LAYOUTS, get_layout
from .presets import PRESETS, get_preset, synthesize_scene
from .reference import render_reference
from .scene import SAMPLE_RATE, num_frames_for, read_metadata_csv
from .sideinfo import BandPartition
from .wavio import read_mono_48k, read_wav, write_wav

log = logging.getLogger("paramism")


def _load_objects(wavs, csvs) -> tuple:
    if not 2 <= len(wavs) <= 4:
        raise ValueError(f"need 2 to 4 input objects, got {len(wavs)}")
    if len(csvs) != len(wavs):
        raise ValueError(f"{len(wavs)} audio files but {len(csvs)} metadata files")
    signals = [read_mono_48k(p) for p in wavs]
    lengths = {len(s) for s in signals}
    if len(lengths) != 1:
        raise ValueError(f"input files differ in length: {sorted(lengths)} samples")
    x = np.stack(signals)
    nframes = num_frames_for(x.shape[1])
    metadata = [read_metadata_csv(p, nframes) for p in csvs]
    return x, metadata


def cmd_encode(args) -> int:
    x, metadata = _load_objects(args.inputs, args.metadata)
    bands = BandPartition.load(args.bands) if args.bands else BandPartition.default()
    t0 = time.perf_counter()
    header = encode_to_file(args.output, x, metadata, bands, args.downmix_bits)
    wall = time.perf_counter() - t0
    rate = side_info_bitrate(len(metadata), bands.num_bands)
    print(f"side info: {rate} bit/s ({len(metadata)} objects, {bands.num_bands} bands)")
    print(f"frames: {header.frame_count}, file: {header.file_size} bytes")
    print(f"encode realtime factor: {realtime_factor(x.shape[1] / SAMPLE_RATE, wall):.1f}x "
          f"(wall clock, {BACKEND} kernels)")
    return 0


def cmd_decode(args) -> int:
    layout = get_layout(args.layout)
    t0 = time.perf_counter()
    header, y = decode_file(args.input, layout)
    wall = time.perf_counter() - t0
    write_wav(args.output, y, bits=args.bits)
    print(f"layout {layout.name}: {layout.num_channels} channels, {y.shape[1]} samples")
    print(f"decoder latency {DECODER_LATENCY} samples (compensated)")
    print(f"decode realtime factor: {realtime_factor(y.shape[1] / SAMPLE_RATE, wall):.1f}x "
          f"(wall clock, {BACKEND} kernels)")
    return 0


def cmd_reference(args) -> int:
    x, metadata = _load_objects(args.inputs, args.metadata)
    layout = get_layout(args.layout)
    write_wav(args.output, render_reference(x, metadata, layout), bits=args.bits)
    print(f"reference {layout.name}: {layout.num_channels} channels, {x.shape[1]} samples")
    return 0


def cmd_eval(args) -> int:
    rd, dec = read_wav(args.decoded)
    rr, ref = read_wav(args.reference)
    if rd != rr:
        raise ValueError(f"sample rates differ: {rd} vs {rr} Hz")
    report = evaluate(dec, ref)
    text = report.to_json(args.json)
    if not args.json:
        print(text)
    else:
        print(f"broadband error {report.broadband_error_db:+.2f} dB, "
              f"localization {report.localization:.3f}, report written to {args.json}")
    return 0


def cmd_presets(args) -> int:
    """Encode, decode and evaluate every requested preset in memory."""
    out_dir = Path(args.output) if args.output else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    names = args.names or list(PRESETS)
    results = {}
    for name in names:
        x, md = synthesize_scene(get_preset(name), args.seconds, seed=args.seed,
                                 stationary=args.stationary)
        dur = x.shape[1] / SAMPLE_RATE
        t0 = time.perf_counter()
        frames = encode_signals(x, md)
        t1 = time.perf_counter()
        y = decode_frames(frames, args.layout)
        t2 = time.perf_counter()
        report = evaluate(y, render_reference(x, md, args.layout), do_align=False)
        report.encode_realtime = realtime_factor(dur, t1 - t0)
        report.decode_realtime = realtime_factor(dur, t2 - t1)
        results[name] = report
        worst = max(report.window_error_db, key=abs) if report.window_error_db else float("nan")
        print(f"{name:4s} broadband {report.broadband_error_db:+6.2f} dB  "
              f"worst 1 s window {worst:+6.2f} dB  localization {report.localization:.3f}  "
              f"enc {report.encode_realtime:5.1f}x  dec {report.decode_realtime:5.1f}x")
        if out_dir:
            report.to_json(out_dir / f"{name}.json")
    if out_dir:
        summary = {k: v.broadband_error_db for k, v in results.items()}
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pism", description="Parametric object audio codec")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="objects + metadata -> .pism stream")
    enc.add_argument("-i", "--inputs", nargs="+", required=True, help="mono 48 kHz WAV per object")
    enc.add_argument("-m", "--metadata", nargs="+", required=True, help="CSV per object")
    enc.add_argument("-o", "--output", required=True)
    enc.add_argument("--bands", help="band border file (12 integers)")
    enc.add_argument("--downmix-bits", type=int, choices=(16, 24), default=24)
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help=".pism stream -> loudspeaker WAV")
    dec.add_argument("-i", "--input", required=True)
    dec.add_argument("--layout", required=True, choices=sorted(LAYOUTS))
    dec.add_argument("-o", "--output", required=True)
    dec.add_argument("--bits", type=int, choices=(16, 24), default=24)
    dec.set_defaults(func=cmd_decode)

    ref = sub.add_parser("reference", help="direct panning of the uncoded objects")
    ref.add_argument("-i", "--inputs", nargs="+", required=True)
    ref.add_argument("-m", "--metadata", nargs="+", required=True)
    ref.add_argument("--layout", required=True, choices=sorted(LAYOUTS))
    ref.add_argument("-o", "--output", required=True)
    ref.add_argument("--bits", type=int, choices=(16, 24), default=24)
    ref.set_defaults(func=cmd_reference)

    ev = sub.add_parser("eval", help="compare a decoded render with the reference")
    ev.add_argument("--decoded", required=True)
    ev.add_argument("--reference", required=True)
    ev.add_argument("--json", help="write the report here")
    ev.set_defaults(func=cmd_eval)

    pr = sub.add_parser("presets", help="batch run over the built-in test scenes")
    pr.add_argument("names", nargs="*", metavar="NAME", help="preset names (default: all)")
    pr.add_argument("--layout", default="7_1_4", choices=sorted(LAYOUTS))
    pr.add_argument("--seconds", type=float, default=3.0)
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--stationary", action="store_true", help="use stationary noise sources")
    pr.add_argument("-o", "--output", help="directory for JSON reports")
    pr.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"pism {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
