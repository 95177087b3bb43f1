"""Command-line front end.

Exit codes: 0 success, 1 bad arguments (including out-of-range scalars), 2 data or format error, 3 integrity
(checksum) error.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .archive import Archive, header_size, read_archive, write_archive
from .codec import codec_from_name
from .errors import ArgumentError, IntegrityError, McpcError, RangeError
from .field import load_raw, save_raw, stats
from .metrics import SYNTH_KINDS, component_rates, derivative_error_study, rd_sweep, synth_field, write_csv
from .multicomp import (
    build_schedule,
    components_needed,
    construct,
    construct_lossless,
    reconstruct,
    split_scalar,
)

EXIT_OK = 0
EXIT_ARGS = 1
EXIT_DATA = 2
EXIT_INTEGRITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.prog}: {message}")


def _dims(text: str) -> tuple:
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--dims expects comma-separated integers, got {text!r}")
    if not 1 <= len(dims) <= 4 or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError(f"--dims needs 1 to 4 positive extents, got {text!r}")
    return dims


def _codec(text: str):
    try:
        return codec_from_name(text)
    except (ArgumentError, RangeError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not v >= 0.0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"expected a finite value >= 0, got {text!r}")
    return v


def _delta(text: str) -> int:
    v = int(text)
    if not 1 <= v <= 16:
        raise argparse.ArgumentTypeError(f"--delta must be in 1..16, got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mcpc", description="Multi-component progressive-precision compression.")
    p.add_argument("--version", action="version", version=f"mcpc {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def raw_input(sp):
        sp.add_argument("--in", dest="input", required=True, help="headerless little-endian brick")
        sp.add_argument("--dims", type=_dims, required=True, help="extents, e.g. 384,384,256")
        sp.add_argument("--dtype", choices=("f64", "f32"), default="f64")

    c = sub.add_parser("construct", help="build a multi-component archive")
    raw_input(c)
    c.add_argument("--codec", type=_codec, default="quant")
    c.add_argument("--delta", type=_delta, default=8)
    c.add_argument("--n", type=_positive, required=True)
    c.add_argument("--out", required=True)

    r = sub.add_parser("reconstruct", help="sum a prefix of components into a raw brick")
    r.add_argument("--in", dest="input", required=True)
    which = r.add_mutually_exclusive_group(required=True)
    which.add_argument("--m", type=_nonneg)
    which.add_argument("--tol", type=_nonneg_float)
    r.add_argument("--out", required=True)
    r.add_argument("--verbose", "-v", action="store_true")

    i = sub.add_parser("info", help="print archive metadata without reading payloads")
    i.add_argument("--in", dest="input", required=True)

    b = sub.add_parser("bench", help="rate-distortion sweep written as CSV")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("--synthetic", choices=SYNTH_KINDS)
    src.add_argument("--in", dest="input")
    b.add_argument("--dims", type=_dims, required=True)
    b.add_argument("--dtype", choices=("f64", "f32"), default="f64")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--codec", type=_codec, default="quant")
    b.add_argument("--delta", type=_delta, default=8)
    b.add_argument("--n", type=_positive, required=True)
    b.add_argument("--csv", required=True)
    b.add_argument("--derivative-order", type=int, choices=(1, 2))
    b.add_argument("--axis", type=_nonneg, default=0)

    ll = sub.add_parser("lossless", help="add components until the field is reproduced exactly")
    raw_input(ll)
    ll.add_argument("--codec", type=_codec, default="quant")
    ll.add_argument("--delta", type=_delta, default=8)
    ll.add_argument("--max-components", type=_positive, default=64)
    ll.add_argument("--out")

    s = sub.add_parser("split-demo", help="split a double into single-precision components")
    s.add_argument("--value", type=float, required=True)
    s.add_argument("--n", type=_positive, default=2)
    return p


def _print_components(comps, n_values, out):
    rates = component_rates(comps, n_values)
    print(f"{'i':>4} {'tau':>24} {'measured_error':>24} {'R_i':>10}", file=out)
    for rec, r_i in zip(comps, rates):
        print(f"{rec.index:>4} {rec.prescribed_tol:>24.17g} {rec.measured_error:>24.17g} {r_i:>10.4f}", file=out)


def _cmd_construct(args, out):
    x = load_raw(args.input, args.dims, args.dtype)
    st = stats(x)
    comps = construct(x, build_schedule(st.range, args.delta, args.n), args.codec)
    size = write_archive(Archive(x.dims, comps, args.delta, st.range, args.dtype), args.out)
    _print_components(comps, x.size, out)
    print(f"wrote {size} bytes to {args.out}", file=out)


def _cmd_reconstruct(args, out):
    meta = read_archive(args.input, prefix=0)
    if args.m is not None:
        if args.m > meta.n:
            raise ArgumentError(f"--m {args.m} exceeds the archive's {meta.n} components")
        m, met = args.m, True
    else:
        m, met = components_needed(meta.components, args.tol)
    a = read_archive(args.input, prefix=m)
    field = reconstruct(a.components, m, dims=a.dims)
    save_raw(field, args.out, a.source_dtype)
    achieved = a.components[m - 1].measured_error if m else float("nan")
    print(f"m_used {m}", file=out)
    print(f"linf {achieved!r}", file=out)
    if not met:
        print(f"tolerance {args.tol!r} unmet; returned all {m} components", file=out)
    if args.verbose:
        hdr = header_size(len(a.dims), a.n)
        print(f"bytes_read {a.bytes_read} (header {hdr}, payload {a.bytes_read - hdr})", file=out)


def _cmd_info(args, out):
    a = read_archive(args.input, prefix=0)
    print(f"format_version {a.format_version}", file=out)
    print(f"dims {','.join(map(str, a.dims))}", file=out)
    print(f"source_dtype {a.source_dtype}", file=out)
    print(f"delta {a.delta}", file=out)
    print(f"tau0 {a.tau0!r}", file=out)
    print(f"components {a.n}", file=out)
    print(f"payload_bytes {a.payload_bytes}", file=out)
    print(f"header_bytes {header_size(len(a.dims), a.n)}", file=out)
    _print_components(a.components, a.n_values, out)


def _cmd_bench(args, out):
    if args.synthetic:
        x = synth_field(args.synthetic, args.dims, args.seed)
    else:
        x = load_raw(args.input, args.dims, args.dtype)
    if args.derivative_order and not args.axis < len(x.dims):
        raise ArgumentError(f"--axis {args.axis} out of range for {len(x.dims)}-d field")
    records = rd_sweep(x, args.codec, args.delta, args.n)
    write_csv(records, args.csv)
    print(f"wrote {len(records)} rows to {args.csv}", file=out)
    if args.derivative_order:
        comps = construct(x, build_schedule(stats(x).range, args.delta, args.n), args.codec)
        rows = derivative_error_study(comps, x, args.derivative_order, args.axis)
        print(f"{'m':>4} {'field_linf':>24} {'derivative_linf':>24}", file=out)
        for m, f_err, d_err in rows:
            print(f"{m:>4} {f_err:>24.17g} {d_err:>24.17g}", file=out)


def _cmd_lossless(args, out):
    x = load_raw(args.input, args.dims, args.dtype)
    comps = construct_lossless(x, args.delta, args.codec, args.max_components)
    bits = sum(rec.payload_bits for rec in comps)
    width = 64 if args.dtype == "f64" else 32
    print(f"components {len(comps)}", file=out)
    print(f"bits_per_value {bits / x.size:.4f}", file=out)
    print(f"compression_ratio {width * x.size / bits:.4f}", file=out)
    if args.out:
        size = write_archive(Archive(x.dims, comps, args.delta, stats(x).range, args.dtype), args.out)
        print(f"wrote {size} bytes to {args.out}", file=out)


def _cmd_split(args, out):
    parts = split_scalar(args.value, args.n)
    acc = 0.0
    for k, c in enumerate(parts, start=1):
        acc += c
        print(f"c_{k} {c!r}", file=out)
    print(f"sum {acc!r}", file=out)
    print(f"residual {args.value - acc!r}", file=out)


_COMMANDS = {
    "construct": _cmd_construct,
    "reconstruct": _cmd_reconstruct,
    "info": _cmd_info,
    "bench": _cmd_bench,
    "lossless": _cmd_lossless,
    "split-demo": _cmd_split,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS[args.command](args, out)
    except (ArgumentError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except IntegrityError as exc:
        print(f"integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (McpcError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
