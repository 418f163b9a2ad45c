"""Command-line front end.

Subcommands: fer (Monte-Carlo campaign), decode (frame-dump decoding),
queries (budget query counts), cycles (schedule model report), make-code
(emit G/H matrix files).  Exit codes: 0 success, 1 usage error, 2 data
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .bench import (CampaignSpec, decode_frames, parse_trace_csv, report_queries,
                    resolve_code, rows_to_csv, run_fer, trace_to_csv, write_json)
from .channel import parse_frame_dump
from .codes import (MatrixFormatError, build_ca_polar, build_random_linear,
                    ca_polar_spec, save_matrix)
from .cycles import (DEFAULT_FREQ_MHZ, DEFAULT_OVERHEAD_CYCLES, ScheduleConfig,
                     report_without_trace, trace_latency)
from .patterns import PatternBudget

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(USAGE_EXIT)


def _add_code_args(p):
    p.add_argument("--code", default="ca-polar", choices=["ca-polar", "random", "files"])
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--k", type=int, default=105)
    p.add_argument("--crc-len", type=int, default=11)
    p.add_argument("--code-seed", type=int, default=1)
    p.add_argument("--g-file", default=None)
    p.add_argument("--h-file", default=None)


def _add_budget_args(p):
    p.add_argument("--lw-max", type=int, default=64)
    p.add_argument("--p-max", type=int, default=6,
                   help="max partition size; 0 means unbounded")
    p.add_argument("--ab", type=int, default=3, help="GRANDAB weight limit")


def build_parser() -> _Parser:
    top = _Parser(prog="grandkit", description=__doc__)
    top.add_argument("--version", action="version", version=f"grandkit {__version__}")
    sub = top.add_subparsers(dest="cmd", required=True)

    fer = sub.add_parser("fer", help="Monte-Carlo FER campaign")
    _add_code_args(fer)
    _add_budget_args(fer)
    fer.add_argument("--decoder", default="orbgrand", choices=["orbgrand", "grandab"])
    fer.add_argument("--snr", default="4,5,6", help="comma-separated SNR points in dB")
    fer.add_argument("--max-frames", type=int, default=100_000)
    fer.add_argument("--min-errors", type=int, default=100)
    fer.add_argument("--seed", type=int, default=0)
    fer.add_argument("--workers", type=int, default=1)
    fer.add_argument("--quantize", action="store_true")
    fer.add_argument("--chunk-frames", type=int, default=512)
    fer.add_argument("--spec", default=None,
                     help="JSON file with CampaignSpec fields; explicit flags override")
    fer.add_argument("-o", "--out", default=None, help="CSV output path (default stdout)")
    fer.add_argument("--manifest", default=None, help="manifest JSON path")
    fer.add_argument("--trace", default=None, help="termination trace CSV path")
    fer.add_argument("--json", action="store_true", help="rows as JSON to stdout")
    fer.add_argument("--progress", action="store_true", help="per-point progress to stderr")

    dec = sub.add_parser("decode", help="decode frames from a frame-dump file")
    _add_code_args(dec)
    _add_budget_args(dec)
    dec.add_argument("--decoder", default="orbgrand", choices=["orbgrand", "grandab"])
    dec.add_argument("frames", help="frame dump file (channel diagnostics format)")

    q = sub.add_parser("queries", help="query-count report for a budget")
    q.add_argument("--lw-max", type=int, required=True)
    q.add_argument("--p-max", type=int, default=0, help="0 means unbounded")
    q.add_argument("--n", type=int, default=128)

    cyc = sub.add_parser("cycles", help="schedule-model cycle report")
    cyc.add_argument("--n", type=int, default=128)
    cyc.add_argument("--k", type=int, default=105)
    cyc.add_argument("--lw-max", type=int, default=64)
    cyc.add_argument("--p-max", type=int, default=6)
    cyc.add_argument("--freq-mhz", type=float, default=DEFAULT_FREQ_MHZ)
    cyc.add_argument("--overhead-cycles", type=int, default=DEFAULT_OVERHEAD_CYCLES)
    cyc.add_argument("--trace", default=None, help="trace CSV from `fer --trace`")
    cyc.add_argument("--snr", type=float, default=None,
                     help="restrict the trace to one SNR point")

    mk = sub.add_parser("make-code", help="construct a code and write matrix files")
    _add_code_args(mk)
    mk.add_argument("--out-g", default=None, help="generator output (.hex or .alist)")
    mk.add_argument("--out-h", default=None, help="parity-check output (.hex or .alist)")
    return top


def _spec_from_args(args) -> CampaignSpec:
    base = {}
    if args.spec:
        base = json.loads(Path(args.spec).read_text())
        if "snr_db" in base and isinstance(base["snr_db"], list):
            base["snr_db"] = tuple(base["snr_db"])
    cli = dict(
        code_kind=args.code, n=args.n, k=args.k, crc_len=args.crc_len,
        code_seed=args.code_seed, g_file=args.g_file, h_file=args.h_file,
        decoder=args.decoder, lw_max=args.lw_max,
        p_max=None if args.p_max == 0 else args.p_max, ab=args.ab,
        snr_db=tuple(float(s) for s in args.snr.split(",")),
        max_frames=args.max_frames, min_errors=args.min_errors,
        seed=args.seed, workers=args.workers, quantize=args.quantize,
        chunk_frames=args.chunk_frames,
    )
    defaults = build_parser().parse_args(["fer"])
    # flag left at its default does not override a --spec file value
    merged = dict(base)
    for key, val in cli.items():
        if key not in merged:
            merged[key] = val
            continue
        default_val = getattr(defaults, _argname(key), None)
        if _normalize(key, val) != _normalize(key, default_val):
            merged[key] = val
    return CampaignSpec(**merged)


def _argname(key):
    return {"code_kind": "code", "snr_db": "snr"}.get(key, key)


def _normalize(key, val):
    if key == "snr_db" and isinstance(val, str):
        return tuple(float(s) for s in val.split(","))
    if key == "p_max" and val == 0:
        return None
    return val


def _build_code(args):
    if args.code == "ca-polar":
        return build_ca_polar(ca_polar_spec(args.n, args.k, args.crc_len))
    if args.code == "random":
        return build_random_linear(args.n, args.k, args.code_seed)
    spec = CampaignSpec(code_kind="files", g_file=args.g_file, h_file=args.h_file)
    return resolve_code(spec)


def cmd_fer(args) -> int:
    spec = _spec_from_args(args)
    progress = None
    if args.progress:
        def progress(row):
            print(f"# snr={row.snr_db:g} frames={row.frames} errors={row.frame_errors} "
                  f"fer={row.fer:.3e} elapsed={row.elapsed_s:.1f}s", file=sys.stderr)
    rows, manifest, trace_rows = run_fer(spec, progress=progress)
    if args.json:
        payload = [dict(snr_db=r.snr_db, frames=r.frames, frame_errors=r.frame_errors,
                        fer=r.fer, avg_queries=r.avg_queries,
                        wc_queries_observed=r.wc_queries_observed,
                        avg_cycles=r.avg_cycles) for r in rows]
        print(json.dumps(payload, indent=2))
    csv_text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text)
    elif not args.json:
        sys.stdout.write(csv_text)
    if args.manifest:
        write_json(args.manifest, manifest)
    if args.trace:
        Path(args.trace).write_text(trace_to_csv(trace_rows))
    return 0


def cmd_decode(args) -> int:
    code = _build_code(args)
    records = parse_frame_dump(args.frames, code.n)
    budget = PatternBudget(args.lw_max, None if args.p_max == 0 else args.p_max, code.n)
    results = decode_frames(records, code, budget, decoder=args.decoder, ab=args.ab)
    print(json.dumps(results if len(results) != 1 else results[0], indent=2))
    return 0


def cmd_queries(args) -> int:
    budget = PatternBudget(args.lw_max, None if args.p_max == 0 else args.p_max, args.n)
    print(json.dumps(report_queries(budget), indent=2))
    return 0


def cmd_cycles(args) -> int:
    cfg = ScheduleConfig(n=args.n, k=args.k, lw_max=args.lw_max, p_max=args.p_max,
                         freq_mhz=args.freq_mhz, overhead_cycles=args.overhead_cycles)
    if args.trace:
        points = parse_trace_csv(Path(args.trace).read_text())
        if args.snr is not None:
            points = [p for p in points if p[0] == args.snr]
        report = trace_latency([(lw, p, r, c) for _s, lw, p, r, c in points], cfg)
    else:
        report = report_without_trace(cfg)
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0


def cmd_make_code(args) -> int:
    code = _build_code(args)
    if not args.out_g and not args.out_h:
        raise ValueError("nothing to do: pass --out-g and/or --out-h")
    if args.out_g:
        save_matrix(code.G, args.out_g)
    if args.out_h:
        save_matrix(code.H, args.out_h)
    print(json.dumps({"code": code.name, "n": code.n, "k": code.k,
                      "g": args.out_g, "h": args.out_h}, indent=2))
    return 0


_COMMANDS = {
    "fer": cmd_fer,
    "decode": cmd_decode,
    "queries": cmd_queries,
    "cycles": cmd_cycles,
    "make-code": cmd_make_code,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except (OSError, MatrixFormatError, ValueError, json.JSONDecodeError) as e:
        print(f"grandkit: error: {e}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
