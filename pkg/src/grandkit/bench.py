"""Monte-Carlo FER campaigns with deterministic frame-parallel workers.

Every frame is a pure function of (seed, frame index): its Philox
substream yields the message bits, then the noise.  Workers process
fixed-size chunks of consecutive frame indices and the parent merges
chunk results in index order, stopping at the first chunk boundary where
the error target is met - so the output is byte-identical for any worker
count or scheduling.  Wall-clock timings therefore live in the JSON
manifest, not in the CSV.
"""

from __future__ import annotations

import dataclasses
import json
import multiprocessing as mp
import sys
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .channel import QuantSpec, frame_rng, quantize
from .codes import (LinearCode, build_ca_polar, build_random_linear, ca_polar_spec,
                    load_matrix, make_code_from_matrices)
from .cycles import ScheduleConfig, ScheduleTables
from .decoders import _grandab_core, _orbgrand_core, _pack_bits, _pmax_by_lw
from .gf2 import BitWord
from .patterns import PatternBudget, count_queries, max_feasible_size

__all__ = [
    "CampaignSpec",
    "FerRow",
    "run_fer",
    "decode_frames",
    "report_queries",
    "rows_to_csv",
    "FER_CSV_COLUMNS",
    "TRACE_CSV_COLUMNS",
]

FER_CSV_COLUMNS = ("snr_db", "frames", "frame_errors", "fer", "avg_queries",
                   "wc_queries_observed", "avg_cycles")
TRACE_CSV_COLUMNS = ("snr_db", "lw", "p", "suffix_rank", "count")


@dataclass(frozen=True)
class CampaignSpec:
    """Everything a campaign depends on; results are a pure function of this."""

    code_kind: str = "ca-polar"          # ca-polar | random | files
    n: int = 128
    k: int = 105
    crc_len: int = 11
    code_seed: int = 1
    g_file: Optional[str] = None
    h_file: Optional[str] = None
    decoder: str = "orbgrand"            # orbgrand | grandab
    lw_max: int = 64
    p_max: Optional[int] = 6
    ab: int = 3
    snr_db: tuple = (4.0, 5.0, 6.0)
    max_frames: int = 100_000
    min_errors: int = 100
    seed: int = 0
    workers: int = 1
    quantize: bool = False
    chunk_frames: int = 512

    def __post_init__(self):
        if self.max_frames < 1 or self.chunk_frames < 1:
            raise ValueError("frame budget and chunk size must be >= 1")
        if not self.snr_db:
            raise ValueError("snr list must be non-empty")
        if self.decoder not in ("orbgrand", "grandab"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.code_kind not in ("ca-polar", "random", "files"):
            raise ValueError(f"unknown code kind {self.code_kind!r}")


@dataclass
class FerRow:
    snr_db: float
    frames: int
    frame_errors: int
    fer: float
    avg_queries: float
    wc_queries_observed: int
    avg_cycles: Optional[float]
    elapsed_s: float


def resolve_code(spec: CampaignSpec) -> LinearCode:
    if spec.code_kind == "ca-polar":
        return build_ca_polar(ca_polar_spec(spec.n, spec.k, spec.crc_len))
    if spec.code_kind == "random":
        return build_random_linear(spec.n, spec.k, spec.code_seed)
    if spec.g_file is None and spec.h_file is None:
        raise ValueError("code_kind=files needs g_file and/or h_file")
    g = load_matrix(spec.g_file) if spec.g_file else None
    h = load_matrix(spec.h_file) if spec.h_file else None
    return make_code_from_matrices(h, g, name="files")


# ---------------------------------------------------------------------------
# chunk worker
# ---------------------------------------------------------------------------

_W: dict = {}


def _init_worker(code: LinearCode, spec: CampaignSpec):
    _W["code"] = code
    _W["spec"] = spec
    _W["tables"] = None
    if spec.decoder == "orbgrand":
        _W["pmax_by_lw"] = _pmax_by_lw(spec.lw_max, spec.p_max, code.n)
        if spec.lw_max <= code.n:
            # the shift-register schedule is only defined for lw_max <= n
            hw_pmax = spec.p_max if spec.p_max is not None else max_feasible_size(spec.lw_max)
            hw_pmax = max(3, min(hw_pmax, code.n))
            _W["tables"] = ScheduleTables(
                ScheduleConfig(code.n, code.k, spec.lw_max, hw_pmax))


@dataclass
class _ChunkResult:
    frames: int = 0
    errors: int = 0
    abandons: int = 0
    sum_queries: int = 0
    max_queries: int = 0
    sum_cycles: int = 0
    trace: Counter = field(default_factory=Counter)

    def merge(self, other: "_ChunkResult"):
        self.frames += other.frames
        self.errors += other.errors
        self.abandons += other.abandons
        self.sum_queries += other.sum_queries
        self.max_queries = max(self.max_queries, other.max_queries)
        self.sum_cycles += other.sum_cycles
        self.trace.update(other.trace)


def _gen_frames(code: LinearCode, seed: int, snr_db: float, start: int, count: int,
                quant: bool):
    """Vectorized channel stage for one chunk of consecutive frames."""
    n, k = code.n, code.k
    sigma = 10.0 ** (-snr_db / 20.0)
    msgs = np.empty((count, k), dtype=np.uint8)
    noise = np.empty((count, n), dtype=np.float64)
    for i in range(count):
        rng = frame_rng(seed, start + i)
        msgs[i] = rng.integers(0, 2, size=k, dtype=np.uint8)
        noise[i] = rng.standard_normal(n)
    cws = code.encode_batch(msgs)
    y = (1.0 - 2.0 * cws) + sigma * noise
    llrs = 2.0 * y / (sigma * sigma)
    if quant:
        llrs = quantize(llrs, QuantSpec())
    return msgs, cws, llrs


def _run_chunk(args) -> _ChunkResult:
    snr_db, start, count = args
    code: LinearCode = _W["code"]
    spec: CampaignSpec = _W["spec"]
    out = _ChunkResult(frames=count)
    msgs, cws, llrs = _gen_frames(code, spec.seed, snr_db, start, count, spec.quantize)
    hard = (llrs < 0).astype(np.uint8)
    synds = code.syndrome_batch(hard)
    nonzero = synds.any(axis=1)
    is_orb = spec.decoder == "orbgrand"
    tables = _W.get("tables")
    cols = code.col_syndromes
    n = code.n

    for i in range(count):
        if not nonzero[i]:
            # initial check passes; an undetected error means the hard
            # decision landed on a different codeword
            q = 1
            err = not np.array_equal(hard[i], cws[i])
            cycles = 1
            point = (0, 0, 0)
        else:
            yhat = _pack_bits(hard[i])
            s0 = _pack_bits(synds[i])
            if is_orb:
                perm0 = np.argsort(np.abs(llrs[i]), kind="stable").tolist()
                synd = [0] * (n + 1)
                for r, pos in enumerate(perm0):
                    synd[r + 1] = cols[pos]
                found, q, parts = _orbgrand_core(
                    synd, s0, spec.lw_max, _W["pmax_by_lw"], n)
                if found:
                    e = 0
                    for lam in parts:
                        e |= 1 << perm0[lam - 1]
                    msg = code.recover_message_int(yhat ^ e)
                    err = msg != _pack_bits(msgs[i])
                else:
                    err = True
                    out.abandons += 1
                if tables is not None:
                    if not found:
                        point = (-1, 0, 0)
                    elif len(parts) <= 3:
                        point = (sum(parts), len(parts), 0)
                    else:
                        point = (sum(parts), len(parts),
                                 tables.suffix_rank(sum(parts), parts))
                    cycles = tables.cycles_for_point(*point)
            else:
                found, q, parts = _grandab_core(cols, s0, spec.ab, n)
                if found:
                    e = 0
                    for pos in parts:
                        e |= 1 << (pos - 1)
                    msg = code.recover_message_int(yhat ^ e)
                    err = msg != _pack_bits(msgs[i])
                else:
                    err = True
                    out.abandons += 1
        out.errors += int(err)
        out.sum_queries += q
        if q > out.max_queries:
            out.max_queries = q
        if tables is not None:
            out.sum_cycles += cycles
            out.trace[point] += 1
    return out


# ---------------------------------------------------------------------------
# campaign driver
# ---------------------------------------------------------------------------

def _point_chunks(spec: CampaignSpec, snr_db: float):
    start = 0
    while start < spec.max_frames:
        count = min(spec.chunk_frames, spec.max_frames - start)
        yield (snr_db, start, count)
        start += count


def _run_point(spec: CampaignSpec, snr_db: float, pool) -> _ChunkResult:
    agg = _ChunkResult()
    chunks = _point_chunks(spec, snr_db)
    if pool is None:
        for ch in chunks:
            agg.merge(_run_chunk(ch))
            if agg.errors >= spec.min_errors:
                break
        return agg
    # bounded speculation; merge strictly in frame-index order
    inflight = deque()
    exhausted = False
    while True:
        while not exhausted and len(inflight) < spec.workers * 4:
            ch = next(chunks, None)
            if ch is None:
                exhausted = True
                break
            inflight.append(pool.apply_async(_run_chunk, (ch,)))
        if not inflight:
            break
        agg.merge(inflight.popleft().get())
        if agg.errors >= spec.min_errors:
            break
    return agg


def run_fer(spec: CampaignSpec, code: Optional[LinearCode] = None,
            progress=None):
    """Run the campaign; returns (rows, manifest, trace_rows).

    trace_rows are (snr_db, lw, p, suffix_rank, count) tuples for the
    cycle model (orbgrand campaigns only).
    """
    if code is None:
        code = resolve_code(spec)
    if spec.decoder == "orbgrand":
        # validates the budget (and the schedule config inside the worker init)
        PatternBudget(spec.lw_max, spec.p_max, code.n)
    rows = []
    trace_rows = []
    t_campaign = time.perf_counter()
    pool = None
    try:
        if spec.workers > 1:
            # fork keeps child startup cheap and avoids re-importing __main__;
            # workers hold no inherited RNG state (frames key their own streams)
            method = "fork" if "fork" in mp.get_all_start_methods() else "spawn"
            pool = mp.get_context(method).Pool(
                spec.workers, initializer=_init_worker, initargs=(code, spec))
        _init_worker(code, spec)  # also needed locally for workers == 1
        has_cycles = spec.decoder == "orbgrand" and spec.lw_max <= code.n
        for snr in spec.snr_db:
            t0 = time.perf_counter()
            agg = _run_point(spec, snr, pool)
            elapsed = time.perf_counter() - t0
            rows.append(FerRow(
                snr_db=snr,
                frames=agg.frames,
                frame_errors=agg.errors,
                fer=agg.errors / agg.frames,
                avg_queries=agg.sum_queries / agg.frames,
                wc_queries_observed=agg.max_queries,
                avg_cycles=(agg.sum_cycles / agg.frames) if has_cycles else None,
                elapsed_s=elapsed,
            ))
            for (lw, p, rank), cnt in sorted(agg.trace.items()):
                trace_rows.append((snr, lw, p, rank, cnt))
            if progress:
                progress(rows[-1])
    finally:
        if pool is not None:
            pool.terminate()
            pool.join()
    manifest = {
        "tool": "grandkit",
        "version": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "spec": dataclasses.asdict(spec),
        "code": code.name,
        "elapsed_s": time.perf_counter() - t_campaign,
        "per_point_elapsed_s": [r.elapsed_s for r in rows],
        "csv_columns": list(FER_CSV_COLUMNS),
    }
    return rows, manifest, trace_rows


def rows_to_csv(rows) -> str:
    """Fixed-format CSV; timing stays out so reruns are byte-identical."""
    lines = [",".join(FER_CSV_COLUMNS)]
    for r in rows:
        cyc = f"{r.avg_cycles:.6f}" if r.avg_cycles is not None else ""
        lines.append(
            f"{r.snr_db:g},{r.frames},{r.frame_errors},{r.fer:.8e},"
            f"{r.avg_queries:.6f},{r.wc_queries_observed},{cyc}")
    return "\n".join(lines) + "\n"


def trace_to_csv(trace_rows) -> str:
    lines = [",".join(TRACE_CSV_COLUMNS)]
    for snr, lw, p, rank, cnt in trace_rows:
        lines.append(f"{snr:g},{lw},{p},{rank},{cnt}")
    return "\n".join(lines) + "\n"


def parse_trace_csv(text: str):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != ",".join(TRACE_CSV_COLUMNS):
        raise ValueError("bad trace file header")
    out = []
    for ln in lines[1:]:
        snr, lw, p, rank, cnt = ln.split(",")
        out.append((float(snr), int(lw), int(p), int(rank), int(cnt)))
    return out


# ---------------------------------------------------------------------------
# single-frame decode and query reports
# ---------------------------------------------------------------------------

def decode_frames(records, code: LinearCode, budget: PatternBudget,
                  decoder: str = "orbgrand", ab: int = 3):
    """Decode parsed frame-dump records; returns JSON-ready dicts."""
    from .decoders import grandab_decode, orbgrand_decode

    out = []
    for rec in records:
        if decoder == "orbgrand":
            llr_in = rec.qllr if rec.qllr.any() else 2.0 * rec.y / (10 ** (-rec.snr_db / 10))
            o = orbgrand_decode(llr_in, code, budget)
        else:
            hard = BitWord.from_bits((rec.y < 0).astype(int).tolist())
            o = grandab_decode(hard, code, ab)
        d = {
            "found": o.found,
            "abandoned": o.abandoned,
            "queries": o.queries,
            "solution_lw": o.solution_lw,
            "solution_hw": o.solution_hw,
            "message_hex": o.message.to_hex() if o.message else None,
            "codeword_hex": o.codeword.to_hex() if o.codeword else None,
        }
        if rec.tx is not None and o.codeword is not None:
            d["matches_tx"] = o.codeword == rec.tx
        out.append(d)
    return out


def report_queries(budget: PatternBudget) -> dict:
    q = count_queries(budget)
    return {
        "n": budget.n,
        "lw_max": budget.lw_max,
        "p_max": budget.p_max,
        "queries": q,
        "approx": f"{q:.3e}",
    }


def write_json(path, obj) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
