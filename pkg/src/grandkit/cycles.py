"""Analytical cycle model of the shift-register ORBGRAND architecture.

The modeled schedule: a syndrome check of the hard decision, a bitonic
sorter pipelined to log2(n) stages, one time-step that tests every
single-bit flip, then for each logistic weight lw = 3..lw_max one
time-step that covers all size-2 and size-3 partitions (three shift
registers feeding XOR-gate buses) plus one time-step per fixed
(lambda_4..lambda_P) suffix for sizes above three.

Worst-case latency counts the whole chain.  The default overhead constant
is -1 cycle: the initial syndrome check overlaps the first sorter stage,
which is the only accounting that reproduces the reference worst case of
4226 cycles for (n=128, lw<=64, P<=6); the constant is configurable and
reported.  Average (trace-driven) figures count decoder-core occupancy
only - the sorter is pipelined, so its fill does not consume core
time-steps on a frame-by-frame basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .patterns import max_feasible_size, partitions_of

__all__ = [
    "ScheduleConfig",
    "RegisterLayout",
    "CycleReport",
    "steps_for_lw",
    "suffix_steps",
    "worst_case_cycles",
    "build_register_layout",
    "parallel_coverage",
    "suffix_sweeps",
    "ScheduleTables",
    "trace_latency",
    "DEFAULT_FREQ_MHZ",
    "DEFAULT_OVERHEAD_CYCLES",
]

DEFAULT_FREQ_MHZ = 454.0
DEFAULT_OVERHEAD_CYCLES = -1


@dataclass(frozen=True)
class ScheduleConfig:
    n: int
    k: int
    lw_max: int
    p_max: int
    freq_mhz: float = DEFAULT_FREQ_MHZ
    overhead_cycles: int = DEFAULT_OVERHEAD_CYCLES

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two (pipelined bitonic sorter)")
        if not 0 < self.k < self.n:
            raise ValueError("need 0 < k < n")
        if self.p_max < 3:
            raise ValueError("architecture hard-wires 3 shift registers; p_max >= 3")
        if not 0 <= self.lw_max <= self.n:
            raise ValueError("schedule model assumes lw_max <= n")
        if self.freq_mhz <= 0:
            raise ValueError("freq_mhz must be positive")


def _lam_bound(m: int, i: int, suffix_sum: int) -> int:
    num = 2 * m - i * (i - 1) + 2 - 2 * suffix_sum
    q, r = divmod(num, 2 * i)
    return q - 1 if r == 0 else q


def suffix_steps(lw: int, p: int) -> int:
    """Time-steps for size-p (> 3) partitions of lw: one per
    (lambda_4..lambda_p) suffix, counted by the nested bounded sums."""
    if p <= 3:
        return 0
    if lw < p * (p + 1) // 2:
        return 0

    def rec(i, prev, total):
        if i == 3:
            return 1
        hi = _lam_bound(lw, i, total)
        return sum(rec(i - 1, v, total + v) for v in range(prev + 1, hi + 1))

    return rec(p, 0, 0)


def steps_for_lw(lw: int, p_max: int) -> int:
    """Schedule steps spent at one logistic weight (sizes >= 2).

    Assumes lw <= n so the part cap never binds.  One step covers all
    size-2/3 partitions when any exist (lw >= 3), plus the per-suffix
    steps for each feasible size in [4, p_max].
    """
    if lw < 1:
        raise ValueError("lw must be >= 1")
    steps = 1 if lw >= 3 else 0
    for p in range(4, p_max + 1):
        steps += suffix_steps(lw, p)
    return steps


def worst_case_cycles(cfg: ScheduleConfig) -> int:
    """Initial check + log2(n) sorter stages + the one-flip step + every
    per-lw step, plus the configured overhead constant."""
    total = 1 + int(math.log2(cfg.n)) + 1 + cfg.overhead_cycles
    for lw in range(3, cfg.lw_max + 1):
        total += steps_for_lw(lw, cfg.p_max)
    return total


# ---------------------------------------------------------------------------
# register layout and parallel coverage
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegisterLayout:
    """Shift-register contents for one logistic weight.

    reg1[i-1] holds s_{lw-i}, reg2[i-1] and reg3[i-1] hold s_i (slots are
    1-indexed in the architecture; labels are syndrome subscripts, None
    where the subscript would be out of [1, n]).  Bus b pairs reg1 slot
    b+i with reg2 slot i; bus 0 tests 2-bit flips, buses 1..lam3_max add
    reg3 slot b for 3-bit flips.
    """

    lw: int
    reg1: tuple
    reg2: tuple
    reg3: tuple
    busses: int


def build_register_layout(lw: int, n: int) -> RegisterLayout:
    lam3_max = max(_lam_bound(lw, 3, 0), 0)
    length = 2 * (lam3_max + 1)

    def label(sub):
        return sub if 1 <= sub <= n else None

    reg1 = tuple(label(lw - i) for i in range(1, length + 1))
    reg2 = tuple(label(i) for i in range(1, length + 1))
    reg3 = tuple(label(i) for i in range(1, lam3_max + 1))
    return RegisterLayout(lw=lw, reg1=reg1, reg2=reg2, reg3=reg3, busses=lam3_max + 1)


def parallel_coverage(lw: int, layout: RegisterLayout) -> set:
    """Partitions tested by the bus/XOR arrangement in the one size-2/3 step.

    Walks the wiring (diagonal bus offsets over the register slots) and
    keeps the combinations that form valid strictly-decreasing partitions
    of lw; must equal the size-2 plus size-3 partition sets.
    """
    out = set()
    length = len(layout.reg2)
    # bus 0: reg1[i] ^ reg2[i] -> (lw - i, i)
    for i in range(1, length + 1):
        lam1, lam2 = layout.reg1[i - 1], layout.reg2[i - 1]
        if lam1 is None or lam2 is None:
            continue
        if lam1 > lam2 >= 1:
            out.add((lam1, lam2))
    # bus b: reg1[b + i] ^ reg2[i] ^ reg3[b] -> (lw - b - i, i, b)
    for b in range(1, layout.busses):
        lam3 = layout.reg3[b - 1]
        if lam3 is None:
            continue
        for i in range(1, length - b + 1):
            lam1, lam2 = layout.reg1[b + i - 1], layout.reg2[i - 1]
            if lam1 is None or lam2 is None:
                continue
            if lam1 > lam2 > lam3:
                out.add((lam1, lam2, lam3))
    return out


def suffix_sweeps(lw: int, p_max: int, n: int):
    """Yield (suffix, prefix_set) for every controller step at this lw.

    Sizes ascend; within one size the suffix wheels advance with lambda_4
    fastest.  Each step re-aims the registers at weight lw - sum(suffix)
    with shift values that keep lambda_3 above lambda_4, so the prefix set
    is the size-3 partitions of the residual weight with that floor.
    """
    for p in range(4, p_max + 1):
        if lw < p * (p + 1) // 2:
            continue
        for suffix in _walk_suffixes(lw, p, n):
            m = lw - sum(suffix)
            prefix = {parts for parts in partitions_of(m, 3, n) if parts[2] > suffix[0]}
            yield suffix, prefix


def _walk_suffixes(lw, p, n, _i=None, _prev=0, _total=0, _tail=()):
    """(lambda_4..lambda_p) tuples for size-p partitions of lw, lambda_4 fastest."""
    i = p if _i is None else _i
    if i == 3:
        yield _tail
        return
    hi = min(_lam_bound(lw, i, _total), n - (i - 1))
    for v in range(_prev + 1, hi + 1):
        yield from _walk_suffixes(lw, p, n, i - 1, v, _total + v, (v,) + _tail)


# ---------------------------------------------------------------------------
# trace-driven latency
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CycleReport:
    wc_cycles: int
    wc_latency_ns: float
    avg_cycles: Optional[float]
    avg_latency_ns: Optional[float]
    avg_info_throughput_gbps: Optional[float]
    overhead_cycles: int
    frames: int = 0

    def to_json_dict(self) -> dict:
        return {
            "wc_cycles": self.wc_cycles,
            "wc_latency_ns": self.wc_latency_ns,
            "avg_cycles": self.avg_cycles,
            "avg_latency_ns": self.avg_latency_ns,
            "avg_tp_gbps": self.avg_info_throughput_gbps,
            "overhead_constant_used": self.overhead_cycles,
            "frames": self.frames,
        }


class ScheduleTables:
    """Precomputed per-lw step counts plus the occupancy map for traces.

    Occupancy of a frame = decoder-core time-steps it holds: 1 for the
    initial check (1-cycle exit when it passes), 1 for the one-flip step,
    one per lw group step up to the termination point.  Sorter stages are
    pipelined across frames and excluded here; they do appear in the
    worst-case latency.
    """

    def __init__(self, cfg: ScheduleConfig):
        self.cfg = cfg
        self.steps = [0] * (cfg.lw_max + 1)
        for lw in range(3, cfg.lw_max + 1):
            self.steps[lw] = steps_for_lw(lw, cfg.p_max)
        self.cum = [0] * (cfg.lw_max + 1)
        acc = 0
        for lw in range(cfg.lw_max + 1):
            acc += self.steps[lw]
            self.cum[lw] = acc
        self._suffix_order_cache = {}

    def full_occupancy(self) -> int:
        return 2 + self.cum[self.cfg.lw_max]

    def suffix_rank(self, lw: int, parts: tuple) -> int:
        """1-based position of this partition's controller step within the
        size>3 sweeps of its lw group."""
        p = len(parts)
        rank = 0
        for pp in range(4, p):
            rank += suffix_steps(lw, pp)
        key = (lw, p)
        order = self._suffix_order_cache.get(key)
        if order is None:
            order = {
                suffix: idx + 1
                for idx, suffix in enumerate(_walk_suffixes(lw, p, self.cfg.n))
            }
            self._suffix_order_cache[key] = order
        return rank + order[tuple(parts[3:])]

    def cycles_for_point(self, lw: int, p: int, suffix_rank: int) -> int:
        """Occupancy cycles for a frame ending at (lw, p); lw == -1 means
        abandonment, lw == 0 a pass of the initial check."""
        if lw == -1:
            return self.full_occupancy()
        if lw == 0:
            return 1
        if p == 1:
            return 2
        base = 2 + (self.cum[lw - 1] if lw >= 1 else 0)
        if p <= 3:
            return base + 1
        return base + 1 + suffix_rank

    def cycles_for_outcome(self, outcome) -> int:
        if not outcome.found:
            return self.full_occupancy()
        lw = outcome.solution_lw
        p = outcome.solution_hw
        if lw == 0 or p <= 3:
            return self.cycles_for_point(lw, p, 0)
        return self.cycles_for_point(lw, p, self.suffix_rank(lw, outcome.solution_parts))

    def point_for_outcome(self, outcome) -> tuple:
        """(lw, p, suffix_rank) trace point; lw = -1 for abandonment."""
        if not outcome.found:
            return (-1, 0, 0)
        lw, p = outcome.solution_lw, outcome.solution_hw
        if lw == 0 or p <= 3:
            return (lw, p, 0)
        return (lw, p, self.suffix_rank(lw, outcome.solution_parts))


def trace_latency(trace: Iterable, cfg: ScheduleConfig) -> CycleReport:
    """Aggregate a termination trace into average latency and throughput.

    Trace entries are (lw, p, suffix_rank) or (lw, p, suffix_rank, count);
    lw = -1 marks abandonment, lw = 0 a frame that passed the initial
    syndrome check (costs exactly 1 cycle).
    """
    tables = ScheduleTables(cfg)
    total = 0
    frames = 0
    for entry in trace:
        if len(entry) == 3:
            lw, p, rank = entry
            count = 1
        else:
            lw, p, rank, count = entry
        total += tables.cycles_for_point(lw, p, rank) * count
        frames += count
    if frames == 0:
        raise ValueError("empty trace")
    wc = worst_case_cycles(cfg)
    cycle_ns = 1000.0 / cfg.freq_mhz
    avg_cycles = total / frames
    avg_ns = avg_cycles * cycle_ns
    return CycleReport(
        wc_cycles=wc,
        wc_latency_ns=wc * cycle_ns,
        avg_cycles=avg_cycles,
        avg_latency_ns=avg_ns,
        avg_info_throughput_gbps=cfg.k / avg_ns,
        overhead_cycles=cfg.overhead_cycles,
        frames=frames,
    )


def report_without_trace(cfg: ScheduleConfig) -> CycleReport:
    wc = worst_case_cycles(cfg)
    cycle_ns = 1000.0 / cfg.freq_mhz
    return CycleReport(wc, wc * cycle_ns, None, None, None, cfg.overhead_cycles, 0)
