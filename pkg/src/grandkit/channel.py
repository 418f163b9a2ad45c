"""BPSK over AWGN with per-frame counter-based randomness.

Conventions (shared with the decoders): bit 0 maps to +1, so a positive
LLR votes for bit 0 and the hard decision is 1 iff the LLR is negative.
SNR in dB is -10*log10(sigma^2).  Every frame draws from its own Philox
substream keyed by (seed, frame index) - message bits first, then noise -
so campaigns are reproducible regardless of worker scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .gf2 import BitWord

__all__ = [
    "ChannelConfig",
    "QuantSpec",
    "frame_rng",
    "noise_sigma",
    "transmit",
    "llr",
    "quantize",
    "hard_decision",
    "dump_frames",
    "parse_frame_dump",
    "FrameRecord",
]


@dataclass(frozen=True)
class QuantSpec:
    """5-bit input quantization: 1 sign bit, 1 implied integer bit, 3
    fractional bits; representable magnitudes are 0..1.875 in steps of 1/8.

    prescale=None applies per-frame normalization (divide by max |llr|,
    multiply by 1.875) to use the full range; a fixed float gives the
    hardware-style global scaling.
    """

    total_bits: int = 5
    sign_bits: int = 1
    frac_bits: int = 3
    prescale: Optional[float] = None

    @property
    def step(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def max_mag(self) -> float:
        return (2 ** (self.total_bits - self.sign_bits) - 1) * self.step


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float
    seed: int = 0
    quant: Optional[QuantSpec] = None

    @property
    def sigma2(self) -> float:
        return 10.0 ** (-self.snr_db / 10.0)


def noise_sigma(snr_db: float) -> float:
    return 10.0 ** (-snr_db / 20.0)


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """Philox substream for one frame; counter-based, so creation is cheap
    and streams never collide across (seed, frame) pairs."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), frame]))


def transmit(codeword: BitWord, cfg: ChannelConfig, frame: int = 0) -> np.ndarray:
    """BPSK-modulate and add AWGN; deterministic per (cfg.seed, frame)."""
    bits = codeword.to_array()
    x = 1.0 - 2.0 * bits
    rng = frame_rng(cfg.seed, frame)
    return x + noise_sigma(cfg.snr_db) * rng.standard_normal(len(bits))


def llr(y: np.ndarray, sigma2: float) -> np.ndarray:
    """AWGN LLRs under the bit-0 -> +1 convention: 2y / sigma^2."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    return 2.0 * np.asarray(y, dtype=np.float64) / sigma2


def quantize(llrs: np.ndarray, q: QuantSpec) -> np.ndarray:
    """Round to the 5-bit grid: scale, round-half-to-even to 1/8 steps,
    saturate at the max magnitude, keep the sign."""
    a = np.asarray(llrs, dtype=np.float64)
    mag = np.abs(a)
    if q.prescale is None:
        peak = mag.max() if a.size else 0.0
        scale = q.max_mag / peak if peak > 0 else 1.0
    else:
        scale = q.prescale
    # np.round is round-half-to-even, which decides ties on the 1/16 grid
    qmag = np.round(mag * scale / q.step) * q.step
    qmag = np.minimum(qmag, q.max_mag)
    return np.where(a < 0, -qmag, qmag)


def hard_decision(llrs: np.ndarray) -> np.ndarray:
    """Bit 1 iff LLR < 0 (LLR of exactly 0 maps to bit 0)."""
    return (np.asarray(llrs) < 0).astype(np.uint8)


# ---------------------------------------------------------------------------
# frame dump (diagnostics / decode-one fixtures)
# ---------------------------------------------------------------------------

@dataclass
class FrameRecord:
    seed: int
    snr_db: float
    tx: BitWord
    y: np.ndarray
    qllr: np.ndarray


def dump_frames(path, records) -> None:
    """One frame per line: seed, snr_db, tx bits hex, y values, quantized LLRs."""
    lines = ["# grandkit frame dump v1"]
    for r in records:
        ys = ",".join(f"{v:.6g}" for v in r.y)
        qs = ",".join(f"{v:.6g}" for v in r.qllr)
        lines.append(f"seed={r.seed} snr_db={r.snr_db:g} tx={r.tx.to_hex()} y={ys} qllr={qs}")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def parse_frame_dump(path, n: int) -> list:
    """Parse a frame dump; raises ValueError with line context on bad input."""
    records = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = {}
            for tok in line.split():
                if "=" not in tok:
                    raise ValueError(f"{path}:{lineno}: expected key=value, got {tok!r}")
                key, val = tok.split("=", 1)
                fields[key] = val
            try:
                rec = FrameRecord(
                    seed=int(fields["seed"]),
                    snr_db=float(fields["snr_db"]),
                    tx=BitWord.from_hex(fields["tx"], n),
                    y=np.array([float(v) for v in fields["y"].split(",")]),
                    qllr=np.array([float(v) for v in fields["qllr"].split(",")]),
                )
            except KeyError as e:
                raise ValueError(f"{path}:{lineno}: missing field {e}") from None
            except ValueError as e:
                raise ValueError(f"{path}:{lineno}: {e}") from None
            if len(rec.y) != n or len(rec.qllr) != n:
                raise ValueError(f"{path}:{lineno}: expected {n} samples per frame")
            records.append(rec)
    return records
