"""Posit<N, ES> codec between bit patterns and the unpacked PIR form.

A posit word is an ``n_bits`` two's-complement pattern.  Decoding follows the
hardware flow: strip the sign (two's-complement negate negative words), count
the regime run with an LZC, shift the exponent and fraction fields up with a
barrel shifter, and merge regime and exponent into one binary exponent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from pvu.hw_datapath import barrel_shift_left, lzc, mask, shift_right_sticky


class NotARealError(ValueError):
    """Raised when a numeric value is requested for NaR."""


class Special(enum.Enum):
    NORMAL = "Normal"
    ZERO = "Zero"
    NAR = "NaR"


@dataclass(frozen=True)
class PositConfig:
    """Posit width, exponent width and the alignment window of the adder.

    ``align_bits`` defaults to ``n_bits``, the smallest allowed value.
    """
    n_bits: int
    es_bits: int
    align_bits: int = field(default=0)

    def __post_init__(self):
        if self.align_bits == 0:
            object.__setattr__(self, "align_bits", self.n_bits)
        if not 2 < self.n_bits <= 64:
            raise ValueError(f"n_bits must be in (2, 64], got {self.n_bits}")
        if not 0 <= self.es_bits < self.n_bits - 2:
            raise ValueError(f"es_bits must be in [0, {self.n_bits - 2}), got {self.es_bits}")
        if self.align_bits < self.n_bits:
            raise ValueError("align_bits must be >= n_bits")

    @property
    def frac_width(self) -> int:
        """Widest fraction field any word of this format can carry."""
        return max(self.n_bits - 3 - self.es_bits, 0)

    @property
    def nar(self) -> int:
        return 1 << (self.n_bits - 1)

    @property
    def maxpos(self) -> int:
        return mask(self.n_bits - 1)

    @property
    def minpos(self) -> int:
        return 1

    @property
    def max_exp(self) -> int:
        """Binary exponent of maxpos."""
        return (self.n_bits - 2) << self.es_bits

    def hex_digits(self) -> int:
        return (self.n_bits + 3) // 4

    def check_word(self, w: int) -> int:
        if not 0 <= w <= mask(self.n_bits):
            raise ValueError(f"0x{w:x} is not a {self.n_bits}-bit word")
        return w


@dataclass(frozen=True)
class PIR:
    """Unpacked posit: ``(-1)**sign * frc * 2**(exp - frac_bits)``.

    ``frc`` carries the implicit bit explicitly; for a normalized PIR it sits
    at position ``frac_bits``.
    """
    sign: bool
    exp: int
    frc: int
    frac_bits: int
    special: Special = Special.NORMAL

    @property
    def is_normal(self) -> bool:
        return self.special is Special.NORMAL

    @property
    def is_nar(self) -> bool:
        return self.special is Special.NAR

    @property
    def is_zero(self) -> bool:
        return self.special is Special.ZERO

    @property
    def value(self) -> Fraction:
        if self.special is Special.NAR:
            raise NotARealError("NaR has no real value")
        if self.special is Special.ZERO:
            return Fraction(0)
        v = Fraction(self.frc) * Fraction(2) ** (self.exp - self.frac_bits)
        return -v if self.sign else v

    def negate(self) -> PIR:
        if not self.is_normal:
            return self
        return PIR(not self.sign, self.exp, self.frc, self.frac_bits)


ZERO = PIR(False, 0, 0, 0, Special.ZERO)
NAR = PIR(False, 0, 0, 0, Special.NAR)


def useed(cfg: PositConfig | int) -> int:
    es = cfg.es_bits if isinstance(cfg, PositConfig) else cfg
    if not 0 <= es <= 6:
        raise OverflowError(f"useed for es={es} does not fit in 128 bits")
    return 1 << (1 << es)


def twos_complement(w: int, n_bits: int) -> int:
    return -w & mask(n_bits)


def classify(w: int, cfg: PositConfig) -> Special:
    cfg.check_word(w)
    if w == 0:
        return Special.ZERO
    if w == cfg.nar:
        return Special.NAR
    return Special.NORMAL


@lru_cache(maxsize=1 << 18)
def decode(w: int, cfg: PositConfig) -> PIR:
    n, es = cfg.n_bits, cfg.es_bits
    special = classify(w, cfg)
    if special is Special.ZERO:
        return ZERO
    if special is Special.NAR:
        return NAR
    sign = bool(w >> (n - 1))
    if sign:
        w = twos_complement(w, n)
    body_width = n - 1
    body = w & mask(body_width)
    r0 = body >> (body_width - 1)
    count, _ = lzc(~body if r0 else body, body_width)
    run = count
    r = run - 1 if r0 else -run
    # drop regime run plus terminator; the all-regime case leaves nothing
    consumed = min(run + 1, body_width)
    rest_width = body_width - consumed
    rest = barrel_shift_left(body, consumed, body_width) if consumed < body_width else 0
    e = rest >> (body_width - es) if es else 0
    frac_len = max(rest_width - es, 0)
    frac_field = (rest >> (body_width - es - frac_len)) & mask(frac_len) if frac_len else 0
    fw = cfg.frac_width
    frc = (1 << fw) | (frac_field << (fw - frac_len))
    return PIR(sign, (r << es) | e, frc, fw)


def regime_fields(p: PIR, cfg: PositConfig) -> tuple[int, int, int]:
    """Split a normal PIR's exponent into ``(r, e, fraction bits)``."""
    r = p.exp >> cfg.es_bits
    e = p.exp & mask(cfg.es_bits)
    return r, e, p.frc & mask(p.frac_bits)


def encode(p: PIR, cfg: PositConfig) -> int:
    """Pack a PIR into an n-bit word with round-to-nearest-even on the pattern.

    The unbounded pattern (regime, exponent, fraction) is built first and then
    cut to ``n_bits - 1`` body bits.  Results never round to zero or NaR:
    magnitudes beyond maxpos clamp to maxpos, nonzero ones below minpos to
    minpos.
    """
    if p.is_nar:
        return cfg.nar
    if p.is_zero or p.frc == 0:
        return 0
    n, es = cfg.n_bits, cfg.es_bits
    top = p.frc.bit_length() - 1
    exp = p.exp + top - p.frac_bits
    fbits = top
    r = exp >> es
    e = exp & mask(es)
    frac = p.frc & mask(fbits)
    if r >= n - 2:
        body = cfg.maxpos
    elif r < -(n - 2):
        body = cfg.minpos
    else:
        # regime value 1 (0..01) grows into the run of the right polarity
        if r >= 0:
            regime, rlen = mask(r + 1) << 1, r + 2
        else:
            regime, rlen = 1, -r + 1
        pattern = (((regime << es) | e) << fbits) | frac
        length = rlen + es + fbits
        cut = length - (n - 1)
        if cut <= 0:
            body = pattern << -cut
        else:
            body = pattern >> cut
            rem = pattern & mask(cut)
            half = 1 << (cut - 1)
            if rem > half or (rem == half and body & 1):
                body += 1
        body = min(max(body, cfg.minpos), cfg.maxpos)
    return twos_complement(body, n) if p.sign else body


def to_real(w: int, cfg: PositConfig) -> Fraction:
    return decode(w, cfg).value


def normalize_bits(frc: int, frac_bits: int, keep: int) -> tuple[int, int, int]:
    """Put the leading one of ``frc`` at bit ``frac_bits`` and narrow.

    Returns ``(frc, frac_bits, exp_shift)``.  When more than ``keep``
    fractional bits remain, the excess is folded into a sticky LSB.
    """
    width = max(frc.bit_length(), frac_bits + 1)
    count, _ = lzc(frc, width)
    top = width - 1 - count
    exp_shift = top - frac_bits
    if exp_shift < 0:
        frc = barrel_shift_left(frc, -exp_shift, width)
    else:
        frac_bits = top
    if frac_bits > keep:
        frc = shift_right_sticky(frc, frac_bits - keep)
        frac_bits = keep
    return frc, frac_bits, exp_shift


@dataclass(frozen=True)
class PositFields:
    """Raw field view of one word, for display."""
    sign: int
    regime: str
    run: int
    r: int
    exponent: str
    e: int
    fraction: str

    @property
    def f(self) -> Fraction:
        if not self.fraction:
            return Fraction(0)
        return Fraction(int(self.fraction, 2), 1 << len(self.fraction))

    def f_text(self) -> str:
        if not self.fraction:
            return "0"
        return f"{int(self.fraction, 2)}/{1 << len(self.fraction)}"


def fields(w: int, cfg: PositConfig) -> PositFields:
    """Split a normal word into its sign, regime, exponent and fraction fields."""
    if classify(w, cfg) is not Special.NORMAL:
        raise ValueError(f"0x{w:x} is {classify(w, cfg).value}, it has no fields")
    n, es = cfg.n_bits, cfg.es_bits
    sign = w >> (n - 1)
    mag = twos_complement(w, n) if sign else w
    body = format(mag, f"0{n}b")[1:]
    run = len(body) - len(body.lstrip(body[0]))
    regime = body[:run + 1]
    rest = body[run + 1:]
    exponent = rest[:es]
    e = int(exponent.ljust(es, "0"), 2) if es else 0
    return PositFields(sign, regime, run, run - 1 if body[0] == "1" else -run,
                       exponent, e, rest[es:])
