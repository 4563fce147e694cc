"""Bit-level building blocks of the vector datapath.

Everything here works on plain Python integers treated as fixed-width bit
vectors.  The functions mirror hardware cells (LZC, barrel shifter, radix-4
Booth recoder, carry-save compressor tree, Newton-Raphson reciprocal) closely
enough that the arithmetic identities can be checked exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


def mask(width: int) -> int:
    return (1 << width) - 1


def lzc(x: int, width: int) -> tuple[int, bool]:
    """Leading-zero count of ``x`` viewed as a ``width``-bit vector.

    Returns ``(count, all_zero)``; an all-zero input reports ``count == width``.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    x &= mask(width)
    if x == 0:
        return width, True
    return width - x.bit_length(), False


def barrel_shift_left(x: int, k: int, width: int) -> int:
    """Logical left shift inside a ``width``-bit register."""
    if not 0 <= k < width:
        raise ValueError(f"shift amount {k} outside [0, {width})")
    return (x << k) & mask(width)


def shift_right_sticky(x: int, k: int) -> int:
    """Right shift that ORs every bit shifted out into the result LSB."""
    if k <= 0:
        return x << -k
    kept = x >> k
    if x & mask(k):
        kept |= 1
    return kept


# ---------------------------------------------------------------------------
# radix-4 Booth multiplier

BOOTH_TABLE = {
    0b000: 0, 0b001: 1, 0b010: 1, 0b011: 2,
    0b100: -2, 0b101: -1, 0b110: -1, 0b111: 0,
}


def booth_encode(multiplier: int, width: int | None = None) -> list[int]:
    """Recode an unsigned multiplier into radix-4 Booth digits in {-2..2}.

    The multiplier is zero-extended by one bit (so it reads as a
    non-negative signed number) and padded with a zero below the LSB.
    Digit ``i`` has weight ``4**i``.
    """
    if multiplier < 0:
        raise ValueError("multiplier must be unsigned")
    if width is None:
        width = max(multiplier.bit_length(), 1)
    if multiplier >> width:
        raise ValueError(f"multiplier does not fit in {width} bits")
    ndigits = (width + 2) // 2
    padded = multiplier << 1
    return [BOOTH_TABLE[(padded >> (2 * i)) & 0b111] for i in range(ndigits)]


def booth_partial_products(multiplicand: int, codes: Sequence[int]) -> list[int]:
    """Signed partial products ``digit_i * multiplicand * 4**i``.

    Built the way the hardware does it: select 1x or 2x the multiplicand,
    invert (negate) for negative digits, then shift into place.
    """
    products = []
    for i, digit in enumerate(codes):
        if digit == 0 or multiplicand == 0:
            products.append(0)
            continue
        pp = multiplicand << 1 if abs(digit) == 2 else multiplicand
        if digit < 0:
            pp = -pp
        products.append(pp << (2 * i))
    return products


# ---------------------------------------------------------------------------
# carry-save reduction

@dataclass(frozen=True)
class CsaPair:
    """Redundant sum: the represented value is ``sum + (carry << 1)``."""
    sum: int
    carry: int
    width: int

    def resolve(self) -> int:
        """Final carry-propagate addition, modulo ``2**width``."""
        return (self.sum + (self.carry << 1)) & mask(self.width)


def compress_3_2(a: int, b: int, c: int, width: int) -> tuple[int, int]:
    """Row of full adders.  Returns ``(sum, carry)`` with carry unshifted."""
    m = mask(width)
    a, b, c = a & m, b & m, c & m
    return a ^ b ^ c, (a & b) | (a & c) | (b & c)


def compress_4_2(a: int, b: int, c: int, d: int, width: int) -> tuple[int, int]:
    """4:2 compressor row built from two cascaded 3:2 rows.

    Returns two terms ``(s, t)`` with ``s + t == a + b + c + d (mod 2**width)``.
    """
    m = mask(width)
    s1, c1 = compress_3_2(a, b, c, width)
    s2, c2 = compress_3_2(s1, d, (c1 << 1) & m, width)
    return s2, (c2 << 1) & m


def _reduce_level(terms: list[int], width: int) -> list[int]:
    out: list[int] = []
    i = 0
    while len(terms) - i >= 4:
        out.extend(compress_4_2(*terms[i:i + 4], width))
        i += 4
    rest = terms[i:]
    if len(rest) == 3:
        s, c = compress_3_2(*rest, width)
        out.extend((s, (c << 1) & mask(width)))
    else:
        out.extend(rest)
    return out


def csa_reduce(terms: Iterable[int], width: int) -> CsaPair:
    """Reduce any number of (two's complement) terms to a sum/carry pair.

    4:2 rows are used while at least four terms remain, a 3:2 row takes a
    leftover triple and pairs pass through.  The last step is always a 3:2
    row so that the carry vector comes out unshifted.
    """
    m = mask(width)
    level = [t & m for t in terms]
    if not level:
        raise ValueError("csa_reduce needs at least one term")
    if len(level) == 1:
        return CsaPair(level[0], 0, width)
    while len(level) > 3:
        level = _reduce_level(level, width)
    while len(level) < 3:
        level.append(0)
    s, c = compress_3_2(*level, width)
    return CsaPair(s, c, width)


def booth_multiply(a: int, b: int, width: int | None = None) -> int:
    """Unsigned product through Booth recoding, a CSA tree and one final add."""
    if a < 0 or b < 0:
        raise ValueError("operands must be unsigned")
    if width is None:
        width = max(a.bit_length(), b.bit_length(), 1)
    codes = booth_encode(b, width)
    pps = booth_partial_products(a, codes)
    # two spare bits keep the negative partial products from aliasing
    acc_width = 2 * width + 2
    return csa_reduce(pps, acc_width).resolve() & mask(2 * width)


# ---------------------------------------------------------------------------
# Newton-Raphson reciprocal

@dataclass(frozen=True)
class FixedPoint:
    raw: int
    frac_bits: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.raw, 1 << self.frac_bits)

    def rescale(self, frac_bits: int) -> FixedPoint:
        """Move the binary point, truncating when bits are dropped."""
        shift = frac_bits - self.frac_bits
        raw = self.raw << shift if shift >= 0 else self.raw >> -shift
        return FixedPoint(raw, frac_bits)


SEED_OFFSET = Fraction(48, 17)
SEED_SLOPE = Fraction(32, 17)


def reciprocal_seed(num: FixedPoint) -> FixedPoint:
    """Linear estimate of ``1/num`` for ``num`` in [1, 2).

    The minimax line ``48/17 - 32/17 * d`` approximates ``1/d`` on [1/2, 1)
    with relative error at most 1/17; it is applied to ``d = num / 2`` and the
    result halved, i.e. ``24/17 - 8/17 * num``.
    """
    f = num.frac_bits
    offset = (SEED_OFFSET.numerator << f) // SEED_OFFSET.denominator
    slope = (SEED_SLOPE.numerator << f) // SEED_SLOPE.denominator
    inv_half = offset - (booth_multiply(slope, num.raw) >> (f + 1))
    return FixedPoint(inv_half >> 1, f)


def newton_reciprocal(num: FixedPoint, iters: int = 3) -> FixedPoint:
    """Approximate ``1/num`` for ``num`` in [1, 2) by ``x <- x * (2 - num * x)``.

    All products go through :func:`booth_multiply` and are truncated back to
    ``num.frac_bits`` fractional bits between steps.  A mantissa of exactly
    1.0 bypasses the iteration.
    """
    f = num.frac_bits
    one = 1 << f
    if num.raw == 0:
        raise ZeroDivisionError("reciprocal of zero")
    if not one <= num.raw < 2 * one:
        raise ValueError("newton_reciprocal expects num in [1, 2)")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if num.raw == one:
        return FixedPoint(one, f)
    x = reciprocal_seed(num).raw
    two = 2 * one
    for _ in range(iters):
        nx = booth_multiply(num.raw, x) >> f
        x = booth_multiply(x, two - nx) >> f
    return FixedPoint(x, f)
