"""The five vector operations over PIR vectors: add, sub, mul, div, dot.

Each op works on decoded elements and returns normalized but unrounded
PIRs; the single round-to-nearest-even happens when the result is encoded.
Normalized mantissas keep two bits beyond the widest posit fraction, the
last of them sticky, which is enough for that final rounding to be exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from pvu.hw_datapath import (
    FixedPoint,
    booth_multiply,
    csa_reduce,
    mask,
    newton_reciprocal,
    shift_right_sticky,
)
from pvu.opcodes import OpCode
from pvu.posit_core import NAR, PIR, ZERO, PositConfig, decode, encode, normalize_bits

__all__ = [
    "OpCode", "PirVector", "VectorShapeError", "align_many", "align_pair", "execute",
    "execute_words", "normalize", "vadd", "vdiv", "vdot", "vmul", "vsub",
]

# extra fraction bits kept by normalize: one round bit and one sticky bit
GUARD_BITS = 2
# Newton reciprocal works with this many bits beyond the mantissa
RECIP_GUARD_BITS = 8
NEWTON_ITERS = 3


class VectorShapeError(ValueError):
    pass


@dataclass(frozen=True)
class PirVector:
    elems: tuple[PIR, ...]
    cfg: PositConfig

    def __post_init__(self):
        if not self.elems:
            raise VectorShapeError("vectors need at least one element")
        object.__setattr__(self, "elems", tuple(self.elems))

    @classmethod
    def from_words(cls, words: Sequence[int], cfg: PositConfig) -> PirVector:
        return cls(tuple(decode(cfg.check_word(w), cfg) for w in words), cfg)

    def to_words(self) -> list[int]:
        return [encode(p, self.cfg) for p in self.elems]

    def __len__(self):
        return len(self.elems)

    def __iter__(self):
        return iter(self.elems)


def _check_pair(a: PirVector, b: PirVector) -> None:
    if len(a) != len(b):
        raise VectorShapeError(f"length mismatch: {len(a)} vs {len(b)}")
    if a.cfg != b.cfg:
        raise VectorShapeError("operands use different posit configurations")


def _clamp_exp(exp: int, cfg: PositConfig) -> int:
    # anything past these bounds encodes to maxpos/minpos anyway
    limit = (cfg.n_bits - 1) << cfg.es_bits
    return max(-limit, min(limit, exp))


def normalize(p: PIR, cfg: PositConfig) -> PIR:
    """Move the leading one to the implicit-bit position and narrow.

    Keeps ``frac_width + 2`` fraction bits at most, folding anything lower
    into a sticky LSB.  A zero mantissa becomes the Zero PIR.
    """
    if not p.is_normal:
        return p
    if p.frc == 0:
        return ZERO
    frc, frac_bits, shift = normalize_bits(p.frc, p.frac_bits, cfg.frac_width + GUARD_BITS)
    return PIR(p.sign, _clamp_exp(p.exp + shift, cfg), frc, frac_bits)


def _common_scale(ps: Sequence[PIR], extra: int) -> int:
    return max(p.frac_bits for p in ps) + extra


def _shift_into_window(p: PIR, target_exp: int, frac_bits: int) -> int:
    """Mantissa of ``p`` re-expressed with ``frac_bits`` fraction bits at ``target_exp``.

    The shift is capped at the register width; whatever falls off the bottom
    is kept only as a sticky bit.
    """
    frc = p.frc << (frac_bits - p.frac_bits)
    cap = frac_bits + 3
    return shift_right_sticky(frc, min(target_exp - p.exp, cap))


def align_pair(a: PIR, b: PIR, cfg: PositConfig) -> tuple[PIR, PIR]:
    """Bring two normal PIRs to the larger exponent.

    Mantissas gain ``align_bits`` extra fraction bits first, so a shift of up
    to ``align_bits`` loses nothing; bits shifted past the bottom of the
    register survive only as a sticky bit.
    """
    target = max(a.exp, b.exp)
    fb = _common_scale((a, b), cfg.align_bits)
    return tuple(
        PIR(p.sign, target, _shift_into_window(p, target, fb), fb)
        for p in (a, b)
    )


def align_many(v: PirVector) -> PirVector:
    """Align every normal element to the largest exponent in ``v``."""
    normals = [p for p in v if p.is_normal]
    if not normals:
        return v
    target = max(p.exp for p in normals)
    fb = _common_scale(normals, v.cfg.align_bits)
    out = [
        PIR(p.sign, target, _shift_into_window(p, target, fb), fb)
        if p.is_normal else p
        for p in v
    ]
    return PirVector(tuple(out), v.cfg)


def _signed(p: PIR) -> int:
    return -p.frc if p.sign else p.frc


def add_pir(a: PIR, b: PIR, cfg: PositConfig) -> PIR:
    if a.is_nar or b.is_nar:
        return NAR
    if a.is_zero:
        return normalize(b, cfg)
    if b.is_zero:
        return normalize(a, cfg)
    x, y = align_pair(a, b, cfg)
    total = _signed(x) + _signed(y)
    if total == 0:
        return ZERO
    return normalize(PIR(total < 0, x.exp, abs(total), x.frac_bits), cfg)


def mul_pir(a: PIR, b: PIR, cfg: PositConfig, *, rounded: bool = True) -> PIR:
    if a.is_nar or b.is_nar:
        return NAR
    if a.is_zero or b.is_zero:
        return ZERO
    frc = booth_multiply(a.frc, b.frc)
    p = PIR(a.sign != b.sign, a.exp + b.exp, frc, a.frac_bits + b.frac_bits)
    return normalize(p, cfg) if rounded else p


def div_pir(a: PIR, b: PIR, cfg: PositConfig) -> PIR:
    if a.is_nar or b.is_nar or b.is_zero:
        return NAR
    if a.is_zero:
        return ZERO
    f = cfg.frac_width + 1 + RECIP_GUARD_BITS
    divisor = FixedPoint(b.frc, b.frac_bits).rescale(f)
    recip = newton_reciprocal(divisor, NEWTON_ITERS)
    frc = booth_multiply(a.frc, recip.raw)
    q = PIR(a.sign != b.sign, a.exp - b.exp, frc, a.frac_bits + f)
    return normalize(q, cfg)


def _elementwise(fn, a: PirVector, b: PirVector) -> PirVector:
    _check_pair(a, b)
    return PirVector(tuple(fn(x, y, a.cfg) for x, y in zip(a, b)), a.cfg)


def vadd(a: PirVector, b: PirVector) -> PirVector:
    return _elementwise(add_pir, a, b)


def vsub(a: PirVector, b: PirVector) -> PirVector:
    _check_pair(a, b)
    return vadd(a, PirVector(tuple(p.negate() for p in b), b.cfg))


def vmul(a: PirVector, b: PirVector) -> PirVector:
    return _elementwise(mul_pir, a, b)


def vdiv(a: PirVector, b: PirVector) -> PirVector:
    return _elementwise(div_pir, a, b)


def vdot(a: PirVector, b: PirVector) -> PIR:
    """Fused dot product with one rounding at the very end.

    Products stay at full width, get aligned to the largest one, turn into
    two's complement and are summed by the CSA tree.  The accumulator is wide
    enough (products, alignment window and log2(len) headroom) that the only
    loss is the sticky collapse of terms beyond the alignment window.
    """
    _check_pair(a, b)
    cfg = a.cfg
    products = [mul_pir(x, y, cfg, rounded=False) for x, y in zip(a, b)]
    if any(p.is_nar for p in products):
        return NAR
    nonzero = [p for p in products if p.is_normal]
    if not nonzero:
        return ZERO
    aligned = align_many(PirVector(tuple(nonzero), cfg))
    frac_bits = aligned.elems[0].frac_bits
    exp = aligned.elems[0].exp
    headroom = max(len(nonzero) - 1, 1).bit_length() + 1
    width = frac_bits + 3 + headroom
    pair = csa_reduce((_signed(p) & mask(width) for p in aligned), width)
    total = pair.resolve()
    if total >> (width - 1):
        total -= 1 << width
    if total == 0:
        return ZERO
    return normalize(PIR(total < 0, exp, abs(total), frac_bits), cfg)


def execute(op: OpCode, a: PirVector, b: PirVector) -> PirVector | PIR:
    if op is OpCode.ADD:
        return vadd(a, b)
    if op is OpCode.SUB:
        return vsub(a, b)
    if op is OpCode.MUL:
        return vmul(a, b)
    if op is OpCode.DIV:
        return vdiv(a, b)
    if op is OpCode.DOT:
        return vdot(a, b)
    raise ValueError(f"unsupported op {op!r}")


def execute_words(op: OpCode, a: Sequence[int], b: Sequence[int], cfg: PositConfig) -> list[int] | int:
    """Whole unit: decode, operate, normalize and encode.  DOT returns one word."""
    result = execute(op, PirVector.from_words(a, cfg), PirVector.from_words(b, cfg))
    if isinstance(result, PIR):
        return encode(result, cfg)
    return result.to_words()
