"""Reference posit semantics in exact rational arithmetic.

Deliberately shares no code with the datapath modules: words are parsed as
bit strings and rounding compares against midpoints taken from the posit
lattice one bit wider, never against remainder bits.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from pvu.opcodes import OpCode


class NotAReal(ValueError):
    pass


def _fmt(cfg) -> tuple[int, int]:
    return cfg.n_bits, cfg.es_bits


def _pow2(e: int) -> Fraction:
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


def posit_value(word: int, cfg=None, *, n_bits: int | None = None, es_bits: int | None = None) -> Fraction:
    """Exact value of a posit bit pattern; raises :class:`NotAReal` for NaR."""
    n, es = (n_bits, es_bits) if cfg is None else _fmt(cfg)
    return _posit_value(word, n, es)


@lru_cache(maxsize=1 << 16)
def _posit_value(word: int, n: int, es: int) -> Fraction:
    bits = format(word, f"0{n}b")
    if len(bits) != n:
        raise ValueError(f"word 0x{word:x} wider than {n} bits")
    if bits == "0" * n:
        return Fraction(0)
    if bits == "1" + "0" * (n - 1):
        raise NotAReal(f"0x{word:x} is NaR")
    negative = bits[0] == "1"
    if negative:
        bits = format((1 << n) - word, f"0{n}b")
    body = bits[1:]
    lead = body[0]
    run = len(body) - len(body.lstrip(lead))
    k = run - 1 if lead == "1" else -run
    tail = body[run + 1:]
    exp_bits = tail[:es].ljust(es, "0")
    frac_bits = tail[es:]
    e = int(exp_bits, 2) if es else 0
    # (1 + f) as an integer over 2**len(frac_bits)
    significand = Fraction((1 << len(frac_bits)) + int(frac_bits or "0", 2), 1 << len(frac_bits))
    value = significand * _pow2(k * 2 ** es + e)
    return -value if negative else value


def _floor_log2(x: Fraction) -> int:
    """Exact floor(log2(x)) for x > 0."""
    p, q = x.numerator, x.denominator
    e = p.bit_length() - q.bit_length()
    # 2**e > p/q  <=>  2**e * q > p
    if (q << e if e >= 0 else q) > (p if e >= 0 else p << -e):
        e -= 1
    return e


def round_to_posit(x: Fraction | int, cfg=None, *, n_bits: int | None = None, es_bits: int | None = None) -> int:
    """Nearest posit to ``x``; ties go to the even bit pattern.

    Saturates at maxpos/minpos and never returns NaR for a real input.
    """
    n, es = (n_bits, es_bits) if cfg is None else _fmt(cfg)
    x = Fraction(x)
    if x == 0:
        return 0
    negative = x < 0
    mag = -x if negative else x
    maxpos = (1 << (n - 1)) - 1
    top = (n - 2) * 2 ** es
    scale = _floor_log2(mag)
    if scale >= top:
        word = maxpos
    elif scale < -top:
        word = 1
    else:
        word = _round_in_range(mag, scale, n, es)
    return (1 << n) - word if negative else word


def _round_in_range(mag: Fraction, scale: int, n: int, es: int) -> int:
    k, e = divmod(scale, 2 ** es)
    regime = "1" * (k + 1) + "0" if k >= 0 else "0" * (-k) + "1"
    head = regime + format(e, f"0{es}b") if es else regime
    room = n - 1 - len(head)
    if room >= 0:
        # floor(mag * 2**(room - scale)) = 2**room + fraction field
        shift = room - scale
        p, q = mag.numerator, mag.denominator
        p, q = (p << shift, q) if shift >= 0 else (p, q << -shift)
        truncated = p // q
        frac = truncated - (1 << room)
        lower = int(head, 2) << room | frac
    else:
        lower = int(head[: n - 1], 2)
    lower = max(lower, 1)
    if _posit_value(lower, n, es) == mag:
        return lower
    mid = _posit_value((lower << 1) | 1, n + 1, es)
    maxpos = (1 << (n - 1)) - 1
    if mag > mid:
        return min(lower + 1, maxpos)
    if mag < mid:
        return lower
    return lower if lower % 2 == 0 else min(lower + 1, maxpos)


def exact_op(op: OpCode, a, b) -> Fraction:
    """Exact result of one operation.  DOT takes two sequences."""
    if op is OpCode.DOT:
        return exact_dot(a, b)
    a, b = Fraction(a), Fraction(b)
    if op is OpCode.ADD:
        return a + b
    if op is OpCode.SUB:
        return a - b
    if op is OpCode.MUL:
        return a * b
    if op is OpCode.DIV:
        if b == 0:
            raise ZeroDivisionError("exact division by zero")
        return a / b
    raise ValueError(f"unknown op {op!r}")


def exact_dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError("dot operands differ in length")
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def reference_words(op: OpCode, a: Sequence[int], b: Sequence[int], cfg) -> list[int] | int:
    """Correctly rounded result words for one vector operation.

    NaR operands give NaR, as does division by zero.  DOT rounds once.
    """
    n = cfg.n_bits
    nar = 1 << (n - 1)
    if len(a) != len(b):
        raise ValueError("operand lengths differ")
    if op is OpCode.DOT:
        if nar in a or nar in b:
            return nar
        return round_to_posit(exact_dot([posit_value(x, cfg) for x in a],
                                        [posit_value(y, cfg) for y in b]), cfg)
    out = []
    for x, y in zip(a, b):
        if x == nar or y == nar:
            out.append(nar)
            continue
        vx, vy = posit_value(x, cfg), posit_value(y, cfg)
        if op is OpCode.DIV and vy == 0:
            out.append(nar)
            continue
        out.append(round_to_posit(exact_op(op, vx, vy), cfg))
    return out
