"""Bit-accurate model of a posit vector unit with a RISC-V vector ISA front end."""

from pvu.posit_core import NAR, PIR, ZERO, NotARealError, PositConfig, Special, decode, encode

__all__ = ["NAR", "PIR", "ZERO", "NotARealError", "PositConfig", "Special", "decode", "encode"]
