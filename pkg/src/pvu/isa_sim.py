"""Custom posit OPFVV instructions and a small vector ISS that runs them.

Word layout (standard vector OP-V arithmetic format)::

    31      26  25  24   20 19   15 14  12 11    7 6      0
    | funct6 | vm |  vs2  |  vs1  | funct3 |  vd  | opcode |

Posit instructions use opcode 0x57, funct6 0b001101 and vm = 1; funct3
selects the operation.  The result is ``vs1 <op> vs2``, so a program that
loads its first operand into vs1 computes ``first <op> second``.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from pvu.opcodes import OpCode
from pvu.posit_core import PositConfig
from pvu.vector_alu import execute_words

OPCODE_OPV = 0x57
FUNCT6_POSIT = 0b001101
NUM_VREGS = 32
DEFAULT_VLEN = 4

# funct3 codes; change here only
POSIT_FUNCT3 = {
    OpCode.ADD: 0b000,
    OpCode.SUB: 0b001,
    OpCode.MUL: 0b010,
    OpCode.DIV: 0b011,
    OpCode.DOT: 0b100,
}
FUNCT3_POSIT = {v: k for k, v in POSIT_FUNCT3.items()}

MNEMONICS = {"padd": OpCode.ADD, "psub": OpCode.SUB, "pmul": OpCode.MUL,
             "pdiv": OpCode.DIV, "pdot": OpCode.DOT}


class NotPositInstruction(ValueError):
    def __init__(self, message: str, index: int | None = None):
        if index is not None:
            message = f"word {index}: {message}"
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Instruction:
    opcode: int
    vd: int
    funct3: int
    vs1: int
    vs2: int
    vm: int
    funct6: int

    @property
    def op(self) -> OpCode:
        return FUNCT3_POSIT[self.funct3]

    def encode(self) -> int:
        return (self.funct6 << 26 | self.vm << 25 | self.vs2 << 20 | self.vs1 << 15
                | self.funct3 << 12 | self.vd << 7 | self.opcode)

    def __str__(self):
        name = next(k for k, v in MNEMONICS.items() if v is self.op)
        return f"{name} v{self.vd}, v{self.vs1}, v{self.vs2}"


def _check_reg(name: str, idx: int) -> None:
    if not 0 <= idx < NUM_VREGS:
        raise ValueError(f"{name}={idx} is not a vector register index")


def encode_instr(op: OpCode, vd: int, vs1: int, vs2: int) -> int:
    for name, idx in (("vd", vd), ("vs1", vs1), ("vs2", vs2)):
        _check_reg(name, idx)
    return Instruction(OPCODE_OPV, vd, POSIT_FUNCT3[op], vs1, vs2, 1, FUNCT6_POSIT).encode()


def decode_instr(word: int) -> Instruction:
    if not 0 <= word < 1 << 32:
        raise NotPositInstruction(f"0x{word:x} is not a 32-bit word")
    instr = Instruction(
        opcode=word & 0x7F,
        vd=(word >> 7) & 0x1F,
        funct3=(word >> 12) & 0x7,
        vs1=(word >> 15) & 0x1F,
        vs2=(word >> 20) & 0x1F,
        vm=(word >> 25) & 0x1,
        funct6=word >> 26,
    )
    if instr.opcode != OPCODE_OPV:
        raise NotPositInstruction(f"opcode 0x{instr.opcode:02x} in 0x{word:08x} is not OP-V")
    if instr.funct6 != FUNCT6_POSIT:
        raise NotPositInstruction(f"funct6 0b{instr.funct6:06b} in 0x{word:08x} is not the posit space")
    if instr.vm != 1:
        raise NotPositInstruction(f"masked form of 0x{word:08x} is not supported")
    if instr.funct3 not in FUNCT3_POSIT:
        raise NotPositInstruction(f"funct3 0b{instr.funct3:03b} in 0x{word:08x} has no posit op")
    return instr


@dataclass(frozen=True)
class VectorRegFile:
    """32 vector registers of ``vlen`` posit words each, ``vl`` of them active."""
    regs: tuple[tuple[int, ...], ...]
    vl: int
    vlen: int = DEFAULT_VLEN

    def __post_init__(self):
        if len(self.regs) != NUM_VREGS:
            raise ValueError(f"expected {NUM_VREGS} registers, got {len(self.regs)}")
        if not 0 < self.vl <= self.vlen:
            raise ValueError(f"vl={self.vl} outside (0, {self.vlen}]")
        for i, reg in enumerate(self.regs):
            if len(reg) != self.vlen:
                raise ValueError(f"v{i} holds {len(reg)} elements, expected {self.vlen}")

    @classmethod
    def zeros(cls, vl: int = DEFAULT_VLEN, vlen: int | None = None) -> VectorRegFile:
        vlen = vl if vlen is None else vlen
        return cls(tuple((0,) * vlen for _ in range(NUM_VREGS)), vl, vlen)

    def with_reg(self, idx: int, values: Sequence[int]) -> VectorRegFile:
        _check_reg("reg", idx)
        values = tuple(values) + self.regs[idx][len(values):]
        regs = self.regs[:idx] + (values[:self.vlen],) + self.regs[idx + 1:]
        return replace(self, regs=regs)

    def active(self, idx: int) -> list[int]:
        return list(self.regs[idx][:self.vl])


def step(state: VectorRegFile, instr: Instruction | int, cfg: PositConfig) -> VectorRegFile:
    """Execute one instruction; only ``vd`` changes.

    Elements past ``vl`` are left undisturbed.  DOT writes its scalar to
    element 0 of ``vd`` and zeros the rest of the register.
    """
    if isinstance(instr, int):
        instr = decode_instr(instr)
    a, b = state.active(instr.vs1), state.active(instr.vs2)
    result = execute_words(instr.op, a, b, cfg)
    if instr.op is OpCode.DOT:
        return state.with_reg(instr.vd, (result,) + (0,) * (state.vlen - 1))
    return state.with_reg(instr.vd, result)


def run(program: Iterable[int], initial: VectorRegFile, cfg: PositConfig) -> VectorRegFile:
    state = initial
    for index, word in enumerate(program):
        try:
            instr = decode_instr(word)
        except NotPositInstruction as exc:
            raise NotPositInstruction(str(exc), index) from None
        state = step(state, instr, cfg)
    return state


# ---------------------------------------------------------------------------
# program files and a tiny assembler

def load_program(data: bytes) -> list[int]:
    """Little-endian 32-bit words."""
    if len(data) % 4:
        raise ValueError(f"program size {len(data)} is not a multiple of 4 bytes")
    return list(struct.unpack(f"<{len(data) // 4}I", data))


def dump_program(words: Sequence[int]) -> bytes:
    return struct.pack(f"<{len(words)}I", *words)


_ASM_LINE = re.compile(r"^\s*(\w+)\s+v(\d+)\s*,\s*v(\d+)\s*,\s*v(\d+)\s*$")


def assemble(source: str) -> list[int]:
    """Assemble lines like ``pmul v2, v0, v1`` (vd, vs1, vs2).  ``#`` starts a comment."""
    words = []
    for lineno, line in enumerate(source.splitlines(), 1):
        line = line.split("#", 1)[0]
        if not line.strip():
            continue
        m = _ASM_LINE.match(line)
        if not m or m.group(1).lower() not in MNEMONICS:
            raise ValueError(f"line {lineno}: cannot assemble {line.strip()!r}")
        op = MNEMONICS[m.group(1).lower()]
        words.append(encode_instr(op, *(int(g) for g in m.groups()[1:])))
    return words


def disassemble(words: Sequence[int]) -> str:
    return "\n".join(str(decode_instr(w)) for w in words)


# ---------------------------------------------------------------------------
# 4x4 convolution demo

def conv4x4_program(inputs: Sequence[int] = (0, 1, 2, 3), filters: Sequence[int] = (4, 5, 6, 7),
                    scratch: int = 8) -> list[int]:
    """One output pixel of a 4x4 convolution.

    Input rows sit in ``inputs``, filter rows in ``filters``.  Each row pair
    is reduced with a fused dot product and the four row sums are added
    pairwise; the pixel ends up in element 0 of register ``scratch + 6``.
    """
    s = scratch
    text = "\n".join(
        [f"pdot v{s + k}, v{inputs[k]}, v{filters[k]}" for k in range(4)]
        + [f"padd v{s + 4}, v{s}, v{s + 1}",
           f"padd v{s + 5}, v{s + 2}, v{s + 3}",
           f"padd v{s + 6}, v{s + 4}, v{s + 5}"]
    )
    return assemble(text)


def conv4x4(image: Sequence[Sequence[int]], kernel: Sequence[Sequence[int]], cfg: PositConfig) -> list[list[int]]:
    """Valid 4x4 convolution of a posit image, one ISS program run per pixel."""
    rows, cols = len(image), len(image[0])
    if len(kernel) != 4 or any(len(r) != 4 for r in kernel):
        raise ValueError("kernel must be 4x4")
    program = conv4x4_program()
    base = VectorRegFile.zeros(vl=4)
    for k in range(4):
        base = base.with_reg(4 + k, kernel[k])
    out = []
    for i in range(rows - 3):
        line = []
        for j in range(cols - 3):
            state = base
            for k in range(4):
                state = state.with_reg(k, image[i + k][j:j + 4])
            line.append(run(program, state, cfg).regs[14][0])
        out.append(line)
    return out
