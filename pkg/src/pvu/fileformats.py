"""Text formats for test vectors and register files.

Test vector file::

    # comments and blank lines are ignored
    nbits=16 es=2 align=16 op=add count=2
    4000 0000 4000
    3800 3800

Each row holds operand A, operand B and an optional expected result, all
hex with ``ceil(nbits / 4)`` digits.  For ``op=dot`` the rows are the
element pairs and the expected scalar goes in the header as ``expect=HEX``.

Register file::

    vl=4 vlen=4
    v0: 4000 4000 4000 4000
    v1: 0000 0000 0000 0000

Registers not listed are zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from pvu.isa_sim import NUM_VREGS, VectorRegFile
from pvu.opcodes import OpCode
from pvu.posit_core import PositConfig


class FormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _parse_header(lineno: int, line: str) -> dict[str, str]:
    fields = {}
    for item in line.split():
        key, sep, value = item.partition("=")
        if not sep:
            raise FormatError(lineno, f"expected key=value, got {item!r}")
        fields[key] = value
    return fields


def parse_hex_word(token: str, cfg: PositConfig, lineno: int = 0, strict: bool = True) -> int:
    token = token.lower().removeprefix("0x")
    if strict and len(token) != cfg.hex_digits():
        raise FormatError(lineno, f"{token!r} should have {cfg.hex_digits()} hex digits")
    try:
        word = int(token, 16)
    except ValueError:
        raise FormatError(lineno, f"{token!r} is not hexadecimal") from None
    if word >> cfg.n_bits:
        raise FormatError(lineno, f"{token!r} does not fit in {cfg.n_bits} bits")
    return word


def format_word(word: int, cfg: PositConfig) -> str:
    return f"{word:0{cfg.hex_digits()}x}"


@dataclass
class TestVectorFile:
    __test__ = False  # not a pytest class

    cfg: PositConfig
    op: OpCode
    a: list[int]
    b: list[int]
    expected: list[int] | None = None

    @property
    def count(self) -> int:
        return len(self.a)

    def dumps(self) -> str:
        header = (f"nbits={self.cfg.n_bits} es={self.cfg.es_bits} align={self.cfg.align_bits} "
                  f"op={self.op.value} count={self.count}")
        rows = []
        if self.op is OpCode.DOT:
            if self.expected is not None:
                header += f" expect={format_word(self.expected[0], self.cfg)}"
            for x, y in zip(self.a, self.b):
                rows.append(f"{format_word(x, self.cfg)} {format_word(y, self.cfg)}")
        else:
            for i, (x, y) in enumerate(zip(self.a, self.b)):
                row = f"{format_word(x, self.cfg)} {format_word(y, self.cfg)}"
                if self.expected is not None:
                    row += f" {format_word(self.expected[i], self.cfg)}"
                rows.append(row)
        return "\n".join([header, *rows]) + "\n"

    @classmethod
    def loads(cls, text: str) -> TestVectorFile:
        lines = list(_content_lines(text))
        if not lines:
            raise FormatError(0, "empty test vector file")
        lineno, header = lines[0]
        fields = _parse_header(lineno, header)
        try:
            cfg = PositConfig(int(fields["nbits"]), int(fields["es"]), int(fields.get("align", 0)))
            op = OpCode.parse(fields["op"])
        except KeyError as exc:
            raise FormatError(lineno, f"header is missing {exc.args[0]}") from None
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
        a, b, expected = [], [], []
        for lineno, line in lines[1:]:
            tokens = line.split()
            limit = 2 if op is OpCode.DOT else 3
            if not 2 <= len(tokens) <= limit:
                raise FormatError(lineno, f"expected 2..{limit} words, got {len(tokens)}")
            words = [parse_hex_word(t, cfg, lineno) for t in tokens]
            a.append(words[0])
            b.append(words[1])
            if len(words) == 3:
                expected.append(words[2])
        if "count" in fields and int(fields["count"]) != len(a):
            raise FormatError(lines[0][0], f"count={fields['count']} but {len(a)} rows")
        if not a:
            raise FormatError(lines[0][0], "no operand rows")
        if op is OpCode.DOT:
            exp = [parse_hex_word(fields["expect"], cfg, lines[0][0])] if "expect" in fields else None
        else:
            if expected and len(expected) != len(a):
                raise FormatError(lines[-1][0], "expected column present on some rows only")
            exp = expected or None
        return cls(cfg, op, a, b, exp)


def dump_regfile(state: VectorRegFile, cfg: PositConfig) -> str:
    lines = [f"vl={state.vl} vlen={state.vlen}"]
    for i, reg in enumerate(state.regs):
        lines.append(f"v{i}: " + " ".join(format_word(w, cfg) for w in reg))
    return "\n".join(lines) + "\n"


def load_regfile(text: str, cfg: PositConfig) -> VectorRegFile:
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError(0, "empty register file")
    lineno, header = lines[0]
    fields = _parse_header(lineno, header)
    try:
        vl = int(fields["vl"])
        vlen = int(fields.get("vlen", vl))
        state = VectorRegFile.zeros(vl, vlen)
    except (KeyError, ValueError) as exc:
        raise FormatError(lineno, f"bad register file header: {exc}") from None
    for lineno, line in lines[1:]:
        name, sep, rest = line.partition(":")
        name = name.strip()
        if not sep or not name.startswith("v") or not name[1:].isdigit():
            raise FormatError(lineno, f"expected 'vN: words...', got {line!r}")
        idx = int(name[1:])
        if idx >= NUM_VREGS:
            raise FormatError(lineno, f"no register {name}")
        words = [parse_hex_word(t, cfg, lineno) for t in rest.split()]
        if len(words) > vlen:
            raise FormatError(lineno, f"{name} has {len(words)} elements, vlen is {vlen}")
        state = state.with_reg(idx, words)
    return state
