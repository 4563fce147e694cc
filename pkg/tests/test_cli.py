import json
import random

import pytest

from pvu.cli import main
from pvu.fileformats import FormatError, TestVectorFile, dump_regfile, load_regfile
from pvu.isa_sim import VectorRegFile, assemble, conv4x4_program, dump_program, run
from pvu.opcodes import OpCode
from pvu.posit_core import PositConfig
from pvu.vector_alu import execute_words


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_op_add(capsys):
    code, out, _ = cli(capsys, "op", "--op", "add", "--nbits", 16, "--es", 2, "-a", "4000", "-b", "0000")
    assert code == 0
    assert out.split()[0] == "4000"


def test_op_mul_value(capsys):
    _, out, _ = cli(capsys, "op", "--op", "mul", "--nbits", 16, "-a", "4000", "-b", "4000")
    assert out.split()[:2] == ["4000", "1"]


def test_op_dot_prints_scalar(capsys):
    _, out, _ = cli(capsys, "op", "--op", "dot", "--nbits", 16, "-a", "4000,4000", "-b", "4000 4000")
    assert out.strip().splitlines() == ["4800  2"]


def test_op_shape_error(capsys):
    code, _, err = cli(capsys, "op", "--op", "add", "--nbits", 16, "-a", "4000,4000", "-b", "4000")
    assert code != 0 and "elements" in err


def test_decode_sample_word(capsys):
    _, out, _ = cli(capsys, "decode", "--nbits", 16, "--es", 2, "7dea")
    for part in ("s=0", "r=4", "e=3", "f=106/128", "value=958464"):
        assert part in out


def test_op_matches_library(capsys):
    cfg = PositConfig(32, 2)
    rng = random.Random(3)
    for op in OpCode:
        a = [rng.getrandbits(32) for _ in range(4)]
        b = [rng.getrandbits(32) for _ in range(4)]
        _, out, _ = cli(capsys, "op", "--op", op.value, "-a", ",".join(f"{w:08x}" for w in a),
                        "-b", ",".join(f"{w:08x}" for w in b))
        got = [int(line.split()[0], 16) for line in out.strip().splitlines()]
        expected = execute_words(op, a, b, cfg)
        assert got == ([expected] if op is OpCode.DOT else expected)


def test_batch(tmp_path, capsys):
    cfg = PositConfig(16, 2)
    a, b = [0x4000, 0x7DEA, 0x3000], [0x4000, 0x4000, 0xC000]
    tv = TestVectorFile(cfg, OpCode.MUL, a, b, execute_words(OpCode.MUL, a, b, cfg))
    path = tmp_path / "mul.tv"
    path.write_text(tv.dumps())
    code, out, _ = cli(capsys, "batch", "--in", path)
    assert code == 0 and "3/3 match" in out

    tv.expected[1] ^= 1
    path.write_text(tv.dumps())
    code, out, _ = cli(capsys, "batch", "--in", path)
    assert code == 1 and "MISMATCH" in out


def test_batch_dot_expect_header(tmp_path, capsys):
    path = tmp_path / "dot.tv"
    path.write_text("nbits=16 es=2 op=dot count=2 expect=4800\n4000 4000\n4000 4000\n")
    code, out, _ = cli(capsys, "batch", "--in", path)
    assert code == 0 and "1/1 match" in out


def test_vector_file_roundtrip():
    cfg = PositConfig(8, 2, 12)
    tv = TestVectorFile(cfg, OpCode.DIV, [0x40, 0x20], [0x50, 0x7f], [0x38, 0x01])
    assert TestVectorFile.loads(tv.dumps()) == tv


@pytest.mark.parametrize("text,line", [
    ("", 0),
    ("nbits=16 es=2\n4000 4000\n", 1),
    ("nbits=16 es=2 op=add\n4000 40000\n", 2),
    ("nbits=16 es=2 op=add\n4000 zz00\n", 2),
    ("nbits=16 es=2 op=add count=2\n4000 4000\n", 1),
    ("nbits=16 es=2 op=add\n\n4000\n", 3),
    ("nbits=16 es=2 op=dot\n4000 4000 4000\n", 2),
])
def test_vector_file_errors(text, line):
    with pytest.raises(FormatError) as info:
        TestVectorFile.loads(text)
    assert info.value.lineno == line


def test_sweep_command(tmp_path, capsys):
    report = tmp_path / "add.json"
    code, out, _ = cli(capsys, "sweep", "--op", "add", "--nbits", 8, "--es", 2,
                       "--mode", "exhaustive", "--report", report)
    assert code == 0
    assert "65536/65536 exact" in out
    assert json.loads(report.read_text())["exact"] == 65536


def test_sweep_deterministic_with_seed(tmp_path, capsys):
    outs = []
    for name in ("a.txt", "b.txt"):
        cli(capsys, "sweep", "--op", "div", "--nbits", 32, "--mode", "random:200", "--seed", 42,
            "--report", tmp_path / name)
        outs.append((tmp_path / name).read_text())
    assert outs[0] == outs[1]
    assert "seed: 42" in outs[0]


def _regs(cfg):
    rng = random.Random(6)
    s = VectorRegFile.zeros(4)
    for r in range(8):
        s = s.with_reg(r, [rng.getrandbits(12) | 0x2000 for _ in range(4)])
    return s


def test_run_empty_program(tmp_path, capsys):
    cfg = PositConfig(16, 2)
    state = _regs(cfg)
    (tmp_path / "p.bin").write_bytes(b"")
    (tmp_path / "r.txt").write_text(dump_regfile(state, cfg))
    code, out, _ = cli(capsys, "run", "--nbits", 16, "--program", tmp_path / "p.bin", "--regs", tmp_path / "r.txt")
    assert code == 0 and out == dump_regfile(state, cfg)


def test_run_conv_program(tmp_path, capsys):
    cfg = PositConfig(16, 2)
    state = _regs(cfg)
    program = conv4x4_program()
    (tmp_path / "p.bin").write_bytes(dump_program(program))
    (tmp_path / "r.txt").write_text(dump_regfile(state, cfg))
    code, out, _ = cli(capsys, "run", "--nbits", 16, "--program", tmp_path / "p.bin", "--regs", tmp_path / "r.txt")
    assert code == 0
    assert load_regfile(out, cfg) == run(program, state, cfg)


def test_run_malformed_word(tmp_path, capsys):
    (tmp_path / "p.bin").write_bytes(dump_program(assemble("padd v1, v2, v3") + [0x13]))
    (tmp_path / "r.txt").write_text("vl=4\n")
    code, _, err = cli(capsys, "run", "--nbits", 16, "--program", tmp_path / "p.bin", "--regs", tmp_path / "r.txt")
    assert code != 0 and "word 1" in err


def test_regfile_text_errors():
    cfg = PositConfig(16, 2)
    with pytest.raises(FormatError):
        load_regfile("vl=4\nv40: 0000\n", cfg)
    with pytest.raises(FormatError):
        load_regfile("vl=4\nv1: 0000 0000 0000 0000 0000\n", cfg)
    with pytest.raises(FormatError):
        load_regfile("vl=4\nx1 0000\n", cfg)


def test_asm_command(tmp_path, capsys):
    (tmp_path / "prog.s").write_text("pmul v2, v0, v1\n")
    code, out, _ = cli(capsys, "asm", tmp_path / "prog.s", "-o", tmp_path / "prog.bin")
    assert code == 0
    assert (tmp_path / "prog.bin").read_bytes() == dump_program(assemble("pmul v2, v0, v1"))
    assert "pmul v2, v0, v1" in out
