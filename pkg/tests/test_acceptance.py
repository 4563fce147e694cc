"""Exit criteria for the model, one test per criterion.

Every check prints a PASS/FAIL line in the "acceptance criteria" section of
the pytest summary.  Tolerances are fixed here and nowhere else.
"""

import random
import time
from fractions import Fraction

import pytest

from pvu.hw_datapath import FixedPoint, booth_multiply, csa_reduce, newton_reciprocal
from pvu.isa_sim import (
    FUNCT6_POSIT,
    OPCODE_OPV,
    VectorRegFile,
    conv4x4,
    decode_instr,
    encode_instr,
    step,
)
from pvu.opcodes import OpCode
from pvu.oracle.exact import exact_dot, exact_op, posit_value, round_to_posit
from pvu.oracle.sweep import differential_sweep
from pvu.posit_core import PositConfig, decode, encode, to_real
from pvu.vector_alu import execute_words

SEED = 20250101
RANDOM_PAIRS = 100_000
DOT_TRIALS = 10_000
LOGNORMAL_PAIRS = 10_000
DIV_EXACT_FLOOR = 0.95
NEWTON_BOUND = Fraction(1, 2**24)


def _check_sweep(record, name, report, exact_floor=1.0, ulp_ceiling=None):
    ok = report.exact_rate >= exact_floor
    if ulp_ceiling is not None:
        ok = ok and report.within_one_ulp_rate >= ulp_ceiling
    return record(name, ok, report.summary())


def test_criterion_1_roundtrip_and_semantics(record):
    start = time.perf_counter()
    results = []
    for n, es in [(8, 2), (16, 2)]:
        cfg = PositConfig(n, es)
        bad = [w for w in range(1 << n) if encode(decode(w, cfg), cfg) != w]
        results.append(record(f"1. encode(decode(w)) == w, all Posit<{n},{es}> words",
                              not bad, f"{(1 << n) - len(bad)}/{1 << n}"))
    for es in range(6):
        cfg = PositConfig(8, es)
        bad = [w for w in range(256) if w != cfg.nar and to_real(w, cfg) != posit_value(w, cfg)]
        results.append(record(f"1. to_real == oracle, all Posit<8,{es}> words", not bad,
                              f"{255 - len(bad)}/255"))
    elapsed = time.perf_counter() - start
    results.append(record("1. runtime < 5 s", elapsed < 5, f"{elapsed:.2f} s"))
    assert all(results)


def test_criterion_2_add_sub_mul_dot_exact(record):
    start = time.perf_counter()
    results = []
    for es in (2, 0):
        cfg = PositConfig(8, es)
        for op in (OpCode.ADD, OpCode.SUB, OpCode.MUL, OpCode.DOT):
            r = differential_sweep(op, cfg, "exhaustive")
            results.append(_check_sweep(record, f"2. exhaustive {op.value} <8,{es}> 100% exact", r))
    p32 = PositConfig(32, 2)
    for op in (OpCode.ADD, OpCode.SUB, OpCode.MUL):
        r = differential_sweep(op, p32, f"random:{RANDOM_PAIRS}", seed=SEED)
        results.append(_check_sweep(record, f"2. random {op.value} <32,2> x{RANDOM_PAIRS} 100% exact", r))
    r = differential_sweep(OpCode.DOT, p32, f"random:{RANDOM_PAIRS}", seed=SEED, length=2)
    results.append(_check_sweep(record, f"2. random length-2 dot <32,2> x{RANDOM_PAIRS} 100% exact", r))
    for op in (OpCode.ADD, OpCode.SUB, OpCode.MUL):
        r = differential_sweep(op, p32, f"random:{LOGNORMAL_PAIRS}", seed=SEED, dist="lognormal")
        results.append(_check_sweep(
            record, f"2. log-normal {op.value} <32,2> x{LOGNORMAL_PAIRS} 100% exact", r))
    r = differential_sweep(OpCode.DOT, PositConfig(16, 2), f"random:{DOT_TRIALS}", seed=SEED, length=8)
    results.append(_check_sweep(record, f"2. random length-8 fused dot <16,2> x{DOT_TRIALS} 100% exact", r))
    elapsed = time.perf_counter() - start
    results.append(record("2. runtime < 120 s", elapsed < 120, f"{elapsed:.1f} s"))
    assert all(results)


def test_criterion_3_division(record):
    p8 = PositConfig(8, 2)
    r8 = differential_sweep(OpCode.DIV, p8, "exhaustive", normal_only=True)
    ok8 = _check_sweep(record, "3. exhaustive Normal/Normal div <8,2>: >=95% exact, 100% within 1 ulp",
                       r8, DIV_EXACT_FLOOR, 1.0)
    r32 = differential_sweep(OpCode.DIV, PositConfig(32, 2), f"random:{RANDOM_PAIRS}", seed=SEED)
    ok32 = _check_sweep(record, f"3. random div <32,2> x{RANDOM_PAIRS}: >=95% exact", r32, DIV_EXACT_FLOOR)
    rl = differential_sweep(OpCode.DIV, PositConfig(32, 2), f"random:{LOGNORMAL_PAIRS}", seed=SEED,
                            dist="lognormal")
    okl = _check_sweep(record, f"3. log-normal div <32,2> x{LOGNORMAL_PAIRS}: >=95% exact", rl, DIV_EXACT_FLOOR)
    # informational: the 1-ulp ceiling is only a hard bar for the 8-bit sweep
    record("3. (info) random div <32,2> beyond 1 ulp", True, f"{r32.worse} cases")
    assert ok8 and ok32 and okl


def test_criterion_4_booth_and_csa(record):
    bad = sum(booth_multiply(a, b, 8) != a * b for a in range(256) for b in range(256))
    ok_booth = record("4. booth_multiply exhaustive 8x8 == a*b", bad == 0, f"{65536 - bad}/65536")
    rng = random.Random(SEED)
    width = 64
    bad = 0
    for _ in range(1000):
        terms = [rng.randrange(-2**40, 2**40) for _ in range(rng.randint(2, 32))]
        pair = csa_reduce(terms, width)
        bad += (pair.sum + 2 * pair.carry) % 2**width != sum(terms) % 2**width
    ok_csa = record("4. csa_reduce sum + 2*carry == sum(terms), 1000 random 2..32-term sets",
                    bad == 0, f"{1000 - bad}/1000")
    assert ok_booth and ok_csa


def test_criterion_5_newton(record):
    f = 32
    worst = Fraction(0)
    for i in range(10_000):
        raw = (1 << f) + (i << f) // 10_000
        x = newton_reciprocal(FixedPoint(raw, f), 3).value
        worst = max(worst, abs(x * Fraction(raw, 1 << f) - 1))
    ok = record("5. Newton 3 iterations, rel. error < 2^-24 over 10^4 grid", worst < NEWTON_BOUND,
                f"worst {float(worst):.3e} vs {float(NEWTON_BOUND):.3e}")
    assert ok


def _conv_oracle(image, kernel, cfg):
    def val(w):
        return posit_value(w, cfg)

    def add(x, y):
        return round_to_posit(exact_op(OpCode.ADD, val(x), val(y)), cfg)

    out = []
    for i in range(len(image) - 3):
        row = []
        for j in range(len(image[0]) - 3):
            parts = [round_to_posit(exact_dot([val(w) for w in image[i + k][j:j + 4]],
                                              [val(w) for w in kernel[k]]), cfg) for k in range(4)]
            row.append(add(add(parts[0], parts[1]), add(parts[2], parts[3])))
        out.append(row)
    return out


def test_criterion_6_isa(record):
    rng = random.Random(SEED)
    roundtrip_bad = field_bad = 0
    for op in OpCode:
        for _ in range(1000):
            vd, vs1, vs2 = (rng.randrange(32) for _ in range(3))
            w = encode_instr(op, vd, vs1, vs2)
            instr = decode_instr(w)
            roundtrip_bad += (instr.op, instr.vd, instr.vs1, instr.vs2) != (op, vd, vs1, vs2)
            field_bad += (w & 0x7F, w >> 26, (w >> 25) & 1) != (OPCODE_OPV, FUNCT6_POSIT, 1)
    ok_rt = record("6. encode/decode roundtrip, 5 ops x 1000 register triples", roundtrip_bad == 0,
                   f"{5000 - roundtrip_bad}/5000")
    ok_fields = record("6. opcode 0x57, funct6 0b001101, vm 1 on every word", field_bad == 0,
                       f"{5000 - field_bad}/5000")

    cfg = PositConfig(32, 2)
    mismatches = 0
    for _ in range(1000):
        state = VectorRegFile.zeros(4)
        for r in range(32):
            state = state.with_reg(r, [rng.getrandbits(32) for _ in range(4)])
        op = rng.choice(list(OpCode))
        vd, vs1, vs2 = (rng.randrange(32) for _ in range(3))
        out = step(state, encode_instr(op, vd, vs1, vs2), cfg)
        direct = execute_words(op, state.active(vs1), state.active(vs2), cfg)
        expected = (direct, 0, 0, 0) if op is OpCode.DOT else tuple(direct)
        mismatches += out.regs[vd] != expected
    ok_iss = record("6. ISS vs direct vector_alu, 1000 random states", mismatches == 0,
                    f"{mismatches} mismatches")

    conv_cfg = PositConfig(16, 2)
    image = [[rng.getrandbits(16) for _ in range(8)] for _ in range(8)]
    kernel = [[rng.getrandbits(16) for _ in range(4)] for _ in range(4)]
    image = [[w if w != conv_cfg.nar else 0 for w in row] for row in image]
    kernel = [[w if w != conv_cfg.nar else 0 for w in row] for row in kernel]
    got = conv4x4(image, kernel, conv_cfg)
    ok_conv = record("6. 4x4 convolution demo == exact-rational oracle (5x5 outputs)",
                     got == _conv_oracle(image, kernel, conv_cfg))
    assert ok_rt and ok_fields and ok_iss and ok_conv


@pytest.mark.skip(reason="criterion 7: FPGA resource counts and network accuracy numbers need "
                         "synthesis and training infrastructure; covered instead by criteria 1-6")
def test_criterion_7_not_reproducible():
    pass
