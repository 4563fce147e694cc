"""Command line front end for the posit vector unit model."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pvu import isa_sim
from pvu.fileformats import (
    FormatError,
    TestVectorFile,
    dump_regfile,
    format_word,
    load_regfile,
    parse_hex_word,
)
from pvu.opcodes import OpCode
from pvu.oracle.sweep import DEFAULT_SEED, differential_sweep
from pvu.posit_core import PositConfig, Special, classify, decode, fields, to_real
from pvu.vector_alu import execute_words


def describe(word: int, cfg: PositConfig) -> str:
    kind = classify(word, cfg)
    if kind is Special.NAR:
        return "NaR"
    value = to_real(word, cfg)
    return f"{value} ({float(value):.17g})" if value.denominator != 1 else str(value)


def _config(args) -> PositConfig:
    return PositConfig(args.nbits, args.es, args.align or 0)


def _word_list(text: str, cfg: PositConfig) -> list[int]:
    tokens = [t for t in text.replace(",", " ").split() if t]
    return [parse_hex_word(t, cfg, strict=False) for t in tokens]


def cmd_op(args) -> int:
    cfg = _config(args)
    op = OpCode.parse(args.op)
    a, b = _word_list(args.a, cfg), _word_list(args.b, cfg)
    if len(a) != len(b):
        print(f"error: -a has {len(a)} elements, -b has {len(b)}", file=sys.stderr)
        return 2
    result = execute_words(op, a, b, cfg)
    for w in [result] if op is OpCode.DOT else result:
        print(f"{format_word(w, cfg)}  {describe(w, cfg)}")
    return 0


def cmd_decode(args) -> int:
    cfg = _config(args)
    for token in args.words:
        w = parse_hex_word(token, cfg, strict=False)
        kind = classify(w, cfg)
        if kind is not Special.NORMAL:
            print(f"{format_word(w, cfg)}  {kind.value}")
            continue
        fl = fields(w, cfg)
        p = decode(w, cfg)
        print(f"{format_word(w, cfg)}  s={fl.sign} regime={fl.regime} k={len(fl.regime)} r={fl.r} "
              f"exponent={fl.exponent or '-'} e={fl.e} fraction={fl.fraction or '-'} f={fl.f_text()} "
              f"exp={p.exp} value={describe(w, cfg)}")
    return 0


def cmd_batch(args) -> int:
    tv = TestVectorFile.loads(Path(args.input).read_text())
    cfg = tv.cfg
    result = execute_words(tv.op, tv.a, tv.b, cfg)
    got = [result] if tv.op is OpCode.DOT else result
    failures = 0
    for i, w in enumerate(got):
        line = f"{format_word(w, cfg)}  {describe(w, cfg)}"
        if tv.expected is not None:
            ok = tv.expected[i] == w
            failures += not ok
            line += "" if ok else f"  MISMATCH expected {format_word(tv.expected[i], cfg)}"
        print(line)
    if tv.expected is not None:
        print(f"{len(got) - failures}/{len(got)} match")
    return 1 if failures else 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    report = differential_sweep(OpCode.parse(args.op), cfg, args.mode, seed=args.seed,
                                length=args.length, dist=args.dist, normal_only=args.normal_only)
    if args.report:
        path = Path(args.report)
        path.write_text(report.to_json() if path.suffix == ".json" else report.to_text())
    print(report.summary())
    return 0


def cmd_run(args) -> int:
    cfg = _config(args)
    program = isa_sim.load_program(Path(args.program).read_bytes())
    state = load_regfile(Path(args.regs).read_text(), cfg)
    try:
        final = isa_sim.run(program, state, cfg)
    except isa_sim.NotPositInstruction as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(dump_regfile(final, cfg))
    return 0


def cmd_asm(args) -> int:
    words = isa_sim.assemble(Path(args.source).read_text())
    Path(args.output).write_bytes(isa_sim.dump_program(words))
    for w in words:
        print(f"{w:08x}  {isa_sim.decode_instr(w)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--nbits", type=int, default=32, help="posit width (default 32)")
    fmt.add_argument("--es", type=int, default=2, help="exponent bits (default 2)")
    fmt.add_argument("--align", type=int, default=None, help="alignment width (default nbits)")

    parser = argparse.ArgumentParser(prog="pvu", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("op", parents=[fmt], help="run one vector operation on hex words")
    p.add_argument("--op", required=True, choices=[o.value for o in OpCode])
    p.add_argument("-a", required=True, help="operand A words, comma or space separated")
    p.add_argument("-b", required=True, help="operand B words")
    p.set_defaults(func=cmd_op)

    p = sub.add_parser("decode", parents=[fmt], help="show the fields of posit words")
    p.add_argument("words", nargs="+")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("batch", help="run a test vector file")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("sweep", parents=[fmt], help="differential sweep against the exact oracle")
    p.add_argument("--op", required=True, choices=[o.value for o in OpCode])
    p.add_argument("--mode", default="exhaustive", help="exhaustive or random:N")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--length", type=int, default=8, help="vector length for random dot sweeps")
    p.add_argument("--dist", choices=["bits", "lognormal"], default="bits")
    p.add_argument("--normal-only", action="store_true", help="skip zero and NaR operands")
    p.add_argument("--report", help="write the report here (.json for JSON, text otherwise)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("run", parents=[fmt], help="run a program on the instruction set simulator")
    p.add_argument("--program", required=True, help="little-endian 32-bit instruction words")
    p.add_argument("--regs", required=True, help="initial register file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("asm", help="assemble posit vector instructions into a program file")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_asm)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
