"""Differential sweeps: the vector unit against the exact oracle."""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator

from pvu.opcodes import OpCode
from pvu.oracle.exact import reference_words, round_to_posit
from pvu.posit_core import PositConfig
from pvu.vector_alu import execute_words

DEFAULT_SEED = 20250101
EXHAUSTIVE_MAX_BITS = 12
MAX_RECORDED = 25


def parse_mode(mode: str) -> tuple[str, int | None]:
    """``"exhaustive"`` or ``"random:N"``."""
    if mode == "exhaustive":
        return "exhaustive", None
    kind, _, count = mode.partition(":")
    if kind == "random" and count.isdigit() and int(count) > 0:
        return "random", int(count)
    raise ValueError(f"bad sweep mode {mode!r}; use 'exhaustive' or 'random:N'")


def ulp_distance(got: int, expected: int, n_bits: int) -> float:
    """Distance on the posit lattice, counting patterns between the results."""
    nar = 1 << (n_bits - 1)
    if got == expected:
        return 0
    if nar in (got, expected):
        return math.inf

    def signed(w):
        return w - (1 << n_bits) if w & nar else w

    return abs(signed(got) - signed(expected))


@dataclass
class MismatchReport:
    op: str
    n_bits: int
    es_bits: int
    align_bits: int
    mode: str
    seed: int | None
    total: int = 0
    exact: int = 0
    one_ulp: int = 0
    worse: int = 0
    unique_total: int = 0
    unique_exact: int = 0
    cases: list[dict] = field(default_factory=list)

    @property
    def exact_rate(self) -> float:
        return self.exact / self.total if self.total else 1.0

    @property
    def within_one_ulp_rate(self) -> float:
        return (self.exact + self.one_ulp) / self.total if self.total else 1.0

    def merge(self, other: MismatchReport) -> MismatchReport:
        for name in ("total", "exact", "one_ulp", "worse", "unique_total", "unique_exact"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.cases = (self.cases + other.cases)[:MAX_RECORDED]
        return self

    def summary(self) -> str:
        return (f"{self.op} <{self.n_bits},{self.es_bits}> {self.mode}: "
                f"{self.exact}/{self.total} exact ({100 * self.exact_rate:.2f}%), "
                f"{self.one_ulp} within 1 ulp, {self.worse} worse")

    def to_text(self) -> str:
        lines = [
            f"op: {self.op}",
            f"format: posit<{self.n_bits},{self.es_bits}> align={self.align_bits}",
            f"mode: {self.mode}",
            f"seed: {self.seed}",
            f"total: {self.total}",
            f"exact: {self.exact}",
            f"one_ulp: {self.one_ulp}",
            f"worse: {self.worse}",
            f"exact_rate: {self.exact_rate:.6f}",
            f"unique_total: {self.unique_total}",
            f"unique_exact: {self.unique_exact}",
        ]
        digits = (self.n_bits + 3) // 4
        for case in self.cases:
            a = " ".join(f"{w:0{digits}x}" for w in case["a"])
            b = " ".join(f"{w:0{digits}x}" for w in case["b"])
            lines.append(f"case: a=[{a}] b=[{b}] got={case['got']:0{digits}x} "
                         f"expected={case['expected']:0{digits}x} ulps={case['ulps']}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        data = asdict(self)
        data["exact_rate"] = self.exact_rate
        return json.dumps(data, indent=2, default=str)

    @classmethod
    def from_json(cls, text: str) -> MismatchReport:
        data = json.loads(text)
        data.pop("exact_rate", None)
        return cls(**data)


def _random_word(rng: random.Random, cfg: PositConfig, dist: str) -> int:
    if dist == "bits":
        return rng.getrandbits(cfg.n_bits)
    if dist == "lognormal":
        x = Fraction(rng.lognormvariate(0.0, 2.0))
        return round_to_posit(-x if rng.random() < 0.5 else x, cfg)
    raise ValueError(f"unknown distribution {dist!r}")


def _cases(op: OpCode, cfg: PositConfig, kind: str, count: int | None,
           rng: random.Random, length: int, dist: str) -> Iterator[tuple[list[int], list[int]]]:
    size = 1 << cfg.n_bits
    if kind == "exhaustive":
        words = list(range(size))
        for a in words:
            if op is OpCode.DOT:
                # a*a - b*b: a pair of products with cancellation, rounded once
                neg = [(-b) % size for b in words]
                for b, nb in zip(words, neg):
                    yield [a, b], [a, nb]
            else:
                yield [a] * size, words
        return
    for _ in range(count):
        if op is OpCode.DOT:
            yield ([_random_word(rng, cfg, dist) for _ in range(length)],
                   [_random_word(rng, cfg, dist) for _ in range(length)])
        else:
            yield [_random_word(rng, cfg, dist)], [_random_word(rng, cfg, dist)]


def differential_sweep(op: OpCode, cfg: PositConfig, mode: str = "exhaustive", *,
                       seed: int = DEFAULT_SEED, length: int = 8, dist: str = "bits",
                       normal_only: bool = False) -> MismatchReport:
    """Run the vector unit and the oracle over the same inputs and compare.

    ``normal_only`` skips operand pairs where either side is zero or NaR.
    """
    kind, count = parse_mode(mode)
    if kind == "exhaustive" and cfg.n_bits > EXHAUSTIVE_MAX_BITS:
        raise ValueError(f"exhaustive sweeps are limited to n_bits <= {EXHAUSTIVE_MAX_BITS}")
    rng = random.Random(seed)
    report = MismatchReport(op.value, cfg.n_bits, cfg.es_bits, cfg.align_bits, mode,
                            seed if kind == "random" else None)
    seen: dict[tuple, bool] = {}
    specials = {0, cfg.nar}
    for a, b in _cases(op, cfg, kind, count, rng, length, dist):
        if normal_only:
            keep = [i for i, (x, y) in enumerate(zip(a, b)) if x not in specials and y not in specials]
            if len(keep) != len(a):
                if op is OpCode.DOT or not keep:
                    continue
                a, b = [a[i] for i in keep], [b[i] for i in keep]
        got = execute_words(op, a, b, cfg)
        expected = reference_words(op, a, b, cfg)
        if op is OpCode.DOT:
            rows = [((tuple(a), tuple(b)), got, expected)]
        else:
            rows = [((x, y), g, e) for x, y, g, e in zip(a, b, got, expected)]
        for key, g, e in rows:
            dist_ulp = ulp_distance(g, e, cfg.n_bits)
            report.total += 1
            if key not in seen:
                seen[key] = dist_ulp == 0
                report.unique_total += 1
                report.unique_exact += dist_ulp == 0
            if dist_ulp == 0:
                report.exact += 1
                continue
            if dist_ulp <= 1:
                report.one_ulp += 1
            else:
                report.worse += 1
            if len(report.cases) < MAX_RECORDED:
                ka, kb = key if op is OpCode.DOT else ((key[0],), (key[1],))
                report.cases.append({"a": list(ka), "b": list(kb), "got": g,
                                     "expected": e, "ulps": dist_ulp})
    return report
