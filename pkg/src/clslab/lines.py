"""Oracle-based line-following search problems over bit configurations.

Two problem shapes share the successor/predecessor structure: one demands a
potential that strictly increases along the line (solutions R1/R2), the other
an odometer that counts steps exactly (solutions T1/T2/T3).  Oracles are
plain callables, so instances can be backed by explicit truth tables or by
procedures closing over another instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Union

from .errors import (
    BudgetExceededError,
    DimensionError,
    InvariantViolationError,
    ParseError,
    PreconditionError,
)
from .qlinalg import data_lines


@dataclass(frozen=True)
class BitConfig:
    """Immutable fixed-width bit vector; bit 0 is the leftmost/printed first."""

    bits: tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0 or 1")

    @staticmethod
    def zeros(width: int) -> "BitConfig":
        return BitConfig((0,) * width)

    @staticmethod
    def from_string(text: str) -> "BitConfig":
        if not text or any(c not in "01" for c in text):
            raise ParseError(f"not a bit string: {text!r}")
        return BitConfig(tuple(int(c) for c in text))

    @staticmethod
    def from_int(value: int, width: int) -> "BitConfig":
        if value < 0 or value >= 1 << width:
            raise ValueError(f"{value} does not fit in {width} bits")
        return BitConfig(tuple((value >> (width - 1 - k)) & 1 for k in range(width)))

    @property
    def width(self) -> int:
        return len(self.bits)

    def to_int(self) -> int:
        out = 0
        for b in self.bits:
            out = (out << 1) | b
        return out

    def is_zero(self) -> bool:
        return all(b == 0 for b in self.bits)

    def concat(self, other: "BitConfig") -> "BitConfig":
        return BitConfig(self.bits + other.bits)

    def split(self, k: int) -> tuple["BitConfig", "BitConfig"]:
        return BitConfig(self.bits[:k]), BitConfig(self.bits[k:])

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def all_configs(width: int) -> Iterator[BitConfig]:
    for bits in itertools.product((0, 1), repeat=width):
        yield BitConfig(bits)


# Instances compare and hash by identity: the oracles are callables, so two
# separately built instances are distinct even when they agree pointwise.
@dataclass(frozen=True, eq=False)
class EoplInstance:
    """Successor/predecessor/potential oracles; the potential must climb along the line.

    Contract on the oracles: total and deterministic on all n-bit inputs,
    with values of ``v`` integers in [0, 2^m - 1].
    """

    n: int
    m: int
    s: Callable[[BitConfig], BitConfig]
    p: Callable[[BitConfig], BitConfig]
    v: Callable[[BitConfig], int]

    def _checked(self, x: BitConfig) -> BitConfig:
        if x.width != self.n:
            raise DimensionError(f"config width {x.width}, instance width {self.n}")
        return x

    def S(self, x: BitConfig) -> BitConfig:
        out = self.s(self._checked(x))
        if out.width != self.n:
            raise InvariantViolationError("successor oracle changed the width")
        return out

    def P(self, x: BitConfig) -> BitConfig:
        out = self.p(self._checked(x))
        if out.width != self.n:
            raise InvariantViolationError("predecessor oracle changed the width")
        return out

    def V(self, x: BitConfig) -> int:
        out = self.v(self._checked(x))
        if not (0 <= out < (1 << self.m)):
            raise InvariantViolationError(f"potential {out} outside [0, 2^{self.m})")
        return out


@dataclass(frozen=True, eq=False)
class EomlInstance:
    """Line oracles with an exact step odometer in [0, 2^n]."""

    n: int
    s: Callable[[BitConfig], BitConfig]
    p: Callable[[BitConfig], BitConfig]
    v: Callable[[BitConfig], int]

    def _checked(self, x: BitConfig) -> BitConfig:
        if x.width != self.n:
            raise DimensionError(f"config width {x.width}, instance width {self.n}")
        return x

    def S(self, x: BitConfig) -> BitConfig:
        out = self.s(self._checked(x))
        if out.width != self.n:
            raise InvariantViolationError("successor oracle changed the width")
        return out

    def P(self, x: BitConfig) -> BitConfig:
        out = self.p(self._checked(x))
        if out.width != self.n:
            raise InvariantViolationError("predecessor oracle changed the width")
        return out

    def V(self, x: BitConfig) -> int:
        out = self.v(self._checked(x))
        if not (0 <= out <= (1 << self.n)):
            raise InvariantViolationError(f"odometer {out} outside [0, 2^{self.n}]")
        return out


LineInstance = Union[EoplInstance, EomlInstance]


@dataclass(frozen=True)
class R1:
    x: BitConfig


@dataclass(frozen=True)
class R2:
    x: BitConfig


@dataclass(frozen=True)
class T1:
    x: BitConfig


@dataclass(frozen=True)
class T2:
    x: BitConfig


@dataclass(frozen=True)
class T3:
    x: BitConfig


EoplSolution = Union[R1, R2]
EomlSolution = Union[T1, T2, T3]
LineSolution = Union[EoplSolution, EomlSolution]


def eopl_verify(inst: EoplInstance, x: BitConfig) -> Optional[EoplSolution]:
    """Classify x as R1 (broken line end) or R2 (potential non-increase), R1 first."""
    zero = BitConfig.zeros(inst.n)
    sx = inst.S(x)
    if (inst.S(inst.P(x)) != x and x != zero) or inst.P(sx) != x:
        return R1(x)
    if x != sx and inst.P(sx) == x and inst.V(sx) - inst.V(x) <= 0:
        return R2(x)
    return None


def eoml_verify(inst: EomlInstance, x: BitConfig) -> Optional[EomlSolution]:
    """Classify x as T1, T2, or T3, in that priority order."""
    zero = BitConfig.zeros(inst.n)
    if (inst.S(inst.P(x)) != x and x != zero) or inst.P(inst.S(x)) != x:
        return T1(x)
    vx = inst.V(x)
    if x != zero and vx == 1:
        return T2(x)
    if (vx > 0 and inst.V(inst.S(x)) - vx != 1) or (vx > 1 and vx - inst.V(inst.P(x)) != 1):
        return T3(x)
    return None


def verify_solution(inst: LineInstance, x: BitConfig) -> Optional[LineSolution]:
    if isinstance(inst, EoplInstance):
        return eopl_verify(inst, x)
    return eoml_verify(inst, x)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(inst: LineInstance) -> ValidationReport:
    """Check the start-of-line preconditions at the all-zeros config."""
    zero = BitConfig.zeros(inst.n)
    bad = []
    if inst.P(zero) != zero:
        bad.append(f"P(0^n) = {inst.P(zero)} != 0^n")
    if inst.S(zero) == zero:
        bad.append("S(0^n) = 0^n")
    want = 0 if isinstance(inst, EoplInstance) else 1
    if inst.V(zero) != want:
        bad.append(f"V(0^n) = {inst.V(zero)} != {want}")
    return ValidationReport(not bad, tuple(bad))


TraceStep = tuple[BitConfig, int]


def follow_line(
    inst: LineInstance, max_steps: int
) -> tuple[LineSolution, tuple[TraceStep, ...]]:
    """Walk successors from the all-zeros config until a solution verifies."""
    if max_steps < 1:
        raise PreconditionError("max_steps must be at least 1")
    x = BitConfig.zeros(inst.n)
    trace: list[TraceStep] = [(x, inst.V(x))]
    steps = 0
    while True:
        sol = verify_solution(inst, x)
        if sol is not None:
            return sol, tuple(trace)
        if steps == max_steps:
            raise BudgetExceededError(
                f"no solution within {max_steps} steps", trace=tuple(trace)
            )
        x = inst.S(x)
        steps += 1
        trace.append((x, inst.V(x)))


def enumerate_solutions(inst: LineInstance, limit_n: int = 20) -> list[LineSolution]:
    """Classify every config by the verifier; guarded against width blowup."""
    if limit_n > 20:
        raise PreconditionError("limit_n must be at most 20")
    if inst.n > limit_n:
        raise PreconditionError(f"instance width {inst.n} exceeds limit {limit_n}")
    out = []
    for x in all_configs(inst.n):
        sol = verify_solution(inst, x)
        if sol is not None:
            out.append(sol)
    return out


# ----------------------------------------------------------------------------
# truth-table construction and file format


def table_instance(
    kind: str, n: int, s: dict, p: dict, v: dict, m: Optional[int] = None
) -> LineInstance:
    """Build an instance from explicit per-config maps."""
    if len(s) != 1 << n or len(p) != 1 << n or len(v) != 1 << n:
        raise DimensionError("truth tables must cover all configs")
    if kind == "EOPL":
        if m is None:
            raise DimensionError("potential bit width m required")
        return EoplInstance(n=n, m=m, s=s.__getitem__, p=p.__getitem__, v=v.__getitem__)
    if kind == "EOML":
        return EomlInstance(n=n, s=s.__getitem__, p=p.__getitem__, v=v.__getitem__)
    raise ParseError(f"unknown instance kind {kind!r}")


def load_line_table(text: str) -> LineInstance:
    """Parse a truth-table file: header ``EOPL n m`` or ``EOML n``, then rows."""
    lines = data_lines(text)
    if not lines:
        raise ParseError("empty instance file")
    head = lines[0][1].split()
    if head[0] == "EOPL" and len(head) == 3:
        kind, n, m = "EOPL", int(head[1]), int(head[2])
    elif head[0] == "EOML" and len(head) == 2:
        kind, n, m = "EOML", int(head[1]), None
    else:
        raise ParseError(f"line {lines[0][0]}: bad header {lines[0][1]!r}")
    if n < 1 or n > 20:
        raise ParseError(f"width {n} out of range")
    s, p, v = {}, {}, {}
    if len(lines) - 1 != 1 << n:
        raise ParseError(f"expected {1 << n} table rows, got {len(lines) - 1}")
    for num, ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise ParseError(f"line {num}: bad table row {ln!r}")
        x = BitConfig.from_string(parts[0])
        if x.width != n:
            raise ParseError(f"line {num}: row width mismatch")
        s[x] = BitConfig.from_string(parts[1])
        p[x] = BitConfig.from_string(parts[2])
        v[x] = int(parts[3])
    return table_instance(kind, n, s, p, v, m)


def dump_line_table(inst: LineInstance) -> str:
    """Serialize any instance with n <= 16 as an explicit truth table."""
    if inst.n > 16:
        raise PreconditionError("truth-table form is limited to 16-bit configs")
    if isinstance(inst, EoplInstance):
        lines = [f"EOPL {inst.n} {inst.m}"]
    else:
        lines = [f"EOML {inst.n}"]
    for x in all_configs(inst.n):
        lines.append(f"{x} {inst.S(x)} {inst.P(x)} {inst.V(x)}")
    return "\n".join(lines) + "\n"


_SOL_TAGS = {"R1": R1, "R2": R2, "T1": T1, "T2": T2, "T3": T3}


def format_line_solution(sol: LineSolution) -> str:
    return f"{type(sol).__name__} {sol.x}"


def parse_line_solution(line: str) -> LineSolution:
    parts = line.split()
    if len(parts) != 2 or parts[0] not in _SOL_TAGS:
        raise ParseError(f"bad solution line: {line!r}")
    return _SOL_TAGS[parts[0]](BitConfig.from_string(parts[1]))
