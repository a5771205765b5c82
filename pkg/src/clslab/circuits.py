"""Arithmetic circuits over [0,1]^dim and the fixpoint/local-opt problem family.

A circuit is a topologically ordered gate list over {CONST, ADD, SUB, MUL,
MAX, MIN, ABS}; evaluation is exact over rationals.  Supported norms are the
sum norm (r = 1) and the max norm (r = inf), both of which stay rational;
comparisons for other integer orders are exposed through :func:`norm_gt`,
which compares r-th powers instead of taking roots.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    BudgetExceededError,
    DimensionError,
    DomainEscapeError,
    ParseError,
    PreconditionError,
)
from .qlinalg import Q, QVector, data_lines, format_rational, rational

INF = float("inf")
NormOrder = Union[int, float]

_BINARY_OPS = ("ADD", "SUB", "MUL", "MAX", "MIN")

Gate = tuple  # ("CONST", Fraction) | (op, i, j) | ("ABS", i)


@dataclass(frozen=True)
class ArithCircuit:
    """Gate list; value index k is input k for k < arity, else gate k - arity."""

    arity: int
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 0:
            raise DimensionError("arity must be nonnegative")
        if not self.outputs:
            raise DimensionError("at least one output required")
        for pos, gate in enumerate(self.gates):
            limit = self.arity + pos
            op = gate[0]
            if op == "CONST":
                if len(gate) != 2 or not isinstance(gate[1], Fraction):
                    raise DimensionError(f"bad CONST gate at {pos}")
            elif op == "ABS":
                if len(gate) != 2 or not (0 <= gate[1] < limit):
                    raise DimensionError(f"bad ABS gate at {pos}")
            elif op in _BINARY_OPS:
                if len(gate) != 3 or not (0 <= gate[1] < limit and 0 <= gate[2] < limit):
                    raise DimensionError(f"bad {op} gate at {pos}")
            else:
                raise DimensionError(f"unknown gate op {op!r}")
        top = self.arity + len(self.gates)
        if any(not (0 <= o < top) for o in self.outputs):
            raise DimensionError("output index out of range")

    @property
    def out_arity(self) -> int:
        return len(self.outputs)


def _eval_raw(circ: ArithCircuit, xs: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    vals = list(xs)
    append = vals.append
    for gate in circ.gates:
        op = gate[0]
        if op == "ADD":
            append(vals[gate[1]] + vals[gate[2]])
        elif op == "SUB":
            append(vals[gate[1]] - vals[gate[2]])
        elif op == "MUL":
            append(vals[gate[1]] * vals[gate[2]])
        elif op == "MAX":
            a, b = vals[gate[1]], vals[gate[2]]
            append(a if a >= b else b)
        elif op == "MIN":
            a, b = vals[gate[1]], vals[gate[2]]
            append(a if a <= b else b)
        elif op == "ABS":
            a = vals[gate[1]]
            append(a if a >= 0 else -a)
        else:  # CONST
            append(gate[1])
    return tuple(vals[o] for o in circ.outputs)


def circuit_eval(circ: ArithCircuit, x: QVector) -> QVector:
    """Evaluate all gates in order; exact rationals."""
    if len(x) != circ.arity:
        raise DimensionError(f"input length {len(x)}, circuit arity {circ.arity}")
    return QVector(_eval_raw(circ, tuple(x)))


class CircuitBuilder:
    """Incremental gate-list construction; methods return value indices."""

    def __init__(self, arity: int):
        self.arity = arity
        self.gates: list[Gate] = []

    def _push(self, gate: Gate) -> int:
        self.gates.append(gate)
        return self.arity + len(self.gates) - 1

    def const(self, value) -> int:
        return self._push(("CONST", rational(value)))

    def add(self, i: int, j: int) -> int:
        return self._push(("ADD", i, j))

    def sub(self, i: int, j: int) -> int:
        return self._push(("SUB", i, j))

    def mul(self, i: int, j: int) -> int:
        return self._push(("MUL", i, j))

    def max(self, i: int, j: int) -> int:
        return self._push(("MAX", i, j))

    def min(self, i: int, j: int) -> int:
        return self._push(("MIN", i, j))

    def abs(self, i: int) -> int:
        return self._push(("ABS", i))

    def inline(self, circ: ArithCircuit, inputs: Sequence[int]) -> list[int]:
        """Splice another circuit's gates in, rewiring its inputs; returns its outputs."""
        if len(inputs) != circ.arity:
            raise DimensionError("inline input count mismatch")
        mapping = list(inputs)
        for gate in circ.gates:
            op = gate[0]
            if op == "CONST":
                mapping.append(self.const(gate[1]))
            elif op == "ABS":
                mapping.append(self.abs(mapping[gate[1]]))
            else:
                mapping.append(self._push((op, mapping[gate[1]], mapping[gate[2]])))
        return [mapping[o] for o in circ.outputs]

    def sum(self, indices: Sequence[int]) -> int:
        if not indices:
            return self.const(0)
        acc = indices[0]
        for i in indices[1:]:
            acc = self.add(acc, i)
        return acc

    def max_chain(self, indices: Sequence[int]) -> int:
        acc = indices[0]
        for i in indices[1:]:
            acc = self.max(acc, i)
        return acc

    def build(self, outputs: Sequence[int]) -> ArithCircuit:
        return ArithCircuit(self.arity, tuple(self.gates), tuple(outputs))


def identity_circuit(dim: int) -> ArithCircuit:
    return ArithCircuit(dim, (), tuple(range(dim)))


def const_circuit(dim: int, values: Sequence) -> ArithCircuit:
    b = CircuitBuilder(dim)
    return b.build([b.const(v) for v in values])


def norm_distance_circuit(dim: int, r: NormOrder) -> ArithCircuit:
    """d(x, y) = ||x - y|| as a circuit on 2*dim inputs, for r in {1, inf}."""
    b = CircuitBuilder(2 * dim)
    parts = [b.abs(b.sub(i, dim + i)) for i in range(dim)]
    if r == 1:
        return b.build([b.sum(parts)])
    if r == INF:
        return b.build([b.max_chain(parts)])
    raise PreconditionError("distance circuits support only r in {1, inf}")


# ----------------------------------------------------------------------------
# norms


def _check_order(r: NormOrder) -> NormOrder:
    if r == INF or (isinstance(r, int) and r >= 1):
        return r
    raise PreconditionError(f"unsupported norm order {r!r}")


def norm_pow(v: QVector, r: NormOrder) -> Fraction:
    """Sum norm for r=1, max norm for r=inf; the r-th power of the norm otherwise."""
    r = _check_order(r)
    entries = [a if a >= 0 else -a for a in v]
    if r == INF:
        return max(entries, default=Q(0))
    if r == 1:
        return sum(entries, Q(0))
    return sum((a**r for a in entries), Q(0))


def norm_gt(u: QVector, scale: Fraction, v: QVector, r: NormOrder) -> bool:
    """Exact test of ||u|| > scale * ||v|| (scale >= 0) for any supported order."""
    r = _check_order(r)
    if scale < 0:
        raise PreconditionError("scale must be nonnegative")
    if r in (1, INF):
        return norm_pow(u, r) > scale * norm_pow(v, r)
    return norm_pow(u, r) > scale**r * norm_pow(v, r)


def in_unit_box(x: QVector) -> bool:
    return all(0 <= a <= 1 for a in x)


# ----------------------------------------------------------------------------
# problem instances


def _check_range(name: str, value: Fraction, low_open, high_open=None):
    if value <= low_open:
        raise PreconditionError(f"{name} must exceed {low_open}")
    if high_open is not None and value >= high_open:
        raise PreconditionError(f"{name} must be below {high_open}")


@dataclass(frozen=True, eq=False)
class CloInstance:
    """Local-opt search data: map f, potential p, slack eps, Lipschitz bound lam."""

    f: ArithCircuit
    p: ArithCircuit
    eps: Fraction
    lam: Fraction
    r: NormOrder = 1
    dim: int = 3

    def __post_init__(self):
        if self.f.arity != self.dim or self.f.out_arity != self.dim:
            raise DimensionError("f must map dim -> dim")
        if self.p.arity != self.dim or self.p.out_arity != 1:
            raise DimensionError("p must map dim -> 1")
        if self.r not in (1, INF):
            raise PreconditionError("instance norm must be 1 or inf")
        _check_range("eps", self.eps, 0)
        _check_range("lam", self.lam, 0)


@dataclass(frozen=True, eq=False)
class ContractionInstance:
    """Purportedly c-contracting map with fixpoint slack delta."""

    f: ArithCircuit
    r: NormOrder
    eps: Fraction
    c: Fraction
    delta: Fraction
    dim: int = 3

    def __post_init__(self):
        if self.f.arity != self.dim or self.f.out_arity != self.dim:
            raise DimensionError("f must map dim -> dim")
        if self.r not in (1, INF):
            raise PreconditionError("instance norm must be 1 or inf")
        _check_range("eps", self.eps, 0, 1)
        _check_range("c", self.c, 0, 1)
        _check_range("delta", self.delta, 0)


@dataclass(frozen=True, eq=False)
class MmcInstance:
    """Contraction w.r.t. a supplied distance-like circuit d on pairs.

    ``delta_d`` bounds the continuity of d, ``lam`` the continuity of f.
    """

    f: ArithCircuit
    d: ArithCircuit
    r: NormOrder
    eps: Fraction
    c: Fraction
    delta_d: Fraction
    lam: Fraction
    dim: int = 3

    def __post_init__(self):
        if self.f.arity != self.dim or self.f.out_arity != self.dim:
            raise DimensionError("f must map dim -> dim")
        if self.d.arity != 2 * self.dim or self.d.out_arity != 1:
            raise DimensionError("d must map 2*dim -> 1")
        if self.r not in (1, INF):
            raise PreconditionError("instance norm must be 1 or inf")
        _check_range("eps", self.eps, 0, 1)
        _check_range("c", self.c, 0, 1)
        _check_range("delta_d", self.delta_d, 0)
        _check_range("lam", self.lam, 0)

    def dist(self, x: QVector, y: QVector) -> Fraction:
        return circuit_eval(self.d, QVector(tuple(x) + tuple(y)))[0]


CircuitProblem = Union[CloInstance, ContractionInstance, MmcInstance]


# solutions


@dataclass(frozen=True)
class C1:
    x: QVector


@dataclass(frozen=True)
class C2a:
    x: QVector
    y: QVector


@dataclass(frozen=True)
class C2b:
    x: QVector
    y: QVector


@dataclass(frozen=True)
class CM1:
    x: QVector


@dataclass(frozen=True)
class CM2:
    x: QVector
    y: QVector


@dataclass(frozen=True)
class M1:
    x: QVector


@dataclass(frozen=True)
class M2a:
    x: QVector
    y: QVector


@dataclass(frozen=True)
class M2b:
    x: QVector
    y: QVector
    x2: QVector
    y2: QVector


@dataclass(frozen=True)
class M2c:
    x: QVector
    y: QVector


@dataclass(frozen=True)
class MMviol:
    """Witness against one of the distance axioms: 1 nonnegativity,
    2 zero-implies-equal, 3 symmetry, 4 triangle inequality."""

    kind: int
    points: tuple[QVector, ...]


CloSolution = Union[C1, C2a, C2b]
ContractionSolution = Union[CM1, CM2]
MmcSolution = Union[M1, M2a, M2b, M2c, MMviol]


@dataclass(frozen=True)
class Verdict:
    ok: bool
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def _ineq(label: str, lhs: Fraction, rel: str, rhs: Fraction, ok: bool) -> Verdict:
    state = "holds" if ok else "fails"
    return Verdict(ok, f"{label}: {format_rational(lhs)} {rel} {format_rational(rhs)} {state}")


def _check_domain(inst, *points: QVector):
    for pt in points:
        if len(pt) != inst.dim:
            raise DimensionError("point has wrong dimension")
        if not in_unit_box(pt):
            raise PreconditionError(f"point outside [0,1]^{inst.dim}: {pt}")


# verifiers


def clo_verify(inst: CloInstance, cand: CloSolution) -> Verdict:
    """C1: f fails to improve p by eps; C2a/C2b: exact Lipschitz violations."""
    if isinstance(cand, C1):
        _check_domain(inst, cand.x)
        px = circuit_eval(inst.p, cand.x)[0]
        pfx = circuit_eval(inst.p, circuit_eval(inst.f, cand.x))[0]
        return _ineq("p(f(x)) >= p(x) - eps", pfx, ">=", px - inst.eps, pfx >= px - inst.eps)
    if isinstance(cand, C2a):
        _check_domain(inst, cand.x, cand.y)
        fx = circuit_eval(inst.f, cand.x)
        fy = circuit_eval(inst.f, cand.y)
        ok = norm_gt(fx - fy, inst.lam, cand.x - cand.y, inst.r)
        return _ineq(
            "|f(x)-f(y)| > lam*|x-y|",
            norm_pow(fx - fy, inst.r),
            ">",
            inst.lam * norm_pow(cand.x - cand.y, inst.r),
            ok,
        )
    if isinstance(cand, C2b):
        _check_domain(inst, cand.x, cand.y)
        px = circuit_eval(inst.p, cand.x)
        py = circuit_eval(inst.p, cand.y)
        ok = norm_gt(px - py, inst.lam, cand.x - cand.y, inst.r)
        return _ineq(
            "|p(x)-p(y)| > lam*|x-y|",
            norm_pow(px - py, inst.r),
            ">",
            inst.lam * norm_pow(cand.x - cand.y, inst.r),
            ok,
        )
    return Verdict(False, f"not a local-opt solution shape: {cand!r}")


def contraction_verify(inst: ContractionInstance, cand: ContractionSolution) -> Verdict:
    if isinstance(cand, CM1):
        _check_domain(inst, cand.x)
        gap = circuit_eval(inst.f, cand.x) - cand.x
        value = norm_pow(gap, inst.r)
        return _ineq("|f(x)-x| <= delta", value, "<=", inst.delta, value <= inst.delta)
    if isinstance(cand, CM2):
        _check_domain(inst, cand.x, cand.y)
        fx = circuit_eval(inst.f, cand.x)
        fy = circuit_eval(inst.f, cand.y)
        ok = norm_gt(fx - fy, inst.c, cand.x - cand.y, inst.r)
        return _ineq(
            "|f(x)-f(y)| > c*|x-y|",
            norm_pow(fx - fy, inst.r),
            ">",
            inst.c * norm_pow(cand.x - cand.y, inst.r),
            ok,
        )
    return Verdict(False, f"not a contraction solution shape: {cand!r}")


def mmc_verify(inst: MmcInstance, cand: MmcSolution) -> Verdict:
    if isinstance(cand, M1):
        _check_domain(inst, cand.x)
        value = inst.dist(circuit_eval(inst.f, cand.x), cand.x)
        return _ineq("d(f(x),x) <= eps", value, "<=", inst.eps, value <= inst.eps)
    if isinstance(cand, M2a):
        _check_domain(inst, cand.x, cand.y)
        fx = circuit_eval(inst.f, cand.x)
        fy = circuit_eval(inst.f, cand.y)
        lhs = inst.dist(fx, fy)
        rhs = inst.c * inst.dist(cand.x, cand.y)
        return _ineq("d(f(x),f(y)) > c*d(x,y)", lhs, ">", rhs, lhs > rhs)
    if isinstance(cand, M2b):
        _check_domain(inst, cand.x, cand.y, cand.x2, cand.y2)
        gap = inst.dist(cand.x, cand.y) - inst.dist(cand.x2, cand.y2)
        lhs = gap if gap >= 0 else -gap
        pair_diff = QVector(tuple(cand.x - cand.x2) + tuple(cand.y - cand.y2))
        rhs = inst.delta_d * norm_pow(pair_diff, inst.r)
        return _ineq("|d(x,y)-d(x',y')| > delta_d*|(x,y)-(x',y')|", lhs, ">", rhs, lhs > rhs)
    if isinstance(cand, M2c):
        _check_domain(inst, cand.x, cand.y)
        fx = circuit_eval(inst.f, cand.x)
        fy = circuit_eval(inst.f, cand.y)
        ok = norm_gt(fx - fy, inst.lam, cand.x - cand.y, inst.r)
        return _ineq(
            "|f(x)-f(y)| > lam*|x-y|",
            norm_pow(fx - fy, inst.r),
            ">",
            inst.lam * norm_pow(cand.x - cand.y, inst.r),
            ok,
        )
    if isinstance(cand, MMviol):
        for pt in cand.points:
            _check_domain(inst, pt)
        return _axiom_violation_verdict(inst.d, cand)
    return Verdict(False, f"not a contraction-with-distance solution shape: {cand!r}")


def _axiom_violation_verdict(d: ArithCircuit, cand: MMviol) -> Verdict:
    def dist(a: QVector, b: QVector) -> Fraction:
        return circuit_eval(d, QVector(tuple(a) + tuple(b)))[0]

    if cand.kind == 1 and len(cand.points) == 2:
        x, y = cand.points
        value = dist(x, y)
        return _ineq("nonnegativity violated: d(x,y) < 0", value, "<", Q(0), value < 0)
    if cand.kind == 2 and len(cand.points) == 2:
        x, y = cand.points
        value = dist(x, y)
        ok = value == 0 and x != y
        return Verdict(ok, f"zero-implies-equal violated: d(x,y)={format_rational(value)}, x!=y is {x != y}")
    if cand.kind == 3 and len(cand.points) == 2:
        x, y = cand.points
        a, b = dist(x, y), dist(y, x)
        return Verdict(a != b, f"symmetry violated: d(x,y)={format_rational(a)}, d(y,x)={format_rational(b)}")
    if cand.kind == 4 and len(cand.points) == 3:
        x, y, z = cand.points
        lhs = dist(x, z)
        rhs = dist(x, y) + dist(y, z)
        return _ineq("triangle violated: d(x,z) > d(x,y)+d(y,z)", lhs, ">", rhs, lhs > rhs)
    return Verdict(False, f"malformed axiom witness: kind={cand.kind}, {len(cand.points)} points")


def check_metametric(
    d: ArithCircuit, points: Sequence[QVector], dim: Optional[int] = None
) -> Optional[MMviol]:
    """First axiom violation of d over the sample, or None.

    Nonnegativity, symmetry, and zero-implies-equal run over all ordered
    pairs.  The triangle inequality runs over representatives of the
    value-classes of the pair table (points with identical rows interchange
    freely once symmetry holds), which keeps structured distance circuits
    cheap on large samples; the check is still exact and exhaustive.
    """
    if dim is None:
        dim = d.arity // 2
    if d.arity != 2 * dim or d.out_arity != 1:
        raise DimensionError("distance circuit must map 2*dim -> 1")
    pts = list(points)
    n = len(pts)
    raw = [tuple(p) for p in pts]
    table: list[list[Fraction]] = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            table[i][j] = _eval_raw(d, raw[i] + raw[j])[0]
    for i in range(n):
        for j in range(n):
            if table[i][j] < 0:
                return MMviol(1, (pts[i], pts[j]))
    for i in range(n):
        for j in range(i + 1, n):
            if table[i][j] != table[j][i]:
                return MMviol(3, (pts[i], pts[j]))
    for i in range(n):
        for j in range(n):
            if table[i][j] == 0 and pts[i] != pts[j]:
                return MMviol(2, (pts[i], pts[j]))
    reps: dict[tuple, int] = {}
    for i in range(n):
        reps.setdefault(tuple(table[i]), i)
    rep_idx = list(reps.values())
    for i in rep_idx:
        for j in rep_idx:
            row_i, row_j = table[i], table[j]
            for k in rep_idx:
                if row_i[k] > row_i[j] + row_j[k]:
                    return MMviol(4, (pts[i], pts[j], pts[k]))
    return None


def unit_grid(dim: int, points_per_axis: int) -> list[QVector]:
    """The uniform rational grid on [0,1]^dim with the given side count."""
    if points_per_axis < 2:
        raise PreconditionError("need at least two points per axis")
    axis = [Q(k, points_per_axis - 1) for k in range(points_per_axis)]
    return [QVector(c) for c in itertools.product(axis, repeat=dim)]


def probe_domain(f: ArithCircuit, dim: int, points_per_axis: int = 4) -> Optional[QVector]:
    """First grid point that f maps outside the unit box, or None."""
    for x in unit_grid(dim, points_per_axis):
        if not in_unit_box(circuit_eval(f, x)):
            return x
    return None


# ----------------------------------------------------------------------------
# desk-scale solvers


def _step(inst, x: QVector) -> QVector:
    fx = circuit_eval(inst.f, x)
    if not in_unit_box(fx):
        raise DomainEscapeError(f"f escapes the unit box at {x}", point=fx)
    return fx


def clo_solve_iterate(
    inst: CloInstance, start: QVector, budget: Optional[int] = None
) -> tuple[CloSolution, tuple[QVector, ...]]:
    """Iterate f from start; stop at the first eps-stall of p or Lipschitz violation.

    Stops within ceil(p(start)/eps) + 1 iterations when no violation shows up.
    """
    _check_domain(inst, start)
    if budget is None:
        p0 = circuit_eval(inst.p, start)[0]
        budget = int(math.ceil(p0 / inst.eps)) + 2
    x = start
    trace = [x]
    for _ in range(budget):
        fx = _step(inst, x)
        if x != fx:
            if clo_verify(inst, C2a(x, fx)):
                return C2a(x, fx), tuple(trace)
            if clo_verify(inst, C2b(x, fx)):
                return C2b(x, fx), tuple(trace)
        if circuit_eval(inst.p, fx)[0] >= circuit_eval(inst.p, x)[0] - inst.eps:
            return C1(x), tuple(trace)
        x = fx
        trace.append(x)
    raise BudgetExceededError(f"no stall within {budget} iterations", trace=tuple(trace))


def fixpoint_iterate(
    inst: Union[ContractionInstance, MmcInstance], start: QVector, budget: int = 256
) -> tuple[Union[ContractionSolution, MmcSolution], tuple[QVector, ...]]:
    """Iterate f from start until the fixpoint condition verifies.

    Consecutive iterate pairs are tested for contraction/continuity
    violations on the way; hitting the budget raises with the trace.
    """
    _check_domain(inst, start)
    metered = isinstance(inst, MmcInstance)
    x = start
    trace = [x]
    prev: Optional[QVector] = None
    for _ in range(budget + 1):
        if metered:
            if mmc_verify(inst, M1(x)):
                return M1(x), tuple(trace)
        else:
            if contraction_verify(inst, CM1(x)):
                return CM1(x), tuple(trace)
        fx = _step(inst, x)
        # pair checks run even at a fixed point: a positive self-distance can
        # already violate the claimed contraction factor
        if metered:
            for cand in (M2a(x, fx), M2c(x, fx)):
                if mmc_verify(inst, cand):
                    return cand, tuple(trace)
            if prev is not None and mmc_verify(inst, M2b(prev, x, x, fx)):
                return M2b(prev, x, x, fx), tuple(trace)
        elif contraction_verify(inst, CM2(x, fx)):
            return CM2(x, fx), tuple(trace)
        prev = x
        x = fx
        trace.append(x)
    raise BudgetExceededError(
        f"no fixpoint within {budget} iterations; promised contraction may be slow or false",
        trace=tuple(trace),
    )


# ----------------------------------------------------------------------------
# file formats


def format_norm(r: NormOrder) -> str:
    return "inf" if r == INF else str(r)


def parse_norm(text: str) -> NormOrder:
    if text == "inf":
        return INF
    try:
        value = int(text)
    except ValueError as exc:
        raise ParseError(f"bad norm order {text!r}") from exc
    if value < 1:
        raise ParseError(f"bad norm order {text!r}")
    return value


def dump_circuit(circ: ArithCircuit) -> str:
    lines = [f"ARITH {circ.arity} {len(circ.gates)} {circ.out_arity}"]
    for gate in circ.gates:
        if gate[0] == "CONST":
            lines.append(f"CONST {format_rational(gate[1])}")
        else:
            lines.append(" ".join(str(part) for part in gate))
    lines.append(" ".join(str(o) for o in circ.outputs))
    return "\n".join(lines) + "\n"


def _parse_circuit_lines(
    lines: list[tuple[int, str]], pos: int
) -> tuple[ArithCircuit, int]:
    if pos >= len(lines):
        raise ParseError("missing circuit block")
    head_num, head_text = lines[pos]
    head = head_text.split()
    if len(head) != 4 or head[0] != "ARITH":
        raise ParseError(f"line {head_num}: bad circuit header {head_text!r}")
    arity, n_gates, n_outputs = int(head[1]), int(head[2]), int(head[3])
    if pos + 1 + n_gates >= len(lines):
        raise ParseError(f"line {head_num}: truncated circuit block")
    gates: list[Gate] = []
    for k in range(n_gates):
        num, gate_text = lines[pos + 1 + k]
        parts = gate_text.split()
        op = parts[0]
        if op == "CONST" and len(parts) == 2:
            gates.append(("CONST", rational(parts[1])))
        elif op == "ABS" and len(parts) == 2:
            gates.append(("ABS", int(parts[1])))
        elif op in _BINARY_OPS and len(parts) == 3:
            gates.append((op, int(parts[1]), int(parts[2])))
        else:
            raise ParseError(f"line {num}: bad gate {gate_text!r}")
    out_num, out_text = lines[pos + 1 + n_gates]
    outs = [int(tok) for tok in out_text.split()]
    if len(outs) != n_outputs:
        raise ParseError(f"line {out_num}: expected {n_outputs} outputs, got {len(outs)}")
    return ArithCircuit(arity, tuple(gates), tuple(outs)), pos + n_gates + 2


def parse_circuit(text: str) -> ArithCircuit:
    lines = data_lines(text)
    circ, pos = _parse_circuit_lines(lines, 0)
    if pos != len(lines):
        raise ParseError("trailing data after circuit")
    return circ


def _header_fields(numbered: tuple[int, str], expect: str, keys: tuple[str, ...]) -> dict:
    num, line = numbered
    parts = line.split()
    if not parts or parts[0] != expect:
        raise ParseError(f"line {num}: expected {expect} header, got {line!r}")
    fields = dict(part.split("=", 1) for part in parts[1:] if "=" in part)
    missing = [k for k in keys if k not in fields]
    if missing:
        raise ParseError(f"line {num}: {expect} header missing {missing}")
    return fields


def dump_problem(inst: CircuitProblem) -> str:
    if isinstance(inst, CloInstance):
        head = (
            f"CLO dim={inst.dim} r={format_norm(inst.r)} "
            f"eps={format_rational(inst.eps)} lambda={format_rational(inst.lam)}"
        )
        return head + "\n" + dump_circuit(inst.f) + dump_circuit(inst.p)
    if isinstance(inst, ContractionInstance):
        head = (
            f"CONTRACTION dim={inst.dim} r={format_norm(inst.r)} "
            f"eps={format_rational(inst.eps)} c={format_rational(inst.c)} "
            f"delta={format_rational(inst.delta)}"
        )
        return head + "\n" + dump_circuit(inst.f)
    head = (
        f"MMC dim={inst.dim} r={format_norm(inst.r)} "
        f"eps={format_rational(inst.eps)} c={format_rational(inst.c)} "
        f"delta_d={format_rational(inst.delta_d)} lambda={format_rational(inst.lam)}"
    )
    return head + "\n" + dump_circuit(inst.f) + dump_circuit(inst.d)


def load_problem(text: str, probe: bool = True) -> CircuitProblem:
    """Parse a problem file; optionally probe a coarse grid for domain escapes."""
    lines = data_lines(text)
    if not lines:
        raise ParseError("empty problem file")
    tag = lines[0][1].split()[0]
    if tag == "CLO":
        fields = _header_fields(lines[0], "CLO", ("dim", "r", "eps", "lambda"))
        f, pos = _parse_circuit_lines(lines, 1)
        p, pos = _parse_circuit_lines(lines, pos)
        inst: CircuitProblem = CloInstance(
            f=f,
            p=p,
            eps=rational(fields["eps"]),
            lam=rational(fields["lambda"]),
            r=parse_norm(fields["r"]),
            dim=int(fields["dim"]),
        )
    elif tag == "CONTRACTION":
        fields = _header_fields(lines[0], "CONTRACTION", ("dim", "r", "eps", "c", "delta"))
        f, pos = _parse_circuit_lines(lines, 1)
        inst = ContractionInstance(
            f=f,
            r=parse_norm(fields["r"]),
            eps=rational(fields["eps"]),
            c=rational(fields["c"]),
            delta=rational(fields["delta"]),
            dim=int(fields["dim"]),
        )
    elif tag == "MMC":
        fields = _header_fields(
            lines[0], "MMC", ("dim", "r", "eps", "c", "delta_d", "lambda")
        )
        f, pos = _parse_circuit_lines(lines, 1)
        d, pos = _parse_circuit_lines(lines, pos)
        inst = MmcInstance(
            f=f,
            d=d,
            r=parse_norm(fields["r"]),
            eps=rational(fields["eps"]),
            c=rational(fields["c"]),
            delta_d=rational(fields["delta_d"]),
            lam=rational(fields["lambda"]),
            dim=int(fields["dim"]),
        )
    else:
        raise ParseError(f"unknown problem tag {tag!r}")
    if probe:
        escape = probe_domain(inst.f, inst.dim)
        if escape is not None:
            raise DomainEscapeError(f"f leaves the unit box near {escape}", point=escape)
    return inst


_POINT_SOLS = {
    "C1": (C1, 1),
    "C2a": (C2a, 2),
    "C2b": (C2b, 2),
    "CM1": (CM1, 1),
    "CM2": (CM2, 2),
    "M1": (M1, 1),
    "M2a": (M2a, 2),
    "M2b": (M2b, 4),
    "M2c": (M2c, 2),
}


def format_circuit_solution(sol) -> str:
    if isinstance(sol, MMviol):
        coords = " ".join(format_rational(a) for pt in sol.points for a in pt)
        return f"MMVIOL {sol.kind} {coords}"
    tag = type(sol).__name__
    pts = [getattr(sol, name) for name in ("x", "y", "x2", "y2") if hasattr(sol, name)]
    return tag + " " + " ".join(format_rational(a) for pt in pts for a in pt)


def parse_circuit_solution(line: str, dim: int):
    parts = line.split()
    if not parts:
        raise ParseError("empty solution line")
    tag = parts[0]
    if tag == "MMVIOL":
        kind = int(parts[1])
        coords = [rational(tok) for tok in parts[2:]]
        if len(coords) % dim != 0:
            raise ParseError("coordinate count not a multiple of dim")
        pts = tuple(
            QVector(tuple(coords[i : i + dim])) for i in range(0, len(coords), dim)
        )
        return MMviol(kind, pts)
    if tag not in _POINT_SOLS:
        raise ParseError(f"unknown solution tag {tag!r}")
    klass, count = _POINT_SOLS[tag]
    coords = [rational(tok) for tok in parts[1:]]
    if len(coords) != count * dim:
        raise ParseError(f"{tag} needs {count * dim} coordinates, got {len(coords)}")
    pts = [QVector(tuple(coords[i : i + dim])) for i in range(0, len(coords), dim)]
    return klass(*pts)
