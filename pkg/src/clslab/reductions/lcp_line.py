"""LCP solving as a potential-line problem over 2d-bit configurations.

A configuration's first d bits pick which of y_i = 0 / s_i = 0 is tight
(bit set means the slack side), and the second d bits carry at most one set
bit marking the duplicate label; all second-half-empty configs sit at z = 0.
Valid configs decode to vertices of the augmented polytope by solving their
tight system exactly.  The successor follows the pivot edge the orientation
rule points along, but only when the covering variable z strictly drops, so
the potential floor(Delta^2 (Delta - z)) strictly climbs along the line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from ..errors import InvariantViolationError, PreconditionError
from ..lcp import (
    LcpInstance,
    LcpOutcome,
    Q1,
    Ray,
    _coords_from_tight,
    _dup_of_tight,
    _oriented_forward,
    _pivot_state,
    _start_state,
    _State,
    q2_witness_at,
    verify_lcp_solution,
)
from ..lines import BitConfig, EoplInstance, R2, eopl_verify
from ..qlinalg import Q, QVector, principal_minor


@dataclass(frozen=True)
class PlcpEoplContext:
    """Derived constants: config width n = 2d, entry bound, potential scale."""

    inst: LcpInstance
    n: int
    i_max: Fraction
    delta: Fraction
    m: int


def _ceil_log2(value: Fraction) -> int:
    if value <= 0:
        raise PreconditionError("log of a nonpositive value")
    m = 0
    while (value.denominator << m) < value.numerator:
        m += 1
    return m


@lru_cache(maxsize=None)
def make_context(inst: LcpInstance) -> PlcpEoplContext:
    """Set up the reduction; rejects trivial (q >= 0) and degenerate starts."""
    d = inst.d
    if all(x >= 0 for x in inst.q):
        raise PreconditionError("q >= 0 is solved by y = 0; nothing to reduce")
    _start_state(inst, perturbed=False)  # raises DegeneracyError on a tied minimum
    entries = [abs(inst.m[i, j]) for i in range(d) for j in range(d)]
    entries += [abs(x) for x in inst.q]
    i_max = max(entries)
    delta = Fraction(math.factorial(2 * d)) * i_max ** (2 * d + 1) + 1
    m = _ceil_log2(2 * delta**3)
    return PlcpEoplContext(inst=inst, n=2 * d, i_max=i_max, delta=delta, m=m)


def _invalid_sentinel(d: int) -> BitConfig:
    return BitConfig((0,) * (2 * d - 2) + (1, 1))


def _config_tight(ctx: PlcpEoplContext, u: BitConfig) -> Optional[frozenset[int]]:
    """Tight-constraint ids encoded by u, or None for dummy configs.

    A config whose duplicate-label bit is set but whose first-half bit at
    that position does not read the slack side cannot be the image of any
    vertex, so it is treated as a dummy as well.
    """
    d = ctx.inst.d
    bits = u.bits
    second = bits[d:]
    tau = sum(second)
    if tau > 1:
        return None
    if tau == 1:
        label = second.index(1)
        if bits[label] != 1:
            return None
        tight = {label, d + label}
    else:
        tight = {2 * d}
    for i in range(d):
        tight.add(i if bits[i] == 0 else d + i)
    return frozenset(tight)


@lru_cache(maxsize=None)
def _config_point(ctx: PlcpEoplContext, u: BitConfig) -> Optional[tuple[Fraction, ...]]:
    """Coordinates of the tight system's solution, or None when singular."""
    tight = _config_tight(ctx, u)
    if tight is None:
        return None
    coords = _coords_from_tight(ctx.inst, tight, perturbed=False)
    if coords is None:
        return None
    return tuple(c[0] for c in coords)


@lru_cache(maxsize=None)
def is_valid_config(ctx: PlcpEoplContext, u: BitConfig) -> bool:
    """Table-driven validity: dummies out, tight system solvable and feasible."""
    if u.width != ctx.n:
        raise PreconditionError(f"config width {u.width}, expected {ctx.n}")
    if u.is_zero():
        return True
    tight = _config_tight(ctx, u)
    if tight is None:
        return False
    point = _config_point(ctx, u)
    if point is None:
        return False
    if any(x < 0 for x in point):
        return False
    # a feasible point with extra tight coordinates is a degenerate vertex;
    # such configs are treated as dummies so decoding stays one-to-one
    if any(point[j] == 0 for j in range(len(point)) if j not in tight):
        return False
    return True


@lru_cache(maxsize=None)
def _start_point(ctx: PlcpEoplContext) -> tuple[QVector, QVector, Fraction]:
    state = _start_state(ctx.inst, perturbed=False)
    d = ctx.inst.d
    vals = [c[0] for c in state.coords]
    return QVector(tuple(vals[:d])), QVector(tuple(vals[d : 2 * d])), vals[2 * d]


def etoi(ctx: PlcpEoplContext, u: BitConfig) -> tuple[QVector, QVector, Fraction]:
    """Decode a config to polytope coordinates (y, s, z).

    The all-zeros config returns a point past the start of the path (never
    queried by the line procedures); invalid configs return all zeros.
    """
    d = ctx.inst.d
    if u.is_zero():
        _, _, z0 = _start_point(ctx)
        bumped = QVector(tuple(q_i + z0 + 1 for q_i in ctx.inst.q))
        return QVector.zero(d), bumped, z0 + 1
    if not is_valid_config(ctx, u):
        return QVector.zero(d), QVector.zero(d), Q(0)
    point = _config_point(ctx, u)
    return QVector(point[:d]), QVector(point[d : 2 * d]), point[2 * d]


def itoe(ctx: PlcpEoplContext, y: QVector, s: QVector, z: Fraction) -> BitConfig:
    """Encode polytope coordinates as a config; dummy sentinel when not a vertex."""
    d = ctx.inst.d
    if any(y[i] * s[i] != 0 for i in range(d)):
        return _invalid_sentinel(d)
    labels = [i for i in range(d) if y[i] == 0 and s[i] == 0]
    if len(labels) > 1:
        return _invalid_sentinel(d)
    bits = [0] * (2 * d)
    if labels:
        bits[d + labels[0]] = 1
    for i in range(d):
        if s[i] == 0:
            bits[i] = 1
    return BitConfig(tuple(bits))


def _state_of_config(ctx: PlcpEoplContext, u: BitConfig) -> _State:
    tight = _config_tight(ctx, u)
    point = _config_point(ctx, u)
    return _State(tuple((x,) for x in point), tight)


def _itoe_state(ctx: PlcpEoplContext, state: _State) -> BitConfig:
    d = ctx.inst.d
    vals = [c[0] for c in state.coords]
    return itoe(ctx, QVector(tuple(vals[:d])), QVector(tuple(vals[d : 2 * d])), vals[2 * d])


@lru_cache(maxsize=None)
def successor(ctx: PlcpEoplContext, u: BitConfig) -> BitConfig:
    """Step along the oriented pivot edge if z strictly drops; else stay put."""
    if not is_valid_config(ctx, u):
        return u
    if u.is_zero():
        return itoe(ctx, *_start_point(ctx))
    inst = ctx.inst
    d = inst.d
    state = _state_of_config(ctx, u)
    z = state.coords[2 * d][0]
    if z == 0:
        entering = 2 * d
        if not _oriented_forward(inst, state.tight, entering):
            return u
    else:
        label = _dup_of_tight(state.tight, d) - 1
        if _oriented_forward(inst, state.tight, label):
            entering = label
        else:
            entering = d + label
    result = _pivot_state(inst, state, entering)
    if isinstance(result, Ray):
        return u
    nstate, _ = result
    if z > nstate.coords[2 * d][0]:
        return _itoe_state(ctx, nstate)
    return u


@lru_cache(maxsize=None)
def predecessor(ctx: PlcpEoplContext, u: BitConfig) -> BitConfig:
    """Step back along the edge oriented into this config if z strictly rises."""
    if not is_valid_config(ctx, u):
        return u
    if u.is_zero():
        return u
    inst = ctx.inst
    d = inst.d
    state = _state_of_config(ctx, u)
    vals = [c[0] for c in state.coords]
    y0, s0, z0 = _start_point(ctx)
    if vals[:d] == list(y0) and vals[d : 2 * d] == list(s0) and vals[2 * d] == z0:
        return BitConfig.zeros(ctx.n)
    z = vals[2 * d]
    if z == 0:
        entering = 2 * d
        if _oriented_forward(inst, state.tight, entering):
            return u
    else:
        label = _dup_of_tight(state.tight, d) - 1
        if _oriented_forward(inst, state.tight, label):
            entering = d + label
        else:
            entering = label
    result = _pivot_state(inst, state, entering)
    if isinstance(result, Ray):
        return u
    nstate, _ = result
    if z < nstate.coords[2 * d][0]:
        return _itoe_state(ctx, nstate)
    return u


@lru_cache(maxsize=None)
def potential(ctx: PlcpEoplContext, u: BitConfig) -> int:
    """floor(Delta^2 (Delta - z)) on valid configs; 0 on dummies and the start."""
    if u.is_zero() or not is_valid_config(ctx, u):
        return 0
    z = _config_point(ctx, u)[2 * ctx.inst.d]
    return math.floor(ctx.delta**2 * (ctx.delta - z))


@lru_cache(maxsize=None)
def plcp_to_eopl(inst: LcpInstance) -> EoplInstance:
    """Build the potential-line instance whose line is the pivoting path."""
    ctx = make_context(inst)
    return EoplInstance(
        n=ctx.n,
        m=ctx.m,
        s=lambda u: successor(ctx, u),
        p=lambda u: predecessor(ctx, u),
        v=lambda u: potential(ctx, u),
    )


def eopl_sol_to_plcp(inst: LcpInstance, u: BitConfig) -> LcpOutcome:
    """Map a broken-line-end config back to a solution or minor witness."""
    ctx = make_context(inst)
    target = plcp_to_eopl(inst)
    classified = eopl_verify(target, u)
    if classified is None:
        raise PreconditionError(f"{u} does not solve the reduced instance")
    if isinstance(classified, R2):
        raise InvariantViolationError(
            "potential non-increase on a valid edge; the construction forbids this"
        )
    if u.is_zero():
        raise PreconditionError("the all-zeros config is excluded")
    y, s, z = etoi(ctx, u)
    if z == 0:
        if not verify_lcp_solution(inst, y):
            raise InvariantViolationError("z = 0 config decoded to an infeasible point")
        return Q1(y)
    witness = q2_witness_at(inst, y)
    if principal_minor(inst.m, witness.index_set) > 0:
        raise InvariantViolationError("extracted witness failed re-verification")
    return witness
