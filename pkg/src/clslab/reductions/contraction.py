"""Reductions among the contraction and local-opt circuit problems.

Each transformer builds the target's circuits by composition and fixes the
target constants as exact rationals; each back-mapper re-verifies on the
source before returning, so a certificate is never issued on faith.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from ..errors import InvariantViolationError, PreconditionError
from ..circuits import (
    C1,
    C2a,
    C2b,
    CM1,
    CM2,
    INF,
    M1,
    M2a,
    M2b,
    M2c,
    ArithCircuit,
    CircuitBuilder,
    CloInstance,
    CloSolution,
    ContractionInstance,
    ContractionSolution,
    MmcInstance,
    MmcSolution,
    NormOrder,
    circuit_eval,
    clo_verify,
    contraction_verify,
    mmc_verify,
    unit_grid,
)


def _compose_gap_distance(f: ArithCircuit, d: ArithCircuit, dim: int) -> ArithCircuit:
    """p(x) = d(f(x), x) as a single circuit."""
    b = CircuitBuilder(dim)
    fx = b.inline(f, list(range(dim)))
    out = b.inline(d, fx + list(range(dim)))
    return b.build(out)


def _pair_potential_distance(p: ArithCircuit, dim: int) -> ArithCircuit:
    """d(x, y) = p(x) + p(y) + 1 as a circuit on 2*dim inputs."""
    b = CircuitBuilder(2 * dim)
    px = b.inline(p, list(range(dim)))
    py = b.inline(p, list(range(dim, 2 * dim)))
    one = b.const(1)
    return b.build([b.add(b.add(px[0], py[0]), one)])


def _norm_gap_potential(f: ArithCircuit, dim: int, r: NormOrder) -> ArithCircuit:
    """p(x) = ||f(x) - x|| as a circuit, for r in {1, inf}."""
    b = CircuitBuilder(dim)
    fx = b.inline(f, list(range(dim)))
    parts = [b.abs(b.sub(fx[i], i)) for i in range(dim)]
    if r == 1:
        return b.build([b.sum(parts)])
    if r == INF:
        return b.build([b.max_chain(parts)])
    raise PreconditionError("norm-gap potentials support only r in {1, inf}")


# ----------------------------------------------------------------------------
# contraction with a supplied distance -> local opt


def gc_to_clo(inst: MmcInstance) -> CloInstance:
    """Potential p(x) = d(f(x), x); slack (1-c)*eps, continuity (lam+1)*delta_d."""
    return CloInstance(
        f=inst.f,
        p=_compose_gap_distance(inst.f, inst.d, inst.dim),
        eps=(1 - inst.c) * inst.eps,
        lam=(inst.lam + 1) * inst.delta_d,
        r=inst.r,
        dim=inst.dim,
    )


def clo_sol_to_gc(inst: MmcInstance, sol: CloSolution) -> MmcSolution:
    """An eps-stall is a near-fixpoint or a contraction violation one step out."""
    target = gc_to_clo(inst)
    if not clo_verify(target, sol):
        raise PreconditionError("candidate does not solve the reduced instance")
    if isinstance(sol, C1):
        x = sol.x
        if mmc_verify(inst, M1(x)):
            return M1(x)
        mapped: MmcSolution = M2a(circuit_eval(inst.f, x), x)
        if mmc_verify(inst, mapped):
            return mapped
        raise InvariantViolationError("stalled point is neither a fixpoint nor a violation")
    if isinstance(sol, C2a):
        mapped = M2c(sol.x, sol.y)
        if mmc_verify(inst, mapped):
            return mapped
        raise InvariantViolationError("map-continuity violation did not survive back-mapping")
    # C2b: the potential jump blames either d's continuity on the image pairs
    # or f's continuity on the original pair
    fx = circuit_eval(inst.f, sol.x)
    fy = circuit_eval(inst.f, sol.y)
    for mapped in (M2b(fx, sol.x, fy, sol.y), M2c(sol.x, sol.y)):
        if mmc_verify(inst, mapped):
            return mapped
    raise InvariantViolationError("potential-continuity violation did not survive back-mapping")


# ----------------------------------------------------------------------------
# local opt -> contraction with a supplied distance


def _continuity_factor_bound(lam: Fraction, r: NormOrder) -> Fraction:
    """A rational upper bound on 2^(1/r - 1) * lam."""
    if r == 1:
        return lam
    if r == INF:
        return lam / 2
    # dyadic round-up at 1/64 granularity for finite r >= 2
    factor = Fraction(math.ceil(2 ** (1 / r - 1) * 64 + 2**-20), 64)
    return factor * lam


@lru_cache(maxsize=None)
def clo_to_mmc(inst: CloInstance) -> MmcInstance:
    """Distance p(x) + p(y) + 1; self-distance stays above eps so only
    violation-type solutions exist in the target."""
    probe = [x for x in unit_grid(inst.dim, 4)]
    for x in probe:
        if circuit_eval(inst.p, x)[0] < 0:
            raise PreconditionError(f"potential is negative at {x}; distance needs p >= 0")
    if inst.eps >= 1:
        raise PreconditionError("slack must stay below the baked-in self-distance 1")
    return MmcInstance(
        f=inst.f,
        d=_pair_potential_distance(inst.p, inst.dim),
        r=inst.r,
        eps=inst.eps,
        c=1 - inst.eps / 4,
        delta_d=inst.lam,
        lam=_continuity_factor_bound(inst.lam, inst.r),
        dim=inst.dim,
    )


def mmc_sol_to_clo(inst: CloInstance, sol: MmcSolution) -> CloSolution:
    target = clo_to_mmc(inst)
    if isinstance(sol, M1):
        raise PreconditionError(
            "near-fixpoints cannot exist: the distance is at least 1 > eps"
        )
    if not mmc_verify(target, sol):
        raise PreconditionError("candidate does not solve the reduced instance")
    if isinstance(sol, M2a):
        # the contraction shortfall forces an eps-stall at one of the pair
        for point in (sol.x, sol.y):
            if clo_verify(inst, C1(point)):
                return C1(point)
        raise InvariantViolationError("contraction violation back-mapped to no stall")
    if isinstance(sol, M2b):
        for mapped in (C2b(sol.x, sol.x2), C2b(sol.y, sol.y2)):
            if clo_verify(inst, mapped):
                return mapped
        raise InvariantViolationError("distance-continuity violation did not survive back-mapping")
    if isinstance(sol, M2c):
        mapped = C2a(sol.x, sol.y)
        if clo_verify(inst, mapped):
            return mapped
        raise InvariantViolationError("map-continuity violation did not survive back-mapping")
    raise PreconditionError("axiom violations cannot arise: the built distance satisfies them")


# ----------------------------------------------------------------------------
# dropping the axiom-violation clause is an identity embedding


def mmc_to_gc(inst: MmcInstance) -> MmcInstance:
    """Identity embedding: the target forbids axiom-violation answers."""
    return inst


def gc_sol_to_mmc(inst: MmcInstance, sol: MmcSolution) -> MmcSolution:
    """Any solution without the axiom-violation shape is a source solution verbatim."""
    if not mmc_verify(inst, sol):
        raise PreconditionError("candidate does not solve the instance")
    return sol


# ----------------------------------------------------------------------------
# plain contraction -> local opt


def contraction_to_clo(inst: ContractionInstance) -> CloInstance:
    """Potential ||f(x) - x||; slack (1-c)*delta, continuity c+1."""
    return CloInstance(
        f=inst.f,
        p=_norm_gap_potential(inst.f, inst.dim, inst.r),
        eps=(1 - inst.c) * inst.delta,
        lam=inst.c + 1,
        r=inst.r,
        dim=inst.dim,
    )


def clo_sol_to_contraction(inst: ContractionInstance, sol: CloSolution) -> ContractionSolution:
    target = contraction_to_clo(inst)
    if not clo_verify(target, sol):
        raise PreconditionError("candidate does not solve the reduced instance")
    if isinstance(sol, C1):
        x = sol.x
        if contraction_verify(inst, CM1(x)):
            return CM1(x)
        mapped = CM2(x, circuit_eval(inst.f, x))
        if contraction_verify(inst, mapped):
            return mapped
        raise InvariantViolationError("stalled point is neither a fixpoint nor a violation")
    mapped = CM2(sol.x, sol.y)
    if contraction_verify(inst, mapped):
        return mapped
    raise InvariantViolationError("continuity violation did not survive back-mapping")
