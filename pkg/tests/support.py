"""Seeded generators and hand-built fixtures shared across the test modules."""

from __future__ import annotations

import random
from fractions import Fraction as F

from clslab import (
    CircuitBuilder,
    CloInstance,
    ContractionInstance,
    DegeneracyError,
    INF,
    LcpInstance,
    MmcInstance,
    QMatrix,
    QVector,
    is_p_matrix,
    lemke_solve,
)
from clslab.circuits import identity_circuit, norm_distance_circuit
from clslab.lcp import Q1, Q2
from clslab.lines import BitConfig, all_configs, table_instance
from clslab.reductions.lcp_line import (
    is_valid_config,
    make_context,
    potential,
    predecessor,
    successor,
)

bits = BitConfig.from_string


def make_lcp(rows, q) -> LcpInstance:
    return LcpInstance(QMatrix.of(rows), QVector.of(q))


def random_lcp(rng: random.Random, d: int, span: int = 3) -> LcpInstance:
    rows = [[rng.randint(-span, span) for _ in range(d)] for _ in range(d)]
    q = [rng.randint(-span, span) for _ in range(d)]
    return make_lcp(rows, q)


def random_triangular_lcp(rng: random.Random, d: int, span: int = 3) -> LcpInstance:
    """Triangular with positive diagonal: every principal minor is a diagonal product."""
    rows = [[0] * d for _ in range(d)]
    for i in range(d):
        rows[i][i] = rng.randint(1, span)
        for j in range(i + 1, d):
            rows[i][j] = rng.randint(-span, span)
    if rng.random() < 0.5:
        rows = [list(r) for r in zip(*rows)]
    q = [rng.randint(-span, span) for _ in range(d)]
    return make_lcp(rows, q)


def gen_p_lcp(rng: random.Random, d: int, require_negative_q: bool = True) -> LcpInstance:
    """A P-matrix instance that plain pivoting solves without ties."""
    while True:
        inst = (random_lcp if rng.random() < 0.5 else random_triangular_lcp)(rng, d)
        if require_negative_q and min(inst.q) >= 0:
            continue
        if not is_p_matrix(inst.m):
            continue
        try:
            result = lemke_solve(inst)
        except DegeneracyError:
            continue
        assert isinstance(result.outcome, Q1)
        return inst


def gen_nonp_lcp(rng: random.Random, d: int) -> LcpInstance:
    """A non-P instance where plain pivoting ends in a minor witness."""
    while True:
        inst = random_lcp(rng, d)
        if min(inst.q) >= 0 or is_p_matrix(inst.m):
            continue
        try:
            result = lemke_solve(inst)
        except DegeneracyError:
            continue
        if isinstance(result.outcome, Q2):
            return inst


def gen_reduction_safe_lcp(rng: random.Random, d: int) -> LcpInstance:
    """An instance whose whole config space decodes without degeneracy."""
    while True:
        inst = random_lcp(rng, d)
        if min(inst.q) >= 0:
            continue
        try:
            ctx = make_context(inst)
            for u in all_configs(2 * d):
                is_valid_config(ctx, u)
                successor(ctx, u)
                predecessor(ctx, u)
                potential(ctx, u)
        except DegeneracyError:
            continue
        return inst


# ----------------------------------------------------------------------------
# line-instance generators


def gen_eoml_random(rng: random.Random, n: int):
    """Arbitrary oracle tables with the start conditions patched in."""
    cfgs = list(all_configs(n))
    s = {c: rng.choice(cfgs) for c in cfgs}
    p = {c: rng.choice(cfgs) for c in cfgs}
    v = {c: rng.randint(0, 1 << n) for c in cfgs}
    zero = BitConfig.zeros(n)
    s[zero] = rng.choice(cfgs[1:])
    p[zero] = zero
    v[zero] = 1
    return table_instance("EOML", n, s, p, v)


def gen_eoml_path(rng: random.Random, n: int, corrupt: bool = True):
    """A simple path from the start with a correct odometer, optionally corrupted."""
    cfgs = list(all_configs(n))
    zero = cfgs[0]
    rest = cfgs[1:]
    rng.shuffle(rest)
    length = rng.randint(1, min(len(rest), (1 << n) - 1))
    path = [zero] + rest[:length]
    s = {c: c for c in cfgs}
    p = {c: c for c in cfgs}
    v = {c: 0 for c in cfgs}
    for a, b in zip(path, path[1:]):
        s[a] = b
        p[b] = a
    for i, c in enumerate(path):
        v[c] = i + 1
    if corrupt and length >= 2 and rng.random() < 0.7:
        victim = rng.choice(path[1:])
        v[victim] = rng.randint(0, 1 << n)
    v[zero] = 1
    return table_instance("EOML", n, s, p, v)


def gen_eopl_monotone(rng: random.Random, n: int, m: int):
    """Disjoint paths with strictly increasing potentials; all else self-loops."""
    cfgs = list(all_configs(n))
    zero = cfgs[0]
    rest = cfgs[1:]
    rng.shuffle(rest)
    s = {c: c for c in cfgs}
    p = {c: c for c in cfgs}
    v = {c: rng.randint(0, (1 << m) - 1) for c in cfgs}

    def lay_path(path, start_value):
        value = start_value
        values = [value]
        for node in path[1:]:
            value += rng.randint(1, 3)
            values.append(value)
        if values[-1] >= 1 << m:
            return False
        for a, b in zip(path, path[1:]):
            s[a] = b
            p[b] = a
        for node, val in zip(path, values):
            v[node] = val
        return True

    main_len = rng.randint(1, min(4, len(rest)))
    used = main_len
    while not lay_path([zero] + rest[:main_len], 0):
        main_len = max(1, main_len - 1)
        used = main_len
    if len(rest) - used >= 2 and rng.random() < 0.6:
        extra_len = rng.randint(2, min(3, len(rest) - used))
        lay_path(rest[used : used + extra_len], rng.randint(1, 4))
    return table_instance("EOPL", n, s, p, v, m)


# ----------------------------------------------------------------------------
# circuit fixtures


def scale_shift_map(dim: int, factor, shifts) -> "CircuitBuilder":
    """f(x)_i = factor * x_i + shifts_i as a circuit."""
    b = CircuitBuilder(dim)
    fac = b.const(factor)
    outs = []
    for i in range(dim):
        node = b.mul(i, fac)
        if F(shifts[i]) != 0:
            node = b.add(node, b.const(shifts[i]))
        outs.append(node)
    return b.build(outs)


def kinked_map(dim: int) -> "CircuitBuilder":
    """f(x)_i = clamp(2 x_i - 1/4, 0, 1): slope two inside, flat at the ends."""
    b = CircuitBuilder(dim)
    two = b.const(2)
    quarter = b.const("1/4")
    zero = b.const(0)
    one = b.const(1)
    outs = []
    for i in range(dim):
        outs.append(b.min(b.max(b.sub(b.mul(i, two), quarter), zero), one))
    return b.build(outs)


def coordinate_potential(dim: int) -> "CircuitBuilder":
    """p(x) = x_1."""
    return CircuitBuilder(dim).build([0])


def mean_potential(dim: int) -> "CircuitBuilder":
    b = CircuitBuilder(dim)
    return b.build([b.mul(b.sum(list(range(dim))), b.const(F(1, dim)))])


def contraction_catalog() -> list[ContractionInstance]:
    half1 = scale_shift_map(1, "1/2", [0])
    half1b = scale_shift_map(1, "1/2", ["1/4"])
    half3 = scale_shift_map(3, "1/2", ["1/8", "1/4", "3/8"])
    return [
        ContractionInstance(f=half1, r=1, eps=F(1, 4), c=F(1, 2), delta=F(1, 2), dim=1),
        ContractionInstance(f=half1b, r=1, eps=F(1, 4), c=F(1, 2), delta=F(1, 4), dim=1),
        ContractionInstance(f=half3, r=INF, eps=F(1, 4), c=F(1, 2), delta=F(1, 2), dim=3),
        ContractionInstance(f=identity_circuit(1), r=1, eps=F(1, 4), c=F(1, 2), delta=F(1, 8), dim=1),
        ContractionInstance(f=kinked_map(1), r=1, eps=F(1, 4), c=F(1, 2), delta=F(1, 8), dim=1),
    ]


def gc_catalog() -> list[tuple[MmcInstance, QVector]]:
    """Contraction-with-distance instances paired with iteration starts."""
    half1 = scale_shift_map(1, "1/2", [0])
    half3 = scale_shift_map(3, "1/2", ["1/8", "1/4", "3/8"])
    d1 = norm_distance_circuit(1, 1)
    d3 = norm_distance_circuit(3, 1)
    d3inf = norm_distance_circuit(3, INF)
    return [
        (
            MmcInstance(f=half1, d=d1, r=1, eps=F(1, 4), c=F(1, 2), delta_d=F(1), lam=F(1), dim=1),
            QVector.of([1]),
        ),
        (
            MmcInstance(f=half3, d=d3, r=1, eps=F(1, 4), c=F(1, 2), delta_d=F(1), lam=F(1), dim=3),
            QVector.of([1, 1, 1]),
        ),
        (
            # claimed factor 1/4 is false for the halving map: the stall
            # point sits farther than eps from its image
            MmcInstance(f=half1, d=d1, r=1, eps=F(1, 5), c=F(1, 4), delta_d=F(1), lam=F(1), dim=1),
            QVector.of(["3/5"]),
        ),
        (
            MmcInstance(f=identity_circuit(1), d=d1, r=1, eps=F(1, 4), c=F(1, 2), delta_d=F(1), lam=F(1), dim=1),
            QVector.of(["1/3"]),
        ),
        (
            # slope-two kink against a claimed 1-continuity of f
            MmcInstance(f=kinked_map(1), d=d1, r=1, eps=F(1, 8), c=F(1, 2), delta_d=F(1), lam=F(1), dim=1),
            QVector.of(["3/10"]),
        ),
        (
            MmcInstance(f=half3, d=d3inf, r=INF, eps=F(1, 4), c=F(1, 2), delta_d=F(1), lam=F(1), dim=3),
            QVector.of([1, "1/2", 1]),
        ),
    ]


def clo_catalog() -> list[tuple[CloInstance, QVector]]:
    half1 = scale_shift_map(1, "1/2", [0])
    half3 = scale_shift_map(3, "1/2", ["1/8", "1/4", "3/8"])
    return [
        (
            CloInstance(f=half1, p=coordinate_potential(1), eps=F(1, 2), lam=F(1), r=1, dim=1),
            QVector.of([1]),
        ),
        (
            CloInstance(f=half3, p=coordinate_potential(3), eps=F(1, 2), lam=F(1), r=1, dim=3),
            QVector.of([1, 1, 1]),
        ),
        (
            CloInstance(f=half3, p=mean_potential(3), eps=F(1, 2), lam=F(1), r=1, dim=3),
            QVector.of([1, "1/2", "3/4"]),
        ),
        (
            CloInstance(f=identity_circuit(1), p=coordinate_potential(1), eps=F(1, 2), lam=F(1), r=1, dim=1),
            QVector.of(["2/3"]),
        ),
        (
            CloInstance(f=half1, p=coordinate_potential(1), eps=F(1, 2), lam=F(1), r=INF, dim=1),
            QVector.of(["1/8"]),
        ),
    ]
