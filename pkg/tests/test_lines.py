import random

import pytest

from clslab import (
    BudgetExceededError,
    PreconditionError,
    R1,
    R2,
    T1,
    T2,
    T3,
    enumerate_solutions,
    eoml_verify,
    eopl_verify,
    follow_line,
    validate_instance,
)
from clslab.lines import (
    BitConfig,
    all_configs,
    dump_line_table,
    format_line_solution,
    load_line_table,
    parse_line_solution,
    table_instance,
    verify_solution,
)
from support import bits, gen_eoml_path, gen_eoml_random


def two_bit_path(kind, vals, m=None):
    """00 -> 01 -> 10, everything else a self loop."""
    cfgs = list(all_configs(2))
    s = {c: c for c in cfgs}
    p = {c: c for c in cfgs}
    path = [bits("00"), bits("01"), bits("10")]
    for a, b in zip(path, path[1:]):
        s[a] = b
        p[b] = a
    v = dict(zip(path, vals))
    v[bits("11")] = 0
    return table_instance(kind, 2, s, p, v, m)


def test_eopl_verify_examples():
    inst = two_bit_path("EOPL", [0, 1, 2], m=2)
    assert eopl_verify(inst, bits("10")) == R1(bits("10"))
    assert eopl_verify(inst, bits("01")) is None
    bent = two_bit_path("EOPL", [0, 1, 1], m=2)
    assert eopl_verify(bent, bits("01")) == R2(bits("01"))


def test_eoml_verify_examples():
    inst = two_bit_path("EOML", [1, 2, 3])
    assert eoml_verify(inst, bits("10")) == T1(bits("10"))
    flat = two_bit_path("EOML", [1, 1, 3])
    assert eoml_verify(flat, bits("01")) == T2(bits("01"))
    # odometer values live in [0, 2^n]; 4 is the largest legal jump target here
    jump = two_bit_path("EOML", [1, 2, 4])
    assert eoml_verify(jump, bits("01")) == T3(bits("01"))


def test_follow_line_examples():
    inst = two_bit_path("EOPL", [0, 1, 2], m=2)
    sol, trace = follow_line(inst, 8)
    assert sol == R1(bits("10"))
    assert [(str(x), v) for x, v in trace] == [("00", 0), ("01", 1), ("10", 2)]

    stuck = two_bit_path("EOPL", [0, 0, 2], m=2)
    sol, trace = follow_line(stuck, 8)
    assert sol == R2(bits("00")) and len(trace) == 1

    with pytest.raises(BudgetExceededError) as err:
        follow_line(inst, 1)
    assert len(err.value.trace) == 2


def test_enumerate_solutions_examples():
    inst = two_bit_path("EOPL", [0, 1, 2], m=2)
    assert enumerate_solutions(inst) == [R1(bits("10"))]
    with pytest.raises(PreconditionError):
        enumerate_solutions(inst, limit_n=1)
    eoml = two_bit_path("EOML", [1, 2, 3])
    sols = enumerate_solutions(eoml)
    assert sols == [T1(bits("10"))]


def test_enumerate_single_edge_instance():
    # one real edge out of the start, everything else a self loop: the
    # solutions are exactly that edge's endpoints
    cfgs = list(all_configs(2))
    s = {c: c for c in cfgs}
    p = {c: c for c in cfgs}
    v = {c: 0 for c in cfgs}
    s[bits("00")] = bits("01")
    p[bits("01")] = bits("00")
    v[bits("01")] = 1
    inst = table_instance("EOPL", 2, s, p, v, 2)
    sols = enumerate_solutions(inst)
    assert sols == [R1(bits("01"))]
    zero_v = dict(v)
    zero_v[bits("01")] = 0
    flat = table_instance("EOPL", 2, s, p, zero_v, 2)
    assert enumerate_solutions(flat) == [R2(bits("00")), R1(bits("01"))]


def test_validate_instance_examples():
    good = two_bit_path("EOPL", [0, 1, 2], m=2)
    assert validate_instance(good)
    bad_v = two_bit_path("EOPL", [1, 2, 3], m=2)
    report = validate_instance(bad_v)
    assert not report and any("V(0^n)" in t for t in report.violations)
    cfgs = list(all_configs(2))
    self_start = table_instance(
        "EOPL", 2, {c: c for c in cfgs}, {c: c for c in cfgs}, {c: 0 for c in cfgs}, 2
    )
    assert not validate_instance(self_start)


def test_follow_result_reverifies_and_enumerate_is_superset():
    rng = random.Random(5)
    for _ in range(30):
        inst = gen_eoml_random(rng, rng.randint(2, 5))
        assert validate_instance(inst)
        sol, _ = follow_line(inst, 1 << inst.n)
        assert verify_solution(inst, sol.x) is not None
        assert sol in enumerate_solutions(inst)


def test_totality_at_desk_scale():
    rng = random.Random(9)
    for n in (3, 6, 9, 12):
        inst = gen_eoml_path(rng, min(n, 6), corrupt=False) if n <= 6 else gen_eoml_random(rng, n)
        sol, _ = follow_line(inst, 1 << inst.n)
        assert verify_solution(inst, sol.x) is not None


def test_truth_table_round_trip():
    inst = two_bit_path("EOPL", [0, 1, 2], m=2)
    text = dump_line_table(inst)
    again = load_line_table(text)
    assert again.n == inst.n and again.m == inst.m
    for x in all_configs(2):
        assert again.S(x) == inst.S(x)
        assert again.P(x) == inst.P(x)
        assert again.V(x) == inst.V(x)


def test_solution_line_round_trip():
    for sol in (R1(bits("10")), R2(bits("01")), T3(bits("11"))):
        assert parse_line_solution(format_line_solution(sol)) == sol


def test_bitconfig_helpers():
    x = BitConfig.from_int(5, 4)
    assert str(x) == "0101" and x.to_int() == 5
    a, b = x.split(2)
    assert str(a) == "01" and str(b) == "01"
    assert str(a.concat(b)) == "0101"
    assert BitConfig.zeros(3).is_zero()
